#pragma once

#include "macsim/adversary.hpp"
#include "macsim/channel.hpp"
#include "macsim/metrics.hpp"
#include "macsim/station.hpp"

#include <deque>
#include <functional>
#include <variant>

namespace macsim
{

struct EngineOptions
{
  // Conservation, synchrony, collision-freeness and per-algorithm structural checks every round.
  bool check_invariants = false;
};

class Engine;
using RoundObserver = std::function<void(const Engine &, const RoundRecord &)>;

// One execution of an algorithm on a channel against an adversary. Each round:
// (1) collect the decisions committed last round, (2) resolve the channel and
// dequeue a heard packet, (3) apply the adversary's injections, (4) let stations
// observe and commit their next decision.
class Engine
{
public:
  Engine(ChannelConfig config, AlgorithmPtr algorithm, Adversary &adversary, std::uint64_t seed,
         EngineOptions options = {});

  const RoundRecord &run_round();

  Round round() const { return round_; }
  const ChannelConfig &config() const { return config_; }
  const Algorithm &algorithm() const { return *algorithm_; }
  std::span<const StationPtr> stations() const { return stations_; }
  const Station &station(StationId s) const { return *stations_.at(s); }
  const std::deque<Packet> &queue(StationId s) const { return queues_.at(s); }
  std::span<const std::size_t> queue_sizes() const { return queue_sizes_; }
  std::size_t total_queued() const { return total_queued_; }
  std::uint64_t injected_total() const { return injected_total_; }
  std::uint64_t delivered_total() const { return delivered_total_; }
  const Feedback &last_feedback() const { return feedback_; }

  void set_observer(RoundObserver observer) { observer_ = std::move(observer); }

private:
  void check_invariants() const;

  ChannelConfig config_;
  AlgorithmPtr algorithm_;
  Adversary &adversary_;
  EngineOptions options_;
  Category category_;

  std::vector<StationPtr> stations_;
  std::vector<std::deque<Packet>> queues_;
  std::vector<std::size_t> queue_sizes_;
  std::vector<bool> engaged_;
  std::vector<std::size_t> injected_now_;
  std::vector<bool> empty_before_injection_;

  std::vector<Transmission> transmissions_;
  std::vector<StationId> senders_;
  InjectionPlan plan_;
  RoundRecord record_;
  Feedback feedback_;

  Round round_ = 0;
  PacketId next_packet_id_ = 0;
  std::size_t total_queued_ = 0;
  std::uint64_t injected_total_ = 0;
  std::uint64_t delivered_total_ = 0;
  RoundObserver observer_;
};

struct FixedHorizon
{
  Round rounds = 0;
};

struct StageVerdict
{
  std::size_t max_stages = 200;
  Round max_rounds = 10'000'000;
};

using StopRule = std::variant<FixedHorizon, StageVerdict>;

struct RunOptions
{
  bool check_invariants = false;
  bool keep_log = false;
  std::size_t stage_size = kDefaultStageSize;
  RoundObserver observer;
};

struct ExecutionReport
{
  MetricsSummary summary;
  std::vector<StageRecord> stages;
  std::vector<RoundRecord> log;  // only with RunOptions::keep_log
};

// Throws IncompatibleAlgorithm when the algorithm needs collision detection the channel lacks.
void validate_compatibility(const ChannelConfig &config, const Algorithm &algorithm);

ExecutionReport run_execution(const ChannelConfig &config, AlgorithmPtr algorithm, Adversary &adversary,
                              StopRule stop, std::uint64_t seed, const RunOptions &options = {});

} // namespace macsim
