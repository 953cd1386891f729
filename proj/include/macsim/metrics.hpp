#pragma once

#include "macsim/types.hpp"

#include <optional>
#include <span>
#include <vector>

namespace macsim
{

inline constexpr std::size_t kDefaultStageSize = 5000;
inline constexpr double kStabilizationTolerance = 0.05;
inline constexpr std::size_t kStabilizationWindow = 4;

enum class Verdict : std::uint8_t
{
  Stabilized,
  Undecided,
  Unstable,
};

std::string to_string(Verdict v);

struct Stabilization
{
  Verdict verdict = Verdict::Undecided;
  double value = 0.0;             // mean of the qualifying window
  std::size_t window_start = 0;   // index of its first stage
};

// Relative gap between two stage averages, measured against the smaller one.
double relative_gap(double a, double b);

// Stabilized on the first window of four consecutive stages whose pairwise
// relative gaps are all below 5%. Unstable only when the caller's caps ran out.
Stabilization detect_stabilization(std::span<const double> averages, bool caps_exceeded = false);

struct StageRecord
{
  double average = 0.0;
  PacketId first_packet = 0;
  Round closed_round = 0;
};

// Marked-packet batches. A stage marks the next K generated packets and
// closes once all of them have been heard; marking for the next stage starts
// with the first packet generated after the closure.
class StageLedger
{
public:
  explicit StageLedger(std::size_t stage_size = kDefaultStageSize);

  void record_round(const RoundRecord &rec);

  std::size_t stage_size() const { return stage_size_; }
  const std::vector<StageRecord> &stages() const { return stages_; }
  std::vector<double> averages() const;

  // Current (open) stage bookkeeping.
  std::size_t marked() const { return marked_; }
  std::size_t outstanding() const { return outstanding_; }
  bool is_marked(PacketId id) const;

private:
  std::size_t stage_size_;
  std::vector<StageRecord> stages_;
  PacketId batch_start_ = 0;
  std::size_t marked_ = 0;
  std::size_t outstanding_ = 0;
  std::uint64_t delay_sum_ = 0;
};

struct MetricsSummary
{
  std::vector<double> stage_averages;
  Verdict verdict = Verdict::Undecided;
  std::optional<double> average_latency;  // set when stabilized
  Round max_delay = 0;
  std::size_t max_total_queue = 0;
  Round rounds = 0;
  std::uint64_t injected = 0;
  std::uint64_t delivered = 0;
};

// Running maxima plus the stage ledger.
class MetricsRecorder
{
public:
  explicit MetricsRecorder(std::size_t stage_size = kDefaultStageSize) : ledger_(stage_size) {}

  void record_round(const RoundRecord &rec);

  const StageLedger &ledger() const { return ledger_; }
  Round max_delay() const { return max_delay_; }
  std::size_t max_total_queue() const { return max_total_queue_; }
  Round rounds() const { return rounds_; }
  std::uint64_t injected() const { return injected_; }
  std::uint64_t delivered() const { return delivered_; }

private:
  StageLedger ledger_;
  Round max_delay_ = 0;
  std::size_t max_total_queue_ = 0;
  Round rounds_ = 0;
  std::uint64_t injected_ = 0;
  std::uint64_t delivered_ = 0;
};

} // namespace macsim
