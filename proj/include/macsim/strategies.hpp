#pragma once

#include "macsim/adversary.hpp"

#include <iosfwd>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace macsim
{

// Worst-case injection patterns. Every strategy draws from its own (rho, beta)
// bucket, plus per-station (rho_i, beta) buckets under individual rates, and
// activates at most one passive station per round. Plans are therefore
// admissible by construction; the oracles double-check this in tests.
class StrategyAdversary : public Adversary
{
public:
  void plan(const AdversaryView &view, InjectionPlan &out) final;

  const AdversaryType &type() const { return type_; }

protected:
  StrategyAdversary(AdversaryType type, std::size_t n, std::optional<IndividualRates> rates);

  virtual void propose(const AdversaryView &view) = 0;

  // Adds up to `want` packets for station s; returns how many the buckets allow.
  std::uint64_t grant(StationId s, std::uint64_t want);
  std::uint64_t global_available() const { return global_.available(); }
  bool can_activate() const { return !activated_; }
  // Active after this round's grants so far.
  bool active_now(StationId s) const;

private:
  AdversaryType type_;
  Bucket global_;
  std::vector<Bucket> per_station_;
  const AdversaryView *view_ = nullptr;
  InjectionPlan *out_ = nullptr;
  std::vector<std::uint64_t> granted_;
  bool activated_ = false;
};

// Full power into every station the buckets allow. Stations are served
// starting from the one the token left most recently, so fresh packets wait
// for almost a whole cycle.
class RrwSaturator final : public StrategyAdversary
{
public:
  RrwSaturator(AdversaryType type, std::size_t n, std::optional<IndividualRates> rates);

protected:
  void propose(const AdversaryView &view) override;

private:
  std::size_t n_;
  StationId token_ = 0;
};

// Full power into every station, lowest id first.
class SrrSaturator final : public StrategyAdversary
{
public:
  SrrSaturator(AdversaryType type, std::size_t n, std::optional<IndividualRates> rates);

protected:
  void propose(const AdversaryView &view) override;

private:
  std::size_t n_;
};

// Activates three stations in distinct rounds of every double segment (eight
// rounds) and spends the remaining budget re-injecting into them.
class QuadrupleSaturator final : public StrategyAdversary
{
public:
  QuadrupleSaturator(AdversaryType type, std::size_t n);

protected:
  void propose(const AdversaryView &view) override;

private:
  std::size_t n_;
  std::vector<StationId> recent_;
  Round double_segment_ = 0;
  std::size_t activated_in_segment_ = 0;
};

// Warm-up: activate a new station whenever possible and load it fully. Then
// one dedicated packet joins at the back of the queue, and afterwards only
// stations ahead of it receive packets.
class QueueBackoffDelayer final : public StrategyAdversary
{
public:
  QueueBackoffDelayer(AdversaryType type, std::size_t n, Round warmup);

  std::optional<PacketId> dedicated_packet() const { return dedicated_; }
  std::optional<StationId> dedicated_station() const { return dedicated_station_; }

protected:
  void propose(const AdversaryView &view) override;

private:
  std::size_t n_;
  Round warmup_;
  std::optional<StationId> newest_;
  std::optional<PacketId> dedicated_;
  std::optional<StationId> dedicated_station_;
  std::vector<bool> ahead_;
};

// Keeps a Counting-Backoff stack two deep: the bottom station gets two packets
// at round 0, a second station collides with it, and from then on a new joiner
// is activated in every silent round so the bottom station is pushed down again
// each time it returns to the top.
class CountingStarver final : public StrategyAdversary
{
public:
  CountingStarver(AdversaryType type, std::size_t n);

  StationId target() const { return 0; }
  // Packets the bottom station received in round 0.
  const std::vector<PacketId> &target_packets() const { return target_packets_; }

protected:
  void propose(const AdversaryView &view) override;

private:
  std::size_t n_;
  std::vector<PacketId> target_packets_;
};

class TraceFormatError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

class TraceExhausted : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

// One line per round: a single total ("3"), explicit "station:count" pairs
// ("0:2,3:1"), or a blank line for no injection.
struct TraceLine
{
  std::optional<std::uint64_t> total;
  std::vector<PlanEntry> entries;

  bool individual() const { return !total.has_value(); }
  std::uint64_t sum() const;
};

std::vector<TraceLine> parse_trace(std::istream &in);
std::vector<TraceLine> read_trace_file(const std::string &path);

// Per-round totals, and counts[t][s] for n stations (totals-only lines go to station 0).
std::vector<std::uint64_t> trace_totals(const std::vector<TraceLine> &lines);
std::vector<std::vector<std::uint64_t>> trace_counts(const std::vector<TraceLine> &lines, std::size_t n);

// Replays a trace. Totals-only lines go to the lowest-id active station, or
// activate the lowest-id passive one when none is active.
class TraceAdversary final : public Adversary
{
public:
  explicit TraceAdversary(std::vector<TraceLine> lines) : lines_(std::move(lines)) {}
  void plan(const AdversaryView &view, InjectionPlan &out) override;

private:
  std::vector<TraceLine> lines_;
};

const std::vector<std::string> &strategy_names();

// Strategy by name: rrw-saturator, srr-saturator, quadruple-saturator,
// queue-backoff-delayer, counting-starver. Saturators use uniform individual
// rates when `individual` is set.
std::unique_ptr<Adversary> make_strategy(const std::string &name, AdversaryType type, std::size_t n,
                                         bool individual);

} // namespace macsim
