#pragma once

#include "macsim/rng.hpp"
#include "macsim/types.hpp"

#include <algorithm>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace macsim
{

// Non-negative decimal with six fractional digits, stored exactly as an integer
// count of millionths. Admissibility and bucket arithmetic never touch floating point.
class Micro
{
public:
  static constexpr std::int64_t kScale = 1'000'000;

  constexpr Micro() = default;
  static constexpr Micro from_micros(std::int64_t m) { return Micro(m); }
  static constexpr Micro from_int(std::int64_t v) { return Micro(v * kScale); }
  // Rounds to the nearest millionth.
  static Micro from_double(double v);
  // Accepts "0.5", "10", "0.123456"; rejects signs, exponents and more than six fractional digits.
  static Micro parse(std::string_view text);

  constexpr std::int64_t micros() const { return micros_; }
  constexpr std::int64_t floor() const { return micros_ / kScale; }
  double to_double() const { return static_cast<double>(micros_) / kScale; }
  // Six fractional digits, e.g. "0.500000".
  std::string str() const;

  friend constexpr Micro operator+(Micro a, Micro b) { return Micro(a.micros_ + b.micros_); }
  friend constexpr Micro operator-(Micro a, Micro b) { return Micro(a.micros_ - b.micros_); }
  friend constexpr auto operator<=>(Micro, Micro) = default;

private:
  constexpr explicit Micro(std::int64_t m) : micros_(m) {}
  std::int64_t micros_ = 0;
};

struct AdversaryType
{
  Micro rho;
  Micro beta;

  // Validates 0 < rho <= 1 and beta >= 1.
  static AdversaryType make(Micro rho, Micro beta);
  static AdversaryType parse(std::string_view rho, std::string_view beta);

  // Largest number of packets a single round may carry.
  std::int64_t burstiness() const { return (rho + beta).floor(); }
};

struct BucketStepResult
{
  std::uint64_t generated = 0;
  double level = 0.0;
};

// The four-step bucket process on plain doubles: leak, take the proposal, cap by floor, debit.
BucketStepResult bucket_step(double level, double rho, double beta, std::uint64_t proposed);

// Exact bucket of a (rho, beta) process. Starts full at beta.
class Bucket
{
public:
  Bucket() = default;
  Bucket(Micro rho, Micro beta) : rho_(rho), beta_(beta), level_(beta) {}

  void leak() { level_ = std::min(level_ + rho_, beta_); }
  std::uint64_t available() const { return static_cast<std::uint64_t>(level_.floor()); }
  void debit(std::uint64_t count);
  // leak + cap + debit in one go; returns the generated count.
  std::uint64_t step(std::uint64_t proposed);

  Micro level() const { return level_; }
  Micro rho() const { return rho_; }
  Micro beta() const { return beta_; }

private:
  Micro rho_;
  Micro beta_;
  Micro level_;
};

struct IndividualRates
{
  std::vector<Micro> rates;

  // Throws std::invalid_argument unless every rate is in [0,1] and they sum to rho.
  void validate(Micro rho) const;
  // rho / n in millionths, remainder spread over the lowest ids so the sum is exact.
  static IndividualRates uniform(Micro rho, std::size_t n);
};

struct PlanEntry
{
  StationId station = 0;
  std::uint64_t count = 0;

  friend bool operator==(const PlanEntry &, const PlanEntry &) = default;
};

// Injections for one round, applied in order; packet ids follow the order of entries.
struct InjectionPlan
{
  std::vector<PlanEntry> entries;

  std::uint64_t total() const;
  bool empty() const { return total() == 0; }
  void add(StationId station, std::uint64_t count);
};

// Public information an adversary may use when planning round `round`.
// Queue sizes are those after this round's delivery; the adversary could
// reconstruct them from its own injections and the heard packets.
struct AdversaryView
{
  Round round = 0;
  std::size_t n = 1;
  std::span<const std::size_t> queue_sizes;
  const ChannelEvent *event = nullptr;
  std::optional<StationId> delivered_station;
  PacketId next_packet_id = 0;

  bool active(StationId s) const { return queue_sizes[s] > 0; }
};

class Adversary
{
public:
  virtual ~Adversary() = default;
  virtual void plan(const AdversaryView &view, InjectionPlan &out) = 0;
};

class NullAdversary final : public Adversary
{
public:
  void plan(const AdversaryView &, InjectionPlan &) override {}
};

// Replays explicit per-round plans; rounds past the end inject nothing.
class ScriptedAdversary final : public Adversary
{
public:
  explicit ScriptedAdversary(std::vector<InjectionPlan> rounds) : rounds_(std::move(rounds)) {}
  void plan(const AdversaryView &view, InjectionPlan &out) override;

private:
  std::vector<InjectionPlan> rounds_;
};

// Proposal source for step two of the bucket process. Defaults to Poisson(rho).
using ProposalSource = std::function<std::uint64_t(Rng &)>;

// Assigns `count` packets: one uniformly chosen passive station becomes virtually
// active, and each packet goes to a uniformly chosen eligible station.
void assign_randomized(std::uint64_t count, const AdversaryView &view, Rng &rng, InjectionPlan &out);

class RandomizedAdversary final : public Adversary
{
public:
  RandomizedAdversary(AdversaryType type, std::uint64_t seed, ProposalSource proposal = {});
  void plan(const AdversaryView &view, InjectionPlan &out) override;

  const Bucket &bucket() const { return bucket_; }

private:
  AdversaryType type_;
  Rng rng_;
  Bucket bucket_;
  ProposalSource proposal_;
};

// Randomized injection with per-station rates: every station has its own
// (rho_i, beta) bucket on top of the global (rho, beta) one. At most one passive
// station is granted packets per round; other passive stations carry their draws over.
class IndividualRandomizedAdversary final : public Adversary
{
public:
  IndividualRandomizedAdversary(AdversaryType type, IndividualRates rates, std::uint64_t seed);
  void plan(const AdversaryView &view, InjectionPlan &out) override;

private:
  AdversaryType type_;
  IndividualRates rates_;
  Rng rng_;
  Bucket global_;
  std::vector<Bucket> per_station_;
  std::vector<std::uint64_t> pending_;
  std::vector<StationId> order_;
};

struct Interval
{
  Round first = 0;
  Round last = 0;  // inclusive

  std::uint64_t length() const { return last - first + 1; }
  friend bool operator==(const Interval &, const Interval &) = default;
};

struct Accept
{
  friend bool operator==(const Accept &, const Accept &) = default;
};

struct Reject
{
  std::optional<StationId> station;  // set when a per-station constraint failed
  Interval interval;
  friend bool operator==(const Reject &, const Reject &) = default;
};

using Admissibility = std::variant<Accept, Reject>;

inline bool accepted(const Admissibility &a) { return std::holds_alternative<Accept>(a); }

// Brute force over every contiguous interval: sum <= rho*|tau| + beta.
Admissibility check_admissible(std::span<const std::uint64_t> totals, Micro rho, Micro beta);

// counts[t][s] = packets injected into station s in round t.
Admissibility check_admissible_individual(const std::vector<std::vector<std::uint64_t>> &counts,
                                          const IndividualRates &rates, Micro rho, Micro beta);

} // namespace macsim
