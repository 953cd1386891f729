#include "macsim/backoff.hpp"

#include <algorithm>
#include <stdexcept>

namespace macsim
{

std::uint64_t window_size(BackoffPolicy policy, std::uint64_t k)
{
  if (k < 1)
  {
    throw std::invalid_argument("window_size: attempt count must be at least 1");
  }
  if (policy.kind == BackoffKind::Binary)
  {
    const std::uint64_t e = policy.capped ? std::min<std::uint64_t>(k, 10) : k;
    if (e >= 63)
    {
      throw std::overflow_error("window_size: 2^k overflows");
    }
    return std::uint64_t{1} << e;
  }
  const std::uint64_t i = policy.capped ? std::min<std::uint64_t>(k, 32) : k;
  if (i > 0xffffffffULL)
  {
    throw std::overflow_error("window_size: k^2 overflows");
  }
  return i * i;
}

BackoffStation::BackoffStation(StationId id, BackoffPolicy policy, Rng rng)
    : Station(id), policy_(policy), rng_(std::move(rng))
{
}

void BackoffStation::observe(const Observation &obs)
{
  if (fresh_)
  {
    // New head packet: a window of one, the very next round.
    fresh_ = false;
    window_start_ = obs.round + 1;
    window_length_ = 1;
    offset_ = 0;
    wait_ = 0;
    if (!obs.transmitted)
    {
      return;
    }
  }
  if (obs.transmitted)
  {
    if (obs.feedback && obs.feedback->heard())
    {
      return;
    }
    ++attempts_;
    window_start_ = obs.round + 1;
    window_length_ = window_size(policy_, attempts_);
    offset_ = uniform_below(rng_, window_length_);
    wait_ = offset_;
    return;
  }
  if (wait_ > 0)
  {
    --wait_;
  }
}

Decision BackoffStation::decision() const
{
  return wait_ == 0 ? Decision::send() : Decision::pause();
}

void BackoffStation::reset()
{
  attempts_ = 0;
  window_length_ = 1;
  offset_ = 0;
  wait_ = 0;
  fresh_ = true;
}

namespace
{

class BackoffAlgorithm final : public Algorithm
{
public:
  explicit BackoffAlgorithm(BackoffPolicy policy) : policy_(policy) {}

  std::string name() const override
  {
    std::string base = policy_.kind == BackoffKind::Binary ? "beb" : "qb";
    return policy_.capped ? base + "-capped" : base;
  }
  Category category() const override { return Category::AcknowledgementBased; }
  bool requires_collision_detection() const override { return false; }
  StationPtr make_station(StationId id, const StationFactoryContext &ctx) const override
  {
    return std::make_unique<BackoffStation>(id, policy_, derive_stream(ctx.seed, kStationStreamBase + id));
  }

private:
  BackoffPolicy policy_;
};

} // namespace

AlgorithmPtr make_backoff(BackoffPolicy policy) { return std::make_shared<BackoffAlgorithm>(policy); }

} // namespace macsim
