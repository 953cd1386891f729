#pragma once

#include "macsim/station.hpp"

namespace macsim
{

enum class BackoffKind : std::uint8_t
{
  Binary,
  Quadratic,
};

struct BackoffPolicy
{
  BackoffKind kind = BackoffKind::Binary;
  bool capped = false;
};

// Length of the window drawn from after the k-th consecutive failure (k >= 1).
std::uint64_t window_size(BackoffPolicy policy, std::uint64_t k);

// Windowed backoff. A fresh head packet goes out at the first opportunity; after
// the k-th failure the station picks a round uniformly in the next window of
// window_size(k) rounds, starting right after the failed attempt.
class BackoffStation final : public Station
{
public:
  BackoffStation(StationId id, BackoffPolicy policy, Rng rng);

  void observe(const Observation &obs) override;
  Decision decision() const override;
  void reset() override;

  std::uint64_t attempts() const { return attempts_; }
  // Current window as [window_start, window_start + window_length).
  Round window_start() const { return window_start_; }
  std::uint64_t window_length() const { return window_length_; }
  Round scheduled_round() const { return window_start_ + offset_; }

private:
  BackoffPolicy policy_;
  Rng rng_;
  std::uint64_t attempts_ = 0;
  Round window_start_ = 0;
  std::uint64_t window_length_ = 1;
  std::uint64_t offset_ = 0;
  std::uint64_t wait_ = 0;
  bool fresh_ = true;
};

AlgorithmPtr make_backoff(BackoffPolicy policy);

} // namespace macsim
