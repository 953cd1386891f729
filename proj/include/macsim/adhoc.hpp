#pragma once

#include "macsim/station.hpp"

#include <array>

namespace macsim
{

// Counting-Backoff: active stations form a virtual stack; each remembers its
// distance from the top. Only the top (distance 0) and a joining station transmit.
class CountingBackoffStation final : public Station
{
public:
  explicit CountingBackoffStation(StationId id) : Station(id) {}

  void observe(const Observation &obs) override;
  Decision decision() const override;
  void reset() override;

  std::size_t counter() const { return counter_; }
  // Activated this round; its joining transmission is still ahead.
  bool joining() const { return joining_; }

private:
  std::size_t counter_ = 0;
  bool joining_ = false;
};

// Quadruple-Round: rounds are grouped in segments of four. Segments are
// processed one after another, each no earlier than the round after it ends,
// by repeated depth-first searches over a 7-node tree whose leaves are the
// segment's rounds. A station takes part in the search of the segment holding
// its activation round.
class QuadrupleRoundStation final : public Station
{
public:
  explicit QuadrupleRoundStation(StationId id) : Station(id) {}

  void observe(const Observation &obs) override;
  Decision decision() const override;
  void reset() override;
  std::uint64_t replicated_digest() const override;

  std::uint64_t segment() const { return segment_; }
  // Heap index of the probed node (1 = root, 4..7 = leaves); 0 while idle.
  unsigned node() const { return node_; }
  std::uint64_t iterations() const { return iterations_; }
  Round activation_round() const { return activation_round_; }

private:
  void transition(const Feedback &fb);
  void prune();

  std::uint64_t segment_ = 0;
  unsigned node_ = 0;
  std::array<unsigned, 2> pending_{};
  std::size_t pending_size_ = 0;
  std::uint64_t iterations_ = 0;
  Round activation_round_ = 0;
  std::size_t queue_size_ = 0;
};

// Queue-Backoff: active stations form a distributed FIFO queue. The front
// station transmits, each message carrying the queue size and an "over" bit on
// its last packet. A joiner transmits at once; the resulting void round tells
// everyone the queue grew. A joiner derives its position from the first size
// it hears, minus the void rounds caused by later joiners.
class QueueBackoffStation final : public Station
{
public:
  enum class Phase : std::uint8_t
  {
    Fresh,    // activated, joining transmission next round
    Waiting,  // joined, position not yet known
    Settled,
  };

  explicit QueueBackoffStation(StationId id) : Station(id) {}

  void observe(const Observation &obs) override;
  Decision decision() const override;
  void reset() override;

  Phase phase() const { return phase_; }
  std::int64_t position() const { return position_; }
  std::int64_t queue_estimate() const { return queue_estimate_; }

private:
  Phase phase_ = Phase::Fresh;
  std::int64_t position_ = 0;
  std::int64_t queue_estimate_ = 0;
  std::int64_t voids_ = 0;
  std::size_t queue_size_ = 0;
};

AlgorithmPtr make_counting_backoff();
AlgorithmPtr make_quadruple_round();
AlgorithmPtr make_queue_backoff();

} // namespace macsim
