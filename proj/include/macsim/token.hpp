#pragma once

#include "macsim/station.hpp"

#include <vector>

namespace macsim
{

// Round-Robin-Withholding and its old-go-first variant. The token holder
// transmits while it has (old) packets; every void round moves the token on.
// A phase starts whenever the token returns to station 0; at that moment all
// queued packets become old.
class RrwStation final : public Station
{
public:
  RrwStation(StationId id, std::size_t n, bool old_first);

  void observe(const Observation &obs) override;
  Decision decision() const override;
  void reset() override;
  std::uint64_t replicated_digest() const override;

  StationId token() const { return token_; }
  std::uint64_t phase() const { return phase_; }
  std::size_t old_count() const { return old_count_; }

private:
  bool eligible() const { return old_first_ ? old_count_ > 0 : queue_size_ > 0; }

  std::size_t n_;
  bool old_first_;
  StationId token_ = 0;
  std::uint64_t phase_ = 0;
  std::size_t queue_size_ = 0;
  std::size_t old_count_ = 0;
};

// Search-Round-Robin over a complete binary tree whose leaves are the stations
// (padded to a power of two). Depth-first, left before right: silence prunes
// the current node, collision descends left, heard hands the node to the
// heard station which withholds the channel until a silent round.
class SrrStation final : public Station
{
public:
  struct Node
  {
    std::size_t lo = 0;
    std::size_t size = 1;
    friend bool operator==(const Node &, const Node &) = default;
  };

  enum class Mode : std::uint8_t
  {
    Probe,
    Withhold,
  };

  SrrStation(StationId id, std::size_t n, bool old_first);

  void observe(const Observation &obs) override;
  Decision decision() const override;
  void reset() override;
  std::uint64_t replicated_digest() const override;

  Node node() const { return node_; }
  Mode mode() const { return mode_; }
  std::uint64_t phase() const { return phase_; }
  std::size_t old_count() const { return old_count_; }

private:
  bool eligible() const { return old_first_ ? old_count_ > 0 : queue_size_ > 0; }
  bool covers(Node v) const { return id() >= v.lo && id() < v.lo + v.size; }
  void prune();

  std::size_t n_;
  std::size_t leaves_;
  bool old_first_;
  Node node_;
  std::vector<Node> pending_;  // right siblings still to visit
  Mode mode_ = Mode::Probe;
  bool holder_ = false;
  std::uint64_t phase_ = 0;
  std::size_t queue_size_ = 0;
  std::size_t old_count_ = 0;
};

// Move-Big-To-Front. The station under the cursor transmits, flagging its
// message "big" when it holds at least n packets. A heard big message moves
// its sender to the front of the shared list; void rounds advance the cursor.
class MbtfStation final : public Station
{
public:
  MbtfStation(StationId id, std::size_t n);

  void observe(const Observation &obs) override;
  Decision decision() const override;
  void reset() override;
  std::uint64_t replicated_digest() const override;

  const std::vector<StationId> &order() const { return order_; }
  std::size_t cursor() const { return cursor_; }

private:
  void rehash();

  std::size_t n_;
  std::vector<StationId> order_;
  std::size_t cursor_ = 0;
  std::size_t queue_size_ = 0;
  std::uint64_t digest_ = 0;
};

AlgorithmPtr make_rrw();
AlgorithmPtr make_of_rrw();
AlgorithmPtr make_srr();
AlgorithmPtr make_of_srr();
AlgorithmPtr make_mbtf();

} // namespace macsim
