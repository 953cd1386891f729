#pragma once

#include "macsim/rng.hpp"
#include "macsim/types.hpp"

#include <memory>
#include <span>
#include <string>
#include <string_view>

namespace macsim
{

// How much of the channel a station is allowed to observe.
enum class Category : std::uint8_t
{
  FullSensing,
  ActivationBased,
  AcknowledgementBased,
};

// A station's plan for the next round. When transmitting with a packet,
// the engine attaches the head of the station's queue.
struct Decision
{
  bool transmit = false;
  bool with_packet = true;
  ControlBits control;

  static Decision pause() { return {}; }
  static Decision send(ControlBits control = {}) { return Decision{true, true, control}; }
};

// Everything a station learns during step 4 of a round.
struct Observation
{
  Round round = 0;
  // Absent only in the bootstrap round 0, before any station could hold a packet.
  std::optional<Feedback> feedback;
  bool transmitted = false;
  bool delivered_own = false;
  std::size_t injected = 0;
  bool activated = false;  // queue was empty before this round's injections
  std::size_t queue_size = 0;
};

class Station
{
public:
  explicit Station(StationId id) : id_(id) {}
  virtual ~Station() = default;

  StationId id() const { return id_; }

  // Transition for the end of the current round; fixes the decision for the next one.
  virtual void observe(const Observation &obs) = 0;
  virtual Decision decision() const = 0;

  // Back to the initial state (activation-based stations going passive,
  // acknowledgement-based stations after a success).
  virtual void reset() = 0;

  // Digest of the control state every station replicates; 0 when nothing is replicated.
  virtual std::uint64_t replicated_digest() const { return 0; }

private:
  StationId id_;
};

using StationPtr = std::unique_ptr<Station>;

struct StationFactoryContext
{
  std::size_t n = 1;
  std::uint64_t seed = 0;
};

class Algorithm
{
public:
  virtual ~Algorithm() = default;

  virtual std::string name() const = 0;
  virtual Category category() const = 0;
  virtual bool requires_collision_detection() const = 0;
  // Token algorithms promise never to produce a collision.
  virtual bool collision_free() const { return false; }
  virtual StationPtr make_station(StationId id, const StationFactoryContext &ctx) const = 0;

  // Cross-station structural check run by the engine when invariant checking is on.
  // Throws InvariantViolation. `last` is the feedback of the round just completed.
  virtual void check_global(std::span<const StationPtr> stations, std::span<const std::size_t> queue_sizes,
                            const Feedback &last) const
  {
    (void)stations;
    (void)queue_sizes;
    (void)last;
  }
};

using AlgorithmPtr = std::shared_ptr<const Algorithm>;

} // namespace macsim
