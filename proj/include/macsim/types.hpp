#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace macsim
{

using Round = std::uint64_t;
using StationId = std::uint32_t;
using PacketId = std::uint64_t;

struct Packet
{
  PacketId id = 0;
  Round injected_round = 0;
  StationId station = 0;
  std::optional<Round> delivered_round;

  Round delay() const { return delivered_round.value() - injected_round; }

  friend bool operator==(const Packet &, const Packet &) = default;
};

// Control words carried next to a packet. Plain-packet algorithms leave it empty.
struct ControlBits
{
  std::uint8_t size = 0;
  std::array<std::int64_t, 2> words{};

  static ControlBits of(std::int64_t a) { return ControlBits{1, {a, 0}}; }
  static ControlBits of(std::int64_t a, std::int64_t b) { return ControlBits{2, {a, b}}; }

  bool empty() const { return size == 0; }
  std::int64_t operator[](std::size_t i) const { return words.at(i); }

  friend bool operator==(const ControlBits &, const ControlBits &) = default;
};

struct Message
{
  std::optional<PacketId> packet;
  ControlBits control;

  friend bool operator==(const Message &, const Message &) = default;
};

// Ground-truth outcome of a round.
enum class EventKind : std::uint8_t
{
  Silence,
  Heard,
  Collision,
};

struct ChannelEvent
{
  EventKind kind = EventKind::Silence;
  std::optional<Message> message;  // present iff kind == Heard

  static ChannelEvent silence() { return {}; }
  static ChannelEvent collision() { return {EventKind::Collision, std::nullopt}; }
  static ChannelEvent heard(Message m) { return {EventKind::Heard, std::move(m)}; }

  friend bool operator==(const ChannelEvent &, const ChannelEvent &) = default;
};

// What a station sees. Without collision detection Silence and Collision
// both arrive as Void.
enum class FeedbackKind : std::uint8_t
{
  Silence,
  Heard,
  Collision,
  Void,
};

struct Feedback
{
  FeedbackKind kind = FeedbackKind::Silence;
  std::optional<Message> message;

  bool heard() const { return kind == FeedbackKind::Heard; }
  bool is_void() const { return kind != FeedbackKind::Heard; }

  friend bool operator==(const Feedback &, const Feedback &) = default;
};

struct Injection
{
  StationId station = 0;
  PacketId packet = 0;

  friend bool operator==(const Injection &, const Injection &) = default;
};

struct RoundRecord
{
  Round round = 0;
  std::size_t transmitters = 0;
  ChannelEvent event;
  std::optional<Packet> delivered;
  std::vector<Injection> injections;
  std::size_t total_queued = 0;

  friend bool operator==(const RoundRecord &, const RoundRecord &) = default;
};

struct ChannelConfig
{
  std::size_t n = 1;
  bool collision_detection = false;
  std::size_t activation_bound = 1;
};

class ActivationBoundViolated : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

class IncompatibleAlgorithm : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

class InvariantViolation : public std::logic_error
{
public:
  using std::logic_error::logic_error;
};

std::string to_string(EventKind kind);
std::string to_string(FeedbackKind kind);

} // namespace macsim
