#pragma once

#include "macsim/types.hpp"

#include <span>

namespace macsim
{

struct Transmission
{
  StationId station = 0;
  Message message;
};

// Outcome is a function of the transmitter count alone: 0 silence, 1 heard, 2+ collision.
ChannelEvent compute_feedback(std::span<const Transmission> transmissions);

Feedback project_feedback(const ChannelEvent &event, bool collision_detection);

} // namespace macsim
