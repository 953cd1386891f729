#include "macsim/channel.hpp"

namespace macsim
{

std::string to_string(EventKind kind)
{
  switch (kind)
  {
  case EventKind::Silence:
    return "silence";
  case EventKind::Heard:
    return "heard";
  case EventKind::Collision:
    return "collision";
  }
  return "?";
}

std::string to_string(FeedbackKind kind)
{
  switch (kind)
  {
  case FeedbackKind::Silence:
    return "silence";
  case FeedbackKind::Heard:
    return "heard";
  case FeedbackKind::Collision:
    return "collision";
  case FeedbackKind::Void:
    return "void";
  }
  return "?";
}

ChannelEvent compute_feedback(std::span<const Transmission> transmissions)
{
  if (transmissions.empty())
  {
    return ChannelEvent::silence();
  }
  if (transmissions.size() == 1)
  {
    return ChannelEvent::heard(transmissions.front().message);
  }
  return ChannelEvent::collision();
}

Feedback project_feedback(const ChannelEvent &event, bool collision_detection)
{
  switch (event.kind)
  {
  case EventKind::Heard:
    return Feedback{FeedbackKind::Heard, event.message};
  case EventKind::Silence:
    return Feedback{collision_detection ? FeedbackKind::Silence : FeedbackKind::Void, std::nullopt};
  case EventKind::Collision:
    return Feedback{collision_detection ? FeedbackKind::Collision : FeedbackKind::Void, std::nullopt};
  }
  return Feedback{};
}

} // namespace macsim
