#include "macsim/adhoc.hpp"

#include "macsim/rng.hpp"

#include <algorithm>
#include <string>
#include <vector>

namespace macsim
{

void CountingBackoffStation::observe(const Observation &obs)
{
  if (obs.activated)
  {
    joining_ = true;
    counter_ = 0;
    return;
  }
  const Feedback &fb = obs.feedback.value();
  if (joining_)
  {
    // Either heard alone (now the top) or collided with the top (pushed onto it).
    joining_ = false;
    counter_ = 0;
    return;
  }
  switch (fb.kind)
  {
  case FeedbackKind::Collision:
    ++counter_;
    break;
  case FeedbackKind::Silence:
    if (counter_ > 0)
    {
      --counter_;
    }
    break;
  case FeedbackKind::Heard:
    break;
  case FeedbackKind::Void:
    throw InvariantViolation("counting-backoff needs collision detection");
  }
}

Decision CountingBackoffStation::decision() const
{
  return joining_ || counter_ == 0 ? Decision::send() : Decision::pause();
}

void CountingBackoffStation::reset()
{
  counter_ = 0;
  joining_ = false;
}

void QuadrupleRoundStation::prune()
{
  if (pending_size_ == 0)
  {
    node_ = 1;
    ++iterations_;
    return;
  }
  node_ = pending_[--pending_size_];
}

void QuadrupleRoundStation::transition(const Feedback &fb)
{
  switch (fb.kind)
  {
  case FeedbackKind::Silence:
  case FeedbackKind::Void:
    if (node_ == 1)
    {
      ++segment_;
      node_ = 0;
      iterations_ = 0;
      return;
    }
    prune();
    return;
  case FeedbackKind::Heard:
    prune();
    return;
  case FeedbackKind::Collision:
    if (node_ >= 4)
    {
      throw InvariantViolation("quadruple-round: collision at a leaf");
    }
    pending_[pending_size_++] = 2 * node_ + 1;
    node_ = 2 * node_;
    return;
  }
}

void QuadrupleRoundStation::observe(const Observation &obs)
{
  queue_size_ = obs.queue_size;
  if (obs.activated)
  {
    activation_round_ = obs.round;
  }
  if (obs.feedback && node_ != 0)
  {
    transition(*obs.feedback);
  }
  if (node_ == 0 && obs.round + 1 >= 4 * segment_ + 4)
  {
    node_ = 1;
  }
}

Decision QuadrupleRoundStation::decision() const
{
  if (node_ == 0 || queue_size_ == 0 || activation_round_ / 4 != segment_)
  {
    return Decision::pause();
  }
  const unsigned leaf = 4 + static_cast<unsigned>(activation_round_ % 4);
  const unsigned depth = node_ == 1 ? 0 : (node_ < 4 ? 1 : 2);
  return (leaf >> (2 - depth)) == node_ ? Decision::send() : Decision::pause();
}

void QuadrupleRoundStation::reset()
{
  segment_ = 0;
  node_ = 0;
  pending_size_ = 0;
  iterations_ = 0;
  activation_round_ = 0;
  queue_size_ = 0;
}

std::uint64_t QuadrupleRoundStation::replicated_digest() const
{
  std::uint64_t h = splitmix64(segment_ * 131 + node_);
  h = splitmix64(h ^ iterations_);
  for (std::size_t i = 0; i < pending_size_; ++i)
  {
    h = splitmix64(h ^ pending_[i]);
  }
  return h;
}

void QueueBackoffStation::observe(const Observation &obs)
{
  queue_size_ = obs.queue_size;
  if (obs.activated)
  {
    reset();
    queue_size_ = obs.queue_size;
    return;
  }
  const Feedback &fb = obs.feedback.value();
  switch (phase_)
  {
  case Phase::Fresh:
    if (fb.heard())
    {
      // Joined an empty queue: front of a queue of one.
      phase_ = Phase::Settled;
      position_ = 0;
      queue_estimate_ = 1;
    }
    else
    {
      phase_ = Phase::Waiting;
      voids_ = 0;
    }
    return;
  case Phase::Waiting:
    if (fb.heard())
    {
      const ControlBits &c = fb.message->control;
      queue_estimate_ = c[0];
      position_ = queue_estimate_ - 1 - voids_;
      phase_ = Phase::Settled;
      if (c[1] != 0)
      {
        --position_;
        --queue_estimate_;
      }
    }
    else
    {
      ++voids_;
    }
    return;
  case Phase::Settled:
    if (fb.heard())
    {
      if (fb.message->control[1] != 0)
      {
        --position_;
        --queue_estimate_;
      }
    }
    else
    {
      ++queue_estimate_;
    }
    return;
  }
}

Decision QueueBackoffStation::decision() const
{
  const std::int64_t over = queue_size_ == 1 ? 1 : 0;
  if (phase_ == Phase::Fresh)
  {
    return Decision::send(ControlBits::of(1, over));
  }
  if (phase_ == Phase::Settled && position_ == 0)
  {
    return Decision::send(ControlBits::of(queue_estimate_, over));
  }
  return Decision::pause();
}

void QueueBackoffStation::reset()
{
  phase_ = Phase::Fresh;
  position_ = 0;
  queue_estimate_ = 0;
  voids_ = 0;
  queue_size_ = 0;
}

namespace
{

class CountingBackoffAlgorithm final : public Algorithm
{
public:
  std::string name() const override { return "counting-backoff"; }
  Category category() const override { return Category::ActivationBased; }
  bool requires_collision_detection() const override { return true; }
  StationPtr make_station(StationId id, const StationFactoryContext &) const override
  {
    return std::make_unique<CountingBackoffStation>(id);
  }

  // Settled counters form {g, ..., g+m-1}; g = 1 only right after the top left on a heard round.
  void check_global(std::span<const StationPtr> stations, std::span<const std::size_t> queue_sizes,
                    const Feedback &last) const override
  {
    std::vector<std::size_t> counters;
    for (const auto &st : stations)
    {
      if (queue_sizes[st->id()] == 0)
      {
        continue;
      }
      const auto &cb = static_cast<const CountingBackoffStation &>(*st);
      if (!cb.joining())
      {
        counters.push_back(cb.counter());
      }
    }
    if (counters.empty())
    {
      return;
    }
    std::sort(counters.begin(), counters.end());
    const std::size_t base = counters.front();
    if (base > 1 || (base == 1 && !last.heard()))
    {
      throw InvariantViolation("counting-backoff: stack top missing (lowest counter " + std::to_string(base) + ")");
    }
    for (std::size_t i = 0; i < counters.size(); ++i)
    {
      if (counters[i] != base + i)
      {
        throw InvariantViolation("counting-backoff: counters are not consecutive");
      }
    }
  }
};

class QuadrupleRoundAlgorithm final : public Algorithm
{
public:
  std::string name() const override { return "quadruple-round"; }
  Category category() const override { return Category::FullSensing; }
  bool requires_collision_detection() const override { return true; }
  StationPtr make_station(StationId id, const StationFactoryContext &) const override
  {
    return std::make_unique<QuadrupleRoundStation>(id);
  }
};

class QueueBackoffAlgorithm final : public Algorithm
{
public:
  std::string name() const override { return "queue-backoff"; }
  Category category() const override { return Category::ActivationBased; }
  bool requires_collision_detection() const override { return false; }
  StationPtr make_station(StationId id, const StationFactoryContext &) const override
  {
    return std::make_unique<QueueBackoffStation>(id);
  }

  // Settled positions are {0..s-1}, all settled stations agree on the queue
  // size, and that size counts the settled plus the waiting joiners.
  void check_global(std::span<const StationPtr> stations, std::span<const std::size_t> queue_sizes,
                    const Feedback &) const override
  {
    std::vector<std::int64_t> positions;
    std::int64_t waiting = 0;
    std::optional<std::int64_t> estimate;
    for (const auto &st : stations)
    {
      if (queue_sizes[st->id()] == 0)
      {
        continue;
      }
      const auto &qb = static_cast<const QueueBackoffStation &>(*st);
      if (qb.phase() == QueueBackoffStation::Phase::Waiting)
      {
        ++waiting;
      }
      else if (qb.phase() == QueueBackoffStation::Phase::Settled)
      {
        positions.push_back(qb.position());
        if (estimate && *estimate != qb.queue_estimate())
        {
          throw InvariantViolation("queue-backoff: stations disagree on the queue size");
        }
        estimate = qb.queue_estimate();
      }
    }
    std::sort(positions.begin(), positions.end());
    for (std::size_t i = 0; i < positions.size(); ++i)
    {
      if (positions[i] != static_cast<std::int64_t>(i))
      {
        throw InvariantViolation("queue-backoff: positions are not {0..m-1}");
      }
    }
    if (positions.empty() && waiting > 0)
    {
      throw InvariantViolation("queue-backoff: joiners waiting without a front station");
    }
    if (estimate && *estimate != static_cast<std::int64_t>(positions.size()) + waiting)
    {
      throw InvariantViolation("queue-backoff: queue size estimate off");
    }
  }
};

} // namespace

AlgorithmPtr make_counting_backoff() { return std::make_shared<CountingBackoffAlgorithm>(); }
AlgorithmPtr make_quadruple_round() { return std::make_shared<QuadrupleRoundAlgorithm>(); }
AlgorithmPtr make_queue_backoff() { return std::make_shared<QueueBackoffAlgorithm>(); }

} // namespace macsim
