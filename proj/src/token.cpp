#include "macsim/token.hpp"

#include "macsim/rng.hpp"

#include <algorithm>
#include <bit>

namespace macsim
{

namespace
{

std::uint64_t mix(std::uint64_t h, std::uint64_t v)
{
  return splitmix64(h ^ (v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2)));
}

} // namespace

RrwStation::RrwStation(StationId id, std::size_t n, bool old_first) : Station(id), n_(n), old_first_(old_first) {}

void RrwStation::observe(const Observation &obs)
{
  queue_size_ = obs.queue_size;
  if (!obs.feedback)
  {
    // Bootstrap round: the first phase starts next round with token at 0.
    old_count_ = queue_size_;
    return;
  }
  if (obs.delivered_own && old_count_ > 0)
  {
    --old_count_;
  }
  if (!obs.feedback->heard())
  {
    token_ = static_cast<StationId>((token_ + 1) % n_);
    if (token_ == 0)
    {
      ++phase_;
      old_count_ = queue_size_;
    }
  }
}

Decision RrwStation::decision() const
{
  return token_ == id() && eligible() ? Decision::send() : Decision::pause();
}

void RrwStation::reset()
{
  token_ = 0;
  phase_ = 0;
  queue_size_ = 0;
  old_count_ = 0;
}

std::uint64_t RrwStation::replicated_digest() const
{
  return mix(mix(1, token_), phase_);
}

SrrStation::SrrStation(StationId id, std::size_t n, bool old_first)
    : Station(id), n_(n), leaves_(std::bit_ceil(n)), old_first_(old_first), node_{0, leaves_}
{
}

void SrrStation::prune()
{
  mode_ = Mode::Probe;
  holder_ = false;
  if (pending_.empty())
  {
    // Search finished: next cycle starts at the root.
    node_ = Node{0, leaves_};
    ++phase_;
    old_count_ = queue_size_;
    return;
  }
  node_ = pending_.back();
  pending_.pop_back();
}

void SrrStation::observe(const Observation &obs)
{
  queue_size_ = obs.queue_size;
  if (!obs.feedback)
  {
    old_count_ = queue_size_;
    return;
  }
  if (obs.delivered_own && old_count_ > 0)
  {
    --old_count_;
  }
  const Feedback &fb = *obs.feedback;
  switch (fb.kind)
  {
  case FeedbackKind::Heard:
    if (mode_ == Mode::Probe)
    {
      mode_ = Mode::Withhold;
      holder_ = obs.transmitted;
    }
    break;
  case FeedbackKind::Collision:
    if (mode_ == Mode::Withhold || node_.size == 1)
    {
      throw InvariantViolation("SRR: collision at a single-station node");
    }
    pending_.push_back(Node{node_.lo + node_.size / 2, node_.size / 2});
    node_ = Node{node_.lo, node_.size / 2};
    break;
  case FeedbackKind::Silence:
  case FeedbackKind::Void:
    prune();
    break;
  }
}

Decision SrrStation::decision() const
{
  if (!eligible())
  {
    return Decision::pause();
  }
  if (mode_ == Mode::Withhold)
  {
    return holder_ ? Decision::send() : Decision::pause();
  }
  return covers(node_) ? Decision::send() : Decision::pause();
}

void SrrStation::reset()
{
  node_ = Node{0, leaves_};
  pending_.clear();
  mode_ = Mode::Probe;
  holder_ = false;
  phase_ = 0;
  queue_size_ = 0;
  old_count_ = 0;
}

std::uint64_t SrrStation::replicated_digest() const
{
  std::uint64_t h = mix(mix(mix(2, node_.lo), node_.size), static_cast<std::uint64_t>(mode_));
  h = mix(h, phase_);
  for (const Node &v : pending_)
  {
    h = mix(mix(h, v.lo), v.size);
  }
  return h;
}

MbtfStation::MbtfStation(StationId id, std::size_t n) : Station(id), n_(n)
{
  reset();
}

void MbtfStation::rehash()
{
  std::uint64_t h = 3;
  for (StationId s : order_)
  {
    h = mix(h, s);
  }
  digest_ = h;
}

void MbtfStation::observe(const Observation &obs)
{
  queue_size_ = obs.queue_size;
  if (!obs.feedback)
  {
    return;
  }
  const Feedback &fb = *obs.feedback;
  if (fb.heard())
  {
    const bool big = !fb.message->control.empty() && fb.message->control[0] != 0;
    if (big && cursor_ != 0)
    {
      const auto it = order_.begin() + static_cast<std::ptrdiff_t>(cursor_);
      std::rotate(order_.begin(), it, it + 1);
      cursor_ = 0;
      rehash();
    }
  }
  else
  {
    cursor_ = (cursor_ + 1) % n_;
  }
}

Decision MbtfStation::decision() const
{
  if (order_[cursor_] != id() || queue_size_ == 0)
  {
    return Decision::pause();
  }
  return Decision::send(ControlBits::of(queue_size_ >= n_ ? 1 : 0));
}

void MbtfStation::reset()
{
  order_.resize(n_);
  for (std::size_t i = 0; i < n_; ++i)
  {
    order_[i] = static_cast<StationId>(i);
  }
  cursor_ = 0;
  queue_size_ = 0;
  rehash();
}

std::uint64_t MbtfStation::replicated_digest() const
{
  return mix(digest_, cursor_);
}

namespace
{

class RrwAlgorithm final : public Algorithm
{
public:
  explicit RrwAlgorithm(bool old_first) : old_first_(old_first) {}
  std::string name() const override { return old_first_ ? "of-rrw" : "rrw"; }
  Category category() const override { return Category::FullSensing; }
  bool requires_collision_detection() const override { return false; }
  bool collision_free() const override { return true; }
  StationPtr make_station(StationId id, const StationFactoryContext &ctx) const override
  {
    return std::make_unique<RrwStation>(id, ctx.n, old_first_);
  }

private:
  bool old_first_;
};

class SrrAlgorithm final : public Algorithm
{
public:
  explicit SrrAlgorithm(bool old_first) : old_first_(old_first) {}
  std::string name() const override { return old_first_ ? "of-srr" : "srr"; }
  Category category() const override { return Category::FullSensing; }
  bool requires_collision_detection() const override { return true; }
  StationPtr make_station(StationId id, const StationFactoryContext &ctx) const override
  {
    return std::make_unique<SrrStation>(id, ctx.n, old_first_);
  }

private:
  bool old_first_;
};

class MbtfAlgorithm final : public Algorithm
{
public:
  std::string name() const override { return "mbtf"; }
  Category category() const override { return Category::FullSensing; }
  bool requires_collision_detection() const override { return false; }
  bool collision_free() const override { return true; }
  StationPtr make_station(StationId id, const StationFactoryContext &ctx) const override
  {
    return std::make_unique<MbtfStation>(id, ctx.n);
  }
};

} // namespace

AlgorithmPtr make_rrw() { return std::make_shared<RrwAlgorithm>(false); }
AlgorithmPtr make_of_rrw() { return std::make_shared<RrwAlgorithm>(true); }
AlgorithmPtr make_srr() { return std::make_shared<SrrAlgorithm>(false); }
AlgorithmPtr make_of_srr() { return std::make_shared<SrrAlgorithm>(true); }
AlgorithmPtr make_mbtf() { return std::make_shared<MbtfAlgorithm>(); }

} // namespace macsim
