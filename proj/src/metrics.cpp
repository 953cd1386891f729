#include "macsim/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace macsim
{

std::string to_string(Verdict v)
{
  switch (v)
  {
  case Verdict::Stabilized:
    return "stabilized";
  case Verdict::Undecided:
    return "undecided";
  case Verdict::Unstable:
    return "unstable";
  }
  return "?";
}

double relative_gap(double a, double b)
{
  const double lo = std::min(a, b);
  if (lo <= 0.0)
  {
    return a == b ? 0.0 : INFINITY;
  }
  return std::abs(a - b) / lo;
}

Stabilization detect_stabilization(std::span<const double> averages, bool caps_exceeded)
{
  for (std::size_t start = 0; start + kStabilizationWindow <= averages.size(); ++start)
  {
    const auto window = averages.subspan(start, kStabilizationWindow);
    bool close = true;
    for (std::size_t i = 0; i < window.size() && close; ++i)
    {
      for (std::size_t j = i + 1; j < window.size(); ++j)
      {
        if (!(relative_gap(window[i], window[j]) < kStabilizationTolerance))
        {
          close = false;
          break;
        }
      }
    }
    if (close)
    {
      double sum = 0.0;
      for (double v : window)
      {
        sum += v;
      }
      return Stabilization{Verdict::Stabilized, sum / static_cast<double>(window.size()), start};
    }
  }
  return Stabilization{caps_exceeded ? Verdict::Unstable : Verdict::Undecided, 0.0, 0};
}

StageLedger::StageLedger(std::size_t stage_size) : stage_size_(stage_size)
{
  if (stage_size_ == 0)
  {
    throw std::invalid_argument("stage size must be positive");
  }
}

bool StageLedger::is_marked(PacketId id) const
{
  return marked_ > 0 && id >= batch_start_ && id < batch_start_ + marked_;
}

void StageLedger::record_round(const RoundRecord &rec)
{
  // Delivery precedes injection inside a round.
  if (rec.delivered && is_marked(rec.delivered->id))
  {
    --outstanding_;
    delay_sum_ += rec.delivered->delay();
    if (marked_ == stage_size_ && outstanding_ == 0)
    {
      stages_.push_back(StageRecord{static_cast<double>(delay_sum_) / static_cast<double>(stage_size_), batch_start_,
                                    rec.round});
      marked_ = 0;
      delay_sum_ = 0;
    }
  }
  for (const auto &inj : rec.injections)
  {
    if (marked_ == stage_size_)
    {
      break;
    }
    if (marked_ == 0)
    {
      batch_start_ = inj.packet;
    }
    ++marked_;
    ++outstanding_;
  }
}

std::vector<double> StageLedger::averages() const
{
  std::vector<double> out;
  out.reserve(stages_.size());
  for (const auto &s : stages_)
  {
    out.push_back(s.average);
  }
  return out;
}

void MetricsRecorder::record_round(const RoundRecord &rec)
{
  ++rounds_;
  injected_ += rec.injections.size();
  if (rec.delivered)
  {
    ++delivered_;
    max_delay_ = std::max(max_delay_, rec.delivered->delay());
  }
  max_total_queue_ = std::max(max_total_queue_, rec.total_queued);
  ledger_.record_round(rec);
}

} // namespace macsim
