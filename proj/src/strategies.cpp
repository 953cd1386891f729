#include "macsim/strategies.hpp"

#include <fstream>
#include <limits>
#include <sstream>

namespace macsim
{

namespace
{

constexpr std::uint64_t kAll = std::numeric_limits<std::uint64_t>::max();

} // namespace

StrategyAdversary::StrategyAdversary(AdversaryType type, std::size_t n, std::optional<IndividualRates> rates)
    : type_(type), global_(type.rho, type.beta), granted_(n, 0)
{
  if (rates)
  {
    if (rates->rates.size() != n)
    {
      throw std::invalid_argument("individual rates must list every station");
    }
    rates->validate(type.rho);
    for (Micro r : rates->rates)
    {
      per_station_.emplace_back(r, type.beta);
    }
  }
}

void StrategyAdversary::plan(const AdversaryView &view, InjectionPlan &out)
{
  global_.leak();
  for (Bucket &b : per_station_)
  {
    b.leak();
  }
  std::fill(granted_.begin(), granted_.end(), 0);
  activated_ = false;
  view_ = &view;
  out_ = &out;
  propose(view);
  view_ = nullptr;
  out_ = nullptr;
}

bool StrategyAdversary::active_now(StationId s) const
{
  return view_->queue_sizes[s] > 0 || granted_[s] > 0;
}

std::uint64_t StrategyAdversary::grant(StationId s, std::uint64_t want)
{
  const bool activation = !active_now(s);
  if (activation && activated_)
  {
    return 0;
  }
  std::uint64_t n = std::min(want, global_.available());
  if (!per_station_.empty())
  {
    n = std::min(n, per_station_[s].available());
  }
  if (n == 0)
  {
    return 0;
  }
  global_.debit(n);
  if (!per_station_.empty())
  {
    per_station_[s].debit(n);
  }
  granted_[s] += n;
  activated_ = activated_ || activation;
  out_->add(s, n);
  return n;
}

RrwSaturator::RrwSaturator(AdversaryType type, std::size_t n, std::optional<IndividualRates> rates)
    : StrategyAdversary(type, n, std::move(rates)), n_(n)
{
}

void RrwSaturator::propose(const AdversaryView &view)
{
  // The token moves on every round in which nothing was heard.
  if (view.round > 0 && view.event->kind != EventKind::Heard)
  {
    token_ = static_cast<StationId>((token_ + 1) % n_);
  }
  for (std::size_t i = 1; i <= n_; ++i)
  {
    grant(static_cast<StationId>((token_ + n_ - i) % n_), kAll);
  }
}

SrrSaturator::SrrSaturator(AdversaryType type, std::size_t n, std::optional<IndividualRates> rates)
    : StrategyAdversary(type, n, std::move(rates)), n_(n)
{
}

void SrrSaturator::propose(const AdversaryView &)
{
  for (StationId s = 0; s < n_; ++s)
  {
    grant(s, kAll);
  }
}

QuadrupleSaturator::QuadrupleSaturator(AdversaryType type, std::size_t n) : StrategyAdversary(type, n, {}), n_(n) {}

void QuadrupleSaturator::propose(const AdversaryView &view)
{
  if (view.round / 8 != double_segment_)
  {
    double_segment_ = view.round / 8;
    activated_in_segment_ = 0;
  }
  if (activated_in_segment_ < 3)
  {
    for (StationId s = 0; s < n_; ++s)
    {
      if (!active_now(s))
      {
        if (grant(s, 1) > 0)
        {
          ++activated_in_segment_;
          recent_.push_back(s);
          if (recent_.size() > 3)
          {
            recent_.erase(recent_.begin());
          }
        }
        break;
      }
    }
  }
  for (StationId s : recent_)
  {
    if (active_now(s))
    {
      grant(s, kAll);
    }
  }
}

QueueBackoffDelayer::QueueBackoffDelayer(AdversaryType type, std::size_t n, Round warmup)
    : StrategyAdversary(type, n, {}), n_(n), warmup_(warmup), ahead_(n, false)
{
}

void QueueBackoffDelayer::propose(const AdversaryView &view)
{
  if (view.round < warmup_)
  {
    for (StationId s = 0; s < n_; ++s)
    {
      if (!active_now(s))
      {
        if (grant(s, kAll) > 0)
        {
          newest_ = s;
        }
        return;
      }
    }
    if (newest_)
    {
      grant(*newest_, kAll);
    }
    return;
  }
  if (!dedicated_)
  {
    for (StationId s = 0; s < n_; ++s)
    {
      if (!active_now(s))
      {
        const PacketId id = view.next_packet_id;
        if (grant(s, 1) == 1)
        {
          dedicated_ = id;
          dedicated_station_ = s;
          for (StationId a = 0; a < n_; ++a)
          {
            ahead_[a] = a != s && view.queue_sizes[a] > 0;
          }
        }
        return;
      }
    }
    return;
  }
  for (StationId s = 0; s < n_; ++s)
  {
    if (ahead_[s] && view.queue_sizes[s] == 0)
    {
      ahead_[s] = false;  // left the queue; would rejoin behind the dedicated packet
    }
    if (ahead_[s])
    {
      grant(s, kAll);
    }
  }
}

CountingStarver::CountingStarver(AdversaryType type, std::size_t n) : StrategyAdversary(type, n, {}), n_(n)
{
  if (n < 2)
  {
    throw std::invalid_argument("counting-starver needs at least two stations");
  }
}

void CountingStarver::propose(const AdversaryView &view)
{
  if (view.round == 0)
  {
    const PacketId first = view.next_packet_id;
    const std::uint64_t got = grant(target(), 2);
    for (std::uint64_t i = 0; i < got; ++i)
    {
      target_packets_.push_back(first + i);
    }
    return;
  }
  if (view.queue_sizes[target()] == 0)
  {
    return;
  }
  const bool joiner_due = view.round == 1 || view.event->kind == EventKind::Silence;
  if (!joiner_due)
  {
    return;
  }
  for (StationId s = 1; s < n_; ++s)
  {
    if (!active_now(s))
    {
      grant(s, 1);
      return;
    }
  }
}

std::uint64_t TraceLine::sum() const
{
  if (total)
  {
    return *total;
  }
  std::uint64_t s = 0;
  for (const PlanEntry &e : entries)
  {
    s += e.count;
  }
  return s;
}

namespace
{

std::uint64_t parse_count(const std::string &text, std::size_t line_no)
{
  if (text.empty() || text.find_first_not_of("0123456789") != std::string::npos)
  {
    throw TraceFormatError("line " + std::to_string(line_no) + ": expected a non-negative integer, got '" + text +
                           "'");
  }
  try
  {
    return std::stoull(text);
  }
  catch (const std::out_of_range &)
  {
    throw TraceFormatError("line " + std::to_string(line_no) + ": number too large");
  }
}

std::string trim(const std::string &s)
{
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos)
  {
    return {};
  }
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

} // namespace

std::vector<TraceLine> parse_trace(std::istream &in)
{
  std::vector<TraceLine> lines;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw))
  {
    ++line_no;
    const std::string text = trim(raw);
    TraceLine line;
    if (text.empty())
    {
      line.total = 0;
    }
    else if (text.find(':') == std::string::npos)
    {
      line.total = parse_count(text, line_no);
    }
    else
    {
      std::stringstream pairs(text);
      std::string pair;
      while (std::getline(pairs, pair, ','))
      {
        pair = trim(pair);
        const auto colon = pair.find(':');
        if (colon == std::string::npos)
        {
          throw TraceFormatError("line " + std::to_string(line_no) + ": expected station:count, got '" + pair + "'");
        }
        const std::uint64_t station = parse_count(trim(pair.substr(0, colon)), line_no);
        const std::uint64_t count = parse_count(trim(pair.substr(colon + 1)), line_no);
        if (station > std::numeric_limits<StationId>::max())
        {
          throw TraceFormatError("line " + std::to_string(line_no) + ": station id out of range");
        }
        line.entries.push_back(PlanEntry{static_cast<StationId>(station), count});
      }
    }
    lines.push_back(std::move(line));
  }
  return lines;
}

std::vector<TraceLine> read_trace_file(const std::string &path)
{
  std::ifstream in(path);
  if (!in)
  {
    throw TraceFormatError("cannot open trace file '" + path + "'");
  }
  return parse_trace(in);
}

std::vector<std::uint64_t> trace_totals(const std::vector<TraceLine> &lines)
{
  std::vector<std::uint64_t> totals;
  totals.reserve(lines.size());
  for (const TraceLine &l : lines)
  {
    totals.push_back(l.sum());
  }
  return totals;
}

std::vector<std::vector<std::uint64_t>> trace_counts(const std::vector<TraceLine> &lines, std::size_t n)
{
  std::vector<std::vector<std::uint64_t>> counts(lines.size(), std::vector<std::uint64_t>(n, 0));
  for (std::size_t t = 0; t < lines.size(); ++t)
  {
    if (lines[t].total)
    {
      counts[t].at(0) += *lines[t].total;
      continue;
    }
    for (const PlanEntry &e : lines[t].entries)
    {
      if (e.station >= n)
      {
        throw TraceFormatError("line " + std::to_string(t + 1) + ": station " + std::to_string(e.station) +
                               " outside 0.." + std::to_string(n - 1));
      }
      counts[t][e.station] += e.count;
    }
  }
  return counts;
}

void TraceAdversary::plan(const AdversaryView &view, InjectionPlan &out)
{
  if (view.round >= lines_.size())
  {
    throw TraceExhausted("trace has " + std::to_string(lines_.size()) + " rounds; round " +
                         std::to_string(view.round) + " requested");
  }
  const TraceLine &line = lines_[view.round];
  if (!line.total)
  {
    for (const PlanEntry &e : line.entries)
    {
      out.add(e.station, e.count);
    }
    return;
  }
  if (*line.total == 0)
  {
    return;
  }
  StationId target = 0;
  for (StationId s = 0; s < view.n; ++s)
  {
    if (view.active(s))
    {
      target = s;
      break;
    }
  }
  out.add(target, *line.total);
}

const std::vector<std::string> &strategy_names()
{
  static const std::vector<std::string> names{"rrw-saturator", "srr-saturator", "quadruple-saturator",
                                              "queue-backoff-delayer", "counting-starver"};
  return names;
}

std::unique_ptr<Adversary> make_strategy(const std::string &name, AdversaryType type, std::size_t n, bool individual)
{
  std::optional<IndividualRates> rates;
  if (individual)
  {
    rates = IndividualRates::uniform(type.rho, n);
  }
  if (name == "rrw-saturator")
    return std::make_unique<RrwSaturator>(type, n, rates);
  if (name == "srr-saturator")
    return std::make_unique<SrrSaturator>(type, n, rates);
  if (name == "quadruple-saturator")
    return std::make_unique<QuadrupleSaturator>(type, n);
  if (name == "queue-backoff-delayer")
    return std::make_unique<QueueBackoffDelayer>(type, n, 4 * static_cast<Round>(n));
  if (name == "counting-starver")
    return std::make_unique<CountingStarver>(type, n);
  throw std::invalid_argument("unknown strategy '" + name + "'");
}

} // namespace macsim
