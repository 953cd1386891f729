#include "macsim/adversary.hpp"

#include <cmath>
#include <cstdio>
#include <numeric>
#include <stdexcept>

namespace macsim
{

Micro Micro::from_double(double v)
{
  if (!std::isfinite(v) || v < 0.0)
  {
    throw std::invalid_argument("Micro: value must be finite and non-negative");
  }
  return Micro(static_cast<std::int64_t>(std::llround(v * kScale)));
}

Micro Micro::parse(std::string_view text)
{
  if (text.empty())
  {
    throw std::invalid_argument("empty decimal");
  }
  std::int64_t whole = 0;
  std::int64_t frac = 0;
  int frac_digits = 0;
  bool seen_dot = false;
  bool seen_digit = false;
  for (char c : text)
  {
    if (c == '.')
    {
      if (seen_dot)
      {
        throw std::invalid_argument("malformed decimal: " + std::string(text));
      }
      seen_dot = true;
      continue;
    }
    if (c < '0' || c > '9')
    {
      throw std::invalid_argument("malformed decimal: " + std::string(text));
    }
    seen_digit = true;
    if (seen_dot)
    {
      if (++frac_digits > 6)
      {
        throw std::invalid_argument("more than six fractional digits: " + std::string(text));
      }
      frac = frac * 10 + (c - '0');
    }
    else
    {
      whole = whole * 10 + (c - '0');
      if (whole > 1'000'000'000)
      {
        throw std::invalid_argument("decimal too large: " + std::string(text));
      }
    }
  }
  if (!seen_digit)
  {
    throw std::invalid_argument("malformed decimal: " + std::string(text));
  }
  for (int i = frac_digits; i < 6; ++i)
  {
    frac *= 10;
  }
  return Micro(whole * kScale + frac);
}

std::string Micro::str() const
{
  char buf[48];
  std::snprintf(buf, sizeof buf, "%lld.%06lld", static_cast<long long>(micros_ / kScale),
                static_cast<long long>(micros_ % kScale));
  return buf;
}

AdversaryType AdversaryType::make(Micro rho, Micro beta)
{
  if (rho <= Micro{} || rho > Micro::from_int(1))
  {
    throw std::invalid_argument("injection rate must satisfy 0 < rho <= 1, got " + rho.str());
  }
  if (beta < Micro::from_int(1))
  {
    throw std::invalid_argument("burstiness must satisfy beta >= 1, got " + beta.str());
  }
  return AdversaryType{rho, beta};
}

AdversaryType AdversaryType::parse(std::string_view rho, std::string_view beta)
{
  return make(Micro::parse(rho), Micro::parse(beta));
}

BucketStepResult bucket_step(double level, double rho, double beta, std::uint64_t proposed)
{
  const double leaked = std::min(level + rho, beta);
  const auto cap = static_cast<std::uint64_t>(std::floor(leaked));
  const std::uint64_t generated = std::min(cap, proposed);
  return BucketStepResult{generated, leaked - static_cast<double>(generated)};
}

void Bucket::debit(std::uint64_t count)
{
  if (count > available())
  {
    throw std::logic_error("bucket debit exceeds available capacity");
  }
  level_ = level_ - Micro::from_int(static_cast<std::int64_t>(count));
}

std::uint64_t Bucket::step(std::uint64_t proposed)
{
  leak();
  const std::uint64_t generated = std::min(available(), proposed);
  debit(generated);
  return generated;
}

void IndividualRates::validate(Micro rho) const
{
  std::int64_t sum = 0;
  double dsum = 0.0;
  for (Micro r : rates)
  {
    if (r < Micro{} || r > Micro::from_int(1))
    {
      throw std::invalid_argument("individual rate outside [0,1]: " + r.str());
    }
    sum += r.micros();
    dsum += r.to_double();
  }
  if (sum != rho.micros() && std::abs(dsum - rho.to_double()) > 1e-9)
  {
    throw std::invalid_argument("individual rates sum to " + Micro::from_micros(sum).str() + ", expected " + rho.str());
  }
}

IndividualRates IndividualRates::uniform(Micro rho, std::size_t n)
{
  IndividualRates out;
  const auto nn = static_cast<std::int64_t>(n);
  const std::int64_t base = rho.micros() / nn;
  const std::int64_t rem = rho.micros() % nn;
  for (std::int64_t i = 0; i < nn; ++i)
  {
    out.rates.push_back(Micro::from_micros(base + (i < rem ? 1 : 0)));
  }
  return out;
}

std::uint64_t InjectionPlan::total() const
{
  std::uint64_t t = 0;
  for (const auto &e : entries)
  {
    t += e.count;
  }
  return t;
}

void InjectionPlan::add(StationId station, std::uint64_t count)
{
  if (count == 0)
  {
    return;
  }
  if (!entries.empty() && entries.back().station == station)
  {
    entries.back().count += count;
    return;
  }
  entries.push_back(PlanEntry{station, count});
}

void ScriptedAdversary::plan(const AdversaryView &view, InjectionPlan &out)
{
  if (view.round < rounds_.size())
  {
    out = rounds_[view.round];
  }
}

void assign_randomized(std::uint64_t count, const AdversaryView &view, Rng &rng, InjectionPlan &out)
{
  if (count == 0)
  {
    return;
  }
  std::vector<StationId> eligible;
  eligible.reserve(view.n);
  std::size_t passive = 0;
  for (StationId s = 0; s < view.n; ++s)
  {
    if (view.active(s))
    {
      eligible.push_back(s);
    }
    else
    {
      ++passive;
    }
  }
  if (passive > 0)
  {
    auto pick = uniform_below(rng, passive);
    for (StationId s = 0; s < view.n; ++s)
    {
      if (!view.active(s) && pick-- == 0)
      {
        eligible.push_back(s);
        break;
      }
    }
  }
  for (std::uint64_t i = 0; i < count; ++i)
  {
    out.add(eligible[uniform_below(rng, eligible.size())], 1);
  }
}

RandomizedAdversary::RandomizedAdversary(AdversaryType type, std::uint64_t seed, ProposalSource proposal)
    : type_(type), rng_(derive_stream(seed, kAdversaryStream)), bucket_(type.rho, type.beta),
      proposal_(std::move(proposal))
{
  if (!proposal_)
  {
    const double lambda = type_.rho.to_double();
    proposal_ = [lambda](Rng &rng) { return sample_poisson(rng, lambda); };
  }
}

void RandomizedAdversary::plan(const AdversaryView &view, InjectionPlan &out)
{
  const std::uint64_t generated = bucket_.step(proposal_(rng_));
  assign_randomized(generated, view, rng_, out);
}

IndividualRandomizedAdversary::IndividualRandomizedAdversary(AdversaryType type, IndividualRates rates,
                                                             std::uint64_t seed)
    : type_(type), rates_(std::move(rates)), rng_(derive_stream(seed, kAdversaryStream)), global_(type.rho, type.beta)
{
  rates_.validate(type_.rho);
  for (Micro r : rates_.rates)
  {
    per_station_.emplace_back(r, type_.beta);
  }
  pending_.assign(rates_.rates.size(), 0);
  order_.resize(rates_.rates.size());
}

void IndividualRandomizedAdversary::plan(const AdversaryView &view, InjectionPlan &out)
{
  if (view.n != rates_.rates.size())
  {
    throw std::invalid_argument("individual rates do not match station count");
  }
  global_.leak();
  for (auto &b : per_station_)
  {
    b.leak();
  }
  std::iota(order_.begin(), order_.end(), StationId{0});
  for (std::size_t i = order_.size(); i > 1; --i)
  {
    std::swap(order_[i - 1], order_[uniform_below(rng_, i)]);
  }
  bool activation_granted = false;
  for (StationId s : order_)
  {
    const double lambda = rates_.rates[s].to_double();
    const std::uint64_t draw = lambda > 0.0 ? sample_poisson(rng_, lambda) : 0;
    const std::uint64_t proposal = pending_[s] + draw;
    if (proposal == 0)
    {
      continue;
    }
    const bool passive = !view.active(s);
    if (passive && activation_granted)
    {
      pending_[s] = proposal;
      continue;
    }
    pending_[s] = 0;
    const std::uint64_t grant = std::min({proposal, per_station_[s].available(), global_.available()});
    if (grant == 0)
    {
      continue;
    }
    per_station_[s].debit(grant);
    global_.debit(grant);
    if (passive)
    {
      activation_granted = true;
    }
    out.add(s, grant);
  }
}

namespace
{

// Returns the first interval, ordered by start then end, whose sum exceeds rho*len + beta.
std::optional<Interval> first_violation(std::span<const std::uint64_t> totals, Micro rho, Micro beta)
{
  const std::size_t T = totals.size();
  for (std::size_t first = 0; first < T; ++first)
  {
    __int128 sum = 0;
    for (std::size_t last = first; last < T; ++last)
    {
      sum += totals[last];
      const __int128 len = static_cast<__int128>(last - first + 1);
      if (sum * Micro::kScale > rho.micros() * len + beta.micros())
      {
        return Interval{first, last};
      }
    }
  }
  return std::nullopt;
}

} // namespace

Admissibility check_admissible(std::span<const std::uint64_t> totals, Micro rho, Micro beta)
{
  if (auto v = first_violation(totals, rho, beta))
  {
    return Reject{std::nullopt, *v};
  }
  return Accept{};
}

Admissibility check_admissible_individual(const std::vector<std::vector<std::uint64_t>> &counts,
                                          const IndividualRates &rates, Micro rho, Micro beta)
{
  const std::size_t n = rates.rates.size();
  std::vector<std::uint64_t> series(counts.size());
  for (std::size_t t = 0; t < counts.size(); ++t)
  {
    if (counts[t].size() > n)
    {
      throw std::invalid_argument("trace names a station beyond the rate vector");
    }
  }
  for (StationId s = 0; s < n; ++s)
  {
    for (std::size_t t = 0; t < counts.size(); ++t)
    {
      series[t] = s < counts[t].size() ? counts[t][s] : 0;
    }
    if (auto v = first_violation(series, rates.rates[s], beta))
    {
      return Reject{s, *v};
    }
  }
  for (std::size_t t = 0; t < counts.size(); ++t)
  {
    series[t] = std::accumulate(counts[t].begin(), counts[t].end(), std::uint64_t{0});
  }
  if (auto v = first_violation(series, rho, beta))
  {
    return Reject{std::nullopt, *v};
  }
  return Accept{};
}

} // namespace macsim
