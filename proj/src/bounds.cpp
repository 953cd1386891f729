#include "macsim/bounds.hpp"

#include "macsim/engine.hpp"
#include "macsim/strategies.hpp"

#include <cmath>
#include <limits>

namespace macsim
{

namespace
{

struct TheoremRow
{
  Theorem theorem;
  const char *name;
  TheoremInfo info;
};

const std::vector<TheoremRow> &rows()
{
  static const std::vector<TheoremRow> table{
      {Theorem::RrwIndividual, "rrw-individual", {"rrw", true, false, "rrw-saturator"}},
      {Theorem::SrrIndividual, "srr-individual", {"srr", true, true, "srr-saturator"}},
      {Theorem::Quadruple, "quadruple", {"quadruple-round", false, true, "quadruple-saturator"}},
      {Theorem::QueueBackoff, "queue-backoff", {"queue-backoff", false, false, "queue-backoff-delayer"}},
      {Theorem::RrwGeneral, "rrw-general", {"rrw", false, false, "rrw-saturator"}},
      {Theorem::OfRrwGeneral, "of-rrw-general", {"of-rrw", false, false, "rrw-saturator"}},
      {Theorem::OfSrrGeneral, "of-srr-general", {"of-srr", false, true, "srr-saturator"}},
      {Theorem::SrrGeneral, "srr-general", {"srr", false, true, "srr-saturator"}},
      {Theorem::CountingBackoff, "counting-backoff", {"counting-backoff", false, true, "counting-starver"}},
      {Theorem::Quadruple38, "quadruple-38", {"quadruple-round", false, true, "quadruple-saturator"}},
  };
  return table;
}

const TheoremRow &row(Theorem t)
{
  for (const auto &r : rows())
  {
    if (r.theorem == t)
    {
      return r;
    }
  }
  throw std::invalid_argument("unknown theorem");
}

constexpr double kInf = std::numeric_limits<double>::infinity();

} // namespace

std::string to_string(Theorem t) { return row(t).name; }

Theorem parse_theorem(const std::string &name)
{
  for (const auto &r : rows())
  {
    if (name == r.name)
    {
      return r.theorem;
    }
  }
  throw std::invalid_argument("unknown theorem '" + name + "'");
}

const std::vector<Theorem> &all_theorems()
{
  static const std::vector<Theorem> all = [] {
    std::vector<Theorem> v;
    for (const auto &r : rows())
    {
      v.push_back(r.theorem);
    }
    return v;
  }();
  return all;
}

TheoremInfo theorem_info(Theorem t) { return row(t).info; }

BoundPair bound_formula(Theorem t, std::size_t n_stations, double rho, double beta)
{
  if (!(rho > 0.0) || rho > 1.0 || beta < 1.0 || n_stations == 0)
  {
    throw OutOfRange(to_string(t) + ": parameters outside 0 < rho <= 1, beta >= 1, n >= 1");
  }
  const double n = static_cast<double>(n_stations);
  const auto need = [&](bool ok, const char *region) {
    if (!ok)
    {
      throw OutOfRange(to_string(t) + " applies only for " + region);
    }
  };
  switch (t)
  {
  case Theorem::RrwIndividual:
    need(rho < 1.0, "rho < 1");
    return {rho / (1 - rho) * n + beta, (2 - rho) / (1 - rho) * n + beta};
  case Theorem::SrrIndividual:
    need(rho < 1.0, "rho < 1");
    return {2 * rho / (1 - rho) * n + beta, (3 - rho) / (1 - rho) * n + beta};
  case Theorem::Quadruple:
    need(rho < 3.0 / 7.0, "rho < 3/7");
    return {rho / (3 - 7 * rho) * n + beta,
            7 * rho / ((3 - 7 * rho) * (3 - 7 * rho)) * n + (n + 7 * beta) / (3 - 7 * rho)};
  case Theorem::QueueBackoff:
    need(rho < 1.0, "rho < 1");
    return {rho / (1 - rho) * n + beta, rho / ((1 - rho) * (1 - rho)) * n + beta / (1 - rho)};
  case Theorem::RrwGeneral:
    need(rho < 1.0, "rho < 1");
    return {2 * rho / (1 - rho) * n + beta, (2 - rho) / ((1 - rho) * (1 - rho)) * n + beta / (1 - rho)};
  case Theorem::OfRrwGeneral:
    need(rho < 1.0, "rho < 1");
    return {2 * rho / (1 - rho) * n + beta, 2 / (1 - rho) * n + beta * (1 + rho)};
  case Theorem::OfSrrGeneral:
    need(rho < 1.0, "rho < 1");
    return {4 * rho / (1 - rho) * n + beta, 4 / (1 - rho) * n + beta * (1 + rho)};
  case Theorem::SrrGeneral:
    need(rho < 1.0, "rho < 1");
    return {4 * rho / (1 - rho) * n + beta, (4 - 2 * rho) / ((1 - rho) * (1 - rho)) * n + beta / (1 - rho)};
  case Theorem::CountingBackoff:
    need(rho < 1.0 / 3.0, "rho < 1/3");
    return {kInf, (3 * beta - 3) / (1 - 3 * rho)};
  case Theorem::Quadruple38:
    need(rho <= 3.0 / 8.0, "rho <= 3/8");
    return {beta + kQuadruple38QueueSlack, 2 * beta + 4};
  }
  throw std::invalid_argument("unknown theorem");
}

namespace
{

struct RunTracker
{
  BoundPair bounds;
  std::size_t max_queue = 0;
  std::uint64_t max_delay = 0;
  std::optional<BoundViolation> first;
};

void run_one(Theorem t, const AlgorithmPtr &algorithm, const VerifyParams &p, Adversary &adversary,
             const std::string &label, std::uint64_t seed, RunTracker &tr)
{
  const TheoremInfo info = theorem_info(t);
  ChannelConfig config{p.n, info.collision_detection, 1};
  RunOptions opts;
  opts.check_invariants = p.check_invariants;
  opts.observer = [&](const Engine &, const RoundRecord &rec) {
    tr.max_queue = std::max(tr.max_queue, rec.total_queued);
    if (!tr.first && static_cast<double>(rec.total_queued) > tr.bounds.queue)
    {
      tr.first = BoundViolation{label, seed, rec.round, "queue", static_cast<double>(rec.total_queued),
                                tr.bounds.queue};
    }
    if (rec.delivered)
    {
      const std::uint64_t d = rec.delivered->delay();
      tr.max_delay = std::max(tr.max_delay, d);
      if (!tr.first && static_cast<double>(d) > tr.bounds.latency)
      {
        tr.first = BoundViolation{label, seed, rec.round, "latency", static_cast<double>(d), tr.bounds.latency};
      }
    }
  };
  run_execution(config, algorithm, adversary, FixedHorizon{p.horizon}, seed, opts);
}

} // namespace

VerifyReport verify_bounds(Theorem t, AlgorithmPtr algorithm, const VerifyParams &params)
{
  const TheoremInfo info = theorem_info(t);
  if (algorithm->name() != info.algorithm)
  {
    throw IncompatibleAlgorithm("IncompatibleAlgorithm: " + to_string(t) + " covers " + info.algorithm + ", not " +
                                algorithm->name());
  }
  VerifyReport report;
  report.theorem = t;
  report.bounds = bound_formula(t, params.n, params.rho.to_double(), params.beta.to_double());
  const AdversaryType type = AdversaryType::make(params.rho, params.beta);

  for (std::uint64_t seed : params.seeds)
  {
    for (int kind = 0; kind < 2; ++kind)
    {
      const bool scripted = kind == 0;
      if ((scripted && !params.scripted) || (!scripted && !params.randomized))
      {
        continue;
      }
      std::unique_ptr<Adversary> adversary;
      if (scripted)
      {
        adversary = make_strategy(info.strategy, type, params.n, info.individual_rates);
      }
      else if (info.individual_rates)
      {
        adversary = std::make_unique<IndividualRandomizedAdversary>(
            type, IndividualRates::uniform(params.rho, params.n), seed);
      }
      else
      {
        adversary = std::make_unique<RandomizedAdversary>(type, seed);
      }
      RunTracker tr{report.bounds, 0, 0, std::nullopt};
      run_one(t, algorithm, params, *adversary, scripted ? "scripted" : "randomized", seed, tr);
      ++report.runs;
      report.max_queue = std::max(report.max_queue, tr.max_queue);
      report.max_delay = std::max(report.max_delay, tr.max_delay);
      if (tr.first)
      {
        report.violations.push_back(*tr.first);
      }
    }
  }
  return report;
}

} // namespace macsim
