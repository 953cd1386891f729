#include "support.hpp"

#include "macsim/strategies.hpp"

#include <doctest.h>

#include <cmath>
#include <set>
#include <sstream>

using namespace macsim;
using namespace macsim::test;

namespace
{

// Independent admissibility oracle: a trace is admissible iff the largest
// sum of (g_t - rho) over a contiguous interval is at most beta. Kadane's scan
// in exact millionths.
bool kadane_admissible(const std::vector<std::uint64_t> &g, Micro rho, Micro beta)
{
  __int128 best = 0;
  __int128 run = 0;
  bool any = false;
  for (std::uint64_t x : g)
  {
    const __int128 v = static_cast<__int128>(x) * Micro::kScale - rho.micros();
    run = any ? std::max<__int128>(run + v, v) : v;
    best = any ? std::max(best, run) : run;
    any = true;
  }
  return !any || best <= beta.micros();
}

AdversaryView view_of(Round round, const std::vector<std::size_t> &queues)
{
  return AdversaryView{round, queues.size(), queues, nullptr, std::nullopt, 0};
}

Micro random_micro(Rng &rng, std::int64_t lo, std::int64_t hi)
{
  return Micro::from_micros(lo + static_cast<std::int64_t>(uniform_below(rng, static_cast<std::uint64_t>(hi - lo + 1))));
}

} // namespace

TEST_CASE("decimal parameters are parsed exactly")
{
  CHECK(Micro::parse("0.5").micros() == 500'000);
  CHECK(Micro::parse("10").micros() == 10'000'000);
  CHECK(Micro::parse("0.123456").micros() == 123'456);
  CHECK(Micro::parse("0.95").str() == "0.950000");
  CHECK_THROWS(Micro::parse("0.1234567"));
  CHECK_THROWS(Micro::parse("-1"));
  CHECK_THROWS(Micro::parse("1e-3"));
  CHECK_THROWS(Micro::parse(""));
  CHECK_THROWS(AdversaryType::parse("0", "10"));
  CHECK_THROWS(AdversaryType::parse("1.5", "10"));
  CHECK_THROWS(AdversaryType::parse("0.5", "0.5"));
  CHECK(AdversaryType::parse("0.5", "10").burstiness() == 10);
  CHECK(AdversaryType::parse("0.6", "9.5").burstiness() == 10);
}

TEST_CASE("bucket step leaks, caps by the floor and debits")
{
  auto r = bucket_step(10.0, 0.5, 10.0, 3);
  CHECK(r.generated == 3);
  CHECK(r.level == doctest::Approx(7.0));

  r = bucket_step(0.4, 0.5, 10.0, 2);
  CHECK(r.generated == 0);
  CHECK(r.level == doctest::Approx(0.9));

  r = bucket_step(9.8, 0.5, 10.0, 0);
  CHECK(r.generated == 0);
  CHECK(r.level == doctest::Approx(10.0));
}

TEST_CASE("exact bucket stays within [0, beta]")
{
  Rng rng = derive_stream(5, 1);
  for (int trial = 0; trial < 200; ++trial)
  {
    const Micro rho = random_micro(rng, 1, 1'000'000);
    const Micro beta = random_micro(rng, 1'000'000, 10'000'000);
    Bucket b(rho, beta);
    for (int t = 0; t < 300; ++t)
    {
      b.step(uniform_below(rng, 4));
      REQUIRE(b.level() >= Micro{});
      REQUIRE(b.level() <= beta);
    }
  }
}

TEST_CASE("poisson sampler matches mean and zero probability")
{
  Rng rng = derive_stream(2024, 9);
  double sum = 0;
  const int N = 1'000'000;
  for (int i = 0; i < N; ++i)
  {
    sum += static_cast<double>(sample_poisson(rng, 0.5));
  }
  const double mean = sum / N;
  CHECK(mean >= 0.497);
  CHECK(mean <= 0.503);

  int zeros = 0;
  for (int i = 0; i < N; ++i)
  {
    zeros += sample_poisson(rng, 1.0) == 0 ? 1 : 0;
  }
  CHECK(std::abs(static_cast<double>(zeros) / N - std::exp(-1.0)) < 0.005);

  Rng a = derive_stream(3, 3);
  Rng b = derive_stream(3, 3);
  for (int i = 0; i < 1000; ++i)
  {
    REQUIRE(sample_poisson(a, 0.5) == sample_poisson(b, 0.5));
  }
  CHECK_THROWS(sample_poisson(a, 0.0));
  CHECK_THROWS(sample_poisson(a, -1.0));
}

TEST_CASE("randomized assignment with every station active activates nobody")
{
  Rng rng = derive_stream(1, 1);
  const std::vector<std::size_t> queues{1, 3, 2, 5};
  for (int i = 0; i < 100; ++i)
  {
    InjectionPlan out;
    assign_randomized(2, view_of(0, queues), rng, out);
    CHECK(out.total() == 2);
    for (const auto &e : out.entries)
    {
      CHECK(queues[e.station] > 0);
    }
  }
}

TEST_CASE("randomized assignment with every station passive uses one virtually active station")
{
  Rng rng = derive_stream(1, 2);
  const std::vector<std::size_t> queues(6, 0);
  std::vector<int> hits(6, 0);
  for (int i = 0; i < 600; ++i)
  {
    InjectionPlan out;
    assign_randomized(3, view_of(0, queues), rng, out);
    REQUIRE(out.entries.size() == 1);
    CHECK(out.entries[0].count == 3);
    ++hits[out.entries[0].station];
  }
  for (int h : hits)
  {
    CHECK(h > 50);
  }
  InjectionPlan none;
  assign_randomized(0, view_of(0, queues), rng, none);
  CHECK(none.empty());
}

TEST_CASE("a zero draw leaves the plan empty")
{
  RandomizedAdversary adv(AdversaryType::parse("0.5", "10"), 1, [](Rng &) { return std::uint64_t{0}; });
  const std::vector<std::size_t> queues(4, 0);
  for (Round r = 0; r < 20; ++r)
  {
    InjectionPlan out;
    adv.plan(view_of(r, queues), out);
    CHECK(out.empty());
  }
}

TEST_CASE("forcing the draws reproduces a full burst in round 0")
{
  std::vector<std::uint64_t> draws(50, 0);
  draws[0] = 10;
  std::size_t next = 0;
  RandomizedAdversary adv(AdversaryType::parse("0.5", "10"), 1, [&](Rng &) { return draws.at(next++); });
  std::vector<std::size_t> queues(5, 0);
  std::vector<std::uint64_t> totals;
  for (Round r = 0; r < 50; ++r)
  {
    InjectionPlan out;
    adv.plan(view_of(r, queues), out);
    totals.push_back(out.total());
    for (const auto &e : out.entries)
    {
      queues[e.station] += e.count;
    }
  }
  CHECK(totals[0] == 10);
  CHECK(accepted(check_admissible(totals, Micro::parse("0.5"), Micro::from_int(10))));
  // Tight: one more packet in round 0 would break [0,0].
  auto worse = totals;
  worse[0] = 11;
  CHECK(check_admissible(worse, Micro::parse("0.5"), Micro::from_int(10)) ==
        Admissibility{Reject{std::nullopt, Interval{0, 0}}});
}

TEST_CASE("every admissible target sequence is reachable by forcing the draws")
{
  Rng rng = derive_stream(77, 0);
  for (int trial = 0; trial < 200; ++trial)
  {
    const Micro rho = random_micro(rng, 1, 1'000'000);
    const Micro beta = random_micro(rng, 1'000'000, 10'000'000);
    // The bucket starts full and leaks before the draw, so it admits exactly the
    // sequences with at most rho(|I|-1)+beta packets in every interval I.
    std::vector<std::uint64_t> target;
    for (int t = 0; t < 120; ++t)
    {
      target.push_back(uniform_below(rng, 4));
      if (!kadane_admissible(target, rho, beta - rho))
      {
        target.back() = 0;
      }
    }
    REQUIRE(kadane_admissible(target, rho, beta - rho));
    std::size_t next = 0;
    RandomizedAdversary adv(AdversaryType::make(rho, beta), 9, [&](Rng &) { return target.at(next++); });
    std::vector<std::size_t> queues(3, 0);
    for (Round r = 0; r < target.size(); ++r)
    {
      InjectionPlan out;
      adv.plan(view_of(r, queues), out);
      REQUIRE(out.total() == target[r]);
    }
  }
}

TEST_CASE("admissibility oracle on hand-checked traces")
{
  const Micro half = Micro::parse("0.5");
  const Micro ten = Micro::from_int(10);
  CHECK(check_admissible(std::vector<std::uint64_t>{11, 0, 0}, half, ten) ==
        Admissibility{Reject{std::nullopt, Interval{0, 0}}});
  CHECK(accepted(check_admissible(std::vector<std::uint64_t>{10, 1, 0, 0}, half, ten)));
  CHECK_FALSE(accepted(check_admissible(std::vector<std::uint64_t>{10, 2, 0, 0}, half, ten)));
  CHECK(accepted(check_admissible(std::vector<std::uint64_t>(100, 0), half, ten)));
  CHECK(accepted(check_admissible(std::vector<std::uint64_t>{}, half, ten)));
}

TEST_CASE("brute-force oracle agrees with an independent linear scan")
{
  Rng rng = derive_stream(31, 0);
  int rejects = 0;
  for (int trial = 0; trial < 500; ++trial)
  {
    const Micro rho = random_micro(rng, 1, 1'000'000);
    const Micro beta = random_micro(rng, 1'000'000, 5'000'000);
    std::vector<std::uint64_t> g(1 + uniform_below(rng, 60));
    for (auto &x : g)
    {
      x = uniform_below(rng, 3);
    }
    const bool expect = kadane_admissible(g, rho, beta);
    rejects += expect ? 0 : 1;
    REQUIRE(accepted(check_admissible(g, rho, beta)) == expect);
  }
  CHECK(rejects > 50);
}

TEST_CASE("bucket-process traces are always admissible")
{
  Rng rng = derive_stream(1000, 0);
  for (int trial = 0; trial < 300; ++trial)
  {
    const Micro rho = random_micro(rng, 1, 1'000'000);
    const Micro beta = random_micro(rng, 1'000'000, 10'000'000);
    Bucket b(rho, beta);
    std::vector<std::uint64_t> g;
    for (int t = 0; t < 256; ++t)
    {
      g.push_back(b.step(uniform_below(rng, 12)));
    }
    REQUIRE(accepted(check_admissible(g, rho, beta)));
  }
}

TEST_CASE("per-station admissibility names the offending station")
{
  IndividualRates rates{{Micro::parse("0.1"), Micro::parse("0.1"), Micro::parse("0.3")}};
  const Micro rho = Micro::parse("0.5");
  const Micro beta = Micro::from_int(2);
  std::vector<std::vector<std::uint64_t>> counts(5, std::vector<std::uint64_t>(3, 0));
  counts[0][0] = 2;
  CHECK(accepted(check_admissible_individual(counts, rates, rho, beta)));
  counts[0][0] = 0;
  counts[0][2] = 3;
  CHECK(check_admissible_individual(counts, rates, rho, beta) == Admissibility{Reject{StationId{2}, Interval{0, 0}}});
  // Each station within its own budget but the sum is not.
  std::vector<std::vector<std::uint64_t>> spread(1, std::vector<std::uint64_t>{2, 2, 2});
  const auto r = check_admissible_individual(spread, rates, rho, beta);
  REQUIRE_FALSE(accepted(r));
  CHECK_FALSE(std::get<Reject>(r).station.has_value());
}

TEST_CASE("uniform individual rates sum exactly")
{
  const auto r = IndividualRates::uniform(Micro::parse("0.7"), 3);
  CHECK(r.rates[0].micros() + r.rates[1].micros() + r.rates[2].micros() == 700'000);
  CHECK_NOTHROW(r.validate(Micro::parse("0.7")));
  CHECK_THROWS(IndividualRates{{Micro::parse("0.5")}}.validate(Micro::parse("0.7")));
}

namespace
{

std::vector<std::vector<std::uint64_t>> drive_individual(IndividualRandomizedAdversary &adv, std::size_t n, Round T,
                                                         std::size_t *activations)
{
  std::vector<std::vector<std::uint64_t>> counts;
  std::vector<std::size_t> queues(n, 0);
  Rng drain = derive_stream(4, 4);
  for (Round r = 0; r < T; ++r)
  {
    // Drain a random queue to keep stations switching between active and passive.
    const auto s = uniform_below(drain, n);
    if (queues[s] > 0)
    {
      --queues[s];
    }
    InjectionPlan out;
    adv.plan(view_of(r, queues), out);
    std::vector<std::uint64_t> row(n, 0);
    std::size_t act = 0;
    for (const auto &e : out.entries)
    {
      if (queues[e.station] == 0 && row[e.station] == 0)
      {
        ++act;
      }
      row[e.station] += e.count;
    }
    for (std::size_t i = 0; i < n; ++i)
    {
      queues[i] += row[i];
    }
    *activations = std::max(*activations, act);
    counts.push_back(std::move(row));
  }
  return counts;
}

} // namespace

TEST_CASE("individual-rate randomized injections pass the per-station oracle")
{
  const auto type = AdversaryType::parse("0.9", "3");
  const auto rates = IndividualRates::uniform(type.rho, 6);
  IndividualRandomizedAdversary adv(type, rates, 3);
  std::size_t act = 0;
  const auto counts = drive_individual(adv, 6, 10'000, &act);
  CHECK(accepted(check_admissible_individual(counts, rates, type.rho, type.beta)));
  CHECK(act <= 1);
  std::uint64_t total = 0;
  for (const auto &row : counts)
  {
    for (auto c : row)
    {
      total += c;
    }
  }
  // Clipping by a beta=3 bucket at zero drift costs a sizeable share of the draws.
  CHECK(total > 6000);
}

TEST_CASE("a single nonzero individual rate sends everything to that station")
{
  const auto type = AdversaryType::parse("0.6", "4");
  IndividualRates rates{{type.rho, Micro{}, Micro{}, Micro{}}};
  IndividualRandomizedAdversary adv(type, rates, 8);
  std::size_t act = 0;
  const auto counts = drive_individual(adv, 4, 2000, &act);
  std::uint64_t zero = 0;
  for (const auto &row : counts)
  {
    zero += row[0];
    CHECK(row[1] + row[2] + row[3] == 0);
  }
  CHECK(zero > 1000);
}

TEST_CASE("an empty global bucket blocks every per-station draw")
{
  // beta = 1 and rho tiny: after the first packet the global bucket needs a
  // long time to refill, whatever the per-station draws are.
  const auto type = AdversaryType::parse("0.01", "1");
  IndividualRandomizedAdversary adv(type, IndividualRates::uniform(type.rho, 2), 1);
  std::vector<std::size_t> queues(2, 1);
  Bucket mirror(type.rho, type.beta);
  for (Round r = 0; r < 3000; ++r)
  {
    mirror.leak();
    InjectionPlan out;
    adv.plan(view_of(r, queues), out);
    if (mirror.available() == 0)
    {
      REQUIRE(out.empty());
    }
    mirror.debit(out.total());
  }
}

TEST_CASE("randomized adversaries never activate two stations in a round")
{
  for (std::size_t n : {1u, 2u, 5u, 20u})
  {
    for (const char *rho : {"0.3", "0.9", "1"})
    {
      RandomizedAdversary adv(AdversaryType::parse(rho, "10"), n);
      std::vector<std::size_t> queues(n, 0);
      for (Round r = 0; r < 3000; ++r)
      {
        if (queues[r % n] > 0)
        {
          --queues[r % n];
        }
        InjectionPlan out;
        adv.plan(view_of(r, queues), out);
        std::size_t act = 0;
        for (const auto &e : out.entries)
        {
          act += queues[e.station] == 0 ? 1 : 0;
        }
        std::set<StationId> distinct;
        for (const auto &e : out.entries)
        {
          if (queues[e.station] == 0)
          {
            distinct.insert(e.station);
          }
        }
        REQUIRE(distinct.size() <= 1);
        for (const auto &e : out.entries)
        {
          queues[e.station] += e.count;
        }
      }
    }
  }
}

TEST_CASE("trace files parse all three line forms")
{
  std::istringstream in("3\n\n0:2,3:1\n  7 \n");
  const auto lines = parse_trace(in);
  REQUIRE(lines.size() == 4);
  CHECK(lines[0].sum() == 3);
  CHECK(lines[1].sum() == 0);
  CHECK(lines[2].individual());
  CHECK(lines[2].entries == std::vector<PlanEntry>{{0, 2}, {3, 1}});
  CHECK(lines[3].sum() == 7);
  std::istringstream bad("1\nabc\n");
  CHECK_THROWS_AS(parse_trace(bad), TraceFormatError);
  std::istringstream bad_pair("0:1,2\n");
  CHECK_THROWS_AS(parse_trace(bad_pair), TraceFormatError);
}

TEST_CASE("a trace played past its end is exhausted")
{
  std::istringstream in("1\n0\n0\n");
  TraceAdversary adv(parse_trace(in));
  const std::vector<std::size_t> queues(2, 0);
  for (Round r = 0; r < 3; ++r)
  {
    InjectionPlan out;
    CHECK_NOTHROW(adv.plan(view_of(r, queues), out));
  }
  InjectionPlan out;
  CHECK_THROWS_AS(adv.plan(view_of(3, queues), out), TraceExhausted);
}
