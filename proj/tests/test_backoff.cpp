#include "support.hpp"

#include "macsim/backoff.hpp"

#include <doctest.h>

#include <array>
#include <cmath>

using namespace macsim;
using namespace macsim::test;

namespace
{

constexpr BackoffPolicy kBeb{BackoffKind::Binary, false};
constexpr BackoffPolicy kBebCapped{BackoffKind::Binary, true};
constexpr BackoffPolicy kQb{BackoffKind::Quadratic, false};
constexpr BackoffPolicy kQbCapped{BackoffKind::Quadratic, true};

// Two stations that failed together draw from the same window; the chance of
// the k-th joint attempt being the first one apart.
double first_split_probability(BackoffPolicy policy, std::uint64_t k)
{
  double p = 1.0;
  for (std::uint64_t j = 1; j < k; ++j)
  {
    p /= static_cast<double>(window_size(policy, j));
  }
  return p * (1.0 - 1.0 / static_cast<double>(window_size(policy, k)));
}

} // namespace

TEST_CASE("window sizes")
{
  CHECK(window_size(kBeb, 3) == 8);
  CHECK(window_size(kBebCapped, 12) == 1024);
  CHECK(window_size(kQb, 5) == 25);
  CHECK(window_size(kQbCapped, 40) == 1024);
  CHECK(window_size(kBebCapped, 4) == 16);
  CHECK(window_size(kQbCapped, 7) == 49);
  CHECK(window_size(kQb, 1) == 1);
  CHECK_THROWS_AS(window_size(kBeb, 0), std::invalid_argument);
  CHECK_THROWS(window_size(kBeb, 64));
}

TEST_CASE("backoff names")
{
  CHECK(make_backoff(kBeb)->name() == "beb");
  CHECK(make_backoff(kBebCapped)->name() == "beb-capped");
  CHECK(make_backoff(kQb)->name() == "qb");
  CHECK(make_backoff(kQbCapped)->name() == "qb-capped");
  CHECK(make_backoff(kQb)->category() == Category::AcknowledgementBased);
}

TEST_CASE("a lone backoff station is heard with delay 1")
{
  for (const char *name : {"beb", "beb-capped", "qb", "qb-capped"})
  {
    const auto log = simulate_script({5, false, 1}, name, {{}, plan({{3, 1}})}, 4);
    REQUIRE(log[2].delivered);
    CHECK(log[2].delivered->delay() == 1);
  }
}

TEST_CASE("two simultaneous stations collide, then split with the window odds")
{
  for (BackoffPolicy policy : {kBeb, kQb})
  {
    CAPTURE(static_cast<int>(policy.kind));
    constexpr int kRuns = 20000;
    std::array<int, 5> hist{};
    for (int seed = 1; seed <= kRuns; ++seed)
    {
      ScriptedAdversary adv({plan({{0, 1}, {1, 1}})});
      const auto log = simulate({2, false, 2}, make_backoff(policy), adv, 64, static_cast<std::uint64_t>(seed));
      REQUIRE(log[1].event.kind == C);
      int collisions = 0;
      for (const auto &rec : log)
      {
        if (rec.delivered)
        {
          break;
        }
        collisions += rec.event.kind == C ? 1 : 0;
      }
      if (collisions < static_cast<int>(hist.size()))
      {
        ++hist[static_cast<std::size_t>(collisions)];
      }
    }
    for (std::uint64_t k = 1; k <= 3; ++k)
    {
      const double expected = first_split_probability(policy, k);
      const double measured = static_cast<double>(hist[k]) / kRuns;
      CAPTURE(k);
      CHECK(std::abs(measured - expected) < 0.015);
    }
  }
}

TEST_CASE("backoff schedules stay inside the current window")
{
  for (BackoffPolicy policy : {kBeb, kBebCapped, kQb, kQbCapped})
  {
    RandomizedAdversary adv(AdversaryType::parse("0.5", "4"), 9);
    Engine e({6, false, 1}, make_backoff(policy), adv, 9, EngineOptions{true});
    for (int r = 0; r < 20000; ++r)
    {
      const auto &rec = e.run_round();
      for (StationId s = 0; s < 6; ++s)
      {
        const auto &st = dynamic_cast<const BackoffStation &>(e.station(s));
        if (e.queue_sizes()[s] == 0)
        {
          continue;
        }
        REQUIRE(st.scheduled_round() >= st.window_start());
        REQUIRE(st.scheduled_round() < st.window_start() + st.window_length());
        REQUIRE(st.scheduled_round() > rec.round);
        if (st.attempts() > 0)
        {
          REQUIRE(st.window_length() == window_size(policy, st.attempts()));
        }
      }
    }
  }
}

TEST_CASE("backoff stations deliver their own packets in order")
{
  RandomizedAdversary adv(AdversaryType::parse("0.4", "8"), 2);
  Engine e({5, false, 1}, make_algorithm("beb"), adv, 2, EngineOptions{true});
  std::vector<PacketId> last(5, 0);
  std::vector<bool> any(5, false);
  for (int r = 0; r < 20000; ++r)
  {
    const auto &rec = e.run_round();
    if (rec.delivered)
    {
      const StationId s = rec.delivered->station;
      if (any[s])
      {
        REQUIRE(rec.delivered->id > last[s]);
      }
      any[s] = true;
      last[s] = rec.delivered->id;
    }
  }
}

TEST_CASE("backoff runs are reproducible from the seed")
{
  const auto run = [](std::uint64_t seed) {
    RandomizedAdversary adv(AdversaryType::parse("0.5", "5"), seed);
    const auto log = simulate({8, false, 1}, make_algorithm("qb"), adv, 5000, seed);
    std::vector<EventKind> ev;
    for (const auto &rec : log)
    {
      ev.push_back(rec.event.kind);
    }
    return ev;
  };
  CHECK(run(4) == run(4));
  CHECK(run(4) != run(5));
}

TEST_CASE("window offsets are uniform")
{
  BackoffStation st(0, kBeb, derive_stream(77, kStationStreamBase));
  std::array<int, 8> hist{};
  constexpr int kDraws = 100000;
  Round round = 0;
  for (int i = 0; i < kDraws; ++i)
  {
    st.reset();
    st.observe(Observation{round, std::nullopt, false, false, 1, true, 1});
    while (st.attempts() < 3)
    {
      ++round;
      const bool send = st.decision().transmit;
      st.observe(Observation{round, Feedback{FeedbackKind::Void, std::nullopt}, send, false, 0, false, 1});
    }
    REQUIRE(st.window_length() == 8);
    ++hist[st.scheduled_round() - st.window_start()];
  }
  for (int h : hist)
  {
    CHECK(std::abs(static_cast<double>(h) / kDraws - 0.125) < 0.01);
  }
}
