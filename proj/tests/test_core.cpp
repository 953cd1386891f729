#include "support.hpp"

#include <doctest.h>

using namespace macsim;
using namespace macsim::test;

TEST_CASE("channel outcome follows the number of transmitters")
{
  std::vector<Transmission> none;
  CHECK(compute_feedback(none).kind == EventKind::Silence);

  std::vector<Transmission> one{{3, Message{7, {}}}};
  const ChannelEvent heard = compute_feedback(one);
  REQUIRE(heard.kind == EventKind::Heard);
  CHECK(heard.message->packet == PacketId{7});

  std::vector<Transmission> two{{1, Message{2, {}}}, {4, Message{9, {}}}};
  const ChannelEvent coll = compute_feedback(two);
  CHECK(coll.kind == EventKind::Collision);
  CHECK_FALSE(coll.message.has_value());
}

TEST_CASE("feedback projection hides collisions without collision detection")
{
  CHECK(project_feedback(ChannelEvent::collision(), true).kind == FeedbackKind::Collision);
  CHECK(project_feedback(ChannelEvent::collision(), false).kind == FeedbackKind::Void);
  CHECK(project_feedback(ChannelEvent::silence(), false).kind == FeedbackKind::Void);
  CHECK(project_feedback(ChannelEvent::silence(), true).kind == FeedbackKind::Silence);
  Message m{5, ControlBits::of(1)};
  const Feedback fb = project_feedback(ChannelEvent::heard(m), false);
  REQUIRE(fb.heard());
  CHECK(fb.message->packet == PacketId{5});
  CHECK(fb.message->control[0] == 1);
}

TEST_CASE("a lone queued packet is heard and leaves the queue")
{
  // Packet injected at round 0, transmitted at round 1.
  const auto log = simulate_script({1, false, 1}, "rrw", {plan({{0, 1}})}, 2);
  CHECK(log[0].event.kind == EventKind::Silence);
  CHECK(log[1].event.kind == EventKind::Heard);
  REQUIRE(log[1].delivered);
  CHECK(log[1].delivered->delay() == 1);
  CHECK(log[1].total_queued == 0);
}

TEST_CASE("an injection cannot be transmitted in its own round")
{
  const auto log = simulate_script({4, false, 1}, "queue-backoff", {plan({{2, 1}})}, 2);
  CHECK(log[0].event.kind == EventKind::Silence);
  CHECK(log[0].transmitters == 0);
  CHECK(log[0].total_queued == 1);
  CHECK(log[1].transmitters == 1);
  CHECK(log[1].event.kind == EventKind::Heard);
}

TEST_CASE("two simultaneous transmitters collide and nothing is delivered")
{
  ScriptedAdversary adv({plan({{0, 1}, {1, 1}})});
  const auto log = simulate({2, true, 2}, std::make_shared<AlwaysSend>(), adv, 3);
  CHECK(log[1].event.kind == EventKind::Collision);
  CHECK_FALSE(log[1].delivered.has_value());
  CHECK(log[1].total_queued == 2);
}

TEST_CASE("more activations than the bound are rejected")
{
  ScriptedAdversary adv({plan({{0, 1}, {1, 1}})});
  Engine engine({3, false, 1}, make_algorithm("rrw"), adv, 1);
  CHECK_THROWS_AS(engine.run_round(), ActivationBoundViolated);
}

TEST_CASE("injecting into an active station is not an activation")
{
  ScriptedAdversary adv({plan({{0, 2}}), plan({{0, 1}, {1, 1}})});
  Engine engine({3, false, 1}, make_algorithm("rrw"), adv, 1);
  engine.run_round();
  CHECK_NOTHROW(engine.run_round());
}

TEST_CASE("incompatible algorithm and channel are rejected at setup")
{
  NullAdversary adv;
  CHECK_THROWS_AS(run_execution({4, false, 1}, make_algorithm("srr"), adv, FixedHorizon{5}, 1), IncompatibleAlgorithm);
  CHECK_THROWS_AS(run_execution({4, false, 1}, make_algorithm("counting-backoff"), adv, FixedHorizon{5}, 1),
                  IncompatibleAlgorithm);
  CHECK_NOTHROW(run_execution({4, true, 1}, make_algorithm("srr"), adv, FixedHorizon{5}, 1));
}

TEST_CASE("rrw delivers a packet injected at round 0 in round 1")
{
  ScriptedAdversary adv({plan({{0, 1}})});
  RunOptions opts;
  opts.keep_log = true;
  opts.check_invariants = true;
  const auto rep = run_execution({3, false, 1}, make_algorithm("rrw"), adv, FixedHorizon{5}, 7, opts);
  REQUIRE(rep.log[1].delivered);
  CHECK(rep.log[1].delivered->delivered_round == Round{1});
  CHECK(rep.log[1].delivered->delay() == 1);
  CHECK(rep.summary.max_delay == 1);
}

TEST_CASE("without injections nothing ever happens")
{
  for (const auto &name : algorithm_names())
  {
    CAPTURE(name);
    NullAdversary adv;
    const auto algo = make_algorithm(name);
    RunOptions opts;
    opts.keep_log = true;
    opts.check_invariants = true;
    const auto rep =
        run_execution({5, algo->requires_collision_detection(), 1}, algo, adv, FixedHorizon{100}, 3, opts);
    CHECK(rep.summary.delivered == 0);
    CHECK(rep.summary.max_total_queue == 0);
    for (const auto &rec : rep.log)
    {
      CHECK(rec.event.kind == EventKind::Silence);
    }
  }
}

namespace
{

std::string fingerprint(const std::vector<RoundRecord> &log)
{
  std::string s;
  for (const auto &r : log)
  {
    s += std::to_string(r.round) + ':' + std::to_string(r.transmitters) + ':' + to_string(r.event.kind) + ':' +
         (r.delivered ? std::to_string(r.delivered->id) : "-") + ':' + std::to_string(r.injections.size()) + ':' +
         std::to_string(r.total_queued) + ';';
  }
  return s;
}

} // namespace

TEST_CASE("identical seeds reproduce identical executions")
{
  for (const char *name : {"beb", "qb-capped", "queue-backoff", "mbtf"})
  {
    CAPTURE(name);
    std::string prints[2];
    for (auto &p : prints)
    {
      RandomizedAdversary adv(AdversaryType::parse("0.7", "10"), 42);
      RunOptions opts;
      opts.keep_log = true;
      p = fingerprint(run_execution({6, false, 1}, make_algorithm(name), adv, FixedHorizon{3000}, 42, opts).log);
    }
    CHECK(prints[0] == prints[1]);
  }
}

TEST_CASE("conservation, single delivery and positive delays hold in random runs")
{
  for (const auto &name : algorithm_names())
  {
    CAPTURE(name);
    const auto algo = make_algorithm(name);
    RandomizedAdversary adv(AdversaryType::parse("0.45", "4"), 11);
    Engine engine({7, algo->requires_collision_detection(), 1}, algo, adv, 11, EngineOptions{true});
    std::uint64_t injected = 0;
    std::uint64_t delivered = 0;
    for (int r = 0; r < 4000; ++r)
    {
      const RoundRecord &rec = engine.run_round();
      injected += rec.injections.size();
      if (rec.delivered)
      {
        ++delivered;
        CHECK(rec.delivered->delay() >= 1);
        CHECK(rec.event.kind == EventKind::Heard);
      }
      CHECK(injected == delivered + rec.total_queued);
    }
  }
}
