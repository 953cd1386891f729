#pragma once

#include "macsim/engine.hpp"
#include "macsim/registry.hpp"

#include <initializer_list>
#include <vector>

namespace macsim::test
{

inline InjectionPlan plan(std::initializer_list<PlanEntry> entries)
{
  InjectionPlan p;
  for (const auto &e : entries)
  {
    p.add(e.station, e.count);
  }
  return p;
}

// Rounds [0, script.size()) follow the script; later rounds inject nothing.
inline std::vector<RoundRecord> simulate(ChannelConfig config, AlgorithmPtr algorithm, Adversary &adversary, Round rounds,
                                         std::uint64_t seed = 1)
{
  Engine engine(config, std::move(algorithm), adversary, seed, EngineOptions{true});
  std::vector<RoundRecord> log;
  for (Round r = 0; r < rounds; ++r)
  {
    log.push_back(engine.run_round());
  }
  return log;
}

inline std::vector<RoundRecord> simulate_script(ChannelConfig config, const std::string &algorithm,
                                                std::vector<InjectionPlan> script, Round rounds)
{
  ScriptedAdversary adv(std::move(script));
  return simulate(config, make_algorithm(algorithm), adv, rounds);
}

inline std::vector<EventKind> events(const std::vector<RoundRecord> &log, Round from, Round to)
{
  std::vector<EventKind> out;
  for (Round r = from; r < to; ++r)
  {
    out.push_back(log.at(r).event.kind);
  }
  return out;
}

// Every station with packets transmits every round; a deliberately ill-behaved test double.
class AlwaysSend final : public Algorithm
{
public:
  std::string name() const override { return "always-send"; }
  Category category() const override { return Category::FullSensing; }
  bool requires_collision_detection() const override { return false; }
  StationPtr make_station(StationId id, const StationFactoryContext &) const override
  {
    struct S final : Station
    {
      using Station::Station;
      std::size_t queue = 0;
      void observe(const Observation &o) override { queue = o.queue_size; }
      Decision decision() const override { return queue > 0 ? Decision::send() : Decision::pause(); }
      void reset() override { queue = 0; }
    };
    return std::make_unique<S>(id);
  }
};

constexpr EventKind S = EventKind::Silence;
constexpr EventKind H = EventKind::Heard;
constexpr EventKind C = EventKind::Collision;

} // namespace macsim::test
