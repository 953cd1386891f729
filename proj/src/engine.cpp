#include "macsim/engine.hpp"

#include <algorithm>
#include <string>

namespace macsim
{

Engine::Engine(ChannelConfig config, AlgorithmPtr algorithm, Adversary &adversary, std::uint64_t seed,
               EngineOptions options)
    : config_(config), algorithm_(std::move(algorithm)), adversary_(adversary), options_(options),
      category_(algorithm_->category())
{
  if (config_.n == 0)
  {
    throw std::invalid_argument("channel needs at least one station");
  }
  if (config_.activation_bound == 0)
  {
    throw std::invalid_argument("activation bound must be at least 1");
  }
  const StationFactoryContext ctx{config_.n, seed};
  for (StationId s = 0; s < config_.n; ++s)
  {
    stations_.push_back(algorithm_->make_station(s, ctx));
  }
  queues_.resize(config_.n);
  queue_sizes_.assign(config_.n, 0);
  engaged_.assign(config_.n, false);
  injected_now_.assign(config_.n, 0);
  empty_before_injection_.assign(config_.n, true);
}

const RoundRecord &Engine::run_round()
{
  const std::size_t n = config_.n;
  record_.round = round_;
  record_.delivered.reset();
  record_.injections.clear();

  // (1) decisions committed at the end of the previous round
  transmissions_.clear();
  for (StationId s = 0; s < n; ++s)
  {
    if (category_ != Category::FullSensing && queues_[s].empty())
    {
      continue;
    }
    const Decision d = stations_[s]->decision();
    if (!d.transmit)
    {
      continue;
    }
    Message m;
    m.control = d.control;
    if (d.with_packet)
    {
      if (queues_[s].empty())
      {
        throw InvariantViolation("station " + std::to_string(s) + " transmits a packet from an empty queue");
      }
      m.packet = queues_[s].front().id;
    }
    transmissions_.push_back(Transmission{s, std::move(m)});
  }
  record_.transmitters = transmissions_.size();

  // (2) channel outcome
  record_.event = compute_feedback(transmissions_);
  feedback_ = project_feedback(record_.event, config_.collision_detection);
  std::optional<StationId> delivered_station;
  if (record_.event.kind == EventKind::Heard && record_.event.message->packet)
  {
    const StationId s = transmissions_.front().station;
    Packet p = queues_[s].front();
    queues_[s].pop_front();
    --queue_sizes_[s];
    --total_queued_;
    ++delivered_total_;
    p.delivered_round = round_;
    if (p.delay() < 1)
    {
      throw InvariantViolation("packet " + std::to_string(p.id) + " delivered in its injection round");
    }
    record_.delivered = p;
    delivered_station = s;
  }

  // (3) injections
  for (StationId s = 0; s < n; ++s)
  {
    empty_before_injection_[s] = queues_[s].empty();
    injected_now_[s] = 0;
  }
  plan_.entries.clear();
  const AdversaryView view{round_, n, queue_sizes_, &record_.event, delivered_station, next_packet_id_};
  adversary_.plan(view, plan_);
  std::size_t activations = 0;
  for (const auto &entry : plan_.entries)
  {
    if (entry.station >= n)
    {
      throw std::out_of_range("adversary injected into unknown station " + std::to_string(entry.station));
    }
    if (entry.count == 0)
    {
      continue;
    }
    if (empty_before_injection_[entry.station] && injected_now_[entry.station] == 0)
    {
      ++activations;
    }
    for (std::uint64_t i = 0; i < entry.count; ++i)
    {
      const PacketId id = next_packet_id_++;
      queues_[entry.station].push_back(Packet{id, round_, entry.station, std::nullopt});
      record_.injections.push_back(Injection{entry.station, id});
    }
    injected_now_[entry.station] += entry.count;
    queue_sizes_[entry.station] += entry.count;
    total_queued_ += entry.count;
    injected_total_ += entry.count;
  }
  if (activations > config_.activation_bound)
  {
    throw ActivationBoundViolated("round " + std::to_string(round_) + ": " + std::to_string(activations) +
                                  " activations exceed bound " + std::to_string(config_.activation_bound));
  }
  record_.total_queued = total_queued_;

  // (4) observe and commit next decisions
  Observation obs;
  obs.round = round_;
  if (round_ > 0)
  {
    obs.feedback = feedback_;
  }
  std::size_t next_sender = 0;
  for (StationId s = 0; s < n; ++s)
  {
    const bool transmitted = next_sender < transmissions_.size() && transmissions_[next_sender].station == s;
    if (transmitted)
    {
      ++next_sender;
    }
    const bool delivered_own = delivered_station && *delivered_station == s;
    const bool activated = empty_before_injection_[s] && injected_now_[s] > 0;
    if (category_ != Category::FullSensing)
    {
      if (queues_[s].empty())
      {
        if (engaged_[s])
        {
          stations_[s]->reset();
          engaged_[s] = false;
        }
        continue;
      }
      if (activated)
      {
        if (engaged_[s])
        {
          stations_[s]->reset();
        }
        engaged_[s] = true;
      }
      else if (category_ == Category::AcknowledgementBased && delivered_own)
      {
        stations_[s]->reset();
      }
    }
    obs.transmitted = transmitted;
    obs.delivered_own = delivered_own;
    obs.injected = injected_now_[s];
    obs.activated = activated;
    obs.queue_size = queues_[s].size();
    stations_[s]->observe(obs);
  }

  if (options_.check_invariants)
  {
    check_invariants();
  }
  if (observer_)
  {
    observer_(*this, record_);
  }
  ++round_;
  return record_;
}

void Engine::check_invariants() const
{
  if (injected_total_ != delivered_total_ + total_queued_)
  {
    throw InvariantViolation("conservation broken at round " + std::to_string(round_));
  }
  std::size_t sum = 0;
  for (std::size_t q : queue_sizes_)
  {
    sum += q;
  }
  if (sum != total_queued_)
  {
    throw InvariantViolation("queue size bookkeeping broken at round " + std::to_string(round_));
  }
  if (algorithm_->collision_free() && record_.event.kind == EventKind::Collision)
  {
    throw InvariantViolation(algorithm_->name() + " produced a collision at round " + std::to_string(round_));
  }
  if (category_ == Category::FullSensing)
  {
    const std::uint64_t digest = stations_.front()->replicated_digest();
    for (const auto &st : stations_)
    {
      if (st->replicated_digest() != digest)
      {
        throw InvariantViolation("replicated state diverged at round " + std::to_string(round_) + " (station " +
                                 std::to_string(st->id()) + ")");
      }
    }
  }
  algorithm_->check_global(stations_, queue_sizes_, feedback_);
}

void validate_compatibility(const ChannelConfig &config, const Algorithm &algorithm)
{
  if (algorithm.requires_collision_detection() && !config.collision_detection)
  {
    throw IncompatibleAlgorithm("IncompatibleAlgorithm: " + algorithm.name() + " requires collision detection");
  }
}

ExecutionReport run_execution(const ChannelConfig &config, AlgorithmPtr algorithm, Adversary &adversary,
                              StopRule stop, std::uint64_t seed, const RunOptions &options)
{
  validate_compatibility(config, *algorithm);
  Engine engine(config, std::move(algorithm), adversary, seed, EngineOptions{options.check_invariants});
  if (options.observer)
  {
    engine.set_observer(options.observer);
  }
  MetricsRecorder metrics(options.stage_size);
  ExecutionReport report;

  Stabilization verdict;
  if (const auto *horizon = std::get_if<FixedHorizon>(&stop))
  {
    for (Round r = 0; r < horizon->rounds; ++r)
    {
      const RoundRecord &rec = engine.run_round();
      metrics.record_round(rec);
      if (options.keep_log)
      {
        report.log.push_back(rec);
      }
    }
    verdict = detect_stabilization(metrics.ledger().averages());
  }
  else
  {
    const auto &caps = std::get<StageVerdict>(stop);
    std::size_t seen_stages = 0;
    while (true)
    {
      const RoundRecord &rec = engine.run_round();
      metrics.record_round(rec);
      if (options.keep_log)
      {
        report.log.push_back(rec);
      }
      const auto &stages = metrics.ledger().stages();
      if (stages.size() != seen_stages)
      {
        seen_stages = stages.size();
        if (seen_stages >= kStabilizationWindow)
        {
          // Only windows ending at the newest stage can be new.
          std::vector<double> tail;
          for (std::size_t i = seen_stages - kStabilizationWindow; i < seen_stages; ++i)
          {
            tail.push_back(stages[i].average);
          }
          Stabilization s = detect_stabilization(tail);
          if (s.verdict == Verdict::Stabilized)
          {
            s.window_start = seen_stages - kStabilizationWindow;
            verdict = s;
            break;
          }
        }
      }
      if (seen_stages >= caps.max_stages || metrics.rounds() >= caps.max_rounds)
      {
        verdict = Stabilization{Verdict::Unstable, 0.0, 0};
        break;
      }
    }
  }

  auto &sum = report.summary;
  sum.stage_averages = metrics.ledger().averages();
  sum.verdict = verdict.verdict;
  if (verdict.verdict == Verdict::Stabilized)
  {
    sum.average_latency = verdict.value;
  }
  sum.max_delay = metrics.max_delay();
  sum.max_total_queue = metrics.max_total_queue();
  sum.rounds = metrics.rounds();
  sum.injected = metrics.injected();
  sum.delivered = metrics.delivered();
  report.stages = metrics.ledger().stages();
  return report;
}

} // namespace macsim
