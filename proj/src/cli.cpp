#include "macsim/cli.hpp"

#include "macsim/bounds.hpp"
#include "macsim/config.hpp"
#include "macsim/registry.hpp"
#include "macsim/strategies.hpp"

#include <CLI11.hpp>

#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>
#include <thread>

namespace macsim
{

namespace
{

std::vector<std::string> split_list(const std::string &text)
{
  std::vector<std::string> items;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ','))
  {
    if (!item.empty())
    {
      items.push_back(item);
    }
  }
  return items;
}

std::string fmt6(double v)
{
  if (std::isinf(v))
  {
    return "inf";
  }
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

// Writes to `path`, or to `out` when the path is empty.
void deliver(const std::string &path, const std::string &text, std::ostream &out)
{
  if (path.empty())
  {
    out << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f)
  {
    throw ConfigError("cannot write '" + path + "'");
  }
  f << text;
}

struct ConfigFlags
{
  std::string config_path;
  std::string algorithm;
  std::size_t n = 0;
  std::string rho;
  std::string beta;
  std::string cd;
  bool cd_flag = false;
  std::uint64_t seed = 0;
  std::size_t stage_size = 0;
  std::size_t max_stages = 0;
  Round max_rounds = 0;
  std::string adversary;
  std::string output;

  CLI::Option *o_algorithm = nullptr;
  CLI::Option *o_n = nullptr;
  CLI::Option *o_rho = nullptr;
  CLI::Option *o_beta = nullptr;
  CLI::Option *o_cd = nullptr;
  CLI::Option *o_cd_flag = nullptr;
  CLI::Option *o_seed = nullptr;
  CLI::Option *o_stage_size = nullptr;
  CLI::Option *o_max_stages = nullptr;
  CLI::Option *o_max_rounds = nullptr;
  CLI::Option *o_adversary = nullptr;
  CLI::Option *o_output = nullptr;

  void attach(CLI::App &app, bool with_algorithm)
  {
    app.add_option("--config", config_path, "key = value file; flags override it");
    if (with_algorithm)
    {
      o_algorithm = app.add_option("--algorithm", algorithm, "algorithm name");
      o_n = app.add_option("--n", n, "number of stations");
      o_rho = app.add_option("--rho", rho, "injection rate (decimal, up to 6 fractional digits)");
    }
    o_beta = app.add_option("--beta", beta, "burstiness (default 10)");
    o_cd = app.add_option("--cd", cd, "collision detection: on, off or auto");
    o_cd_flag = app.add_flag("--collision-detection", cd_flag, "channel with collision detection");
    o_seed = app.add_option("--seed", seed, "seed (default: MACSIM_SEED or 1)");
    o_stage_size = app.add_option("--stage-size", stage_size, "packets per stage (default 5000)");
    o_max_stages = app.add_option("--max-stages", max_stages, "stage cap (default 200)");
    o_max_rounds = app.add_option("--max-rounds", max_rounds, "round cap (default 10^7)");
    o_adversary = app.add_option("--adversary", adversary,
                                 "randomized, randomized-individual, a strategy name, or trace:<path>");
    o_output = app.add_option("--output", output, "output file (default stdout)");
  }

  ExperimentConfig resolve(ExperimentConfig base) const
  {
    base.seed = default_seed();
    ExperimentConfig c = config_path.empty() ? base : read_config_file(config_path, base);
    const auto given = [](const CLI::Option *o) { return o != nullptr && o->count() > 0; };
    if (given(o_algorithm))
      c.algorithm = algorithm;
    if (given(o_n))
      c.n = n;
    if (given(o_rho))
      c.rho = Micro::parse(rho);
    if (given(o_beta))
      c.beta = Micro::parse(beta);
    if (given(o_cd))
      c.collision_detection = parse_cd_mode(cd);
    if (given(o_cd_flag))
      c.collision_detection = CdMode::On;
    if (given(o_seed))
      c.seed = seed;
    if (given(o_stage_size))
      c.stage_size = stage_size;
    if (given(o_max_stages))
      c.max_stages = max_stages;
    if (given(o_max_rounds))
      c.max_rounds = max_rounds;
    if (given(o_adversary))
      c.adversary = adversary;
    if (given(o_output))
      c.output = output;
    return c;
  }
};

AlgorithmPtr lookup(const CliHooks &hooks, const std::string &name)
{
  if (hooks.algorithm_factory)
  {
    return hooks.algorithm_factory(name);
  }
  try
  {
    return make_algorithm(name);
  }
  catch (const UnknownAlgorithm &e)
  {
    throw ConfigError(e.what());
  }
}

int cmd_run(const ConfigFlags &flags, const std::string &stages_path, std::ostream &out, const CliHooks &hooks)
{
  const ExperimentConfig c = flags.resolve(ExperimentConfig{});
  const RunRow row = run_experiment(c, lookup(hooks, c.algorithm));
  deliver(c.output, std::string(kCsvHeader) + "\n" + csv_row(row) + "\n", out);
  if (!stages_path.empty())
  {
    deliver(stages_path, stage_csv(row), out);
  }
  return kExitOk;
}

struct SweepFlags
{
  std::string algorithms;
  std::string ns;
  std::string rhos;
  std::string preset;
  std::size_t seeds = 1;
  unsigned jobs = 1;
};

int cmd_sweep(const ConfigFlags &flags, const SweepFlags &sf, std::ostream &out, const CliHooks &hooks)
{
  ExperimentConfig defaults;
  defaults.collision_detection = CdMode::Auto;
  defaults = flags.resolve(defaults);

  SweepGrid grid;
  if (!sf.preset.empty())
  {
    grid = SweepGrid::preset(sf.preset);
  }
  if (!sf.algorithms.empty() || sf.preset.empty())
  {
    grid.algorithms = split_list(sf.algorithms);
  }
  if (!sf.ns.empty())
  {
    grid.ns.clear();
    for (const auto &s : split_list(sf.ns))
    {
      try
      {
        grid.ns.push_back(std::stoul(s));
      }
      catch (const std::exception &)
      {
        throw ConfigError("--ns: bad station count '" + s + "'");
      }
    }
  }
  if (!sf.rhos.empty())
  {
    grid.rhos.clear();
    for (const auto &s : split_list(sf.rhos))
    {
      grid.rhos.push_back(Micro::parse(s));
    }
  }
  if (grid.ns.empty())
  {
    grid.ns.push_back(defaults.n);
  }
  if (grid.rhos.empty())
  {
    grid.rhos.push_back(defaults.rho);
  }
  grid.seeds_per_cell = sf.seeds;
  for (const auto &a : grid.algorithms)
  {
    lookup(hooks, a);
  }

  const auto cells = grid.cells(defaults.seed);
  std::vector<std::string> rows(cells.size());
  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (std::size_t i = next++; i < cells.size(); i = next++)
    {
      ExperimentConfig c = defaults;
      c.algorithm = cells[i].algorithm;
      c.n = cells[i].n;
      c.rho = cells[i].rho;
      c.seed = cells[i].seed;
      c.output.clear();
      RunRow row;
      try
      {
        row = run_experiment(c, lookup(hooks, c.algorithm));
      }
      catch (const std::exception &e)
      {
        row.config = c;
        row.error = e.what();
      }
      rows[i] = csv_row(row);
    }
  };
  const unsigned jobs = std::max(1u, sf.jobs);
  if (jobs == 1)
  {
    worker();
  }
  else
  {
    std::vector<std::thread> pool;
    for (unsigned j = 0; j < jobs; ++j)
    {
      pool.emplace_back(worker);
    }
    for (auto &t : pool)
    {
      t.join();
    }
  }
  std::string text = std::string(kCsvHeader) + "\n";
  for (const auto &r : rows)
  {
    text += r + "\n";
  }
  deliver(defaults.output, text, out);
  return kExitOk;
}

struct VerifyFlags
{
  std::string theorem;
  std::string algorithm;
  std::size_t n = 10;
  std::string rho = "0.5";
  std::string beta = "10";
  std::size_t seeds = 10;
  std::uint64_t first_seed = 0;
  CLI::Option *o_first_seed = nullptr;
  Round horizon = 20'000;
};

int cmd_verify_bounds(const VerifyFlags &vf, std::ostream &out, const CliHooks &hooks)
{
  const Theorem t = [&] {
    try
    {
      return parse_theorem(vf.theorem);
    }
    catch (const std::invalid_argument &e)
    {
      throw ConfigError(e.what());
    }
  }();
  const std::string algorithm = vf.algorithm.empty() ? theorem_info(t).algorithm : vf.algorithm;
  VerifyParams p;
  p.n = vf.n;
  p.rho = Micro::parse(vf.rho);
  p.beta = Micro::parse(vf.beta);
  p.horizon = vf.horizon;
  p.seeds.clear();
  const std::uint64_t first = vf.o_first_seed->count() > 0 ? vf.first_seed : default_seed();
  for (std::size_t i = 0; i < vf.seeds; ++i)
  {
    p.seeds.push_back(first + i);
  }
  const VerifyReport rep = verify_bounds(t, lookup(hooks, algorithm), p);
  out << "theorem=" << to_string(t) << " algorithm=" << algorithm << " n=" << p.n << " rho=" << p.rho.str()
      << " beta=" << p.beta.str() << " seeds=" << vf.seeds << " runs=" << rep.runs << '\n';
  out << "queue: measured " << rep.max_queue << " bound " << fmt6(rep.bounds.queue) << '\n';
  out << "latency: measured " << rep.max_delay << " bound " << fmt6(rep.bounds.latency) << '\n';
  for (const auto &v : rep.violations)
  {
    out << "violation: adversary=" << v.adversary << " seed=" << v.seed << " round=" << v.round << ' ' << v.quantity
        << ' ' << static_cast<long long>(v.measured) << " > " << fmt6(v.bound) << '\n';
  }
  out << (rep.passed() ? "PASS" : "FAIL") << '\n';
  return rep.passed() ? kExitOk : kExitViolation;
}

struct CheckFlags
{
  std::string trace;
  std::string rho;
  std::string beta = "10";
  std::string individual;
};

int cmd_check_adversary(const CheckFlags &cf, std::ostream &out)
{
  std::vector<TraceLine> lines;
  try
  {
    lines = read_trace_file(cf.trace);
  }
  catch (const TraceFormatError &e)
  {
    throw ConfigError(e.what());
  }
  const AdversaryType type = AdversaryType::parse(cf.rho, cf.beta);
  Admissibility verdict;
  if (cf.individual.empty())
  {
    verdict = check_admissible(trace_totals(lines), type.rho, type.beta);
  }
  else
  {
    IndividualRates rates;
    for (const auto &r : split_list(cf.individual))
    {
      rates.rates.push_back(Micro::parse(r));
    }
    rates.validate(type.rho);
    std::vector<std::vector<std::uint64_t>> counts;
    try
    {
      counts = trace_counts(lines, rates.rates.size());
    }
    catch (const TraceFormatError &e)
    {
      throw ConfigError(e.what());
    }
    verdict = check_admissible_individual(counts, rates, type.rho, type.beta);
  }
  if (accepted(verdict))
  {
    out << "accept rounds=" << lines.size() << '\n';
    return kExitOk;
  }
  const Reject &r = std::get<Reject>(verdict);
  out << "reject";
  if (r.station)
  {
    out << " station=" << *r.station;
  }
  out << " interval=[" << r.interval.first << ',' << r.interval.last << "]\n";
  return kExitViolation;
}

} // namespace

int run_cli(int argc, const char *const *argv, std::ostream &out, std::ostream &err, const CliHooks &hooks)
{
  CLI::App app{"Simulator of broadcast algorithms on multiple-access channels against leaky-bucket adversaries",
               "macsim"};
  app.require_subcommand(1);

  ConfigFlags run_flags;
  std::string stages_path;
  CLI::App *run = app.add_subcommand("run", "one execution until its latency stabilizes or the caps are hit");
  run_flags.attach(*run, true);
  run->add_option("--stages", stages_path, "write per-stage averages as CSV to this file");

  ConfigFlags sweep_flags;
  SweepFlags sf;
  CLI::App *sweep = app.add_subcommand("sweep", "grid of runs, one CSV row per (algorithm, n, rho, seed)");
  sweep_flags.attach(*sweep, false);
  sweep->add_option("--algorithms", sf.algorithms, "comma-separated algorithm names");
  sweep->add_option("--ns", sf.ns, "comma-separated station counts");
  sweep->add_option("--rhos", sf.rhos, "comma-separated injection rates");
  sweep->add_option("--preset", sf.preset, "fig1, fig2, fig3 or fig4");
  sweep->add_option("--seeds", sf.seeds, "seeds per cell, counting up from --seed");
  sweep->add_option("--jobs", sf.jobs, "worker threads");

  VerifyFlags vf;
  CLI::App *verify = app.add_subcommand("verify-bounds", "check measured queues and delays against a theorem");
  verify->add_option("--theorem", vf.theorem, "theorem id")->required();
  verify->add_option("--algorithm", vf.algorithm, "algorithm (default: the theorem's)");
  verify->add_option("--n", vf.n, "number of stations");
  verify->add_option("--rho", vf.rho, "injection rate");
  verify->add_option("--beta", vf.beta, "burstiness");
  verify->add_option("--seeds", vf.seeds, "number of seeds");
  vf.o_first_seed = verify->add_option("--seed", vf.first_seed, "first seed (default: MACSIM_SEED or 1)");
  verify->add_option("--horizon", vf.horizon, "rounds per run");

  CheckFlags cf;
  CLI::App *check = app.add_subcommand("check-adversary", "admissibility of an injection trace");
  check->add_option("--trace", cf.trace, "trace file")->required();
  check->add_option("--rho", cf.rho, "injection rate")->required();
  check->add_option("--beta", cf.beta, "burstiness");
  check->add_option("--individual", cf.individual, "comma-separated per-station rates");

  try
  {
    app.parse(argc, argv);
  }
  catch (const CLI::CallForHelp &)
  {
    out << app.help();
    return kExitOk;
  }
  catch (const CLI::CallForAllHelp &)
  {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  }
  catch (const CLI::ParseError &e)
  {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  }

  try
  {
    if (run->parsed())
      return cmd_run(run_flags, stages_path, out, hooks);
    if (sweep->parsed())
      return cmd_sweep(sweep_flags, sf, out, hooks);
    if (verify->parsed())
      return cmd_verify_bounds(vf, out, hooks);
    if (check->parsed())
      return cmd_check_adversary(cf, out);
  }
  catch (const std::invalid_argument &e)
  {
    // ConfigError, UnknownAlgorithm, bad numbers and rates
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  }
  catch (const IncompatibleAlgorithm &e)
  {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  }
  catch (const OutOfRange &e)
  {
    err << "error: OutOfRange: " << e.what() << '\n';
    return kExitConfig;
  }
  catch (const TraceExhausted &e)
  {
    err << "error: TraceExhausted: " << e.what() << '\n';
    return kExitConfig;
  }
  catch (const InvariantViolation &e)
  {
    err << "invariant violated: " << e.what() << '\n';
    return kExitViolation;
  }
  return kExitConfig;
}

} // namespace macsim
