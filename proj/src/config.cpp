#include "macsim/config.hpp"

#include "macsim/registry.hpp"
#include "macsim/strategies.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <tuple>

namespace macsim
{

namespace
{

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

std::uint64_t parse_unsigned(const std::string &key, const std::string &text)
{
  if (text.empty() || text.find_first_not_of("0123456789") != std::string::npos)
  {
    throw ConfigError(key + ": expected a non-negative integer, got '" + text + "'");
  }
  try
  {
    return std::stoull(text);
  }
  catch (const std::out_of_range &)
  {
    throw ConfigError(key + ": value out of range");
  }
}

Micro parse_micro(const std::string &key, const std::string &text)
{
  try
  {
    return Micro::parse(text);
  }
  catch (const std::invalid_argument &e)
  {
    throw ConfigError(key + ": " + e.what());
  }
}

std::string fixed6(double v)
{
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

} // namespace

std::string to_string(CdMode m)
{
  switch (m)
  {
  case CdMode::Off:
    return "off";
  case CdMode::On:
    return "on";
  case CdMode::Auto:
    return "auto";
  }
  return "off";
}

CdMode parse_cd_mode(const std::string &text)
{
  if (text == "off" || text == "false" || text == "0")
    return CdMode::Off;
  if (text == "on" || text == "true" || text == "1")
    return CdMode::On;
  if (text == "auto")
    return CdMode::Auto;
  throw ConfigError("collision_detection: expected on, off or auto, got '" + text + "'");
}

bool ExperimentConfig::cd_enabled(const Algorithm &algorithm) const
{
  switch (collision_detection)
  {
  case CdMode::Off:
    return false;
  case CdMode::On:
    return true;
  case CdMode::Auto:
    return algorithm.requires_collision_detection();
  }
  return false;
}

std::string emit_config(const ExperimentConfig &c)
{
  std::ostringstream out;
  out << "algorithm = " << c.algorithm << '\n';
  out << "n = " << c.n << '\n';
  out << "rho = " << c.rho.str() << '\n';
  out << "beta = " << c.beta.str() << '\n';
  out << "collision_detection = " << to_string(c.collision_detection) << '\n';
  out << "seed = " << c.seed << '\n';
  out << "stage_size = " << c.stage_size << '\n';
  out << "max_stages = " << c.max_stages << '\n';
  out << "max_rounds = " << c.max_rounds << '\n';
  out << "adversary = " << c.adversary << '\n';
  out << "output = " << c.output << '\n';
  return out.str();
}

ExperimentConfig parse_config(std::istream &in, ExperimentConfig c)
{
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw))
  {
    ++line_no;
    const std::string line = trim(raw);
    if (line.empty() || line.front() == '#')
    {
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
    {
      throw ConfigError("line " + std::to_string(line_no) + ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key == "algorithm")
      c.algorithm = value;
    else if (key == "n")
      c.n = parse_unsigned(key, value);
    else if (key == "rho")
      c.rho = parse_micro(key, value);
    else if (key == "beta")
      c.beta = parse_micro(key, value);
    else if (key == "collision_detection")
      c.collision_detection = parse_cd_mode(value);
    else if (key == "seed")
      c.seed = parse_unsigned(key, value);
    else if (key == "stage_size")
      c.stage_size = parse_unsigned(key, value);
    else if (key == "max_stages")
      c.max_stages = parse_unsigned(key, value);
    else if (key == "max_rounds")
      c.max_rounds = parse_unsigned(key, value);
    else if (key == "adversary")
      c.adversary = value;
    else if (key == "output")
      c.output = value;
    else
      throw ConfigError("line " + std::to_string(line_no) + ": unknown key '" + key + "'");
  }
  return c;
}

ExperimentConfig read_config_file(const std::string &path, ExperimentConfig base)
{
  std::ifstream in(path);
  if (!in)
  {
    throw ConfigError("cannot open config file '" + path + "'");
  }
  return parse_config(in, std::move(base));
}

std::uint64_t default_seed()
{
  const char *env = std::getenv("MACSIM_SEED");
  if (env == nullptr || *env == '\0')
  {
    return 1;
  }
  return parse_unsigned("MACSIM_SEED", env);
}

std::vector<SweepGrid::Cell> SweepGrid::cells(std::uint64_t first_seed) const
{
  std::vector<Cell> out;
  for (const auto &a : algorithms)
  {
    for (std::size_t n : ns)
    {
      for (Micro rho : rhos)
      {
        for (std::size_t i = 0; i < seeds_per_cell; ++i)
        {
          out.push_back(Cell{a, n, rho, first_seed + i});
        }
      }
    }
  }
  std::sort(out.begin(), out.end(), [](const Cell &x, const Cell &y) {
    return std::tie(x.algorithm, x.n, x.rho, x.seed) < std::tie(y.algorithm, y.n, y.rho, y.seed);
  });
  out.erase(std::unique(out.begin(), out.end(),
                        [](const Cell &x, const Cell &y) {
                          return std::tie(x.algorithm, x.n, x.rho, x.seed) == std::tie(y.algorithm, y.n, y.rho, y.seed);
                        }),
            out.end());
  return out;
}

SweepGrid SweepGrid::preset(const std::string &name)
{
  const std::vector<std::string> adhoc{"counting-backoff", "quadruple-round", "queue-backoff",
                                       "beb",              "beb-capped",      "qb",
                                       "qb-capped"};
  const std::vector<std::string> token{"rrw", "of-rrw", "srr", "of-srr", "mbtf"};
  std::vector<Micro> full;
  for (int i = 1; i <= 9; ++i)
  {
    full.push_back(Micro::from_micros(i * 100'000));
  }
  full.push_back(Micro::parse("0.95"));
  std::vector<Micro> high;
  for (int i = 80; i <= 98; i += 2)
  {
    high.push_back(Micro::from_micros(i * 10'000));
  }
  if (name == "fig1")
    return SweepGrid{adhoc, full, {10}, 1};
  if (name == "fig2")
    return SweepGrid{adhoc, full, {250}, 1};
  if (name == "fig3")
    return SweepGrid{token, high, {10}, 1};
  if (name == "fig4")
    return SweepGrid{token, high, {250}, 1};
  throw ConfigError("unknown preset '" + name + "' (fig1, fig2, fig3, fig4)");
}

std::unique_ptr<Adversary> make_adversary(const ExperimentConfig &c)
{
  AdversaryType type;
  try
  {
    type = AdversaryType::make(c.rho, c.beta);
  }
  catch (const std::invalid_argument &e)
  {
    throw ConfigError(e.what());
  }
  if (c.adversary == "randomized")
  {
    return std::make_unique<RandomizedAdversary>(type, c.seed);
  }
  if (c.adversary == "randomized-individual")
  {
    return std::make_unique<IndividualRandomizedAdversary>(type, IndividualRates::uniform(c.rho, c.n), c.seed);
  }
  if (c.adversary.rfind("trace:", 0) == 0)
  {
    try
    {
      return std::make_unique<TraceAdversary>(read_trace_file(c.adversary.substr(6)));
    }
    catch (const TraceFormatError &e)
    {
      throw ConfigError(e.what());
    }
  }
  const auto &names = strategy_names();
  if (std::find(names.begin(), names.end(), c.adversary) != names.end())
  {
    return make_strategy(c.adversary, type, c.n, true);
  }
  throw ConfigError("unknown adversary '" + c.adversary + "'");
}

RunRow run_experiment(const ExperimentConfig &c, AlgorithmPtr algorithm)
{
  if (c.n == 0)
  {
    throw ConfigError("n must be at least 1");
  }
  if (c.stage_size == 0)
  {
    throw ConfigError("stage_size must be at least 1");
  }
  if (!algorithm)
  {
    try
    {
      algorithm = make_algorithm(c.algorithm);
    }
    catch (const UnknownAlgorithm &e)
    {
      throw ConfigError(e.what());
    }
  }
  RunRow row;
  row.config = c;
  row.cd = c.cd_enabled(*algorithm);
  const ChannelConfig channel{c.n, row.cd, 1};
  validate_compatibility(channel, *algorithm);
  auto adversary = make_adversary(c);
  RunOptions opts;
  opts.stage_size = c.stage_size;
  ExecutionReport rep =
      run_execution(channel, std::move(algorithm), *adversary, StageVerdict{c.max_stages, c.max_rounds}, c.seed, opts);
  row.summary = std::move(rep.summary);
  row.stages = std::move(rep.stages);
  return row;
}

std::string csv_row(const RunRow &row)
{
  const ExperimentConfig &c = row.config;
  std::ostringstream out;
  out << c.algorithm << ',' << c.n << ',' << c.rho.str() << ',' << c.beta.str() << ',' << c.seed << ','
      << (row.cd ? 1 : 0) << ',';
  if (!row.error.empty())
  {
    std::string msg = row.error;
    std::replace(msg.begin(), msg.end(), ',', ';');
    std::replace(msg.begin(), msg.end(), '\n', ' ');
    out << "error: " << msg << ",,,,,";
    return out.str();
  }
  const MetricsSummary &s = row.summary;
  out << to_string(s.verdict) << ',';
  if (s.average_latency)
  {
    out << fixed6(*s.average_latency);
  }
  out << ',' << s.stage_averages.size() << ',' << s.max_delay << ',' << s.max_total_queue << ',' << s.rounds;
  return out.str();
}

std::string stage_csv(const RunRow &row)
{
  std::ostringstream out;
  out << kStageCsvHeader << '\n';
  for (std::size_t i = 0; i < row.stages.size(); ++i)
  {
    const StageRecord &s = row.stages[i];
    out << i << ',' << s.first_packet << ',' << s.closed_round << ',' << fixed6(s.average) << '\n';
  }
  return out.str();
}

} // namespace macsim
