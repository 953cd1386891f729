#pragma once

#include "macsim/adversary.hpp"
#include "macsim/engine.hpp"

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace macsim
{

class ConfigError : public std::invalid_argument
{
public:
  using std::invalid_argument::invalid_argument;
};

enum class CdMode : std::uint8_t
{
  Off,
  On,
  Auto,  // on exactly when the algorithm needs it
};

std::string to_string(CdMode m);
CdMode parse_cd_mode(const std::string &text);

struct ExperimentConfig
{
  std::string algorithm = "rrw";
  std::size_t n = 10;
  Micro rho = Micro::parse("0.5");
  Micro beta = Micro::from_int(10);
  CdMode collision_detection = CdMode::Off;
  std::uint64_t seed = 1;
  std::size_t stage_size = kDefaultStageSize;
  std::size_t max_stages = 200;
  Round max_rounds = 10'000'000;
  // randomized | randomized-individual | <strategy name> | trace:<path>
  std::string adversary = "randomized";
  std::string output;

  bool cd_enabled(const Algorithm &algorithm) const;

  friend bool operator==(const ExperimentConfig &, const ExperimentConfig &) = default;
};

// Flat "key = value" lines; '#' starts a comment line.
std::string emit_config(const ExperimentConfig &c);
ExperimentConfig parse_config(std::istream &in, ExperimentConfig base = {});
ExperimentConfig read_config_file(const std::string &path, ExperimentConfig base = {});

// Default seed: MACSIM_SEED when set, else 1.
std::uint64_t default_seed();

struct SweepGrid
{
  std::vector<std::string> algorithms;
  std::vector<Micro> rhos;
  std::vector<std::size_t> ns;
  std::size_t seeds_per_cell = 1;

  struct Cell
  {
    std::string algorithm;
    std::size_t n = 0;
    Micro rho;
    std::uint64_t seed = 0;
  };

  // Sorted by (algorithm, n, rho, seed); seeds run from `first_seed` upwards.
  std::vector<Cell> cells(std::uint64_t first_seed) const;

  static SweepGrid preset(const std::string &name);
};

std::unique_ptr<Adversary> make_adversary(const ExperimentConfig &c);

struct RunRow
{
  ExperimentConfig config;
  bool cd = false;
  std::string error;  // set when the run could not be carried out
  MetricsSummary summary;
  std::vector<StageRecord> stages;
};

// One execution under the stage-verdict stop rule. Throws ConfigError and IncompatibleAlgorithm.
RunRow run_experiment(const ExperimentConfig &c, AlgorithmPtr algorithm = nullptr);

inline constexpr const char *kCsvHeader =
    "algorithm,n,rho,beta,seed,cd,verdict,avg_latency,stages,max_latency,max_total_queue,rounds";
inline constexpr const char *kStageCsvHeader = "stage,first_packet,closed_round,average";

std::string csv_row(const RunRow &row);
std::string stage_csv(const RunRow &row);

} // namespace macsim
