#pragma once

#include "macsim/adversary.hpp"
#include "macsim/station.hpp"

#include <stdexcept>
#include <string>
#include <vector>

namespace macsim
{

enum class Theorem : std::uint8_t
{
  RrwIndividual,
  SrrIndividual,
  Quadruple,
  QueueBackoff,
  RrwGeneral,
  OfRrwGeneral,
  OfSrrGeneral,
  SrrGeneral,
  CountingBackoff,
  Quadruple38,
};

class OutOfRange : public std::domain_error
{
public:
  using std::domain_error::domain_error;
};

// Extra packets allowed on top of beta in the Quadruple-Round queue bound at rho <= 3/8.
inline constexpr double kQuadruple38QueueSlack = 8.0;

std::string to_string(Theorem t);
Theorem parse_theorem(const std::string &name);
const std::vector<Theorem> &all_theorems();

struct TheoremInfo
{
  std::string algorithm;
  bool individual_rates = false;
  bool collision_detection = false;
  std::string strategy;
};

TheoremInfo theorem_info(Theorem t);

// Infinite where a theorem bounds only one of the two quantities.
struct BoundPair
{
  double queue = 0.0;
  double latency = 0.0;
};

// Throws OutOfRange when (n, rho) lies outside the theorem's region.
BoundPair bound_formula(Theorem t, std::size_t n, double rho, double beta);

struct VerifyParams
{
  std::size_t n = 10;
  Micro rho = Micro::parse("0.5");
  Micro beta = Micro::from_int(10);
  std::vector<std::uint64_t> seeds{1};
  Round horizon = 20'000;
  bool check_invariants = true;
  bool randomized = true;
  bool scripted = true;
};

struct BoundViolation
{
  std::string adversary;  // "scripted" or "randomized"
  std::uint64_t seed = 0;
  Round round = 0;
  std::string quantity;  // "queue" or "latency"
  double measured = 0.0;
  double bound = 0.0;
};

struct VerifyReport
{
  Theorem theorem{};
  BoundPair bounds;
  std::size_t max_queue = 0;
  std::uint64_t max_delay = 0;
  std::size_t runs = 0;
  std::vector<BoundViolation> violations;  // first violation of each failing run

  bool passed() const { return violations.empty(); }
};

// Runs the theorem's scripted strategy and the matching randomized adversary
// for every seed, tracking the largest total queue and delay. Throws
// IncompatibleAlgorithm when `algorithm` is not the one the theorem covers.
VerifyReport verify_bounds(Theorem t, AlgorithmPtr algorithm, const VerifyParams &params);

} // namespace macsim
