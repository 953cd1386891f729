#pragma once

#include "macsim/station.hpp"

#include <functional>
#include <iosfwd>
#include <string>

namespace macsim
{

inline constexpr int kExitOk = 0;
inline constexpr int kExitViolation = 1;
inline constexpr int kExitConfig = 2;

struct CliHooks
{
  // Replaces the registry lookup; lets tests run the harness on a broken algorithm.
  std::function<AlgorithmPtr(const std::string &)> algorithm_factory;
};

// Entry point of the macsim tool: run, sweep, verify-bounds, check-adversary.
int run_cli(int argc, const char *const *argv, std::ostream &out, std::ostream &err, const CliHooks &hooks = {});

} // namespace macsim
