#pragma once

#include "macsim/station.hpp"

#include <stdexcept>
#include <string>
#include <vector>

namespace macsim
{

class UnknownAlgorithm : public std::invalid_argument
{
public:
  using std::invalid_argument::invalid_argument;
};

// Algorithm by its CLI name, e.g. "rrw", "queue-backoff", "beb-capped".
AlgorithmPtr make_algorithm(const std::string &name);

const std::vector<std::string> &algorithm_names();

} // namespace macsim
