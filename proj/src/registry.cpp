#include "macsim/registry.hpp"

#include "macsim/adhoc.hpp"
#include "macsim/backoff.hpp"
#include "macsim/token.hpp"

namespace macsim
{

const std::vector<std::string> &algorithm_names()
{
  static const std::vector<std::string> names{
      "rrw",      "of-rrw", "srr",        "of-srr", "mbtf", "counting-backoff", "quadruple-round", "queue-backoff",
      "beb",      "beb-capped", "qb",     "qb-capped",
  };
  return names;
}

AlgorithmPtr make_algorithm(const std::string &name)
{
  if (name == "rrw")
    return make_rrw();
  if (name == "of-rrw")
    return make_of_rrw();
  if (name == "srr")
    return make_srr();
  if (name == "of-srr")
    return make_of_srr();
  if (name == "mbtf")
    return make_mbtf();
  if (name == "counting-backoff")
    return make_counting_backoff();
  if (name == "quadruple-round")
    return make_quadruple_round();
  if (name == "queue-backoff")
    return make_queue_backoff();
  if (name == "beb")
    return make_backoff({BackoffKind::Binary, false});
  if (name == "beb-capped")
    return make_backoff({BackoffKind::Binary, true});
  if (name == "qb")
    return make_backoff({BackoffKind::Quadratic, false});
  if (name == "qb-capped")
    return make_backoff({BackoffKind::Quadratic, true});
  throw UnknownAlgorithm("unknown algorithm '" + name + "'");
}

} // namespace macsim
