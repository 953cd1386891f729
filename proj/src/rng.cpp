#include "macsim/rng.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace macsim
{

std::uint64_t splitmix64(std::uint64_t x)
{
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

Rng derive_stream(std::uint64_t master_seed, std::uint64_t consumer_id)
{
  const std::uint64_t mixed = splitmix64(splitmix64(master_seed) ^ splitmix64(consumer_id + 0x632be59bd9b4e019ULL));
  std::seed_seq seq{static_cast<std::uint32_t>(mixed), static_cast<std::uint32_t>(mixed >> 32),
                    static_cast<std::uint32_t>(consumer_id), static_cast<std::uint32_t>(consumer_id >> 32)};
  return Rng(seq);
}

std::uint64_t uniform_below(Rng &rng, std::uint64_t bound)
{
  if (bound == 0)
  {
    throw std::invalid_argument("uniform_below: bound must be positive");
  }
  // Largest multiple of bound representable; reject draws beyond it.
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t x = rng();
  while (x >= limit)
  {
    x = rng();
  }
  return x % bound;
}

double uniform_unit(Rng &rng)
{
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

std::uint64_t sample_poisson(Rng &rng, double lambda)
{
  if (!(lambda > 0.0))
  {
    throw std::invalid_argument("sample_poisson: lambda must be positive");
  }
  const double u = uniform_unit(rng);
  double p = std::exp(-lambda);
  double cdf = p;
  std::uint64_t i = 0;
  // cdf saturates below 1 in floating point; the cap only matters for u within 1e-16 of 1.
  while (u >= cdf && i < 1000)
  {
    ++i;
    p *= lambda / static_cast<double>(i);
    cdf += p;
  }
  return i;
}

} // namespace macsim
