#pragma once

// Reproducible random inputs for verification runs and tests.

#include <cstdint>

#include "hcb/pcfun.hpp"
#include "hcb/rng.hpp"

namespace hcb::sample {

/// Integer in [lo, hi].
inline long uniform_int(const CounterRng& rng, std::uint64_t stream, std::uint64_t counter, long lo, long hi) {
  return lo + static_cast<long>(rng.bits(stream, counter) % static_cast<std::uint64_t>(hi - lo + 1));
}

/// Zero-mean function constant on the cells of a random dyadic depth <= max_level,
/// with small integer values before centering.
inline PCFun1D dyadic_zero_mean(const CounterRng& rng, std::uint64_t stream, unsigned max_level) {
  const unsigned level = static_cast<unsigned>(uniform_int(rng, stream, 0, 1, max_level));
  const std::size_t cells = std::size_t{1} << level;
  std::vector<Rational> values(cells);
  for (std::size_t i = 0; i < cells; ++i) values[i] = Rational(uniform_int(rng, stream, 1 + i, -8, 8));
  return project_zero_mean(PCFun1D(uniform_breaks(cells), std::move(values))).simplify();
}

/// Random subset of the multiples of 2^-depth, always containing 0 and 1.
inline std::vector<Rational> dyadic_breaks(const CounterRng& rng, std::uint64_t stream, std::uint64_t& counter,
                                           unsigned depth) {
  const long n = 1L << depth;
  std::vector<Rational> out{Rational(0)};
  for (long i = 1; i < n; ++i) {
    if (uniform_int(rng, stream, counter++, 0, 1) == 1) out.push_back(Rational(i) / n);
  }
  out.push_back(Rational(1));
  return out;
}

/// 3D function on a random dyadic product grid of depth <= depth per axis.
inline PCFun3D dyadic_3d(const CounterRng& rng, std::uint64_t stream, unsigned depth = 3) {
  std::uint64_t counter = 0;
  PCFun3D::Grid grid;
  for (auto& axis : grid) axis = dyadic_breaks(rng, stream, counter, depth);
  std::size_t count = 1;
  for (const auto& axis : grid) count *= axis.size() - 1;
  std::vector<Rational> values(count);
  for (auto& v : values) v = Rational(uniform_int(rng, stream, counter++, -6, 6));
  return PCFun3D(std::move(grid), std::move(values));
}

}  // namespace hcb::sample
