#pragma once

#include <span>
#include <vector>

#include "phk/psi.hpp"
#include "phk/rng.hpp"
#include "phk/simplex.hpp"

namespace phk::testutil {

inline ProbVector pv(std::initializer_list<double> vals) {
  return make_prob_vector(std::vector<double>(vals), static_cast<int>(vals.size()));
}

// central finite difference of a scalar function of two raw vectors
template <typename F>
double fd_partial(F&& fn, std::vector<double> g, std::vector<double> f, bool wrt_g, int coord,
                  double step = 1e-6) {
  auto& target = wrt_g ? g : f;
  const double orig = target[static_cast<std::size_t>(coord)];
  target[static_cast<std::size_t>(coord)] = orig + step;
  const double hi = fn(std::span<const double>(g), std::span<const double>(f));
  target[static_cast<std::size_t>(coord)] = orig - step;
  const double lo = fn(std::span<const double>(g), std::span<const double>(f));
  target[static_cast<std::size_t>(coord)] = orig;
  return (hi - lo) / (2.0 * step);
}

}  // namespace phk::testutil
