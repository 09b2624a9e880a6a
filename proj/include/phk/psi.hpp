#pragma once

#include <algorithm>
#include <cstddef>
#include <numeric>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "phk/simplex.hpp"

namespace phk {

// psi(g,f) = sum over all k! permutations s of g_{s(1)}...g_{s(k-2)} f_{s(k-1)}.
//
// The fast evaluator uses the algebraically identical subset form
//
//   psi(g,f) = (k-2)! * sum_{a<b} (prod_{i != a,b} g_i) * (f_a + f_b),
//
// obtained by grouping permutations by the unordered image of the first
// k-2 positions: each (k-2)-subset S occurs in (k-2)! orders, the (k-1)-th
// position ranges over the two symbols outside S, and the last symbol is
// forced. The naive permutation sum is kept as a test oracle.
//
// Both forms are polynomials on all of R^k; the span overloads evaluate
// them on arbitrary vectors (used by finite-difference oracles), while the
// ProbVector overloads carry the simplex contract. Accumulation is done in
// long double so the two routes agree to ~1e-15 even at k=8,9.

namespace detail {

inline double factorial(int n) {
  double r = 1.0;
  for (int i = 2; i <= n; ++i) r *= i;
  return r;
}

inline void check_psi_dims(std::size_t gk, std::size_t fk, int min_k) {
  if (gk != fk) throw std::invalid_argument("psi: dimension mismatch");
  if (static_cast<int>(gk) < min_k)
    throw std::invalid_argument("psi: alphabet size must be >= " + std::to_string(min_k));
}

inline long double psi_subset_ld(std::span<const double> g, std::span<const double> f) {
  const int k = static_cast<int>(g.size());
  long double sum = 0.0L;
  for (int a = 0; a < k; ++a) {
    for (int b = a + 1; b < k; ++b) {
      long double prod = 1.0L;
      for (int i = 0; i < k; ++i) {
        if (i != a && i != b) prod *= g[static_cast<std::size_t>(i)];
      }
      sum += prod * (static_cast<long double>(f[static_cast<std::size_t>(a)]) +
                     static_cast<long double>(f[static_cast<std::size_t>(b)]));
    }
  }
  return static_cast<long double>(factorial(k - 2)) * sum;
}

}  // namespace detail

inline double psi(std::span<const double> g, std::span<const double> f) {
  detail::check_psi_dims(g.size(), f.size(), 4);
  return static_cast<double>(detail::psi_subset_ld(g, f));
}

inline double psi(const ProbVector& g, const ProbVector& f) { return psi(g.span(), f.span()); }

// Reference evaluator: literal enumeration of all k! permutations.
inline double psi_naive(std::span<const double> g, std::span<const double> f) {
  detail::check_psi_dims(g.size(), f.size(), 4);
  const int k = static_cast<int>(g.size());
  if (k > 9) throw std::invalid_argument("psi_naive: k > 9 not supported (k! enumeration)");
  std::vector<int> idx(static_cast<std::size_t>(k));
  std::iota(idx.begin(), idx.end(), 0);
  long double sum = 0.0L;
  do {
    long double term = 1.0L;
    for (int pos = 0; pos < k - 2; ++pos) term *= g[static_cast<std::size_t>(idx[static_cast<std::size_t>(pos)])];
    term *= f[static_cast<std::size_t>(idx[static_cast<std::size_t>(k - 2)])];
    sum += term;
  } while (std::next_permutation(idx.begin(), idx.end()));
  return static_cast<double>(sum);
}

inline double psi_naive(const ProbVector& g, const ProbVector& f) {
  return psi_naive(g.span(), f.span());
}

// Psi(p;q) = psi(p,q) + psi(q,p); symmetric in (p,q) by construction.
inline double big_psi(std::span<const double> p, std::span<const double> q) {
  detail::check_psi_dims(p.size(), q.size(), 4);
  return static_cast<double>(detail::psi_subset_ld(p, q) + detail::psi_subset_ld(q, p));
}

inline double big_psi(const ProbVector& p, const ProbVector& q) {
  return big_psi(p.span(), q.span());
}

// Long-double Psi, used by the maximizer's local polish where value
// comparisons below double rounding noise decide the bracket.
inline long double big_psi_ld(std::span<const double> p, std::span<const double> q) {
  detail::check_psi_dims(p.size(), q.size(), 4);
  return detail::psi_subset_ld(p, q) + detail::psi_subset_ld(q, p);
}

struct Gradient {
  std::vector<double> wrt_first;   // d/dg_i (resp. d/dp_i)
  std::vector<double> wrt_second;  // d/df_i (resp. d/dq_i)
};

// Exact partial derivatives of the subset form with respect to every
// coordinate. For each pair {a,b} the complement product is differentiated
// with prefix/suffix products, so zeros in g are handled without division.
inline Gradient psi_grad(std::span<const double> g, std::span<const double> f) {
  detail::check_psi_dims(g.size(), f.size(), 4);
  const int k = static_cast<int>(g.size());
  const double fact = detail::factorial(k - 2);
  Gradient out;
  out.wrt_first.assign(static_cast<std::size_t>(k), 0.0);
  out.wrt_second.assign(static_cast<std::size_t>(k), 0.0);
  std::vector<int> comp(static_cast<std::size_t>(k - 2));
  std::vector<double> pre(static_cast<std::size_t>(k - 1)), suf(static_cast<std::size_t>(k - 1));
  for (int a = 0; a < k; ++a) {
    for (int b = a + 1; b < k; ++b) {
      int m = 0;
      for (int i = 0; i < k; ++i)
        if (i != a && i != b) comp[static_cast<std::size_t>(m++)] = i;
      pre[0] = 1.0;
      for (int j = 0; j < m; ++j) pre[static_cast<std::size_t>(j + 1)] = pre[static_cast<std::size_t>(j)] * g[static_cast<std::size_t>(comp[static_cast<std::size_t>(j)])];
      suf[static_cast<std::size_t>(m)] = 1.0;
      for (int j = m - 1; j >= 0; --j) suf[static_cast<std::size_t>(j)] = suf[static_cast<std::size_t>(j + 1)] * g[static_cast<std::size_t>(comp[static_cast<std::size_t>(j)])];
      const double pair_f = f[static_cast<std::size_t>(a)] + f[static_cast<std::size_t>(b)];
      const double prod = pre[static_cast<std::size_t>(m)];
      out.wrt_second[static_cast<std::size_t>(a)] += prod;
      out.wrt_second[static_cast<std::size_t>(b)] += prod;
      for (int j = 0; j < m; ++j)
        out.wrt_first[static_cast<std::size_t>(comp[static_cast<std::size_t>(j)])] +=
            pre[static_cast<std::size_t>(j)] * suf[static_cast<std::size_t>(j + 1)] * pair_f;
    }
  }
  for (double& v : out.wrt_first) v *= fact;
  for (double& v : out.wrt_second) v *= fact;
  return out;
}

inline Gradient psi_grad(const ProbVector& g, const ProbVector& f) {
  return psi_grad(g.span(), f.span());
}

inline Gradient big_psi_grad(std::span<const double> p, std::span<const double> q) {
  Gradient gp = psi_grad(p, q);  // d psi(p,q)
  Gradient gq = psi_grad(q, p);  // d psi(q,p)
  const std::size_t k = p.size();
  Gradient out;
  out.wrt_first.resize(k);
  out.wrt_second.resize(k);
  for (std::size_t i = 0; i < k; ++i) {
    out.wrt_first[i] = gp.wrt_first[i] + gq.wrt_second[i];
    out.wrt_second[i] = gp.wrt_second[i] + gq.wrt_first[i];
  }
  return out;
}

inline Gradient big_psi_grad(const ProbVector& p, const ProbVector& q) {
  return big_psi_grad(p.span(), q.span());
}

}  // namespace phk
