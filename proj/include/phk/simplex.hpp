#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "phk/rng.hpp"

namespace phk {

// A probability distribution over a k-symbol alphabet. Entries are
// non-negative and sum to 1 (renormalized on construction). Immutable.
class ProbVector {
 public:
  ProbVector() = default;  // empty placeholder; real vectors come from make_prob_vector

  int k() const { return static_cast<int>(entries_.size()); }
  double operator[](int i) const { return entries_[static_cast<std::size_t>(i)]; }
  const std::vector<double>& entries() const { return entries_; }
  std::span<const double> span() const { return entries_; }

  double sum() const { return std::accumulate(entries_.begin(), entries_.end(), 0.0); }

  bool operator==(const ProbVector& other) const { return entries_ == other.entries_; }

  friend ProbVector make_prob_vector(std::span<const double> values, int k);

 private:
  explicit ProbVector(std::vector<double> entries) : entries_(std::move(entries)) {}
  std::vector<double> entries_;
};

inline constexpr double kProbInputSumTol = 1e-9;   // accepted deviation of the input sum from 1
inline constexpr double kProbEntryNegTol = 1e-12;  // entries above -this are clamped to 0

// Validates and normalizes: negatives within tolerance are clamped to 0,
// then the vector is rescaled so the entries sum to 1 up to one ulp.
inline ProbVector make_prob_vector(std::span<const double> values, int k) {
  if (k < 2) throw std::invalid_argument("ProbVector: alphabet size must be >= 2");
  if (static_cast<int>(values.size()) != k)
    throw std::invalid_argument("ProbVector: expected " + std::to_string(k) + " entries, got " +
                                std::to_string(values.size()));
  std::vector<double> e(values.begin(), values.end());
  double sum = 0.0;
  for (double& v : e) {
    if (v < -kProbEntryNegTol)
      throw std::invalid_argument("ProbVector: negative entry " + std::to_string(v));
    if (v < 0.0) v = 0.0;
    sum += v;
  }
  if (std::abs(sum - 1.0) > kProbInputSumTol)
    throw std::invalid_argument("ProbVector: entries sum to " + std::to_string(sum) +
                                ", expected 1");
  for (double& v : e) v /= sum;
  // push the residual into the largest entry so the total is exact
  const double resid = 1.0 - std::accumulate(e.begin(), e.end(), 0.0);
  *std::max_element(e.begin(), e.end()) += resid;
  return ProbVector(std::move(e));
}

inline ProbVector make_prob_vector(const std::vector<double>& values, int k) {
  return make_prob_vector(std::span<const double>(values), k);
}

inline ProbVector uniform(int k) {
  if (k < 2) throw std::invalid_argument("uniform: k must be >= 2");
  return make_prob_vector(std::vector<double>(static_cast<std::size_t>(k), 1.0 / k), k);
}

// Uniform point on the (k-1)-simplex via normalized exponential draws.
// Deterministic for a given rng state.
inline ProbVector sample_simplex(int k, Rng& rng) {
  if (k < 2) throw std::invalid_argument("sample_simplex: k must be >= 2");
  std::vector<double> e(static_cast<std::size_t>(k));
  double sum = 0.0;
  for (double& v : e) {
    v = rng.exponential();
    sum += v;
  }
  for (double& v : e) v /= sum;
  return make_prob_vector(e, k);
}

}  // namespace phk
