#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "phk/maximizer.hpp"

namespace phk {

// Classical baseline: R_k <= k!/k^(k-1).
inline double fk_bound(int k) {
  if (k < 2) throw std::invalid_argument("fk_bound: k must be >= 2");
  double r = 1.0;
  for (int i = 2; i <= k; ++i) r *= i;
  return r / std::pow(static_cast<double>(k), k - 1);
}

// Improved bound R_k <= (2/M_k + 1/log2(k/(k-3)))^-1. All logarithms are
// base two.
inline double rate_bound_from_Mk(int k, double Mk) {
  if (k <= 3) throw std::invalid_argument("rate_bound_from_Mk: k must be >= 4");
  if (!(Mk > 0.0)) throw std::invalid_argument("rate_bound_from_Mk: Mk must be positive");
  return 1.0 / (2.0 / Mk + 1.0 / std::log2(static_cast<double>(k) / (k - 3)));
}

struct BoundReport {
  int k = 0;
  double fk_bound = 0.0;
  double M_k = 0.0;
  double new_bound = 0.0;
  bool certified = false;  // M_k pinned by the case analysis only for k = 5, 6
};

inline BoundReport bound_report(int k) {
  BoundReport r;
  r.k = k;
  r.fk_bound = fk_bound(k);
  const MaxResult m = compute_Mk(k);
  r.M_k = m.value;
  r.new_bound = rate_bound_from_Mk(k, m.value);
  r.certified = m.certified;
  return r;
}

inline std::vector<BoundReport> table_report(int k_min, int k_max) {
  if (!(5 <= k_min && k_min <= k_max && k_max <= 9))
    throw std::invalid_argument("table_report: need 5 <= k_min <= k_max <= 9");
  std::vector<BoundReport> rows;
  for (int k = k_min; k <= k_max; ++k) rows.push_back(bound_report(k));
  return rows;
}

// Rounds x upward at `decimals` decimal places, snapping values that are
// already (within floating noise) on the grid instead of pushing them up a
// step: round_up(0.192, 5) is 0.19200, not 0.19201.
inline double round_up(double x, int decimals) {
  double scale = 1.0;
  for (int i = 0; i < decimals; ++i) scale *= 10.0;
  const double y = x * scale;
  const double nearest = std::nearbyint(y);
  if (std::abs(y - nearest) <= 1e-6) return nearest / scale;
  return std::ceil(y) / scale;
}

// Reference upper bounds on R_k from the literature, displayed for
// comparison only; this library does not compute them.
struct LiteratureRow {
  int k;
  double value;
};

inline const std::vector<LiteratureRow>& literature_bounds() {
  static const std::vector<LiteratureRow> rows = {
      {5, 0.19079}, {6, 0.092279}, {7, 0.04279}, {8, 0.019213}};
  return rows;
}

}  // namespace phk
