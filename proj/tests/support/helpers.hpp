#pragma once

#include <cmath>
#include <random>
#include <vector>

#include "algebroid/algebroid.hpp"
#include "algebroid/dynamics.hpp"
#include "oracles.hpp"

namespace testing_support {

/// Constant-coefficient algebra from a hand-written table.
inline algebroid::AlgebroidSpec spec_from(const oracle::Table& t) {
  algebroid::AlgebroidSpec spec(0, t.k);
  for (int a = 0; a < t.k; ++a)
    for (int b = a + 1; b < t.k; ++b)
      for (int c = 0; c < t.k; ++c)
        if (t(a, b, c) != 0.0) spec.set_structure(a, b, c, algebroid::Expr::number(t(a, b, c)));
  return spec;
}

/// max |eval(C) - table| over all index triples.
inline double table_distance(const algebroid::AlgebroidSpec& spec, const oracle::Table& t,
                             const std::vector<double>& x = {}) {
  const algebroid::Tensor3 c = spec.eval_structure(x);
  double worst = 0.0;
  for (int a = 0; a < t.k; ++a)
    for (int b = 0; b < t.k; ++b)
      for (int l = 0; l < t.k; ++l) worst = std::max(worst, std::abs(c(a, b, l) - t(a, b, l)));
  return worst;
}

inline algebroid::DynState random_state(std::mt19937_64& rng, int n, int k, bool with_z,
                                        double lo = -1.5, double hi = 1.5) {
  std::uniform_real_distribution<double> u(lo, hi);
  algebroid::DynState s;
  for (int i = 0; i < n; ++i) s.x.push_back(u(rng));
  for (int a = 0; a < k; ++a) s.y.push_back(u(rng));
  if (with_z) s.z = u(rng);
  return s;
}

inline double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double worst = a.size() == b.size() ? 0.0 : INFINITY;
  for (std::size_t i = 0; i < std::min(a.size(), b.size()); ++i)
    worst = std::max(worst, std::abs(a[i] - b[i]));
  return worst;
}

inline double max_abs_diff(const algebroid::DynState& a, const algebroid::DynState& b) {
  double worst = std::max(max_abs_diff(a.x, b.x), max_abs_diff(a.y, b.y));
  if (a.z.has_value() != b.z.has_value()) return INFINITY;
  if (a.z) worst = std::max(worst, std::abs(*a.z - *b.z));
  return worst;
}

}  // namespace testing_support
