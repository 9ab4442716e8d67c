#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <vector>

#include "errors.hpp"

namespace oamkit {

struct SimplexOptions {
  int max_evaluations = 20000;
  double initial_step = 0.3;
  double f_tolerance = 1e-30;  // stop when the simplex spread in f falls below this
  double x_tolerance = 1e-14;  // ... or its diameter does
  int restarts = 8;            // re-seed the simplex around the incumbent
};

struct SimplexResult {
  std::vector<double> x;
  double value = 0.0;
  int iterations = 0;
  int evaluations = 0;
};

/// Nelder-Mead downhill simplex with dimension-adaptive coefficients
/// (Gao & Han) and restarts from the best vertex.
inline SimplexResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                                 std::vector<double> x0, const SimplexOptions& opt = {}) {
  const std::size_t n = x0.size();
  detail::require(n >= 1, "nelder_mead: empty parameter vector");
  const double dn = static_cast<double>(n);
  const double alpha = 1.0;
  const double beta = 1.0 + 2.0 / dn;
  const double gamma = 0.75 - 1.0 / (2.0 * dn);
  const double delta = 1.0 - 1.0 / dn;

  SimplexResult res;
  res.x = x0;
  res.value = f(x0);
  res.evaluations = 1;

  double step = opt.initial_step;
  for (int round = 0; round <= opt.restarts && res.evaluations < opt.max_evaluations; ++round) {
    std::vector<std::vector<double>> pts(n + 1, res.x);
    std::vector<double> vals(n + 1, res.value);
    for (std::size_t i = 0; i < n; ++i) {
      pts[i + 1][i] += step;
      vals[i + 1] = f(pts[i + 1]);
      ++res.evaluations;
    }
    std::vector<std::size_t> order(n + 1);
    std::vector<double> centroid(n), xr(n), xe(n), xc(n);
    const double start_value = res.value;

    while (res.evaluations < opt.max_evaluations) {
      std::iota(order.begin(), order.end(), std::size_t{0});
      std::stable_sort(order.begin(), order.end(),
                       [&](std::size_t a, std::size_t b) { return vals[a] < vals[b]; });
      const std::size_t best = order.front(), worst = order.back(), second = order[n - 1];

      double diam = 0.0;
      for (std::size_t i = 0; i <= n; ++i)
        for (std::size_t k = 0; k < n; ++k) diam = std::max(diam, std::abs(pts[i][k] - pts[best][k]));
      if (vals[worst] - vals[best] <= opt.f_tolerance || diam <= opt.x_tolerance) break;
      ++res.iterations;

      std::fill(centroid.begin(), centroid.end(), 0.0);
      for (std::size_t i = 0; i <= n; ++i)
        if (i != worst)
          for (std::size_t k = 0; k < n; ++k) centroid[k] += pts[i][k] / dn;

      for (std::size_t k = 0; k < n; ++k) xr[k] = centroid[k] + alpha * (centroid[k] - pts[worst][k]);
      const double fr = f(xr);
      ++res.evaluations;

      if (fr < vals[best]) {
        for (std::size_t k = 0; k < n; ++k) xe[k] = centroid[k] + beta * (xr[k] - centroid[k]);
        const double fe = f(xe);
        ++res.evaluations;
        if (fe < fr) {
          pts[worst] = xe;
          vals[worst] = fe;
        } else {
          pts[worst] = xr;
          vals[worst] = fr;
        }
        continue;
      }
      if (fr < vals[second]) {
        pts[worst] = xr;
        vals[worst] = fr;
        continue;
      }
      const bool outside = fr < vals[worst];
      for (std::size_t k = 0; k < n; ++k)
        xc[k] = outside ? centroid[k] + gamma * (xr[k] - centroid[k])
                        : centroid[k] - gamma * (centroid[k] - pts[worst][k]);
      const double fc = f(xc);
      ++res.evaluations;
      if (fc < (outside ? fr : vals[worst])) {
        pts[worst] = xc;
        vals[worst] = fc;
        continue;
      }
      // shrink toward the best vertex
      for (std::size_t i = 0; i <= n; ++i) {
        if (i == best) continue;
        for (std::size_t k = 0; k < n; ++k)
          pts[i][k] = pts[best][k] + delta * (pts[i][k] - pts[best][k]);
        vals[i] = f(pts[i]);
        ++res.evaluations;
      }
    }

    const auto it = std::min_element(vals.begin(), vals.end());
    const auto bi = static_cast<std::size_t>(it - vals.begin());
    if (vals[bi] < res.value) {
      res.value = vals[bi];
      res.x = pts[bi];
    }
    if (res.value <= opt.f_tolerance) break;
    // a restart that gained nothing tightens the next simplex
    step = (res.value < start_value) ? opt.initial_step * 0.5 : step * 0.1;
    if (step <= opt.x_tolerance) break;
  }
  return res;
}

}  // namespace oamkit
