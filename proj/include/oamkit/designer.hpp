#pragma once

// Inverse design of vortex pancakes: closed-form two-vortex recipes and a
// seeded multistart simplex search for arbitrary N.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "analytic_spectrum.hpp"
#include "core.hpp"
#include "nelder_mead.hpp"

namespace oamkit {

// ---------------------------------------------------------------------------
// Closed-form N = 2 recipes

/// The two candidate angle conditions for P_0 = P_1 = P_2 = 1/3 and how far
/// each lands from the target (L-infinity on the closed-form weights).
struct EqualPopulationBranches {
  double rho1 = 0.0;
  double rho2 = 0.0;
  double cos_condition = 0.0;  // (w0^2 - rho1^2 - rho2^2) / (2 rho1 rho2)
  double derived_dphi = 0.0;   // acos(cos_condition): C_1 = C_2 solved directly
  double printed_dphi = 0.0;   // pi - acos(cos_condition)
  double derived_error = 0.0;
  double printed_error = 0.0;
};

namespace detail {

inline double linf_from_target(const WeightVector& w, const std::map<int, double>& target, int lo,
                               int hi) {
  double e = 0.0;
  for (int n = lo; n <= hi; ++n) {
    auto it = target.find(n);
    const double t = it == target.end() ? 0.0 : it->second;
    e = std::max(e, std::abs(w.at(n) - t));
  }
  return e;
}

inline void require_probability(double p, const char* name) {
  require(p > 0.0 && p <= 1.0, std::string(name) + " must lie in (0, 1]");
}

}  // namespace detail

inline EqualPopulationBranches equal_population_branches(double w0, double rho1) {
  detail::require(w0 > 0.0, "waist must be positive");
  detail::require(rho1 > 0.0 && std::isfinite(rho1), "rho1 must be positive");
  EqualPopulationBranches b;
  b.rho1 = rho1;
  b.rho2 = w0 * w0 / (std::sqrt(2.0) * rho1);  // rho1^2 rho2^2 = w0^4 / 2
  b.cos_condition = (w0 * w0 - rho1 * rho1 - b.rho2 * b.rho2) / (2.0 * rho1 * b.rho2);
  if (std::abs(b.cos_condition) > 1.0)
    throw ValidationError("equal-population design infeasible for rho1 = " + std::to_string(rho1));
  b.derived_dphi = std::acos(b.cos_condition);
  b.printed_dphi = kPi - b.derived_dphi;
  const std::map<int, double> third{{0, 1.0 / 3.0}, {1, 1.0 / 3.0}, {2, 1.0 / 3.0}};
  auto err = [&](double dphi) {
    const VortexPancake p(1.0, w0, {{rho1, dphi}, {b.rho2, 0.0}});
    return detail::linf_from_target(pancake_weights(p), third, 0, 2);
  };
  b.derived_error = err(b.derived_dphi);
  b.printed_error = err(b.printed_dphi);
  return b;
}

/// P_0 = P_1 = P_2 = 1/3. Both angle branches are evaluated and the one that
/// reproduces the target under the closed-form spectrum is kept.
inline VortexPancake design_equal_populations_n2(double w0, double rho1) {
  const auto b = equal_population_branches(w0, rho1);
  const double dphi = b.derived_error <= b.printed_error ? b.derived_dphi : b.printed_dphi;
  if (std::min(b.derived_error, b.printed_error) > 1e-9)
    throw NumericalError("equal-population design: neither angle branch reaches 1/3");
  return VortexPancake(1.0, w0, {{rho1, dphi}, {b.rho2, 0.0}});
}

/// P_0 = 0: one vortex on axis, the other at w0 sqrt((1 - P2) / P2).
inline VortexPancake design_suppress_p0(double w0, double p2) {
  detail::require(w0 > 0.0, "waist must be positive");
  detail::require_probability(p2, "P_2");
  return VortexPancake(1.0, w0, {{0.0, 0.0}, {w0 * std::sqrt((1.0 - p2) / p2), 0.0}});
}

/// P_1 = 0: antipodal vortices at equal radius w0 ((1 - P2) / (2 P2))^{1/4}.
inline VortexPancake design_suppress_p1(double w0, double p2) {
  detail::require(w0 > 0.0, "waist must be positive");
  detail::require_probability(p2, "P_2");
  const double rho = w0 * std::pow((1.0 - p2) / (2.0 * p2), 0.25);
  return VortexPancake(1.0, w0, {{rho, 0.0}, {rho, kPi}});
}

struct SuppressP2Design {
  VortexPancake pancake;
  WeightVector achieved;
  double p2_upper_bound = 0.0;  // (w0 / rho2)^2
};

inline constexpr double kAsymptoticGuard = 10.0;

/// P_2 -> 0: far vortex at rho2_cut, near vortex at w0 sqrt((1 - P1) / (2 P1)).
/// The two sit a quarter turn apart so the rho1 rho2 cross term in C_1 vanishes.
inline SuppressP2Design design_suppress_p2(double w0, double p1, double rho2_cut) {
  detail::require(w0 > 0.0, "waist must be positive");
  detail::require_probability(p1, "P_1");
  detail::require(rho2_cut >= kAsymptoticGuard * w0,
                  "rho2_cut must be >= 10 w0 for the asymptotic recipe");
  const double rho1 = w0 * std::sqrt((1.0 - p1) / (2.0 * p1));
  SuppressP2Design d;
  d.pancake = VortexPancake(1.0, w0, {{rho1, 0.5 * kPi}, {rho2_cut, 0.0}});
  d.achieved = pancake_weights(d.pancake);
  d.p2_upper_bound = (w0 / rho2_cut) * (w0 / rho2_cut);
  return d;
}

// ---------------------------------------------------------------------------
// General inverse design

struct DesignTarget {
  int n_vortices = 0;
  double tolerance = 1e-3;
  std::map<int, double> weights;

  void validate() const {
    detail::require(n_vortices >= 1, "design target needs N >= 1");
    detail::require(tolerance > 0.0, "design tolerance must be positive");
    double sum = 0.0;
    for (const auto& [n, p] : weights) {
      detail::require(n >= 0 && n <= n_vortices,
                      "target weight at n = " + std::to_string(n) + " outside [0, N]");
      detail::require(p >= 0.0 && std::isfinite(p), "target weights must be >= 0");
      sum += p;
    }
    detail::require(std::abs(sum - 1.0) <= 1e-9, "target weights must sum to 1");
  }
};

struct SolverTrace {
  int iterations = 0;
  int evaluations = 0;
  int starts = 0;
  int best_start = -1;
  std::uint64_t seed = 0;
  bool converged = false;
};

struct DesignResult {
  VortexPancake pancake;
  WeightVector achieved;
  double residual = 0.0;  // L-infinity weight error
  SolverTrace trace;
};

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

inline double unit_uniform(std::uint64_t& state) {
  return static_cast<double>(splitmix64(state) >> 11) * 0x1.0p-53;
}

// Relative spectrum n! (w0^2/2)^n |B_{N-n}|^2 normalized to weights, w0 = 1.
inline void weights_from_roots(const std::vector<cplx>& roots, std::vector<cplx>& e,
                               std::vector<double>& p) {
  const std::size_t n = roots.size();
  e.assign(n + 1, cplx{});
  e[0] = 1.0;
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t k = j + 1; k > 0; --k) e[k] += roots[j] * e[k - 1];
  p.resize(n + 1);
  double scale = 1.0, total = 0.0;
  for (std::size_t m = 0; m <= n; ++m) {
    if (m > 0) scale *= 0.5 * static_cast<double>(m);
    p[m] = scale * std::norm(e[n - m]);
    total += p[m];
  }
  for (auto& v : p) v /= total;
}

/// Rotate so the outermost vortex sits at phi = 0 and list vortices by
/// descending radius.
inline VortexPancake gauge_fix(const VortexPancake& p) {
  auto v = p.vortices();
  std::stable_sort(v.begin(), v.end(), [](const Vortex& a, const Vortex& b) { return a.rho > b.rho; });
  if (!v.empty() && v.front().rho > 0.0) {
    const double alpha = v.front().phi;
    for (auto& x : v) x.phi = normalize_angle(x.phi - alpha);
    v.front().phi = 0.0;
  }
  return VortexPancake(p.a0(), p.w0(), std::move(v));
}

}  // namespace detail

inline constexpr int kDefaultStarts = 32;
inline constexpr int kDefaultMaxEvaluations = 20000;
inline constexpr double kInitialRadius = 2.0;  // in waists
inline constexpr double kInitialSimplexStep = 0.3;

/// Minimizes sum_n (P_n - target_n)^2 over Cartesian vortex coordinates with
/// a simplex search from `starts` seeded initial configurations. Each start
/// depends only on (seed, start index); the best residual wins, ties going to
/// the lower start index. max_iter bounds objective evaluations per start.
inline DesignResult design_general(const DesignTarget& target, int starts, std::uint64_t seed,
                                   int max_iter = kDefaultMaxEvaluations, double w0 = 1.0) {
  target.validate();
  detail::require(starts >= 1, "design_general needs at least one start");
  detail::require(max_iter >= 1, "design_general needs a positive evaluation budget");
  detail::require(w0 > 0.0, "waist must be positive");
  const int n = target.n_vortices;
  std::vector<double> goal(static_cast<std::size_t>(n) + 1, 0.0);
  for (const auto& [k, p] : target.weights) goal[static_cast<std::size_t>(k)] = p;

  std::vector<cplx> roots(static_cast<std::size_t>(n)), e;
  std::vector<double> p;
  auto objective = [&](const std::vector<double>& x) {
    for (int l = 0; l < n; ++l) roots[l] = cplx(x[2 * l], x[2 * l + 1]);
    detail::weights_from_roots(roots, e, p);
    double s = 0.0;
    for (std::size_t k = 0; k < p.size(); ++k) s += (p[k] - goal[k]) * (p[k] - goal[k]);
    return s;
  };

  SimplexOptions opt;
  opt.max_evaluations = max_iter;
  opt.initial_step = kInitialSimplexStep;

  DesignResult best;
  best.residual = INFINITY;
  best.trace.seed = seed;
  best.trace.starts = starts;
  for (int s = 0; s < starts; ++s) {
    std::uint64_t state = seed ^ (0xD1B54A32D192ED03ULL * static_cast<std::uint64_t>(s + 1));
    std::vector<double> x0(2 * static_cast<std::size_t>(n));
    for (int l = 0; l < n; ++l) {
      const double r = kInitialRadius * std::sqrt(detail::unit_uniform(state));
      const double th = kTwoPi * detail::unit_uniform(state);
      x0[2 * l] = r * std::cos(th);
      x0[2 * l + 1] = r * std::sin(th);
    }
    const auto run = nelder_mead(objective, x0, opt);
    best.trace.iterations += run.iterations;
    best.trace.evaluations += run.evaluations;

    std::vector<Vortex> v;
    for (int l = 0; l < n; ++l) {
      const cplx z(run.x[2 * l] * w0, run.x[2 * l + 1] * w0);
      v.push_back({std::abs(z), std::arg(z)});
    }
    const auto pancake = detail::gauge_fix(VortexPancake(1.0, w0, std::move(v)));
    const auto achieved = pancake_weights(pancake);
    const double residual = detail::linf_from_target(achieved, target.weights, 0, n);
    if (residual < best.residual) {
      best.pancake = pancake;
      best.achieved = achieved;
      best.residual = residual;
      best.trace.best_start = s;
    }
  }
  best.trace.converged = best.residual <= target.tolerance;
  return best;
}

// ---------------------------------------------------------------------------
// Parameter scans

enum class ScanParameter { rho, phi };

inline ScanParameter parse_scan_parameter(const std::string& s) {
  if (s == "rho") return ScanParameter::rho;
  if (s == "phi") return ScanParameter::phi;
  throw ValidationError("only vortex coordinates (rho, phi) can be scanned, got '" + s + "'");
}

struct ScanTable {
  ScanParameter parameter = ScanParameter::phi;
  std::size_t vortex_index = 0;
  std::vector<double> values;
  std::vector<std::vector<double>> weights;  // weights[step][n], n = 0..N
};

/// Sweeps one coordinate of one vortex over [lo, hi] in `steps` samples and
/// records the closed-form weights at each step.
inline ScanTable scan_parameter(const VortexPancake& p, std::size_t vortex_index,
                                ScanParameter parameter, double lo, double hi, int steps) {
  detail::require(vortex_index < p.size(), "scan: vortex index out of range");
  detail::require(steps >= 2, "scan needs at least two steps");
  detail::require(std::isfinite(lo) && std::isfinite(hi) && hi > lo, "scan range must be increasing");
  if (parameter == ScanParameter::rho) detail::require(lo >= 0.0, "scan: rho range must be >= 0");
  ScanTable t;
  t.parameter = parameter;
  t.vortex_index = vortex_index;
  const int n = static_cast<int>(p.size());
  for (int s = 0; s < steps; ++s) {
    const double value = lo + (hi - lo) * s / (steps - 1);
    auto v = p.vortices();
    if (parameter == ScanParameter::rho)
      v[vortex_index].rho = value;
    else
      v[vortex_index].phi = value;
    const auto w = pancake_weights(VortexPancake(p.a0(), p.w0(), std::move(v)));
    std::vector<double> row(static_cast<std::size_t>(n) + 1);
    for (int k = 0; k <= n; ++k) row[static_cast<std::size_t>(k)] = w.at(k);
    t.values.push_back(value);
    t.weights.push_back(std::move(row));
  }
  return t;
}

}  // namespace oamkit
