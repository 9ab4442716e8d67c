#pragma once

// Closed-form OAM spectra of vortex pancakes and the weight algebra
// P_n = C_n / sum C_l, <L_z> = sum n P_n.

#include <array>
#include <cmath>
#include <map>
#include <vector>

#include "core.hpp"

namespace oamkit {

enum class Provenance { analytic, numeric };

/// Power per spiral harmonic, C_n >= 0.
struct OamSpectrum {
  std::map<int, double> entries;
  Provenance provenance = Provenance::analytic;

  double at(int n) const {
    auto it = entries.find(n);
    return it == entries.end() ? 0.0 : it->second;
  }

  double total() const {
    double s = 0.0;
    for (const auto& [n, c] : entries) s += c;
    return s;
  }
};

/// Occupation weights over the closed range of occupied winding numbers.
/// Winding numbers outside the stored range have P_n = 0.
struct WeightVector {
  std::map<int, double> weights;
  double mean_oam = 0.0;  // in units of hbar

  double at(int n) const {
    auto it = weights.find(n);
    return it == weights.end() ? 0.0 : it->second;
  }

  int min_n() const { return weights.empty() ? 0 : weights.begin()->first; }
  int max_n() const { return weights.empty() ? 0 : weights.rbegin()->first; }
};

inline WeightVector weights_from_cn(const OamSpectrum& s) {
  int lo = 0, hi = -1;
  bool any = false;
  double total = 0.0;
  for (const auto& [n, c] : s.entries) {
    detail::require(c >= 0.0 && std::isfinite(c), "spectrum entries must be finite and >= 0");
    if (c > 0.0) {
      if (!any) lo = n;
      hi = n;
      any = true;
      total += c;
    }
  }
  if (!any || !(total > 0.0)) throw ValidationError("weights_from_cn: all-zero spectrum");

  WeightVector w;
  double mean = 0.0;
  for (int n = lo; n <= hi; ++n) {
    const double p = s.at(n) / total;
    w.weights[n] = p;
    mean += n * p;
  }
  w.mean_oam = mean;
  return w;
}

/// LG expansion of a pancake: coefficient l (l = 0..N) multiplies the
/// unit-power mode u_{l0}:
///   a0 sqrt(pi) (-1)^{N-l} (w0/sqrt2)^{l+1} sqrt(l!) B_{N-l}
inline std::vector<cplx> pancake_lg_coefficients(const VortexPancake& p) {
  const auto roots = p.roots();
  const auto b = elementary_symmetric_all(roots);
  const int n_vort = static_cast<int>(p.size());
  const double s = p.w0() / std::sqrt(2.0);
  std::vector<cplx> coef(static_cast<std::size_t>(n_vort) + 1);
  double scale = std::sqrt(kPi) * s;  // sqrt(pi) (w0/sqrt2)^{l+1} sqrt(l!) at l = 0
  for (int l = 0; l <= n_vort; ++l) {
    if (l > 0) scale *= s * std::sqrt(static_cast<double>(l));
    const double sign = ((n_vort - l) % 2 == 0) ? 1.0 : -1.0;
    coef[static_cast<std::size_t>(l)] = p.a0() * sign * scale * b[static_cast<std::size_t>(n_vort - l)];
  }
  return coef;
}

inline constexpr int kDirectEvaluationMaxN = 20;

/// C_n = |a0|^2 pi n! (w0^2/2)^{n+1} |B_{N-n}|^2 for 0 <= n <= N.
inline OamSpectrum pancake_cn(const VortexPancake& p) {
  const auto roots = p.roots();
  const auto b = elementary_symmetric_all(roots);
  const int n_vort = static_cast<int>(p.size());
  const double half_w2 = 0.5 * p.w0() * p.w0();
  const double amp2 = std::norm(p.a0());
  OamSpectrum s;
  s.provenance = Provenance::analytic;
  if (n_vort <= kDirectEvaluationMaxN) {
    double fact = 1.0;
    double pw = half_w2;
    for (int n = 0; n <= n_vort; ++n) {
      if (n > 0) {
        fact *= n;
        pw *= half_w2;
      }
      s.entries[n] = amp2 * kPi * fact * pw * std::norm(b[static_cast<std::size_t>(n_vort - n)]);
    }
  } else {
    // Log-space: factorials and (w0^2/2)^{n+1} overflow long before the
    // ratios between modes do.
    const double log_amp2 = std::log(amp2);
    for (int n = 0; n <= n_vort; ++n) {
      const double bn = std::abs(b[static_cast<std::size_t>(n_vort - n)]);
      if (bn == 0.0 || amp2 == 0.0) {
        s.entries[n] = 0.0;
        continue;
      }
      const double lg = log_amp2 + std::log(kPi) + std::lgamma(n + 1.0) +
                        (n + 1.0) * std::log(half_w2) + 2.0 * std::log(bn);
      s.entries[n] = std::exp(lg);
    }
  }
  return s;
}

/// Weights straight from the vortex geometry, robust for any N: the common
/// factor |a0|^2 pi (w0^2/2) cancels, and the rest is normalized in log space.
inline WeightVector pancake_weights(const VortexPancake& p) {
  const int n_vort = static_cast<int>(p.size());
  if (n_vort <= kDirectEvaluationMaxN) return weights_from_cn(pancake_cn(p));
  const auto b = elementary_symmetric_all(p.roots());
  const double log_half_w2 = std::log(0.5 * p.w0() * p.w0());
  std::vector<double> lg(static_cast<std::size_t>(n_vort) + 1, -INFINITY);
  double lmax = -INFINITY;
  for (int n = 0; n <= n_vort; ++n) {
    const double bn = std::abs(b[static_cast<std::size_t>(n_vort - n)]);
    if (bn > 0.0) lg[n] = std::lgamma(n + 1.0) + n * log_half_w2 + 2.0 * std::log(bn);
    lmax = std::max(lmax, lg[n]);
  }
  OamSpectrum rel;
  for (int n = 0; n <= n_vort; ++n) rel.entries[n] = std::exp(lg[n] - lmax);
  return weights_from_cn(rel);
}

/// Explicit two-vortex spectrum (C_0, C_1, C_2).
inline std::array<double, 3> n2_closed_form(const VortexPancake& p) {
  if (p.size() != 2) throw ValidationError("n2_closed_form requires exactly two vortices");
  const double w0 = p.w0();
  const double a2 = std::norm(p.a0());
  const double r1 = p.vortices()[0].rho, r2 = p.vortices()[1].rho;
  const double dphi = p.vortices()[0].phi - p.vortices()[1].phi;
  const double w2 = w0 * w0;
  return {0.5 * w2 * kPi * r1 * r1 * r2 * r2 * a2,
          0.25 * w2 * w2 * kPi * a2 * (r1 * r1 + r2 * r2 + 2.0 * r1 * r2 * std::cos(dphi)),
          0.25 * w2 * w2 * w2 * kPi * a2};
}

}  // namespace oamkit
