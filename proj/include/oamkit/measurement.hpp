#pragma once

// Rotating Dove-prism readout: each OAM state n is shifted by 2 n Omega; the
// shifted field beats against an unshifted unit reference and the weights are
// read back from the beat lines.

#include <Eigen/Dense>

#include <cmath>
#include <vector>

#include "analytic_spectrum.hpp"
#include "core.hpp"

namespace oamkit {

struct SidebandLine {
  int n = 0;
  double delta_omega = 0.0;
  double weight = 0.0;
};

struct SidebandSpectrum {
  double omega = 0.0;  // prism angular velocity
  std::vector<SidebandLine> lines;

  int max_abs_n() const {
    int m = 0;
    for (const auto& l : lines) m = std::max(m, std::abs(l.n));
    return m;
  }
};

/// One line per occupied state at delta_omega = 2 n Omega.
inline SidebandSpectrum sidebands_from_weights(const WeightVector& w, double omega) {
  detail::require(omega > 0.0 && std::isfinite(omega), "prism angular velocity must be > 0");
  SidebandSpectrum s;
  s.omega = omega;
  for (const auto& [n, p] : w.weights)
    if (p > 0.0) s.lines.push_back({n, 2.0 * n * omega, p});
  return s;
}

struct TimeSeries {
  double sample_rate = 0.0;
  std::vector<double> t;
  std::vector<double> intensity;

  double duration() const { return static_cast<double>(t.size()) / sample_rate; }
};

/// I(t) = |1 + sum_n sqrt(P_n) e^{i 2 n Omega t}|^2, sampled at t_j = j / rate.
inline TimeSeries synthesize_beat_signal(const SidebandSpectrum& s, double duration,
                                         double sample_rate) {
  detail::require(duration > 0.0 && std::isfinite(duration), "duration must be positive");
  detail::require(sample_rate > 0.0 && std::isfinite(sample_rate), "sample rate must be positive");
  const int n_max = s.max_abs_n();
  if (!(sample_rate > 4.0 * s.omega * n_max / kPi))
    throw ValidationError("synthesize_beat_signal: sample rate below Nyquist for the highest beat");
  const auto count = static_cast<std::size_t>(std::llround(duration * sample_rate));
  detail::require(count >= 2, "duration too short for the sample rate");
  TimeSeries ts;
  ts.sample_rate = sample_rate;
  ts.t.resize(count);
  ts.intensity.resize(count);
  for (std::size_t j = 0; j < count; ++j) {
    const double t = static_cast<double>(j) / sample_rate;
    cplx e = 1.0;
    for (const auto& line : s.lines) e += std::sqrt(line.weight) * std::polar(1.0, line.delta_omega * t);
    ts.t[j] = t;
    ts.intensity[j] = std::norm(e);
  }
  return ts;
}

struct WeightRecovery {
  WeightVector weights;
  double unexplained_fraction = 0.0;  // AC power above the n_max-th beat line
  bool model_mismatch = false;
  int iterations = 0;
};

inline constexpr double kUnexplainedPowerThreshold = 1e-6;

/// Inverts the beat model for states n = 0..n_max.
///
/// With field amplitudes c_0 = 1 + sqrt(P_0) and c_k = sqrt(P_k), the beat
/// line at 2 k Omega has strength A_k = sum_j c_j c_{j+k} (autocorrelation).
/// Unit reference and sum P = 1 give c_0 = A_0 / 2; the remaining c_k solve
/// the quadratic system by damped Newton iteration.
/// Intensity alone cannot tell n from -n, so only n >= 0 is recoverable.
inline WeightRecovery recover_weights(const TimeSeries& ts, double omega, int n_max) {
  detail::require(omega > 0.0, "prism angular velocity must be > 0");
  detail::require(n_max >= 0, "n_max must be >= 0");
  const std::size_t count = ts.intensity.size();
  detail::require(count >= 2 && ts.sample_rate > 0.0, "empty time series");

  const double periods = ts.duration() * omega / kPi;  // fundamental beat period pi / Omega
  if (std::abs(periods - std::round(periods)) > 1e-9 * std::max(1.0, periods) ||
      std::round(periods) < 1.0)
    throw NumericalError("recover_weights: duration is not an integer number of beat periods");
  const auto m = static_cast<long>(std::llround(periods));
  if (static_cast<double>(n_max) * m >= 0.5 * static_cast<double>(count))
    throw ValidationError("recover_weights: n_max beyond the sampled bandwidth");

  // line strengths
  const double inv = 1.0 / static_cast<double>(count);
  double mean = 0.0, mean_sq = 0.0;
  for (double v : ts.intensity) {
    mean += v;
    mean_sq += v * v;
  }
  mean *= inv;
  mean_sq *= inv;
  std::vector<double> a(static_cast<std::size_t>(n_max) + 1, 0.0);
  a[0] = mean;
  double explained = 0.0;
  for (int k = 1; k <= n_max; ++k) {
    double ck = 0.0, sk = 0.0;
    for (std::size_t j = 0; j < count; ++j) {
      const double arg = 2.0 * k * omega * ts.t[j];
      ck += ts.intensity[j] * std::cos(arg);
      sk += ts.intensity[j] * std::sin(arg);
    }
    ck *= inv;
    sk *= inv;
    a[static_cast<std::size_t>(k)] = ck;
    explained += 2.0 * (ck * ck + sk * sk);
  }
  const double ac = std::max(0.0, mean_sq - mean * mean);

  WeightRecovery r;
  r.unexplained_fraction = ac > 0.0 ? std::max(0.0, ac - explained) / ac : 0.0;
  r.model_mismatch = r.unexplained_fraction > kUnexplainedPowerThreshold;

  const double c0 = 0.5 * a[0];
  Eigen::VectorXd c(n_max);
  for (int k = 1; k <= n_max; ++k) c[k - 1] = std::max(0.0, a[static_cast<std::size_t>(k)] / c0);

  auto residual = [&](const Eigen::VectorXd& x) {
    Eigen::VectorXd f(n_max);
    for (int k = 1; k <= n_max; ++k) {
      double s = c0 * x[k - 1];
      for (int j = 1; j + k <= n_max; ++j) s += x[j - 1] * x[j + k - 1];
      f[k - 1] = s - a[static_cast<std::size_t>(k)];
    }
    return f;
  };

  if (n_max > 0) {
    Eigen::VectorXd f = residual(c);
    for (int it = 0; it < 200 && f.norm() > 1e-15; ++it) {
      Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(n_max, n_max);
      for (int k = 1; k <= n_max; ++k) {
        jac(k - 1, k - 1) += c0;
        for (int j = 1; j + k <= n_max; ++j) {
          jac(k - 1, j - 1) += c[j + k - 1];
          jac(k - 1, j + k - 1) += c[j - 1];
        }
      }
      const Eigen::VectorXd step = jac.fullPivLu().solve(f);
      double lambda = 1.0;
      Eigen::VectorXd trial = c - step;
      Eigen::VectorXd ft = residual(trial);
      while (ft.norm() >= f.norm() && lambda > 1e-6) {
        lambda *= 0.5;
        trial = c - lambda * step;
        ft = residual(trial);
      }
      c = trial;
      f = ft;
      r.iterations = it + 1;
    }
  }

  OamSpectrum p;
  p.entries[0] = (c0 - 1.0) * (c0 - 1.0);
  for (int k = 1; k <= n_max; ++k) p.entries[k] = c[k - 1] * c[k - 1];
  r.weights = weights_from_cn(p);
  return r;
}

}  // namespace oamkit
