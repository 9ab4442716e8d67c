#pragma once

// Free-space paraxial propagation: spectral transfer function for sampled
// fields, closed-form LG evolution for pancakes.

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <vector>

#include "analytic_spectrum.hpp"
#include "core.hpp"

namespace oamkit {

struct PropagationSpec {
  double wavelength = 1.0;
  double z = 0.0;

  PropagationSpec() = default;
  PropagationSpec(double wavelength_, double z_) : wavelength(wavelength_), z(z_) {
    validate();
  }

  void validate() const {
    detail::require(wavelength > 0.0 && std::isfinite(wavelength), "wavelength must be positive");
    detail::require(std::isfinite(z), "propagation distance must be finite");
  }
};

inline double rayleigh_range(double w0, double wavelength) {
  return kPi * w0 * w0 / wavelength;
}

namespace detail {

// FFTW's planner is not thread-safe; execution is.
inline std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

class Fft2d {
 public:
  Fft2d(int nx, int ny) : nx_(nx), ny_(ny) {
    const std::size_t n = static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny);
    buf_ = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * n));
    if (buf_ == nullptr) throw std::bad_alloc();
    std::lock_guard<std::mutex> lock(fftw_planner_mutex());
    fwd_ = fftw_plan_dft_2d(ny, nx, buf_, buf_, FFTW_FORWARD, FFTW_ESTIMATE);
    inv_ = fftw_plan_dft_2d(ny, nx, buf_, buf_, FFTW_BACKWARD, FFTW_ESTIMATE);
  }
  ~Fft2d() {
    std::lock_guard<std::mutex> lock(fftw_planner_mutex());
    fftw_destroy_plan(fwd_);
    fftw_destroy_plan(inv_);
    fftw_free(buf_);
  }
  Fft2d(const Fft2d&) = delete;
  Fft2d& operator=(const Fft2d&) = delete;

  cplx* data() { return reinterpret_cast<cplx*>(buf_); }
  void forward() { fftw_execute(fwd_); }
  void inverse() { fftw_execute(inv_); }

 private:
  int nx_, ny_;
  fftw_complex* buf_ = nullptr;
  fftw_plan fwd_ = nullptr;
  fftw_plan inv_ = nullptr;
};

// Signed DFT frequency of bin k in an n-point transform with spacing d.
inline double fft_frequency(int k, int n, double d) {
  const int ks = (k <= (n - 1) / 2) ? k : k - n;
  return ks / (n * d);
}

// Power fraction in the outer band (1/16 of the width on each side).
inline double border_power_fraction(const SampledField& f) {
  const int bx = std::max(1, f.nx() / 16), by = std::max(1, f.ny() / 16);
  double total = 0.0, border = 0.0;
  for (int iy = 0; iy < f.ny(); ++iy)
    for (int ix = 0; ix < f.nx(); ++ix) {
      const double p = std::norm(f.at(ix, iy));
      total += p;
      if (ix < bx || ix >= f.nx() - bx || iy < by || iy >= f.ny() - by) border += p;
    }
  return total > 0.0 ? border / total : 0.0;
}

}  // namespace detail

inline constexpr double kSignificantSpectralPower = 1e-6;

/// Applies exp(-i pi lambda z (fx^2 + fy^2)) in the spatial-frequency domain.
///
/// Guards: the input must not carry more than 1e-6 of its power in the outer
/// band of the window, and the transfer-function phase step between adjacent
/// frequency samples must stay below pi over the band holding all but 1e-6
/// of the angular-spectrum power (equivalently, the walk-off lambda z f of
/// the significant plane waves stays within half the window).
inline SampledField fresnel_propagate(const SampledField& f, const PropagationSpec& spec) {
  spec.validate();
  const auto& g = f.grid();
  if (detail::border_power_fraction(f) > kClipTolerance)
    throw GridError("fresnel_propagate: input field reaches the window border");
  if (spec.z == 0.0) return f;

  const int nx = g.nx, ny = g.ny;
  const std::size_t n = static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny);
  detail::Fft2d fft(nx, ny);
  cplx* buf = fft.data();
  std::copy(f.values().begin(), f.values().end(), buf);
  fft.forward();

  // significant bandwidth
  std::vector<std::pair<double, double>> by_freq;  // (f^2, power)
  by_freq.reserve(n);
  double total = 0.0;
  for (int iy = 0; iy < ny; ++iy) {
    const double fy = detail::fft_frequency(iy, ny, g.dy);
    for (int ix = 0; ix < nx; ++ix) {
      const double fx = detail::fft_frequency(ix, nx, g.dx);
      const double p = std::norm(buf[static_cast<std::size_t>(iy) * nx + ix]);
      by_freq.emplace_back(fx * fx + fy * fy, p);
      total += p;
    }
  }
  std::sort(by_freq.begin(), by_freq.end(), [](const auto& a, const auto& b) {
    return a.first > b.first;
  });
  double tail = 0.0, f_sig = 0.0;
  for (const auto& [f2, p] : by_freq) {
    tail += p;
    if (tail > kSignificantSpectralPower * total) {
      f_sig = std::sqrt(f2);
      break;
    }
  }
  const double walk = spec.wavelength * std::abs(spec.z) * f_sig;
  if (walk > std::min(g.half_width(), g.half_height()))
    throw GridError("fresnel_propagate: transfer function under-sampled (aliasing) at z = " +
                         std::to_string(spec.z));

  const double c = -kPi * spec.wavelength * spec.z;
  for (int iy = 0; iy < ny; ++iy) {
    const double fy = detail::fft_frequency(iy, ny, g.dy);
    for (int ix = 0; ix < nx; ++ix) {
      const double fx = detail::fft_frequency(ix, nx, g.dx);
      buf[static_cast<std::size_t>(iy) * nx + ix] *= std::polar(1.0, c * (fx * fx + fy * fy));
    }
  }
  fft.inverse();
  const double inv_n = 1.0 / static_cast<double>(n);
  std::vector<cplx> out(buf, buf + n);
  for (auto& v : out) v *= inv_n;
  return SampledField(g, std::move(out));
}

/// Unit-power LG_{l0} at distance z from its waist:
///   u_l(z) = u_l(0)[rho e^{i phi} / (1 + i z/z_R)] / (1 + i z/z_R)
/// with the Gaussian argument divided by the same complex factor. This
/// carries the waist growth, wavefront curvature, and Gouy phase (l + 1) atan(z/z_R).
inline cplx eval_lg_p0_at_z(const LgModeP0& mode, double x, double y, double z,
                            double wavelength) {
  const double w0 = mode.w0;
  const cplx q = cplx(1.0, z / rayleigh_range(w0, wavelength));
  const int am = std::abs(mode.m);
  cplx zeta(x, mode.m >= 0 ? y : -y);
  zeta *= std::sqrt(2.0) / (w0 * q);
  cplx poly = 1.0;
  for (int k = 1; k <= am; ++k) poly *= zeta / std::sqrt(static_cast<double>(k));
  const double norm = std::sqrt(2.0 / kPi) / w0;
  return norm * poly * std::exp(-(x * x + y * y) / (w0 * w0 * q)) / q;
}

/// Sum over l of coef_l u_{l0}(z); the LG coefficients never change with z.
inline SampledField propagate_pancake_analytic(const VortexPancake& p, const PropagationSpec& spec,
                                               const GridSpec& g) {
  spec.validate();
  g.validate();
  const auto coef = pancake_lg_coefficients(p);
  const double w0 = p.w0();
  const cplx q = cplx(1.0, spec.z / rayleigh_range(w0, spec.wavelength));
  const double norm = std::sqrt(2.0 / kPi) / w0;
  SampledField f(g);
  for (int iy = 0; iy < g.ny; ++iy) {
    const double y = g.y(iy);
    for (int ix = 0; ix < g.nx; ++ix) {
      const double x = g.x(ix);
      const cplx zeta = cplx(x, y) * (std::sqrt(2.0) / (w0 * q));
      const cplx envelope = norm * std::exp(-(x * x + y * y) / (w0 * w0 * q)) / q;
      // sum_l coef_l zeta^l / sqrt(l!)
      cplx acc{};
      cplx term = 1.0;
      for (std::size_t l = 0; l < coef.size(); ++l) {
        if (l > 0) term *= zeta / std::sqrt(static_cast<double>(l));
        acc += coef[l] * term;
      }
      f.at(ix, iy) = envelope * acc;
    }
  }
  return f;
}

}  // namespace oamkit
