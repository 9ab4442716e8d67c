#pragma once

// Field sources (p = 0 Laguerre-Gauss modes, vortex pancakes, two-pearl
// necklaces) and their evaluation on uniform Cartesian grids.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <span>
#include <string>
#include <type_traits>
#include <variant>
#include <vector>

#include "errors.hpp"

namespace oamkit {

using cplx = std::complex<double>;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Wraps an angle into [0, 2*pi).
inline double normalize_angle(double phi) {
  double r = std::fmod(phi, kTwoPi);
  if (r < 0.0) r += kTwoPi;
  if (r >= kTwoPi) r = 0.0;
  return r;
}

/// Wraps an angle difference into (-pi, pi].
inline double wrap_phase(double d) {
  d = std::remainder(d, kTwoPi);
  if (d <= -kPi) d += kTwoPi;
  return d;
}

/// Unit-power LG mode with radial index p = 0.
///
/// u(rho, phi) = sqrt(2 / (pi |m|!)) / w0 * (sqrt(2) rho / w0)^|m|
///               * exp(-rho^2 / w0^2) * exp(i m phi)
struct LgModeP0 {
  int m = 0;
  double w0 = 1.0;

  LgModeP0() = default;
  LgModeP0(int m_, double w0_) : m(m_), w0(w0_) {
    detail::require(w0 > 0.0 && std::isfinite(w0), "LG mode waist must be positive");
  }
};

/// A single-charge vortex position in polar coordinates.
struct Vortex {
  double rho = 0.0;
  double phi = 0.0;

  cplx position() const { return std::polar(rho, phi); }
};

/// Gaussian host beam with N nested single-charge vortices:
///   u(rho, phi) = a0 * prod_l (rho e^{i phi} - rho_l e^{i phi_l}) * exp(-rho^2 / w0^2)
/// Coincident vortices are allowed and act as one higher-charge dislocation.
class VortexPancake {
 public:
  VortexPancake() = default;
  VortexPancake(cplx a0, double w0, std::vector<Vortex> vortices)
      : a0_(a0), w0_(w0), vortices_(std::move(vortices)) {
    detail::require(w0_ > 0.0 && std::isfinite(w0_), "pancake waist must be positive");
    detail::require(std::isfinite(a0_.real()) && std::isfinite(a0_.imag()),
                    "pancake amplitude must be finite");
    for (auto& v : vortices_) {
      detail::require(v.rho >= 0.0 && std::isfinite(v.rho), "vortex radius must be >= 0");
      detail::require(std::isfinite(v.phi), "vortex angle must be finite");
      v.phi = normalize_angle(v.phi);
    }
  }

  cplx a0() const { return a0_; }
  double w0() const { return w0_; }
  std::size_t size() const { return vortices_.size(); }
  const std::vector<Vortex>& vortices() const { return vortices_; }

  std::vector<cplx> roots() const {
    std::vector<cplx> r;
    r.reserve(vortices_.size());
    for (const auto& v : vortices_) r.push_back(v.position());
    return r;
  }

  double max_radius() const {
    double r = 0.0;
    for (const auto& v : vortices_) r = std::max(r, v.rho);
    return r;
  }

 private:
  cplx a0_{1.0, 0.0};
  double w0_ = 1.0;
  std::vector<Vortex> vortices_;
};

/// Two displaced LG_{m0} pearls: ampA * u(x + d/2, y) + ampB * u(x - d/2, y).
struct NecklaceSpec {
  int m = 1;
  double w0 = 1.0;
  double d = 0.0;
  cplx amp_a{0.5, 0.0};
  cplx amp_b{0.5, 0.0};

  NecklaceSpec() = default;
  NecklaceSpec(int m_, double w0_, double d_, cplx a, cplx b)
      : m(m_), w0(w0_), d(d_), amp_a(a), amp_b(b) {
    detail::require(w0 > 0.0 && std::isfinite(w0), "necklace waist must be positive");
    detail::require(d >= 0.0 && std::isfinite(d), "necklace separation must be >= 0");
  }
};

using FieldSource = std::variant<LgModeP0, VortexPancake, NecklaceSpec>;

// ---------------------------------------------------------------------------
// Evaluation

inline cplx eval_lg_p0_xy(const LgModeP0& mode, double x, double y) {
  const int am = std::abs(mode.m);
  const double w0 = mode.w0;
  const double r2 = (x * x + y * y) / (w0 * w0);
  const double norm = std::sqrt(2.0 / kPi) / w0;
  // (sqrt2 (x + i y) / w0)^|m| / sqrt(|m|!), conjugated for negative m.
  cplx z(x, mode.m >= 0 ? y : -y);
  z *= std::sqrt(2.0) / w0;
  cplx poly = 1.0;
  for (int k = 1; k <= am; ++k) poly *= z / std::sqrt(static_cast<double>(k));
  return norm * poly * std::exp(-r2);
}

inline cplx eval_lg_p0(const LgModeP0& mode, double rho, double phi) {
  return eval_lg_p0_xy(mode, rho * std::cos(phi), rho * std::sin(phi));
}

inline cplx eval_pancake_xy(const VortexPancake& p, double x, double y) {
  const cplx z(x, y);
  cplx prod = p.a0();
  for (const auto& v : p.vortices()) prod *= z - v.position();
  const double w0 = p.w0();
  return prod * std::exp(-(x * x + y * y) / (w0 * w0));
}

inline cplx eval_pancake(const VortexPancake& p, double rho, double phi) {
  return eval_pancake_xy(p, rho * std::cos(phi), rho * std::sin(phi));
}

inline cplx eval_necklace(const NecklaceSpec& n, double x, double y) {
  const LgModeP0 pearl(n.m, n.w0);
  const double h = 0.5 * n.d;
  return n.amp_a * eval_lg_p0_xy(pearl, x + h, y) + n.amp_b * eval_lg_p0_xy(pearl, x - h, y);
}

inline cplx eval_source(const FieldSource& s, double x, double y) {
  return std::visit(
      [x, y](const auto& src) -> cplx {
        using T = std::decay_t<decltype(src)>;
        if constexpr (std::is_same_v<T, LgModeP0>) {
          return eval_lg_p0_xy(src, x, y);
        } else if constexpr (std::is_same_v<T, VortexPancake>) {
          return eval_pancake_xy(src, x, y);
        } else {
          return eval_necklace(src, x, y);
        }
      },
      s);
}

/// Radius (about the beam axis) beyond which the source carries no power
/// worth tracking; used for grid defaults and clipping estimates.
inline double source_reach(const FieldSource& s) {
  return std::visit(
      [](const auto& src) -> double {
        using T = std::decay_t<decltype(src)>;
        if constexpr (std::is_same_v<T, LgModeP0>) {
          return src.w0 * std::sqrt(0.5 * std::abs(src.m));
        } else if constexpr (std::is_same_v<T, VortexPancake>) {
          return src.max_radius();
        } else {
          return 0.5 * src.d;
        }
      },
      s);
}

inline double source_waist(const FieldSource& s) {
  return std::visit(
      [](const auto& src) -> double {
        if constexpr (std::is_same_v<std::decay_t<decltype(src)>, VortexPancake>) {
          return src.w0();
        } else {
          return src.w0;
        }
      },
      s);
}

// ---------------------------------------------------------------------------
// Elementary symmetric polynomials

/// All elementary symmetric polynomials e_0..e_N of the roots, built by
/// multiplying out prod_j (1 + r_j t) one root at a time.
inline std::vector<cplx> elementary_symmetric_all(std::span<const cplx> roots) {
  std::vector<cplx> e(roots.size() + 1, cplx{});
  e[0] = 1.0;
  for (std::size_t j = 0; j < roots.size(); ++j) {
    for (std::size_t k = j + 1; k > 0; --k) e[k] += roots[j] * e[k - 1];
  }
  return e;
}

inline cplx elementary_symmetric(std::span<const cplx> roots, int k) {
  if (k < 0 || static_cast<std::size_t>(k) > roots.size())
    throw ValidationError("elementary_symmetric: k out of range");
  return elementary_symmetric_all(roots)[static_cast<std::size_t>(k)];
}

// ---------------------------------------------------------------------------
// Sampled fields

/// Uniform grid geometry. (ox, oy) is the physical coordinate of the grid
/// center; cell (ix, iy) is centered at ox + (ix + 1/2 - nx/2) dx.
struct GridSpec {
  int nx = 512;
  int ny = 512;
  double dx = 1.0;
  double dy = 1.0;
  double ox = 0.0;
  double oy = 0.0;

  static GridSpec square(int n, double extent, double ox = 0.0, double oy = 0.0) {
    detail::require(n >= 2, "grid needs at least 2 samples per axis");
    detail::require(extent > 0.0, "grid extent must be positive");
    return GridSpec{n, n, extent / n, extent / n, ox, oy};
  }

  void validate() const {
    detail::require(nx >= 2 && ny >= 2, "grid needs at least 2 samples per axis");
    detail::require(dx > 0.0 && dy > 0.0 && std::isfinite(dx) && std::isfinite(dy),
                    "grid spacing must be positive");
  }

  double x(int ix) const { return ox + (ix + 0.5 - 0.5 * nx) * dx; }
  double y(int iy) const { return oy + (iy + 0.5 - 0.5 * ny) * dy; }
  double half_width() const { return 0.5 * nx * dx; }
  double half_height() const { return 0.5 * ny * dy; }
};

class SampledField {
 public:
  SampledField() = default;
  explicit SampledField(GridSpec g) : grid_(g) {
    grid_.validate();
    values_.assign(static_cast<std::size_t>(g.nx) * static_cast<std::size_t>(g.ny), cplx{});
  }
  SampledField(GridSpec g, std::vector<cplx> values) : grid_(g), values_(std::move(values)) {
    grid_.validate();
    detail::require(values_.size() ==
                        static_cast<std::size_t>(g.nx) * static_cast<std::size_t>(g.ny),
                    "field value count does not match grid");
  }

  const GridSpec& grid() const { return grid_; }
  int nx() const { return grid_.nx; }
  int ny() const { return grid_.ny; }
  double dx() const { return grid_.dx; }
  double dy() const { return grid_.dy; }

  cplx& at(int ix, int iy) { return values_[index(ix, iy)]; }
  const cplx& at(int ix, int iy) const { return values_[index(ix, iy)]; }

  std::span<cplx> values() { return values_; }
  std::span<const cplx> values() const { return values_; }

  /// Discrete power sum |u|^2 dx dy.
  double power() const {
    double s = 0.0;
    for (const auto& v : values_) s += std::norm(v);
    return s * grid_.dx * grid_.dy;
  }

  double max_abs() const {
    double m = 0.0;
    for (const auto& v : values_) m = std::max(m, std::abs(v));
    return m;
  }

 private:
  std::size_t index(int ix, int iy) const {
    return static_cast<std::size_t>(iy) * static_cast<std::size_t>(grid_.nx) +
           static_cast<std::size_t>(ix);
  }

  GridSpec grid_;
  std::vector<cplx> values_;
};

inline constexpr int kDefaultGridSize = 512;
inline constexpr double kClipTolerance = 1e-6;

/// Default grid: 512^2 square cells, half-extent max(4 w0, reach + 4 w0).
inline GridSpec default_grid(const FieldSource& s, int n = kDefaultGridSize) {
  const double w0 = source_waist(s);
  const double half = std::max(4.0 * w0, source_reach(s) + 4.0 * w0);
  return GridSpec::square(n, 2.0 * half);
}

/// Fraction of the source power that falls outside the grid window, estimated
/// on a coarse 256^2 raster reaching well past the beam.
inline double clipped_power_fraction(const FieldSource& s, const GridSpec& g) {
  const double w0 = source_waist(s);
  const double reach = source_reach(s) + 6.0 * w0;
  const double span = std::max({reach, std::abs(g.ox) + g.half_width(),
                                std::abs(g.oy) + g.half_height()});
  constexpr int n = 256;
  const double h = 2.0 * span / n;
  const double x_lo = g.ox - g.half_width(), x_hi = g.ox + g.half_width();
  const double y_lo = g.oy - g.half_height(), y_hi = g.oy + g.half_height();
  double total = 0.0, outside = 0.0;
  for (int iy = 0; iy < n; ++iy) {
    const double y = -span + (iy + 0.5) * h;
    for (int ix = 0; ix < n; ++ix) {
      const double x = -span + (ix + 0.5) * h;
      const double p = std::norm(eval_source(s, x, y));
      total += p;
      if (x < x_lo || x > x_hi || y < y_lo || y > y_hi) outside += p;
    }
  }
  if (total <= 0.0) return 0.0;
  return outside / total;
}

/// Samples the source at cell centers. Refuses windows that clip more than
/// 1e-6 of the beam power.
inline SampledField rasterize(const FieldSource& s, const GridSpec& g) {
  g.validate();
  const double clipped = clipped_power_fraction(s, g);
  if (clipped > kClipTolerance)
    throw GridError("rasterize: grid window clips " + std::to_string(clipped) +
                         " of the beam power");
  SampledField f(g);
  for (int iy = 0; iy < g.ny; ++iy) {
    const double y = g.y(iy);
    for (int ix = 0; ix < g.nx; ++ix) f.at(ix, iy) = eval_source(s, g.x(ix), y);
  }
  return f;
}

inline SampledField rasterize(const FieldSource& s) { return rasterize(s, default_grid(s)); }

}  // namespace oamkit
