#pragma once

// Spiral-harmonic decomposition of sampled fields about an arbitrary origin,
// power / mean-OAM integrals, and phase-singularity detection.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <utility>
#include <vector>

#include "analytic_spectrum.hpp"
#include "core.hpp"

namespace oamkit {

struct Point {
  double x = 0.0;
  double y = 0.0;
};

inline Point grid_center(const SampledField& f) { return {f.grid().ox, f.grid().oy}; }

// ---------------------------------------------------------------------------
// Interpolation

/// Tensor-product Lagrange interpolation on the cell-center lattice.
/// order = number of taps per axis (2 = bilinear).
class GridInterpolator {
 public:
  GridInterpolator(const SampledField& f, int order) : f_(f), order_(order) {
    detail::require(order >= 2 && order <= 12 && order % 2 == 0,
                    "interpolation order must be even, between 2 and 12");
    detail::require(f.nx() >= order && f.ny() >= order, "grid too small for interpolation order");
  }

  int order() const { return order_; }

  // Physical box in which the full stencil stays on the grid.
  double x_min() const { return f_.grid().x(order_ / 2 - 1); }
  double x_max() const { return f_.grid().x(f_.nx() - order_ / 2); }
  double y_min() const { return f_.grid().y(order_ / 2 - 1); }
  double y_max() const { return f_.grid().y(f_.ny() - order_ / 2); }

  bool inside(double x, double y) const {
    return x >= x_min() && x <= x_max() && y >= y_min() && y <= y_max();
  }

  /// Distance from p to the nearest edge of the valid box (negative if outside).
  double clearance(Point p) const {
    return std::min({p.x - x_min(), x_max() - p.x, p.y - y_min(), y_max() - p.y});
  }

  cplx operator()(double x, double y) const {
    const auto& g = f_.grid();
    const int h = order_ / 2;
    int ix, iy;
    double wx[12], wy[12];
    stencil((x - g.x(0)) / g.dx, f_.nx(), ix, wx);
    stencil((y - g.y(0)) / g.dy, f_.ny(), iy, wy);
    cplx acc{};
    for (int b = 0; b < order_; ++b) {
      cplx row{};
      for (int a = 0; a < order_; ++a) row += wx[a] * f_.at(ix - h + 1 + a, iy - h + 1 + b);
      acc += wy[b] * row;
    }
    return acc;
  }

 private:
  void stencil(double u, int n, int& base, double* w) const {
    const int h = order_ / 2;
    base = static_cast<int>(std::floor(u));
    base = std::clamp(base, h - 1, n - 1 - h);
    const double t = u - base;
    for (int k = 0; k < order_; ++k) {
      const double ok = k - h + 1;
      double num = 1.0, den = 1.0;
      for (int j = 0; j < order_; ++j) {
        if (j == k) continue;
        const double oj = j - h + 1;
        num *= t - oj;
        den *= ok - oj;
      }
      w[k] = num / den;
    }
  }

  const SampledField& f_;
  int order_;
};

// ---------------------------------------------------------------------------
// Quadrature

struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

namespace detail {

// P_n(x) and P_n'(x) by the three-term recurrence.
inline std::pair<double, double> legendre(int n, double x) {
  double p0 = 1.0, p1 = x;
  for (int k = 2; k <= n; ++k) {
    const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
    p0 = p1;
    p1 = p2;
  }
  if (n == 1) p0 = 1.0;
  return {p1, n * (x * p1 - p0) / (x * x - 1.0)};
}

}  // namespace detail

/// n-point Gauss-Legendre rule mapped to [a, b], nodes ascending.
inline QuadratureRule gauss_legendre(int n, double a, double b) {
  detail::require(n >= 2, "quadrature needs at least two nodes");
  QuadratureRule q;
  q.nodes.resize(static_cast<std::size_t>(n));
  q.weights.resize(static_cast<std::size_t>(n));
  const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
    for (int it = 0; it < 100; ++it) {
      const auto [p, dp] = detail::legendre(n, x);
      const double step = p / dp;
      x -= step;
      if (std::abs(step) < 1e-16) break;
    }
    const double dp = detail::legendre(n, x).second;
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    const auto lo = static_cast<std::size_t>(i);
    const auto hi = static_cast<std::size_t>(n - 1 - i);
    q.nodes[lo] = mid - half * x;
    q.nodes[hi] = mid + half * x;
    q.weights[lo] = q.weights[hi] = half * w;
  }
  return q;
}

// ---------------------------------------------------------------------------
// Azimuthal decomposition

struct DecomposeOptions {
  int n_radii = 256;
  int ring_samples = 0;  // 0: max(256, 8 n_max)
  int interp_order = 8;
};

/// a_n(rho) = (2 pi)^{-1/2} int_0^{2pi} u(rho, phi) e^{-i n phi} dphi
/// sampled at Gauss-Legendre radii on [0, radius].
struct AzimuthalProfileTable {
  int n_max = 0;
  Point origin;
  std::vector<double> radii;
  std::vector<double> radial_weights;
  std::vector<cplx> values;  // row n + n_max, column = radius index
  double requested_radius = 0.0;
  double radius = 0.0;
  bool truncated = false;

  std::size_t n_radii() const { return radii.size(); }

  const cplx& a(int n, std::size_t j) const {
    return values[static_cast<std::size_t>(n + n_max) * radii.size() + j];
  }
  double magnitude(int n, std::size_t j) const { return std::abs(a(n, j)); }
  double phase(int n, std::size_t j) const { return std::arg(a(n, j)); }
};

inline AzimuthalProfileTable azimuthal_decompose(const SampledField& f, Point origin, int n_max,
                                                 const DecomposeOptions& opt = {}) {
  detail::require(n_max >= 1, "n_max must be >= 1");
  detail::require(opt.n_radii >= 16, "n_radii must be >= 16");
  const GridInterpolator interp(f, opt.interp_order);
  if (!interp.inside(origin.x, origin.y))
    throw ValidationError("azimuthal_decompose: origin outside grid");

  AzimuthalProfileTable t;
  t.n_max = n_max;
  t.origin = origin;
  t.requested_radius = interp.clearance(grid_center(f));
  t.radius = std::min(t.requested_radius, interp.clearance(origin));
  t.truncated = t.radius < t.requested_radius * (1.0 - 1e-12);
  detail::require(t.radius > 0.0, "azimuthal_decompose: origin on grid edge");

  const int ring = opt.ring_samples > 0 ? opt.ring_samples : std::max(256, 8 * n_max);
  detail::require(ring >= 2 * n_max + 1, "ring sample count too small for n_max");

  const auto rule = gauss_legendre(opt.n_radii, 0.0, t.radius);
  t.radii = rule.nodes;
  t.radial_weights = rule.weights;

  std::vector<double> cs(static_cast<std::size_t>(ring)), sn(static_cast<std::size_t>(ring));
  for (int k = 0; k < ring; ++k) {
    const double phi = kTwoPi * k / ring;
    cs[k] = std::cos(phi);
    sn[k] = std::sin(phi);
  }
  const int n_modes = 2 * n_max + 1;
  const std::size_t nr = t.radii.size();
  t.values.assign(static_cast<std::size_t>(n_modes) * nr, cplx{});
  const double norm = std::sqrt(kTwoPi) / ring;

  std::vector<cplx> samples(static_cast<std::size_t>(ring));
  for (std::size_t j = 0; j < nr; ++j) {
    const double r = t.radii[j];
    for (int k = 0; k < ring; ++k)
      samples[k] = interp(origin.x + r * cs[k], origin.y + r * sn[k]);
    for (int n = -n_max; n <= n_max; ++n) {
      cplx acc{};
      for (int k = 0; k < ring; ++k) {
        // e^{-i n phi_k}, index reduced modulo the ring
        const int idx = static_cast<int>((static_cast<long>(n) * k % ring + ring) % ring);
        acc += samples[k] * cplx(cs[idx], -sn[idx]);
      }
      t.values[static_cast<std::size_t>(n + n_max) * nr + j] = norm * acc;
    }
  }
  return t;
}

/// C_n = int_0^R |a_n|^2 rho drho.
inline OamSpectrum spectrum_from_table(const AzimuthalProfileTable& t) {
  OamSpectrum s;
  s.provenance = Provenance::numeric;
  for (int n = -t.n_max; n <= t.n_max; ++n) {
    double c = 0.0;
    for (std::size_t j = 0; j < t.n_radii(); ++j)
      c += t.radial_weights[j] * t.radii[j] * std::norm(t.a(n, j));
    s.entries[n] = c;
  }
  return s;
}

inline constexpr int kDefaultNMax = 32;

inline OamSpectrum spectrum_from_field(const SampledField& f, Point origin, int n_max = kDefaultNMax,
                                       const DecomposeOptions& opt = {}) {
  return spectrum_from_table(azimuthal_decompose(f, origin, n_max, opt));
}

struct EnergyOam {
  double power = 0.0;     // sum |u|^2 dx dy
  double mean_oam = 0.0;  // hbar per photon, sum n C_n / sum C_n
};

inline EnergyOam energy_and_oam(const SampledField& f, Point origin, int n_max = kDefaultNMax,
                                const DecomposeOptions& opt = {}) {
  EnergyOam r;
  r.power = f.power();
  if (!(r.power > 0.0)) throw ValidationError("energy_and_oam: zero field");
  const auto s = spectrum_from_field(f, origin, n_max, opt);
  double num = 0.0, den = 0.0;
  for (const auto& [n, c] : s.entries) {
    num += n * c;
    den += c;
  }
  if (!(den > 0.0)) throw ValidationError("energy_and_oam: zero spectrum about origin");
  r.mean_oam = num / den;
  return r;
}

// ---------------------------------------------------------------------------
// Dislocations

struct Dislocation {
  double x = 0.0;
  double y = 0.0;
  int charge = 0;
};

struct DislocationSet {
  std::vector<Dislocation> items;
  double cell = 0.0;

  int total_charge() const {
    int s = 0;
    for (const auto& d : items) s += d.charge;
    return s;
  }
};

namespace detail {

// Phase winding along the boundary of cell (ix, iy)-(ix+1, iy+1), 16 points per edge.
inline double refined_cell_winding(const GridInterpolator& interp, const GridSpec& g, int ix, int iy) {
  constexpr int per_edge = 16;
  const double x0 = g.x(ix), x1 = g.x(ix + 1), y0 = g.y(iy), y1 = g.y(iy + 1);
  const double cx[5] = {x0, x1, x1, x0, x0}, cy[5] = {y0, y0, y1, y1, y0};
  double sum = 0.0;
  cplx prev = interp(x0, y0);
  for (int e = 0; e < 4; ++e)
    for (int k = 1; k <= per_edge; ++k) {
      const double t = static_cast<double>(k) / per_edge;
      const cplx v = interp(cx[e] + t * (cx[e + 1] - cx[e]), cy[e] + t * (cy[e + 1] - cy[e]));
      sum += wrap_phase(std::arg(v) - std::arg(prev));
      prev = v;
    }
  return sum;
}

}  // namespace detail

/// Phase winding around every 2x2 plaquette of samples; detections whose
/// plaquettes touch (within one cell) are merged and their charges summed.
inline DislocationSet locate_dislocations(const SampledField& f) {
  detail::require(f.max_abs() > 0.0, "locate_dislocations: field is identically zero");
  const auto& g = f.grid();
  struct Raw {
    int ix, iy, q;
  };
  std::vector<Raw> raw;
  std::optional<GridInterpolator> interp;
  if (g.nx >= 8 && g.ny >= 8) interp.emplace(f, 8);
  for (int iy = 0; iy + 1 < g.ny; ++iy) {
    for (int ix = 0; ix + 1 < g.nx; ++ix) {
      const cplx c[4] = {f.at(ix, iy), f.at(ix + 1, iy), f.at(ix + 1, iy + 1), f.at(ix, iy + 1)};
      bool degenerate = false;
      for (const auto& v : c) degenerate = degenerate || v == cplx{} || !std::isfinite(std::abs(v));
      if (degenerate) continue;
      double sum = 0.0, worst = 0.0;
      for (int k = 0; k < 4; ++k) {
        const double d = wrap_phase(std::arg(c[(k + 1) % 4]) - std::arg(c[k]));
        worst = std::max(worst, std::abs(d));
        sum += d;
      }
      // A corner-to-corner step near pi has an ambiguous direction (e.g. a
      // charge-2 core centered in the cell); retrace the cell boundary on
      // interpolated points.
      if (worst > 0.5 * kPi && interp) sum = detail::refined_cell_winding(*interp, g, ix, iy);
      const int q = static_cast<int>(std::lround(sum / kTwoPi));
      if (q != 0) raw.push_back({ix, iy, q});
    }
  }

  // union-find over touching plaquettes
  std::vector<std::size_t> parent(raw.size());
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  auto find = [&](std::size_t i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  };
  for (std::size_t i = 0; i < raw.size(); ++i)
    for (std::size_t j = i + 1; j < raw.size(); ++j)
      if (std::abs(raw[i].ix - raw[j].ix) <= 1 && std::abs(raw[i].iy - raw[j].iy) <= 1)
        parent[find(i)] = find(j);

  DislocationSet out;
  out.cell = std::max(g.dx, g.dy);
  std::vector<std::size_t> roots;
  for (std::size_t i = 0; i < raw.size(); ++i)
    if (find(i) == i) roots.push_back(i);
  for (auto r : roots) {
    double sx = 0.0, sy = 0.0;
    int n = 0, q = 0;
    for (std::size_t i = 0; i < raw.size(); ++i) {
      if (find(i) != r) continue;
      sx += g.x(raw[i].ix) + 0.5 * g.dx;
      sy += g.y(raw[i].iy) + 0.5 * g.dy;
      q += raw[i].q;
      ++n;
    }
    if (q != 0) out.items.push_back({sx / n, sy / n, q});
  }
  return out;
}

inline constexpr double kWindingAmplitudeFloor = 1e-12;

/// Total phase winding / 2 pi along a circle about `center`.
inline int net_topological_charge(const SampledField& f, double radius, Point center,
                                  int interp_order = 8) {
  detail::require(radius > 0.0, "net_topological_charge: radius must be positive");
  const GridInterpolator interp(f, interp_order);
  if (interp.clearance(center) < radius)
    throw ValidationError("net_topological_charge: circle leaves the grid");
  const double floor = kWindingAmplitudeFloor * f.max_abs();
  for (int samples = 1024; samples <= (1 << 18); samples *= 2) {
    std::vector<cplx> ring(static_cast<std::size_t>(samples));
    for (int k = 0; k < samples; ++k) {
      const double phi = kTwoPi * k / samples;
      ring[k] = interp(center.x + radius * std::cos(phi), center.y + radius * std::sin(phi));
      if (std::abs(ring[k]) <= floor)
        throw NumericalError("net_topological_charge: amplitude vanishes on the path");
    }
    double sum = 0.0, worst = 0.0;
    for (int k = 0; k < samples; ++k) {
      const double d = wrap_phase(std::arg(ring[(k + 1) % samples]) - std::arg(ring[k]));
      worst = std::max(worst, std::abs(d));
      sum += d;
    }
    if (worst < 0.5 * kPi) return static_cast<int>(std::lround(sum / kTwoPi));
  }
  throw NumericalError("net_topological_charge: phase not resolved along the path");
}

inline int net_topological_charge(const SampledField& f, double radius) {
  return net_topological_charge(f, radius, grid_center(f));
}

}  // namespace oamkit
