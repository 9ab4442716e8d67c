#pragma once

// File formats: JSON source/target/result documents, the OAMF1 binary field
// container, and the CSV tables.

#include <bit>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "analytic_spectrum.hpp"
#include "core.hpp"
#include "designer.hpp"
#include "measurement.hpp"
#include "numeric_spectrum.hpp"

namespace oamkit {

using json = nlohmann::json;

/// printf-style %.17g.
inline std::string format_g17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// ---------------------------------------------------------------------------
// JSON

namespace detail {

inline cplx complex_from_json(const json& j, const char* key) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    throw ValidationError(std::string("'") + key + "' must be [re, im]");
  return {j[0].get<double>(), j[1].get<double>()};
}

inline const json& field(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw ValidationError(std::string("missing key '") + key + "'");
  return j.at(key);
}

inline double number(const json& j, const char* key) {
  const auto& v = field(j, key);
  if (!v.is_number()) throw ValidationError(std::string("'") + key + "' must be a number");
  return v.get<double>();
}

inline int integer(const json& j, const char* key) {
  const auto& v = field(j, key);
  if (!v.is_number_integer()) throw ValidationError(std::string("'") + key + "' must be an integer");
  return v.get<int>();
}

inline json parse_json(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ValidationError(std::string("malformed JSON: ") + e.what());
  }
}

}  // namespace detail

inline json to_json(const VortexPancake& p) {
  json v = json::array();
  for (const auto& x : p.vortices()) v.push_back({x.rho, x.phi});
  return {{"w0", p.w0()}, {"a0", {p.a0().real(), p.a0().imag()}}, {"vortices", v}};
}

inline VortexPancake pancake_from_json(const json& j) {
  const double w0 = detail::number(j, "w0");
  const cplx a0 = j.contains("a0") ? detail::complex_from_json(j.at("a0"), "a0") : cplx(1.0, 0.0);
  std::vector<Vortex> v;
  const auto& arr = detail::field(j, "vortices");
  if (!arr.is_array()) throw ValidationError("'vortices' must be an array");
  for (const auto& e : arr) {
    if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number())
      throw ValidationError("each vortex must be [rho, phi]");
    v.push_back({e[0].get<double>(), e[1].get<double>()});
  }
  return VortexPancake(a0, w0, std::move(v));
}

inline json to_json(const NecklaceSpec& n) {
  return {{"m", n.m},
          {"w0", n.w0},
          {"d", n.d},
          {"ampA", {n.amp_a.real(), n.amp_a.imag()}},
          {"ampB", {n.amp_b.real(), n.amp_b.imag()}}};
}

inline NecklaceSpec necklace_from_json(const json& j) {
  return NecklaceSpec(detail::integer(j, "m"), detail::number(j, "w0"), detail::number(j, "d"),
                      detail::complex_from_json(detail::field(j, "ampA"), "ampA"),
                      detail::complex_from_json(detail::field(j, "ampB"), "ampB"));
}

inline DesignTarget target_from_json(const json& j) {
  DesignTarget t;
  t.n_vortices = detail::integer(j, "N");
  if (j.contains("tolerance")) t.tolerance = detail::number(j, "tolerance");
  const auto& w = detail::field(j, "weights");
  if (!w.is_object()) throw ValidationError("'weights' must be an object keyed by n");
  for (const auto& [key, val] : w.items()) {
    int n = 0;
    try {
      std::size_t pos = 0;
      n = std::stoi(key, &pos);
      if (pos != key.size()) throw std::invalid_argument(key);
    } catch (const std::exception&) {
      throw ValidationError("weight key '" + key + "' is not an integer");
    }
    if (!val.is_number()) throw ValidationError("weight for n = " + key + " must be a number");
    t.weights[n] = val.get<double>();
  }
  t.validate();
  return t;
}

inline json to_json(const WeightVector& w) {
  json o = json::object();
  for (const auto& [n, p] : w.weights) o[std::to_string(n)] = p;
  return o;
}

inline json to_json(const DesignResult& r) {
  return {{"pancake", to_json(r.pancake)},
          {"achieved", to_json(r.achieved)},
          {"mean_oam", r.achieved.mean_oam},
          {"residual", r.residual},
          {"seed", r.trace.seed},
          {"starts", r.trace.starts},
          {"best_start", r.trace.best_start},
          {"iterations", r.trace.iterations},
          {"evaluations", r.trace.evaluations},
          {"converged", r.trace.converged}};
}

inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path + "'");
  out << text;
  if (!out) throw IoError("write failed for '" + path + "'");
}

inline json load_json(const std::string& path) { return detail::parse_json(read_text_file(path)); }

// ---------------------------------------------------------------------------
// OAMF1: "OAMF1\n" + one-line JSON header + "\n" + nx*ny*2 little-endian f64.

namespace detail {

inline std::uint64_t to_little_endian(std::uint64_t v) {
  if constexpr (std::endian::native == std::endian::big) {
    std::uint64_t r = 0;
    for (int i = 0; i < 8; ++i) r |= ((v >> (8 * i)) & 0xFFu) << (8 * (7 - i));
    return r;
  } else {
    return v;
  }
}

}  // namespace detail

inline void write_oamf1(std::ostream& out, const SampledField& f) {
  const auto& g = f.grid();
  const json header = {{"nx", g.nx}, {"ny", g.ny}, {"dx", g.dx}, {"dy", g.dy}, {"ox", g.ox}, {"oy", g.oy}};
  out << "OAMF1\n" << header.dump() << "\n";
  for (const auto& v : f.values()) {
    for (double part : {v.real(), v.imag()}) {
      const std::uint64_t le = detail::to_little_endian(std::bit_cast<std::uint64_t>(part));
      char bytes[8];
      std::memcpy(bytes, &le, 8);
      out.write(bytes, 8);
    }
  }
  if (!out) throw IoError("OAMF1 write failed");
}

inline SampledField read_oamf1(std::istream& in) {
  std::string magic, header_line;
  if (!std::getline(in, magic) || magic != "OAMF1") throw IoError("not an OAMF1 stream (bad magic)");
  if (!std::getline(in, header_line)) throw IoError("OAMF1 header missing");
  json h;
  try {
    h = json::parse(header_line);
  } catch (const json::parse_error& e) {
    throw IoError(std::string("OAMF1 header is not JSON: ") + e.what());
  }
  GridSpec g;
  try {
    g.nx = detail::integer(h, "nx");
    g.ny = detail::integer(h, "ny");
    g.dx = detail::number(h, "dx");
    g.dy = detail::number(h, "dy");
    g.ox = detail::number(h, "ox");
    g.oy = detail::number(h, "oy");
    g.validate();
  } catch (const ValidationError& e) {
    throw IoError(std::string("OAMF1 header invalid: ") + e.what());
  }
  const std::size_t count = static_cast<std::size_t>(g.nx) * static_cast<std::size_t>(g.ny);
  std::vector<cplx> values(count);
  char bytes[16];
  for (std::size_t i = 0; i < count; ++i) {
    if (!in.read(bytes, 16)) throw IoError("OAMF1 payload truncated");
    std::uint64_t re, im;
    std::memcpy(&re, bytes, 8);
    std::memcpy(&im, bytes + 8, 8);
    values[i] = {std::bit_cast<double>(detail::to_little_endian(re)),
                 std::bit_cast<double>(detail::to_little_endian(im))};
  }
  return SampledField(g, std::move(values));
}

inline void save_oamf1(const std::string& path, const SampledField& f) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path + "'");
  write_oamf1(out, f);
}

inline SampledField load_oamf1(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  return read_oamf1(in);
}

// ---------------------------------------------------------------------------
// CSV

/// "n,C_n,P_n" rows ascending in n, then "# mean_oam=<value>".
inline std::string spectrum_csv(const OamSpectrum& s) {
  const auto w = weights_from_cn(s);
  std::string out = "n,C_n,P_n\n";
  for (const auto& [n, c] : s.entries)
    out += std::to_string(n) + "," + format_g17(c) + "," + format_g17(w.at(n)) + "\n";
  out += "# mean_oam=" + format_g17(w.mean_oam) + "\n";
  return out;
}

inline std::string dislocation_csv(const DislocationSet& d) {
  std::string out = "x,y,charge\n";
  for (const auto& v : d.items)
    out += format_g17(v.x) + "," + format_g17(v.y) + "," + std::to_string(v.charge) + "\n";
  return out;
}

inline std::string sideband_csv(const SidebandSpectrum& s) {
  std::string out = "n,delta_omega,weight\n";
  for (const auto& l : s.lines)
    out += std::to_string(l.n) + "," + format_g17(l.delta_omega) + "," + format_g17(l.weight) + "\n";
  return out;
}

inline std::string time_series_csv(const TimeSeries& ts) {
  std::string out = "t,intensity\n";
  for (std::size_t i = 0; i < ts.t.size(); ++i)
    out += format_g17(ts.t[i]) + "," + format_g17(ts.intensity[i]) + "\n";
  return out;
}

inline std::string scan_csv(const ScanTable& t) {
  std::string out = t.parameter == ScanParameter::rho ? "rho" : "phi";
  const std::size_t cols = t.weights.empty() ? 0 : t.weights.front().size();
  for (std::size_t n = 0; n < cols; ++n) out += ",P_" + std::to_string(n);
  out += "\n";
  for (std::size_t s = 0; s < t.values.size(); ++s) {
    out += format_g17(t.values[s]);
    for (double p : t.weights[s]) out += "," + format_g17(p);
    out += "\n";
  }
  return out;
}

enum class RenderQuantity { amplitude, phase };

/// ny rows of nx comma-separated values, first row = lowest y.
inline std::string matrix_csv(const SampledField& f, RenderQuantity q) {
  std::string out;
  for (int iy = 0; iy < f.ny(); ++iy) {
    for (int ix = 0; ix < f.nx(); ++ix) {
      const cplx v = f.at(ix, iy);
      if (ix > 0) out += ",";
      out += format_g17(q == RenderQuantity::amplitude ? std::abs(v) : normalize_angle(std::arg(v)));
    }
    out += "\n";
  }
  return out;
}

}  // namespace oamkit
