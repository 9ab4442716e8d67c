// oamkit: OAM spectra, vortex-pancake design, propagation and sideband
// readout from the command line.
//
// Exit codes: 0 success, 2 validation failure, 3 numerical cross-check
// failure, 4 I/O error.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <oamkit/oamkit.hpp>

namespace fs = std::filesystem;
using namespace oamkit;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 2;
constexpr int kExitCrossCheck = 3;
constexpr int kExitIo = 4;

constexpr double kCrossCheckTolerance = 1e-4;
constexpr double kDriftTolerance = 1e-3;
constexpr double kRoundTripTolerance = 1e-3;

std::vector<double> parse_list(const std::string& s, std::size_t expected, const char* flag) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t pos = 0;
      out.push_back(std::stod(item, &pos));
      if (pos != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ValidationError(std::string(flag) + ": '" + item + "' is not a number");
    }
  }
  if (out.size() != expected)
    throw ValidationError(std::string(flag) + " expects " + std::to_string(expected) +
                          " comma-separated values");
  return out;
}

std::optional<GridSpec> parse_grid(const std::string& s) {
  if (s.empty()) return std::nullopt;
  const auto v = parse_list(s, 3, "--grid");
  const int nx = static_cast<int>(v[0]), ny = static_cast<int>(v[1]);
  if (nx != v[0] || ny != v[1]) throw ValidationError("--grid sizes must be integers");
  detail::require(nx >= 2 && ny >= 2 && v[2] > 0.0, "--grid needs NX,NY >= 2 and EXTENT > 0");
  const double d = v[2] / nx;  // square cells, EXTENT spans x
  return GridSpec{nx, ny, d, d, 0.0, 0.0};
}

std::optional<Point> parse_origin(const std::string& s) {
  if (s.empty()) return std::nullopt;
  const auto v = parse_list(s, 2, "--origin");
  return Point{v[0], v[1]};
}

std::string describe(const GridSpec& g) {
  return std::to_string(g.nx) + "," + std::to_string(g.ny) + "," + format_g17(g.nx * g.dx);
}

// Run parameters appended after the data so the artifact describes itself.
std::string run_footer(const std::vector<std::pair<std::string, std::string>>& kv) {
  std::string out;
  for (const auto& [k, v] : kv) out += "# " + k + "=" + v + "\n";
  return out;
}

void emit(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
  } else {
    write_text_file(path, text);
  }
}

fs::path ensure_dir(const std::string& path) {
  detail::require(!path.empty(), "--out DIR is required for this command");
  std::error_code ec;
  fs::create_directories(path, ec);
  if (ec) throw IoError("cannot create output directory '" + path + "': " + ec.message());
  return fs::path(path);
}

double max_weight_gap(const WeightVector& a, const WeightVector& b) {
  const int lo = std::min(a.min_n(), b.min_n()), hi = std::max(a.max_n(), b.max_n());
  double e = 0.0;
  for (int n = lo; n <= hi; ++n) e = std::max(e, std::abs(a.at(n) - b.at(n)));
  return e;
}

// Largest relative weight change over modes carrying more than 1e-6.
double max_relative_drift(const WeightVector& before, const WeightVector& after) {
  double e = 0.0;
  for (const auto& [n, p] : before.weights)
    if (p > 1e-6) e = std::max(e, std::abs(after.at(n) - p) / p);
  return e;
}

// ---------------------------------------------------------------------------

struct AnalyzeArgs {
  std::string pancake, field, necklace, origin, grid, out;
  int nmax = 0;
};

int cmd_analyze(const AnalyzeArgs& a) {
  detail::require(!a.pancake.empty() || !a.field.empty() || !a.necklace.empty(),
                  "analyze needs --pancake, --field or --necklace");
  const auto origin = parse_origin(a.origin);
  const auto grid = parse_grid(a.grid);
  std::vector<std::pair<std::string, std::string>> run;

  if (!a.pancake.empty()) {
    const auto p = pancake_from_json(load_json(a.pancake));
    const int nmax = a.nmax > 0 ? a.nmax : static_cast<int>(p.size()) + 5;
    const auto analytic = pancake_cn(p);
    SampledField f;
    if (!a.field.empty()) {
      f = load_oamf1(a.field);
      run.emplace_back("field", a.field);
    } else {
      const GridSpec g = grid.value_or(default_grid(p));
      f = rasterize(p, g);
      run.emplace_back("grid", describe(g));
    }
    const Point o = origin.value_or(grid_center(f));
    const auto numeric = spectrum_from_field(f, o, nmax);
    const double gap = max_weight_gap(weights_from_cn(analytic), weights_from_cn(numeric));
    run.emplace_back("nmax", std::to_string(nmax));
    run.emplace_back("origin", format_g17(o.x) + "," + format_g17(o.y));
    run.emplace_back("cross_check_max_abs_dP", format_g17(gap));
    emit(a.out, spectrum_csv(analytic) + run_footer(run));
    if (gap > kCrossCheckTolerance) {
      std::cerr << "analyze: analytic/numeric weights disagree by " << gap << "\n";
      return kExitCrossCheck;
    }
    return kExitOk;
  }

  SampledField f;
  if (!a.field.empty()) {
    f = load_oamf1(a.field);
    run.emplace_back("field", a.field);
  } else {
    const auto n = necklace_from_json(load_json(a.necklace));
    const GridSpec g = grid.value_or(default_grid(n));
    f = rasterize(n, g);
    run.emplace_back("grid", describe(g));
  }
  const int nmax = a.nmax > 0 ? a.nmax : kDefaultNMax;
  const Point o = origin.value_or(grid_center(f));
  const auto table = azimuthal_decompose(f, o, nmax);
  const auto s = spectrum_from_table(table);
  run.emplace_back("nmax", std::to_string(nmax));
  run.emplace_back("origin", format_g17(o.x) + "," + format_g17(o.y));
  run.emplace_back("radius", format_g17(table.radius));
  if (table.truncated) run.emplace_back("truncated", "1");
  emit(a.out, spectrum_csv(s) + run_footer(run));
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct NecklaceArgs {
  std::string necklace, grid, out;
  int nmax = kDefaultNMax;
  bool suite = false;
};

struct NecklaceReport {
  std::size_t dislocations = 0;
  int net_charge = 0;
  double even_weight = 0.0;
  double p1 = 0.0;
};

NecklaceReport analyze_necklace(const NecklaceSpec& n, const std::optional<GridSpec>& grid, int nmax,
                                const fs::path& dir, const std::string& prefix) {
  const GridSpec g = grid.value_or(default_grid(n));
  const auto f = rasterize(n, g);
  const auto s = spectrum_from_field(f, grid_center(f), nmax);
  const auto w = weights_from_cn(s);
  const auto d = locate_dislocations(f);

  double enclose = 0.0;
  for (const auto& v : d.items) enclose = std::max(enclose, std::hypot(v.x - g.ox, v.y - g.oy));
  const double radius = enclose + 0.5 * n.w0;

  NecklaceReport r;
  r.dislocations = d.items.size();
  r.net_charge = net_topological_charge(f, radius);
  for (const auto& [k, p] : w.weights)
    if (k % 2 == 0) r.even_weight = std::max(r.even_weight, p);
  r.p1 = w.at(1);

  const auto footer = run_footer({{"grid", describe(g)},
                                  {"nmax", std::to_string(nmax)},
                                  {"d", format_g17(n.d)},
                                  {"net_charge", std::to_string(r.net_charge)},
                                  {"charge_radius", format_g17(radius)}});
  write_text_file((dir / (prefix + "spectrum.csv")).string(), spectrum_csv(s) + footer);
  write_text_file((dir / (prefix + "dislocations.csv")).string(), dislocation_csv(d));
  return r;
}

int cmd_necklace(const NecklaceArgs& a) {
  detail::require(!a.necklace.empty(), "necklace needs --necklace FILE");
  const auto spec = necklace_from_json(load_json(a.necklace));
  const auto grid = parse_grid(a.grid);
  const auto dir = ensure_dir(a.out);
  std::vector<std::pair<std::string, NecklaceSpec>> runs;
  if (a.suite) {
    for (double k : {0.0, 1.0, 2.0, 6.0})
      runs.emplace_back("d" + std::to_string(static_cast<int>(k)) + "w0_",
                        NecklaceSpec(spec.m, spec.w0, k * spec.w0, spec.amp_a, spec.amp_b));
  } else {
    runs.emplace_back("", spec);
  }
  std::cout << "d,dislocations,net_charge,max_even_weight,P_1\n";
  for (const auto& [prefix, n] : runs) {
    const auto r = analyze_necklace(n, grid, a.nmax, dir, prefix);
    std::cout << format_g17(n.d) << "," << r.dislocations << "," << r.net_charge << ","
              << format_g17(r.even_weight) << "," << format_g17(r.p1) << "\n";
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct DesignArgs {
  std::string target, out;
  int starts = kDefaultStarts;
  int max_iter = kDefaultMaxEvaluations;
  std::uint64_t seed = 0;
};

int cmd_design(const DesignArgs& a) {
  detail::require(!a.target.empty(), "design needs --target FILE");
  const auto t = target_from_json(load_json(a.target));
  const auto r = design_general(t, a.starts, a.seed, a.max_iter);
  json doc = to_json(r);
  doc["tolerance"] = t.tolerance;
  doc["run"] = {{"starts", a.starts}, {"seed", a.seed}, {"max_iter", a.max_iter}};
  emit(a.out, doc.dump(2) + "\n");
  if (!r.trace.converged) {
    std::cerr << "design: residual " << r.residual << " exceeds tolerance " << t.tolerance << "\n";
    return kExitCrossCheck;
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct RenderArgs {
  std::string pancake, necklace, grid, out, what = "amplitude";
};

int cmd_render(const RenderArgs& a) {
  detail::require(a.pancake.empty() != a.necklace.empty(), "render needs one of --pancake, --necklace");
  RenderQuantity q;
  if (a.what == "amplitude")
    q = RenderQuantity::amplitude;
  else if (a.what == "phase")
    q = RenderQuantity::phase;
  else
    throw ValidationError("--what must be amplitude or phase");
  const FieldSource src = a.pancake.empty() ? FieldSource(necklace_from_json(load_json(a.necklace)))
                                            : FieldSource(pancake_from_json(load_json(a.pancake)));
  const GridSpec g = parse_grid(a.grid).value_or(default_grid(src));
  const auto f = rasterize(src, g);
  const auto dir = ensure_dir(a.out);
  write_text_file((dir / (a.what + ".csv")).string(), matrix_csv(f, q));
  save_oamf1((dir / "field.oamf").string(), f);
  std::cout << "grid=" << describe(g) << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct ScanArgs {
  std::string pancake, param = "phi", range, out;
  int index = 0;
  int steps = 361;
};

int cmd_scan(const ScanArgs& a) {
  detail::require(!a.pancake.empty(), "scan needs --pancake FILE");
  const auto p = pancake_from_json(load_json(a.pancake));
  const auto param = parse_scan_parameter(a.param);
  double lo = 0.0, hi = param == ScanParameter::phi ? kTwoPi : 4.0 * p.w0();
  if (!a.range.empty()) {
    const auto v = parse_list(a.range, 2, "--range");
    lo = v[0];
    hi = v[1];
  }
  detail::require(a.index >= 0, "--index must be >= 0");
  const auto t = scan_parameter(p, static_cast<std::size_t>(a.index), param, lo, hi, a.steps);
  emit(a.out, scan_csv(t) + run_footer({{"index", std::to_string(a.index)},
                                        {"param", a.param},
                                        {"range", format_g17(lo) + "," + format_g17(hi)},
                                        {"steps", std::to_string(a.steps)}}));
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct PropagateArgs {
  std::string pancake, field, grid, out;
  double z = 0.0;
  double wavelength = 0.0;
  int nmax = 0;
};

int cmd_propagate(const PropagateArgs& a) {
  detail::require(a.pancake.empty() != a.field.empty(), "propagate needs one of --pancake, --field");
  const PropagationSpec spec(a.wavelength, a.z);
  const auto dir = ensure_dir(a.out);
  std::optional<VortexPancake> pancake;
  SampledField f;
  if (!a.pancake.empty()) {
    pancake = pancake_from_json(load_json(a.pancake));
    f = rasterize(*pancake, parse_grid(a.grid).value_or(default_grid(*pancake)));
  } else {
    f = load_oamf1(a.field);
  }
  const int nmax = a.nmax > 0 ? a.nmax : (pancake ? static_cast<int>(pancake->size()) + 5 : kDefaultNMax);
  const auto out = fresnel_propagate(f, spec);
  const auto before = spectrum_from_field(f, grid_center(f), nmax);
  const auto after = spectrum_from_field(out, grid_center(out), nmax);
  const double drift = max_relative_drift(weights_from_cn(before), weights_from_cn(after));
  std::vector<std::pair<std::string, std::string>> run = {
      {"grid", describe(f.grid())},       {"z", format_g17(a.z)},
      {"wavelength", format_g17(a.wavelength)}, {"nmax", std::to_string(nmax)},
      {"max_relative_drift", format_g17(drift)},
      {"power_ratio", format_g17(out.power() / f.power())}};
  if (pancake) {
    const auto analytic = propagate_pancake_analytic(*pancake, spec, f.grid());
    save_oamf1((dir / "analytic.oamf").string(), analytic);
    run.emplace_back("rayleigh_range", format_g17(rayleigh_range(pancake->w0(), a.wavelength)));
  }
  save_oamf1((dir / "field.oamf").string(), out);
  write_text_file((dir / "spectrum_before.csv").string(), spectrum_csv(before) + run_footer(run));
  write_text_file((dir / "spectrum_after.csv").string(), spectrum_csv(after) + run_footer(run));
  std::cout << "max_relative_drift=" << format_g17(drift) << "\n";
  if (drift > kDriftTolerance) {
    std::cerr << "propagate: weight drift " << drift << " exceeds " << kDriftTolerance << "\n";
    return kExitCrossCheck;
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct SidebandArgs {
  std::string pancake, weights, out;
  double omega = 1.0;
  int periods = 64;
  double rate = 0.0;
  bool signal = false;
};

WeightVector parse_weights(const std::string& s) {
  OamSpectrum spec;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto colon = item.find(':');
    if (colon == std::string::npos) throw ValidationError("--weights items must be n:P");
    try {
      spec.entries[std::stoi(item.substr(0, colon))] = std::stod(item.substr(colon + 1));
    } catch (const std::exception&) {
      throw ValidationError("--weights item '" + item + "' is malformed");
    }
  }
  return weights_from_cn(spec);
}

int cmd_sidebands(const SidebandArgs& a) {
  detail::require(a.pancake.empty() != a.weights.empty(), "sidebands needs one of --pancake, --weights");
  const WeightVector w = a.pancake.empty() ? parse_weights(a.weights)
                                           : pancake_weights(pancake_from_json(load_json(a.pancake)));
  const auto s = sidebands_from_weights(w, a.omega);
  if (!a.signal) {
    emit(a.out, sideband_csv(s));
    return kExitOk;
  }
  detail::require(a.periods >= 1, "--periods must be >= 1");
  const auto dir = ensure_dir(a.out);
  const int top = std::max(1, s.max_abs_n());
  const double rate = a.rate > 0.0 ? a.rate : 16.0 * a.omega * top / kPi;
  const double duration = a.periods * kPi / a.omega;
  const auto ts = synthesize_beat_signal(s, duration, rate);
  const auto rec = recover_weights(ts, a.omega, top);
  write_text_file((dir / "sidebands.csv").string(), sideband_csv(s));
  write_text_file((dir / "signal.csv").string(), time_series_csv(ts));
  std::string rows = "n,P_n\n";
  for (const auto& [n, p] : rec.weights.weights) rows += std::to_string(n) + "," + format_g17(p) + "\n";
  const double gap = max_weight_gap(w, rec.weights);
  write_text_file((dir / "recovered.csv").string(),
                  rows + run_footer({{"omega", format_g17(a.omega)},
                                     {"periods", std::to_string(a.periods)},
                                     {"sample_rate", format_g17(rate)},
                                     {"max_abs_error", format_g17(gap)},
                                     {"unexplained_fraction", format_g17(rec.unexplained_fraction)}}));
  std::cout << "max_abs_error=" << format_g17(gap) << "\n";
  if (gap > kRoundTripTolerance || rec.model_mismatch) return kExitCrossCheck;
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"oamkit: orbital-angular-momentum spectra and vortex-pancake design"};
  app.require_subcommand(1);

  AnalyzeArgs an;
  auto* analyze = app.add_subcommand("analyze", "OAM spectrum of a pancake, necklace or field file");
  analyze->add_option("--pancake", an.pancake, "pancake JSON");
  analyze->add_option("--field", an.field, "OAMF1 field file");
  analyze->add_option("--necklace", an.necklace, "necklace JSON");
  analyze->add_option("--origin", an.origin, "X,Y decomposition origin");
  analyze->add_option("--nmax", an.nmax, "largest |n| (default N+5 for pancakes, 32 otherwise)");
  analyze->add_option("--grid", an.grid, "NX,NY,EXTENT raster grid");
  analyze->add_option("--out", an.out, "spectrum CSV (default stdout)");

  NecklaceArgs nk;
  auto* necklace = app.add_subcommand("necklace", "two-pearl necklace spectrum and dislocations");
  necklace->add_option("--necklace", nk.necklace, "necklace JSON");
  necklace->add_option("--grid", nk.grid, "NX,NY,EXTENT raster grid");
  necklace->add_option("--nmax", nk.nmax, "largest |n|");
  necklace->add_option("--out", nk.out, "output directory");
  necklace->add_flag("--suite", nk.suite, "run d = 0, w0, 2 w0, 6 w0");

  DesignArgs de;
  auto* design = app.add_subcommand("design", "inverse design of a pancake for target weights");
  design->add_option("--target", de.target, "target JSON");
  design->add_option("--starts", de.starts, "multistart count");
  design->add_option("--seed", de.seed, "RNG seed");
  design->add_option("--max-iter", de.max_iter, "objective evaluations per start");
  design->add_option("--out", de.out, "result JSON (default stdout)");

  RenderArgs re;
  auto* render = app.add_subcommand("render", "amplitude or phase map plus OAMF1 field");
  render->add_option("--pancake", re.pancake, "pancake JSON");
  render->add_option("--necklace", re.necklace, "necklace JSON");
  render->add_option("--what", re.what, "amplitude|phase");
  render->add_option("--grid", re.grid, "NX,NY,EXTENT raster grid");
  render->add_option("--out", re.out, "output directory");

  ScanArgs sc;
  auto* scan = app.add_subcommand("scan", "weights versus one vortex coordinate");
  scan->add_option("--pancake", sc.pancake, "pancake JSON");
  scan->add_option("--index", sc.index, "vortex index (0-based)");
  scan->add_option("--param", sc.param, "rho|phi");
  scan->add_option("--range", sc.range, "LO,HI");
  scan->add_option("--steps", sc.steps, "number of samples");
  scan->add_option("--out", sc.out, "scan CSV (default stdout)");

  PropagateArgs pr;
  auto* propagate = app.add_subcommand("propagate", "free-space propagation and spectral drift check");
  propagate->add_option("--pancake", pr.pancake, "pancake JSON");
  propagate->add_option("--field", pr.field, "OAMF1 field file");
  propagate->add_option("--z", pr.z, "propagation distance")->required();
  propagate->add_option("--wavelength", pr.wavelength, "wavelength")->required();
  propagate->add_option("--grid", pr.grid, "NX,NY,EXTENT raster grid");
  propagate->add_option("--nmax", pr.nmax, "largest |n|");
  propagate->add_option("--out", pr.out, "output directory");

  SidebandArgs sb;
  auto* sidebands = app.add_subcommand("sidebands", "rotating-prism sideband spectrum");
  sidebands->add_option("--pancake", sb.pancake, "pancake JSON");
  sidebands->add_option("--weights", sb.weights, "n:P list, e.g. 1:0.5,2:0.5");
  sidebands->add_option("--omega", sb.omega, "prism angular velocity");
  sidebands->add_flag("--signal", sb.signal, "also synthesize the beat signal and recover weights");
  sidebands->add_option("--periods", sb.periods, "beat periods of 2 Omega in the signal");
  sidebands->add_option("--rate", sb.rate, "sample rate (default 16 Omega n_max / pi)");
  sidebands->add_option("--out", sb.out, "CSV, or directory with --signal");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitValidation;
  }

  try {
    if (*analyze) return cmd_analyze(an);
    if (*necklace) return cmd_necklace(nk);
    if (*design) return cmd_design(de);
    if (*render) return cmd_render(re);
    if (*scan) return cmd_scan(sc);
    if (*propagate) return cmd_propagate(pr);
    if (*sidebands) return cmd_sidebands(sb);
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const NumericalError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitCrossCheck;
  }
  return kExitValidation;
}
