#include "npfaber/cli.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "npfaber/bie_nystrom.hpp"
#include "npfaber/conformal_map.hpp"
#include "npfaber/faber_grunsky.hpp"
#include "npfaber/io.hpp"
#include "npfaber/np_operator.hpp"
#include "npfaber/transmission.hpp"

namespace npfaber::cli {

namespace {

using nlohmann::json;
using C = std::complex<double>;

struct GridSpec {
  double x0 = 0, x1 = 0, y0 = 0, y1 = 0;
  int nx = 0, ny = 0;
};

struct RunConfig {
  std::string map_path;
  std::string curve_path;
  std::optional<int> order;
  std::vector<int> sections;
  int coeffs = 50;
  std::optional<int> points;
  std::optional<double> eps_c;
  std::optional<double> eps_m;
  std::string field = "x";
  std::string part = "real";
  std::string grid;
  std::string out;
  std::string diagnostics;
  std::string report;
};

/// Invalid combinations of otherwise well-formed options.
class ConfigError : public Error {
 public:
  using Error::Error;
};

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(s);
  while (std::getline(in, cell, sep)) out.push_back(cell);
  return out;
}

double to_double(const std::string& s, const std::string& what) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used == s.size() && std::isfinite(v)) return v;
  } catch (const std::exception&) {
  }
  throw ConfigError("invalid number in " + what + ": '" + s + "'");
}

int to_int(const std::string& s, const std::string& what) {
  try {
    std::size_t used = 0;
    const int v = std::stoi(s, &used);
    if (used == s.size()) return v;
  } catch (const std::exception&) {
  }
  throw ConfigError("invalid integer in " + what + ": '" + s + "'");
}

BackgroundFieldd parse_field(const std::string& spec, const std::string& part) {
  if (part != "real" && part != "imag") throw ConfigError("--part must be real or imag");
  if (spec == "x") return BackgroundFieldd::x();
  if (spec == "y") return BackgroundFieldd::y();
  const std::string prefix = "poly:";
  if (spec.rfind(prefix, 0) != 0) throw ConfigError("--field must be x, y or poly:re,im;re,im;...");
  BackgroundFieldd f;
  f.part = part == "real" ? BackgroundFieldd::Part::real : BackgroundFieldd::Part::imaginary;
  for (const auto& term : split(spec.substr(prefix.size()), ';')) {
    const auto ri = split(term, ',');
    if (ri.size() != 2) throw ConfigError("--field poly terms must be re,im pairs");
    f.poly.emplace_back(to_double(ri[0], "--field"), to_double(ri[1], "--field"));
  }
  if (f.degree() < 1) throw ConfigError("--field polynomial must have degree >= 1");
  return f;
}

GridSpec parse_grid(const std::string& spec) {
  const auto cells = split(spec, ',');
  if (cells.size() != 6) throw ConfigError("--grid expects x0,x1,y0,y1,nx,ny");
  GridSpec g{to_double(cells[0], "--grid"), to_double(cells[1], "--grid"), to_double(cells[2], "--grid"),
             to_double(cells[3], "--grid"), to_int(cells[4], "--grid"), to_int(cells[5], "--grid")};
  if (g.nx < 1 || g.ny < 1) throw ConfigError("--grid counts must be positive");
  if ((g.nx > 1 && !(g.x1 > g.x0)) || (g.ny > 1 && !(g.y1 > g.y0))) {
    throw ConfigError("--grid ranges must be increasing");
  }
  return g;
}

GridSpec default_grid(const LaurentMapd& map) {
  double x0 = 1e300, x1 = -1e300, y0 = 1e300, y1 = -1e300;
  for (const auto& s : sample_boundary(map, 256)) {
    x0 = std::min(x0, s.z.real());
    x1 = std::max(x1, s.z.real());
    y0 = std::min(y0, s.z.imag());
    y1 = std::max(y1, s.z.imag());
  }
  const double cx = (x0 + x1) / 2, cy = (y0 + y1) / 2;
  const double hx = 0.75 * (x1 - x0), hy = 0.75 * (y1 - y0);
  return {cx - hx, cx + hx, cy - hy, cy + hy, 101, 101};
}

json complex_json(C z) { return json::array({z.real(), z.imag()}); }

void emit(const RunConfig& cfg, const std::string& content, std::ostream& out) {
  if (cfg.out.empty()) {
    out << content;
  } else {
    io::write_text_atomic(cfg.out, content);
  }
}

std::string sibling_path(const std::string& explicit_path, const std::string& out, const std::string& suffix) {
  if (!explicit_path.empty()) return explicit_path;
  return out.empty() ? std::string() : out + suffix;
}

struct FittedMap {
  LaurentMapd map;
  json report;
};

FittedMap fit_from_curve(const std::string& path, int coeffs, std::ostream& err) {
  const auto samples = io::read_curve(path);
  const auto curve = build_curve<double>(std::span<const C>(samples));
  if (curve.reversed) err << "warning: curve was clockwise; samples were reversed\n";
  double residual = 0;
  const auto map = fit_conformal_map(curve, coeffs, &residual);
  json report;
  report["gamma"] = map.gamma();
  report["a0"] = complex_json(map.a0());
  report["bie_residual"] = residual;
  report["boundary_mismatch"] = boundary_mismatch<double>(map, curve.z);
  report["reversed"] = curve.reversed;
  json mags = json::array();
  json scaled = json::array();
  for (int k = 1; k <= map.order(); ++k) {
    mags.push_back(std::abs(map.coeff(k)));
    scaled.push_back(std::abs(map.coeff(k)) / std::pow(map.gamma(), k + 1));
  }
  report["coeff_magnitudes"] = mags;
  report["normalized_magnitudes"] = scaled;
  return {map, report};
}

int cmd_grunsky(const RunConfig& cfg, std::ostream& out) {
  const auto map = io::read_map(cfg.map_path);
  const int N = cfg.order.value_or(20);
  if (N < 1) throw ConfigError("--order must be positive");
  const auto table = grunsky_table(map, N);
  const auto rep = grunsky_report(table);
  json j;
  j["order"] = N;
  j["gamma"] = map.gamma();
  json c = json::array();
  json mu = json::array();
  for (int m = 1; m <= N; ++m) {
    json crow = json::array();
    json murow = json::array();
    for (int k = 1; k <= N; ++k) {
      crow.push_back(complex_json(table.c(m, k)));
      murow.push_back(complex_json(table.mu(m, k)));
    }
    c.push_back(crow);
    mu.push_back(murow);
  }
  j["c"] = c;
  j["mu"] = mu;
  j["report"] = {{"identity_residual", rep.identity_residual},
                 {"mu_symmetry_residual", rep.mu_symmetry_residual},
                 {"max_row_norm_squared", rep.max_row_norm_squared},
                 {"row_bound_holds", rep.row_bound_holds}};
  emit(cfg, j.dump(2) + "\n", out);
  return kOk;
}

int cmd_spectrum(const RunConfig& cfg, std::ostream& out) {
  const auto map = io::read_map(cfg.map_path);
  if (cfg.sections.empty()) throw ConfigError("--section is required");
  for (int n : cfg.sections) {
    if (n < 1) throw ConfigError("--section values must be positive");
  }
  const int nmax = *std::max_element(cfg.sections.begin(), cfg.sections.end());
  const int N = cfg.order.value_or(nmax);
  if (nmax > N) throw ConfigError("--section exceeds --order");
  const auto table = grunsky_table(map, N);

  std::ostringstream csv;
  if (cfg.sections.size() == 1) {
    const auto ev = spectrum(assemble_section(table, nmax));
    csv << "index,eigenvalue\n";
    for (std::size_t i = 0; i < ev.size(); ++i) csv << i + 1 << ',' << io::format_number(ev[i]) << '\n';
  } else {
    std::vector<std::vector<double>> cols;
    for (int n : cfg.sections) cols.push_back(positive_eigenvalues(spectrum(assemble_section(table, n))));
    csv << "index";
    for (int n : cfg.sections) csv << ",n=" << n;
    csv << '\n';
    std::size_t rows = 0;
    for (const auto& c : cols) rows = std::max(rows, c.size());
    for (std::size_t i = 0; i < rows; ++i) {
      csv << i + 1;
      for (const auto& c : cols) {
        csv << ',';
        if (i < c.size()) csv << io::format_number(c[i]);
      }
      csv << '\n';
    }
  }
  emit(cfg, csv.str(), out);
  return kOk;
}

int cmd_transmit(const RunConfig& cfg, std::ostream& err) {
  if (cfg.out.empty()) throw ConfigError("transmit requires --out");
  if (!cfg.eps_c || !cfg.eps_m) throw ConfigError("transmit requires --eps-c and --eps-m");
  if (cfg.map_path.empty() == cfg.curve_path.empty()) throw ConfigError("give exactly one of --map or --curve");
  const auto field = parse_field(cfg.field, cfg.part);
  // Check the contrast before any expensive work.
  contrast_parameter(*cfg.eps_c, *cfg.eps_m);
  const int n = cfg.sections.empty() ? 120 : cfg.sections.front();
  if (cfg.sections.size() > 1) throw ConfigError("transmit takes a single --section");
  if (n < 1) throw ConfigError("--section must be positive");
  const int N = cfg.order.value_or(std::max(2 * std::max(field.degree(), 50), 2 * n));
  if (n > N) throw ConfigError("--section exceeds --order");
  const int samples = cfg.points.value_or(256);
  if (samples < 4) throw ConfigError("--points must be at least 4");

  std::optional<FittedMap> fitted;
  if (!cfg.curve_path.empty()) fitted = fit_from_curve(cfg.curve_path, cfg.coeffs, err);
  const LaurentMapd map = fitted ? fitted->map : io::read_map(cfg.map_path);
  const GridSpec grid = cfg.grid.empty() ? default_grid(map) : parse_grid(cfg.grid);

  const auto table = grunsky_table(map, N);
  const auto sol = solve_transmission(map, table, field, *cfg.eps_c, *cfg.eps_m, n);
  const auto diag = diagnose(sol, samples);

  // Points within 1e-10 of the curve use the interior branch, which is exact
  // up to the boundary.
  const Locator<double> locator(map);
  const double tol = 1e-10 * std::max(1.0, map.gamma());
  std::vector<C> pts;
  std::vector<Side> sides;
  for (int j = 0; j < grid.ny; ++j) {
    const double y = grid.ny == 1 ? grid.y0 : grid.y0 + (grid.y1 - grid.y0) * j / (grid.ny - 1);
    for (int i = 0; i < grid.nx; ++i) {
      const double x = grid.nx == 1 ? grid.x0 : grid.x0 + (grid.x1 - grid.x0) * i / (grid.nx - 1);
      const C z(x, y);
      pts.push_back(z);
      sides.push_back(locator.sample_distance(z) <= tol ? Side::interior : locator.side(z));
    }
  }
  std::vector<C> inner, outer;
  for (std::size_t i = 0; i < pts.size(); ++i) (sides[i] == Side::interior ? inner : outer).push_back(pts[i]);
  const auto u_in = eval_field(sol, std::span<const C>(inner), Side::interior);
  const auto u_out = eval_field(sol, std::span<const C>(outer), Side::exterior);

  std::ostringstream csv;
  csv << "x,y,u,region\n";
  std::size_t a = 0, b = 0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const bool in = sides[i] == Side::interior;
    csv << io::format_number(pts[i].real()) << ',' << io::format_number(pts[i].imag()) << ','
        << io::format_number(in ? u_in[a++] : u_out[b++]) << ',' << (in ? "interior" : "exterior") << '\n';
  }

  json d;
  d["lambda"] = sol.lambda;
  d["eps_c"] = sol.eps_c;
  d["eps_m"] = sol.eps_m;
  d["section"] = n;
  d["order"] = N;
  d["condition"] = diag.condition;
  d["asymmetry"] = diag.asymmetry;
  d["truncation_warning"] = diag.truncation_warning;
  d["continuity_residual"] = diag.continuity_residual;
  d["flux_residual"] = diag.flux_residual;
  d["decay_ratios"] = {diag.decay_ratios[0], diag.decay_ratios[1]};
  d["decay_ok"] = diag.decay_ok;
  d["grid"] = {grid.x0, grid.x1, grid.y0, grid.y1, grid.nx, grid.ny};
  json idx = json::array();
  json vals = json::array();
  for (int m = -n; m <= n; ++m) {
    if (m == 0) continue;
    idx.push_back(m);
    vals.push_back(complex_json(sol.phi[m]));
  }
  d["phi"] = {{"basis", "zeta"}, {"indices", idx}, {"values", vals}};
  if (fitted) d["fit"] = fitted->report;
  if (diag.truncation_warning) err << "warning: series truncation not resolved at this order\n";

  io::write_text_atomic(sibling_path(cfg.diagnostics, cfg.out, ".diagnostics.json"), d.dump(2) + "\n");
  io::write_text_atomic(cfg.out, csv.str());
  return kOk;
}

int cmd_conformal_fit(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  if (cfg.coeffs < 0) throw ConfigError("--coeffs must be non-negative");
  const auto fitted = fit_from_curve(cfg.curve_path, cfg.coeffs, err);
  const std::string map_text = io::map_to_json(fitted.map);
  const std::string report_text = fitted.report.dump(2) + "\n";
  const std::string report_path = sibling_path(cfg.report, cfg.out, ".report.json");
  if (!report_path.empty()) {
    io::write_text_atomic(report_path, report_text);
  } else {
    err << report_text;
  }
  emit(cfg, map_text, out);
  return kOk;
}

int cmd_map_eval(const RunConfig& cfg, std::ostream& out) {
  const auto map = io::read_map(cfg.map_path);
  const auto samples = sample_boundary(map, cfg.points.value_or(256));
  std::ostringstream csv;
  csv << "t,x,y,h,nx,ny\n";
  for (const auto& s : samples) {
    csv << io::format_number(s.theta) << ',' << io::format_number(s.z.real()) << ',' << io::format_number(s.z.imag())
        << ',' << io::format_number(s.h) << ',' << io::format_number(s.normal.real()) << ','
        << io::format_number(s.normal.imag()) << '\n';
  }
  emit(cfg, csv.str(), out);
  return kOk;
}

int exit_code_for(const Error& e) {
  if (dynamic_cast<const SingularError*>(&e) != nullptr) return kResonance;
  if (dynamic_cast<const CuspError*>(&e) != nullptr) return kCusp;
  if (dynamic_cast<const ConvergenceError*>(&e) != nullptr || dynamic_cast<const EigensolverError*>(&e) != nullptr) {
    return kFailure;
  }
  return kInvalid;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Series solver for the conductivity transmission problem and NP spectra", "npfaber"};
  app.require_subcommand(1);
  RunConfig cfg;

  auto* grunsky = app.add_subcommand("grunsky", "Grunsky coefficient and mu tables as JSON");
  grunsky->add_option("--map", cfg.map_path, "Map JSON")->required();
  grunsky->add_option("--order", cfg.order, "Table order N (default 20)");
  grunsky->add_option("--out", cfg.out, "Output file (default stdout)");

  auto* spec = app.add_subcommand("spectrum", "Eigenvalues of the finite section as CSV");
  spec->add_option("--map", cfg.map_path, "Map JSON")->required();
  spec->add_option("--section", cfg.sections, "Section size n; several values give one column each")
      ->required()
      ->delimiter(',');
  spec->add_option("--order", cfg.order, "Grunsky table order N (default max n)");
  spec->add_option("--out", cfg.out, "Output file (default stdout)");

  auto* transmit = app.add_subcommand("transmit", "Solve the transmission problem on a grid");
  transmit->add_option("--map", cfg.map_path, "Map JSON");
  transmit->add_option("--curve", cfg.curve_path, "Curve CSV, fitted first");
  transmit->add_option("--coeffs", cfg.coeffs, "Fit order M when --curve is used (default 50)");
  transmit->add_option("--order", cfg.order, "Grunsky table order N (default max(2 max(deg, 50), 2n))");
  transmit->add_option("--section", cfg.sections, "Section size n (default 120)");
  transmit->add_option("--eps-c", cfg.eps_c, "Inclusion permittivity")->required();
  transmit->add_option("--eps-m", cfg.eps_m, "Background permittivity")->required();
  transmit->add_option("--field", cfg.field, "x, y, or poly:re,im;re,im;... (coefficients of z^0, z^1, ...)");
  transmit->add_option("--part", cfg.part, "real or imag part of a poly field (default real)");
  transmit->add_option("--grid", cfg.grid, "x0,x1,y0,y1,nx,ny (default: boundary box enlarged 50%, 101x101)");
  transmit->add_option("--points", cfg.points, "Boundary samples for the diagnostics (default 256)");
  transmit->add_option("--out", cfg.out, "Grid CSV")->required();
  transmit->add_option("--diagnostics", cfg.diagnostics, "Diagnostics JSON (default <out>.diagnostics.json)");

  auto* fit = app.add_subcommand("conformal-fit", "Fit an exterior map to a sampled curve");
  fit->add_option("--curve", cfg.curve_path, "Curve CSV")->required();
  fit->add_option("--coeffs", cfg.coeffs, "Number of Laurent coefficients M (default 50)");
  fit->add_option("--out", cfg.out, "Map JSON (default stdout)");
  fit->add_option("--report", cfg.report, "Fit report JSON (default <out>.report.json, or stderr)");

  auto* eval = app.add_subcommand("map-eval", "Sample the boundary of a map as CSV");
  eval->add_option("--map", cfg.map_path, "Map JSON")->required();
  eval->add_option("--points", cfg.points, "Sample count P (default 256)");
  eval->add_option("--out", cfg.out, "Output file (default stdout)");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kInvalid;
  }

  try {
    if (grunsky->parsed()) return cmd_grunsky(cfg, out);
    if (spec->parsed()) return cmd_spectrum(cfg, out);
    if (transmit->parsed()) return cmd_transmit(cfg, err);
    if (fit->parsed()) return cmd_conformal_fit(cfg, out, err);
    if (eval->parsed()) return cmd_map_eval(cfg, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_code_for(e);
  }
  return kFailure;
}

}  // namespace npfaber::cli
