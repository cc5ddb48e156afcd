#include "npfaber/io.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include <json.hpp>

namespace npfaber::io {

namespace {

using nlohmann::json;

std::complex<double> complex_from_json(const json& j, const char* what) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
    throw FormatError(std::string("map JSON: ") + what + " must be a [re, im] pair");
  }
  return {j[0].get<double>(), j[1].get<double>()};
}

json complex_to_json(std::complex<double> z) { return json::array({z.real(), z.imag()}); }

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, sep)) out.push_back(cell);
  return out;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& cell, int line) {
  try {
    std::size_t used = 0;
    const double v = std::stod(cell, &used);
    if (trim(cell.substr(used)).empty() && std::isfinite(v)) return v;
  } catch (const std::exception&) {
  }
  throw FormatError("curve CSV line " + std::to_string(line) + ": not a finite number: '" + cell + "'");
}

}  // namespace

LaurentMapd parse_map_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw FormatError(std::string("map JSON: ") + e.what());
  }
  if (!j.is_object() || !j.contains("gamma") || !j.contains("a0") || !j.contains("coeffs")) {
    throw FormatError("map JSON: expected keys gamma, a0, coeffs");
  }
  if (!j["gamma"].is_number()) throw FormatError("map JSON: gamma must be a number");
  if (!j["coeffs"].is_array()) throw FormatError("map JSON: coeffs must be an array");
  std::vector<std::complex<double>> coeffs;
  for (const auto& c : j["coeffs"]) coeffs.push_back(complex_from_json(c, "coefficient"));
  return LaurentMapd(j["gamma"].get<double>(), complex_from_json(j["a0"], "a0"), std::move(coeffs));
}

std::string map_to_json(const LaurentMapd& map) {
  json j;
  j["gamma"] = map.gamma();
  j["a0"] = complex_to_json(map.a0());
  j["coeffs"] = json::array();
  for (const auto& c : map.coeffs()) j["coeffs"].push_back(complex_to_json(c));
  return j.dump(2) + "\n";
}

LaurentMapd read_map(const std::string& path) { return parse_map_json(read_text(path)); }

std::vector<std::complex<double>> parse_curve_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw FormatError("curve CSV: empty input");
  const auto header = split(trim(line), ',');
  if (header.size() < 3 || trim(header[0]) != "t" || trim(header[1]) != "x" || trim(header[2]) != "y") {
    throw FormatError("curve CSV: header must start with t,x,y");
  }
  std::vector<double> t;
  std::vector<std::complex<double>> z;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    const auto cells = split(line, ',');
    if (cells.size() < 3) throw FormatError("curve CSV line " + std::to_string(lineno) + ": expected t,x,y");
    t.push_back(parse_double(cells[0], lineno));
    z.emplace_back(parse_double(cells[1], lineno), parse_double(cells[2], lineno));
  }
  const std::size_t P = z.size();
  if (P < 2) throw FormatError("curve CSV: too few samples");
  if (std::abs(z.front() - z.back()) <= 1e-14 * (1 + std::abs(z.front()))) {
    throw FormatError("curve CSV: last row repeats the first; closure is implicit");
  }
  const double step = (t.back() - t.front()) / static_cast<double>(P - 1);
  const double period = step * static_cast<double>(P);
  if (!(step > 0)) throw FormatError("curve CSV: t must increase");
  for (std::size_t p = 0; p < P; ++p) {
    if (std::abs(t[p] - (t.front() + step * static_cast<double>(p))) > 1e-8 * std::abs(period)) {
      throw FormatError("curve CSV: t is not uniformly spaced");
    }
  }
  return z;
}

std::vector<std::complex<double>> read_curve(const std::string& path) { return parse_curve_csv(read_text(path)); }

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw FormatError("cannot write '" + tmp.string() + "'");
    out << content;
    out.flush();
    if (!out) throw FormatError("write failed for '" + tmp.string() + "'");
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw FormatError("cannot move output into place at '" + path + "'");
  }
}

std::string format_number(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace npfaber::io
