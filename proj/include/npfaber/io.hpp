#pragma once

// File formats.
//   Map JSON:   {"gamma": g, "a0": [re, im], "coeffs": [[re, im], ...]}
//   Curve CSV:  header starting "t,x,y", uniform t over one period, no
//               repeated closing row. Extra columns are ignored.

#include <complex>
#include <string>
#include <vector>

#include "npfaber/conformal_map.hpp"

namespace npfaber::io {

/// Malformed file contents. Carries the offending path or line.
class FormatError : public Error {
 public:
  using Error::Error;
};

LaurentMapd parse_map_json(const std::string& text);
std::string map_to_json(const LaurentMapd& map);
LaurentMapd read_map(const std::string& path);

std::vector<std::complex<double>> parse_curve_csv(const std::string& text);
std::vector<std::complex<double>> read_curve(const std::string& path);

std::string read_text(const std::string& path);

/// Writes through a temporary file in the same directory and renames it into
/// place, so readers never see a partial file.
void write_text_atomic(const std::string& path, const std::string& content);

/// %.17g formatting shared by every numeric output.
std::string format_number(double x);

}  // namespace npfaber::io
