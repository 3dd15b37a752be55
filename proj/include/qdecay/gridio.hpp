#pragma once

#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "qdecay/wavefunction.hpp"

namespace qdecay {

/// Grid file format: a one-line header declaring the representation and
/// spacing, then whitespace-separated rows "coord re im":
///
///   position 0.0625
///   -8.0 0.12035 0.0
///   ...
///
/// The coordinate column must be uniform and match the declared spacing.
inline WaveFunction read_grid_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("read_grid_file: cannot open " + path);
  std::string line;
  std::string repr;
  double spacing = 0.0;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream hs(line);
    if (!(hs >> repr >> spacing))
      throw std::invalid_argument("read_grid_file: malformed header in " + path);
    break;
  }
  if (repr != "position" && repr != "momentum")
    throw std::invalid_argument(
        "read_grid_file: header must declare 'position' or 'momentum', got '" +
        repr + "'");
  if (!(spacing > 0.0))
    throw std::invalid_argument("read_grid_file: spacing must be > 0");

  std::vector<double> coords;
  std::vector<Complex> samples;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream rs(line);
    double c, re, im;
    if (!(rs >> c >> re >> im))
      throw std::invalid_argument("read_grid_file: malformed row '" + line + "'");
    coords.push_back(c);
    samples.push_back({re, im});
  }
  if (samples.size() < 16)
    throw std::invalid_argument("read_grid_file: need at least 16 samples");
  for (std::size_t i = 1; i < coords.size(); ++i) {
    const double d = coords[i] - coords[i - 1];
    if (std::abs(d - spacing) > 1e-9 * std::max(1.0, std::abs(spacing)))
      throw std::invalid_argument(
          "read_grid_file: non-uniform coordinate column at row " +
          std::to_string(i + 1));
  }
  if (repr == "position")
    return WaveFunction::position_grid(std::move(samples), coords.front(),
                                       spacing);
  return WaveFunction::momentum_grid(std::move(samples), coords.front(),
                                     spacing);
}

}  // namespace qdecay
