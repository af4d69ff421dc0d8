#include "gsep/models.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "gsep/generators.hpp"

namespace gsep {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

std::vector<double> parse_numbers(const std::string& text, std::size_t count, int lineno) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      while (used < item.size() && std::isspace(static_cast<unsigned char>(item[used]))) ++used;
      if (used != item.size()) throw std::invalid_argument("trailing characters");
    } catch (const std::exception&) {
      throw std::invalid_argument("model line " + std::to_string(lineno) +
                                  ": cannot parse number '" + item + "'");
    }
  }
  if (out.size() != count)
    throw std::invalid_argument("model line " + std::to_string(lineno) + ": expected " +
                                std::to_string(count) + " comma-separated values");
  return out;
}

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

}  // namespace

void ModelSpec::validate() const {
  for (const PointSource& p : points) {
    if (!(p.lambda > 0.0 && p.lambda < 2.0))
      throw std::invalid_argument("point model: lambda must lie in (0, 2)");
    if (!(p.c > 0.0)) throw std::invalid_argument("point model: amplitude must be positive");
    if (!(p.x1 >= 0.0 && p.x1 < 1.0 && p.x2 >= 0.0 && p.x2 < 1.0))
      throw std::invalid_argument("point model: position must lie in [0, 1)^2");
  }
  if (has_line) {
    if (!(line.rho > 0.0)) throw std::invalid_argument("line model: rho must be positive");
    if (!(line.offset >= 0.0 && line.offset < 1.0))
      throw std::invalid_argument("line model: offset must lie in [0, 1)");
  }
}

std::string ModelSpec::serialize() const {
  std::string out;
  char buf[160];
  for (const PointSource& p : points) {
    std::snprintf(buf, sizeof buf, "point=%.17g,%.17g,%.17g,%.17g\n", p.x1, p.x2, p.lambda, p.c);
    out += buf;
  }
  if (has_line) {
    std::snprintf(buf, sizeof buf, "line=%.17g,%.17g\n", line.rho, line.offset);
    out += buf;
  }
  return out;
}

ModelSpec ModelSpec::parse(const std::string& text) {
  ModelSpec spec;
  std::stringstream ss(text);
  std::string raw;
  int lineno = 0;
  while (std::getline(ss, raw)) {
    ++lineno;
    std::string line_text = raw;
    std::size_t hash = line_text.find('#');
    if (hash != std::string::npos) line_text.erase(hash);
    line_text = trim(line_text);
    if (line_text.empty()) continue;
    std::size_t eq = line_text.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("model line " + std::to_string(lineno) + ": expected key=value");
    std::string key = trim(line_text.substr(0, eq));
    std::string value = trim(line_text.substr(eq + 1));
    if (key == "point") {
      std::vector<double> v = parse_numbers(value, 4, lineno);
      spec.points.push_back({v[0], v[1], v[2], v[3]});
    } else if (key == "line") {
      if (spec.has_line)
        throw std::invalid_argument("model line " + std::to_string(lineno) +
                                    ": duplicate line entry");
      std::vector<double> v = parse_numbers(value, 2, lineno);
      spec.has_line = true;
      spec.line = {v[0], v[1]};
    } else {
      throw std::invalid_argument("model line " + std::to_string(lineno) + ": unknown key '" +
                                  key + "'");
    }
  }
  spec.validate();
  return spec;
}

ModelSpec ModelSpec::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open model file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

double line_weight(const LineModel& line, double t) {
  return ramp_profile((t + line.rho) / line.rho) * ramp_profile((line.rho - t) / line.rho);
}

double line_weight_hat(const LineModel& line, int n, double f) {
  // symmetric nodes and an even integrand: the sine part cancels exactly,
  // so only the cosine sum is formed
  const long samples = 8L * n;
  const double h = 2.0 * line.rho / static_cast<double>(samples);
  double acc = 0.0;
  for (long k = 0; k <= samples; ++k) {
    double t = -line.rho + h * static_cast<double>(k);
    double w = line_weight(line, t);
    if (w == 0.0) continue;
    double term = w * std::cos(kTwoPi * f * t);
    acc += (k == 0 || k == samples) ? 0.5 * term : term;
  }
  return acc * h;
}

Spectrum point_spectrum(const std::vector<PointSource>& points, const FreqGrid& grid) {
  Spectrum out(grid.n);
  for (const PointSource& p : points) {
    if (!(p.lambda > 0.0 && p.lambda < 2.0))
      throw std::invalid_argument("point model: lambda must lie in (0, 2)");
    double a = -(2.0 - p.lambda) / 2.0;  // exponent applied to |xi|^2
    for (int f1 = -grid.n / 2; f1 < grid.n / 2; ++f1) {
      for (int f2 = -grid.n / 2; f2 < grid.n / 2; ++f2) {
        if (f1 == 0 && f2 == 0) continue;
        double r2 = static_cast<double>(f1) * f1 + static_cast<double>(f2) * f2;
        double mag = p.c * std::pow(r2, a);
        double phase = -kTwoPi * (f1 * p.x1 + f2 * p.x2);
        out.atf(grid, f1, f2) += mag * cplx(std::cos(phase), std::sin(phase));
      }
    }
  }
  return out;
}

Spectrum line_spectrum(const LineModel& line, const FreqGrid& grid) {
  Spectrum out(grid.n);
  for (int f1 = -grid.n / 2; f1 < grid.n / 2; ++f1) {
    double w = line_weight_hat(line, grid.n, f1);
    for (int f2 = -grid.n / 2; f2 < grid.n / 2; ++f2) {
      double phase = -kTwoPi * f2 * line.offset;
      out.atf(grid, f1, f2) = w * cplx(std::cos(phase), std::sin(phase));
    }
  }
  return out;
}

Spectrum filter_subband(const FreqGrid& grid, const Spectrum& spec, int j) {
  if (spec.n != grid.n) throw std::invalid_argument("filter_subband: size mismatch");
  if (j < 0 || j > grid.j_max) throw std::invalid_argument("filter_subband: scale out of range");
  Spectrum out(grid.n);
  long r = std::min<long>(1L << (2 * j - 2 < 0 ? 0 : 2 * j - 2), grid.n / 2);
  for (long f1 = -r; f1 <= r; ++f1) {
    if (f1 < -grid.n / 2 || f1 > grid.n / 2 - 1) continue;
    for (long f2 = -r; f2 <= r; ++f2) {
      if (f2 < -grid.n / 2 || f2 > grid.n / 2 - 1) continue;
      double w = window_wj(j, static_cast<double>(f1), static_cast<double>(f2));
      if (w != 0.0)
        out.atf(grid, static_cast<int>(f1), static_cast<int>(f2)) =
            w * spec.atf(grid, static_cast<int>(f1), static_cast<int>(f2));
    }
  }
  return out;
}

Spectrum low_subband(const FreqGrid& grid, const Spectrum& spec) {
  if (spec.n != grid.n) throw std::invalid_argument("low_subband: size mismatch");
  // omega_hat vanishes at every nonzero integer frequency
  Spectrum out(grid.n);
  out.at(0, 0) = spec.at(0, 0);
  return out;
}

SubbandStack decompose(const FreqGrid& grid, const Spectrum& spec) {
  SubbandStack stack;
  stack.n = grid.n;
  stack.j_max = grid.j_max;
  stack.band.reserve(grid.j_max + 1);
  for (int j = 0; j <= grid.j_max; ++j) stack.band.push_back(filter_subband(grid, spec, j));
  stack.low = low_subband(grid, spec);
  return stack;
}

Spectrum reconstruct_spectrum(const FreqGrid& grid, const SubbandStack& stack) {
  if (stack.n != grid.n || stack.j_max != grid.j_max ||
      stack.band.size() != static_cast<std::size_t>(grid.j_max + 1))
    throw std::invalid_argument("reconstruct: stack shape mismatch");
  Spectrum acc(grid.n);
  for (int j = 0; j <= grid.j_max; ++j) {
    Spectrum refiltered = filter_subband(grid, stack.band[j], j);
    for (std::size_t i = 0; i < acc.v.size(); ++i) acc.v[i] += refiltered.v[i];
  }
  acc.at(0, 0) += stack.low.at(0, 0);
  return acc;
}

GridImage reconstruct(const FreqGrid& grid, const SubbandStack& stack) {
  FftEngine fft(grid.n);
  return fft.inverse_real(reconstruct_spectrum(grid, stack));
}

std::vector<double> subband_energies(const FreqGrid& grid, const Spectrum& spec) {
  if (spec.n != grid.n) throw std::invalid_argument("subband_energies: size mismatch");
  std::vector<double> out(grid.j_max + 1, 0.0);
  for (int f1 = -grid.n / 2; f1 < grid.n / 2; ++f1) {
    for (int f2 = -grid.n / 2; f2 < grid.n / 2; ++f2) {
      double e = std::norm(spec.atf(grid, f1, f2));
      if (e == 0.0) continue;
      double m = std::max(std::fabs(static_cast<double>(f1)), std::fabs(static_cast<double>(f2)));
      for (int j = 0; j <= grid.j_max; ++j) {
        // corona support (2^{2j-5}, 2^{2j-2}) in |.|_inf
        if (m <= std::ldexp(1.0, 2 * j - 5) || m >= std::ldexp(1.0, 2 * j - 2)) continue;
        double w = window_wj(j, f1, f2);
        if (w != 0.0) out[j] += w * w * e;
      }
    }
  }
  return out;
}

}  // namespace gsep
