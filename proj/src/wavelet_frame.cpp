#include "gsep/wavelet_frame.hpp"

#include <cmath>
#include <stdexcept>

#include "gsep/generators.hpp"

namespace gsep {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

}  // namespace

double WaveletCoeffs::weight(int j) const {
  double nn = static_cast<double>(n) * n;
  if (j < 0) return 1.0 / nn;
  return std::ldexp(1.0, 4 * j) / nn;
}

double WaveletCoeffs::l1() const {
  double acc = 0.0;
  for (int j = 0; j <= j_max; ++j) {
    double w = weight(j);
    for (const cplx& z : scale[j].v) acc += w * std::abs(z);
  }
  double wl = weight(-1);
  for (const cplx& z : low.v) acc += wl * std::abs(z);
  return acc;
}

double WaveletCoeffs::l2_sq() const {
  double acc = 0.0;
  for (int j = 0; j <= j_max; ++j) {
    double w = weight(j);
    for (const cplx& z : scale[j].v) acc += w * std::norm(z);
  }
  double wl = weight(-1);
  for (const cplx& z : low.v) acc += wl * std::norm(z);
  return acc;
}

WaveletFrame::WaveletFrame(const FreqGrid& grid) : grid_(grid), fft_(grid.n) {}

double WaveletFrame::symbol(int j, double f1, double f2) const {
  if (j < 0 || j > grid_.j_max) throw std::invalid_argument("wavelet symbol: scale out of range");
  return std::ldexp(window_wj(j, f1, f2), -2 * j);
}

double WaveletFrame::symbol_low(double f1, double f2) const { return omega_hat(f1, f2); }

long WaveletFrame::density(int j) const {
  if (j < 0) return 1;
  return 1L << (4 * j);
}

int WaveletFrame::band_radius(int j) const {
  if (j < 1) return 0;  // the scale-0 corona contains no nonzero lattice point
  long r = 1L << (2 * j - 2);
  return static_cast<int>(std::min<long>(r, grid_.n / 2));
}

WaveletCoeffs WaveletFrame::analyze(const GridImage& img) const {
  return analyze(fft_.forward(img));
}

WaveletCoeffs WaveletFrame::analyze(const Spectrum& spec) const {
  if (spec.n != grid_.n) throw std::invalid_argument("analyze: size mismatch");
  WaveletCoeffs out;
  out.n = grid_.n;
  out.j_max = grid_.j_max;
  out.scale.resize(grid_.j_max + 1);
  for (int j = 0; j <= grid_.j_max; ++j) {
    Spectrum banded(grid_.n);
    int r = band_radius(j);
    for (int f1 = -r; f1 <= r; ++f1) {
      if (f1 < -grid_.n / 2 || f1 > grid_.n / 2 - 1) continue;
      for (int f2 = -r; f2 <= r; ++f2) {
        if (f2 < -grid_.n / 2 || f2 > grid_.n / 2 - 1) continue;
        double m = symbol(j, f1, f2);
        if (m != 0.0) banded.atf(grid_, f1, f2) = m * spec.atf(grid_, f1, f2);
      }
    }
    out.scale[j] = fft_.inverse(banded);
  }
  Spectrum lowband(grid_.n);
  lowband.at(0, 0) = spec.at(0, 0);  // omega_hat vanishes at all other lattice points
  out.low = fft_.inverse(lowband);
  return out;
}

Spectrum WaveletFrame::synthesize_spectrum(const WaveletCoeffs& coeffs) const {
  if (coeffs.n != grid_.n) throw std::invalid_argument("synthesize: size mismatch");
  Spectrum acc(grid_.n);
  for (int j = 0; j <= grid_.j_max; ++j) {
    Spectrum chat = fft_.forward(coeffs.scale[j]);
    double d = static_cast<double>(density(j));
    int r = band_radius(j);
    for (int f1 = -r; f1 <= r; ++f1) {
      if (f1 < -grid_.n / 2 || f1 > grid_.n / 2 - 1) continue;
      for (int f2 = -r; f2 <= r; ++f2) {
        if (f2 < -grid_.n / 2 || f2 > grid_.n / 2 - 1) continue;
        double m = symbol(j, f1, f2);
        if (m != 0.0) acc.atf(grid_, f1, f2) += d * m * chat.atf(grid_, f1, f2);
      }
    }
  }
  Spectrum lhat = fft_.forward(coeffs.low);
  acc.at(0, 0) += lhat.at(0, 0);
  return acc;
}

GridImage WaveletFrame::synthesize(const WaveletCoeffs& coeffs) const {
  return fft_.inverse_real(synthesize_spectrum(coeffs));
}

Spectrum WaveletFrame::atom_spectrum(const WaveletIndex& idx) const {
  Spectrum out(grid_.n);
  if (idx.j < 0) {
    // low-pass atom at an integer translate: the modulation is trivial on the
    // integer lattice, leaving the single nonzero coefficient at the origin
    out.at(0, 0) = 1.0;
    return out;
  }
  double inv = std::ldexp(1.0, -2 * idx.j);  // translate step 4^{-j}
  int r = band_radius(idx.j);
  for (int f1 = -r; f1 <= r; ++f1) {
    if (f1 < -grid_.n / 2 || f1 > grid_.n / 2 - 1) continue;
    for (int f2 = -r; f2 <= r; ++f2) {
      if (f2 < -grid_.n / 2 || f2 > grid_.n / 2 - 1) continue;
      double m = symbol(idx.j, f1, f2);
      if (m == 0.0) continue;
      double phase = kTwoPi * inv * (f1 * static_cast<double>(idx.m1) + f2 * static_cast<double>(idx.m2));
      out.atf(grid_, f1, f2) = m * cplx(std::cos(phase), std::sin(phase));
    }
  }
  return out;
}

std::array<int, 2> WaveletFrame::decimated_grid_position(const WaveletIndex& idx) const {
  const long n = grid_.n;
  if (idx.j < 0) return {0, 0};
  if (idx.j > grid_.j_max) throw std::invalid_argument("decimated position: scale out of range");
  long lattice = 1L << (2 * idx.j);
  if (lattice > n || n % lattice != 0)
    throw std::invalid_argument("translate lattice does not align with the grid");
  long step = n / lattice;
  auto pos = [&](long m) {
    long p = (-m * step) % n;
    return static_cast<int>(p < 0 ? p + n : p);
  };
  return {pos(idx.m1), pos(idx.m2)};
}

cplx WaveletFrame::decimated_sample(const WaveletCoeffs& coeffs, const WaveletIndex& idx) const {
  if (idx.j < 0) return coeffs.low.at(0, 0);
  std::array<int, 2> pos = decimated_grid_position(idx);
  return coeffs.scale[idx.j].at(pos[0], pos[1]);
}

}  // namespace gsep
