// Radial wavelet frame on the discrete torus, realized as undecimated Fourier
// multipliers. Scale-j atoms have spectrum 2^{-2j} W_j(xi) e^{2 pi i xi.m/4^j};
// together with the low-pass atoms (spectrum omega_hat, integer translates)
// they form a Parseval frame on the covered band: the per-scale density
// weights 2^{4j} turn the squared symbols into the exact partition of unity.
#pragma once

#include <array>
#include <vector>

#include "gsep/grid.hpp"

namespace gsep {

struct WaveletIndex {
  int j = 0;  // scale, or -1 for the low-pass band
  long m1 = 0, m2 = 0;
};

// Undecimated coefficient fields, one per scale plus the low band.
// Weighted norms approximate the decimated sums over the translate lattices.
struct WaveletCoeffs {
  int n = 0;
  int j_max = 0;
  std::vector<ComplexField> scale;  // index j in [0, j_max]
  ComplexField low;

  double weight(int j) const;  // 2^{4j} / n^2; j = -1 gives the low-band 1/n^2
  double l1() const;
  double l2_sq() const;
};

class WaveletFrame {
 public:
  explicit WaveletFrame(const FreqGrid& grid);

  const FreqGrid& grid() const { return grid_; }
  int j_max() const { return grid_.j_max; }

  // atom spectra at translate index 0; modulation is added by atom_spectrum
  double symbol(int j, double f1, double f2) const;
  double symbol_low(double f1, double f2) const;
  long density(int j) const;  // translate-lattice density 2^{4j} (low: 1)
  // outer frequency radius of the scale-j corona on this grid
  int band_radius(int j) const;

  WaveletCoeffs analyze(const GridImage& img) const;
  WaveletCoeffs analyze(const Spectrum& spec) const;
  GridImage synthesize(const WaveletCoeffs& coeffs) const;
  Spectrum synthesize_spectrum(const WaveletCoeffs& coeffs) const;

  Spectrum atom_spectrum(const WaveletIndex& idx) const;

  // Decimated coefficient <f, psi_{j,m}> read off the undecimated field;
  // requires the translate lattice to align with the grid (4^j | n).
  // The atom concentrates at -m/4^j, so the sample sits at that grid point.
  std::array<int, 2> decimated_grid_position(const WaveletIndex& idx) const;
  cplx decimated_sample(const WaveletCoeffs& coeffs, const WaveletIndex& idx) const;

 private:
  FreqGrid grid_;
  mutable FftEngine fft_;
};

}  // namespace gsep
