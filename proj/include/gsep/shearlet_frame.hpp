// Cone-adapted directional frame on the discrete torus: bandlimited atoms
// built from the corona windows W_j, a shear-indexed slope bump, and the cone
// window pair. The primal system carries the chi cone factors, the synthesis
// dual carries the gamma factors; with the per-band lattice densities the two
// aggregate to an exact Fourier-multiplier identity on the covered lattice.
#pragma once

#include <array>
#include <vector>

#include "gsep/generators.hpp"
#include "gsep/grid.hpp"

namespace gsep {

// One band: scale, integer shear and cone. j == -1 denotes the coarse band
// (shear and cone ignored there).
struct ShearletBand {
  int j = -1;
  int l = 0;
  Cone cone = Cone::horizontal;
};

// Atom index: band plus translate indices on the band's sheared anisotropic
// lattice. For the horizontal cone k1 runs over the fine axis (4^j values)
// and k2 over the coarse axis (k1_count values); for the vertical cone the
// roles swap. Indices outside those ranges wrap around the torus.
struct ShearletIndex {
  ShearletBand band;
  long k1 = 0;
  long k2 = 0;
};

enum class Variant { primal, dual };

// Undecimated coefficient fields aligned with ShearletFrame::bands(), plus
// the coarse band.
struct ShearletCoeffs {
  int n = 0;
  std::vector<ComplexField> band;
  ComplexField low;
};

struct FrameBounds {
  double lower = 0.0;
  double upper = 0.0;
};

class ShearletFrame {
 public:
  // alpha in [1, 2): anisotropy of the scaling diag(2^2, 2^alpha).
  ShearletFrame(const FreqGrid& grid, double alpha);

  const FreqGrid& grid() const { return grid_; }
  double alpha() const { return alpha_; }

  // Coarser coronas contain no nonzero integer frequency, so the band list
  // starts at scale 2.
  int j_min() const { return 2; }
  const std::vector<ShearletBand>& bands() const { return bands_; }
  int band_index(const ShearletBand& band) const;

  int shear_range(int j) const;     // shears run over [-shear_range, shear_range]
  double shear_scale(int j) const;  // 2^{(2-alpha) j}, the slope magnification
  long k1_count(int j) const;       // translate count along the coarse axis
  long fine_count(int j) const { return 1L << (2 * j); }  // along the fine axis
  long density(int j) const;        // translates per band, fine_count * k1_count
  double atom_norm(int j) const;    // amplitude 1/sqrt(density)
  int band_radius(int j) const;     // corona bounding half-width on the lattice

  double symbol(const ShearletBand& band, Variant variant, double f1, double f2) const;
  // Sharp projector below the cone coverage; on the integer lattice only the
  // origin survives. Identical for both variants.
  double symbol_low(double f1, double f2) const;

  ShearletCoeffs analyze(const GridImage& img, Variant variant) const;
  ShearletCoeffs analyze(const Spectrum& spec, Variant variant) const;
  Spectrum synthesize_spectrum(const ShearletCoeffs& coeffs, Variant variant) const;
  GridImage synthesize(const ShearletCoeffs& coeffs, Variant variant) const;

  // Analysis with one variant followed by synthesis with the other, streamed
  // band by band so only one coefficient field is alive at a time.
  Spectrum reconstruct_spectrum(const Spectrum& spec, Variant analysis_variant) const;

  // M_band .* spec restricted to the band support (building block for
  // streamed per-band work).
  Spectrum band_product(const ShearletBand& band, Variant variant, const Spectrum& spec) const;

  // Dense real symbol values in frequency layout (entry [k1*n + k2] holds the
  // wrapped frequency (k1, k2), like Spectrum indexing).
  GridImage band_symbol_map(const ShearletBand& band, Variant variant) const;

  // sum_b density_b * primal_b * dual_b at one frequency; == 1 on the covered
  // lattice.
  double duality_aggregate(double f1, double f2) const;
  // Same aggregate with the cone factors replaced by 1 and a single cone kept:
  // == 1 wherever the slope stays inside the cone.
  double unwindowed_cone_aggregate(Cone cone, double f1, double f2) const;
  // Min and max over the covered lattice of sum_b density_b * symbol_b^2.
  FrameBounds frame_bounds(Variant variant) const;

  // Weighted norms of a coefficient set; the density weights stand in for
  // sums over the decimated index sets.
  double coeffs_l1(const ShearletCoeffs& coeffs) const;
  double coeffs_l2_sq(const ShearletCoeffs& coeffs) const;

  // Atom translate t = A^{-j} S^{-l} k; the atom itself concentrates at -t.
  std::array<double, 2> translate(const ShearletIndex& idx) const;
  Spectrum atom_spectrum(const ShearletIndex& idx, Variant variant) const;
  // Grid position of the coefficient sample for this atom; requires the
  // band's lattice to divide the grid.
  std::array<int, 2> decimated_grid_position(const ShearletIndex& idx) const;
  cplx decimated_sample(const ShearletCoeffs& coeffs, const ShearletIndex& idx) const;

 private:
  template <typename Fn>
  void for_each_band_point(const ShearletBand& band, Variant variant, Fn&& fn) const;
  void check_band(const ShearletBand& band) const;

  FreqGrid grid_;
  double alpha_;
  std::vector<ShearletBand> bands_;
  mutable FftEngine fft_;
};

// Exact frequency-lattice inner product between a wavelet atom and a
// directional atom on the same grid.
cplx atom_inner_product(const class WaveletFrame& wavelets, const struct WaveletIndex& w,
                        const ShearletFrame& shearlets, const ShearletIndex& s, Variant variant);

}  // namespace gsep
