// Synthetic ground-truth components on the torus: power-law point
// singularities, a smoothly weighted line distribution, and the corona
// subband filters that split an image into scale bands and recombine it.
#pragma once

#include <string>
#include <vector>

#include "gsep/grid.hpp"

namespace gsep {

struct PointSource {
  double x1 = 0.5, x2 = 0.5;  // position in [0,1)^2
  double lambda = 1.5;        // spatial exponent, in (0,2)
  double c = 1.0;             // amplitude, > 0
};

struct LineModel {
  double rho = 0.25;    // half-width of the smooth weight, > 0
  double offset = 0.5;  // the line sits on x2 = offset
};

// Parsed model description. Text format: `#` comments, one `point=x1,x2,lambda,c`
// line per point source, at most one `line=rho,offset` line.
struct ModelSpec {
  std::vector<PointSource> points;
  bool has_line = false;
  LineModel line;

  bool empty() const { return points.empty() && !has_line; }
  void validate() const;
  std::string serialize() const;
  static ModelSpec parse(const std::string& text);
  static ModelSpec load(const std::string& path);
};

// Smooth even bump: ramp((t+rho)/rho) * ramp((rho-t)/rho); 1 at t = 0,
// vanishing with all derivatives at |t| = rho.
double line_weight(const LineModel& line, double t);

// hat{w}(f) = integral of w(t) e^{-2 pi i f t} over [-rho, rho], trapezoid
// quadrature at 8n samples; real by symmetry.
double line_weight_hat(const LineModel& line, int n, double f);

// Spectrum sum_i c_i e^{-2 pi i xi.x_i} |xi|^{-(2-lambda_i)}; 0 at the origin.
Spectrum point_spectrum(const std::vector<PointSource>& points, const FreqGrid& grid);
// Spectrum hat{w}(f1) e^{-2 pi i f2 offset}, constant along f2 columns up to
// the offset modulation.
Spectrum line_spectrum(const LineModel& line, const FreqGrid& grid);

// Scale bands W_j .* spec for j in [0, j_max] plus the low band.
struct SubbandStack {
  int n = 0;
  int j_max = 0;
  std::vector<Spectrum> band;
  Spectrum low;
};

Spectrum filter_subband(const FreqGrid& grid, const Spectrum& spec, int j);
Spectrum low_subband(const FreqGrid& grid, const Spectrum& spec);
SubbandStack decompose(const FreqGrid& grid, const Spectrum& spec);
// Applies each filter once more and sums: low twice + sum_j W_j band_j.
Spectrum reconstruct_spectrum(const FreqGrid& grid, const SubbandStack& stack);
GridImage reconstruct(const FreqGrid& grid, const SubbandStack& stack);

// Exact lattice sums of |W_j .* spec|^2, one value per scale j in [0, j_max].
std::vector<double> subband_energies(const FreqGrid& grid, const Spectrum& spec);

}  // namespace gsep
