// Asymptotic diagnostics relating the two frames to the point/line models:
// geometric index clusters, cluster coherence, relative sparsity outside the
// clusters, the resulting separation error bound, and a per-scale study that
// runs the solver on model subbands and tabulates everything as CSV.
#pragma once

#include <string>
#include <vector>

#include "gsep/grid.hpp"
#include "gsep/models.hpp"
#include "gsep/separation.hpp"
#include "gsep/shearlet_frame.hpp"
#include "gsep/wavelet_frame.hpp"

namespace gsep {

// Anisotropy and cluster growth-rate pair. The cluster radius 2^{eps j} must
// grow strictly slower than the directional resolution 2^{(2-alpha) j / 4},
// so construction requires 0 < eps < (2 - alpha) / 4.
struct AlphaParams {
  double alpha = 1.0;
  double eps = 0.1;

  AlphaParams(double alpha_, double eps_);
};

// Isotropic-frame cluster at scale j for a point at the origin: indices
// (j', m) with |j' - j| <= 1 and sqrt(m1^2 + m2^2) <= 2^{eps j}.
std::vector<WaveletIndex> build_lambda1(const FreqGrid& grid, int j, const AlphaParams& p);

// Directional-frame cluster at scale j for the horizontal line through the
// origin: vertical-cone indices (j', l, k) with |j' - j| <= 1, every l and
// k1, and sheared transverse offset |k2 - l k1| <= 2^{eps j}.
std::vector<ShearletIndex> build_lambda2(const FreqGrid& grid, const ShearletFrame& sf,
                                         int j, const AlphaParams& p);

// Max over directional atoms of the given variant (scales j-1..j+1, all
// shears and cones, translates within |k|_inf <= kmax) of the cluster sum of
// absolute inner products with the isotropic cluster atoms. window_ok gets
// false if doubling kmax moves the value by more than 1e-6.
double cluster_coherence(const FreqGrid& grid, const WaveletFrame& wf,
                         const std::vector<WaveletIndex>& cluster, const ShearletFrame& sf,
                         Variant target_variant, int j, int kmax, bool* window_ok);

// Same with the roles swapped: max over isotropic atoms (scales j-1..j+1,
// |m|_inf <= kmax) of the cluster sum over the directional cluster, analyzed
// with source_variant.
double cluster_coherence(const FreqGrid& grid, const ShearletFrame& sf,
                         const std::vector<ShearletIndex>& cluster, Variant source_variant,
                         const WaveletFrame& wf, int j, int kmax, bool* window_ok);

// Plain l1 mass of the component's decimated coefficients over the complement
// of the cluster within scales j-1..j+1. Exact lattice enumeration; requires
// the translate lattices of those scales to divide the grid.
double relative_sparsity(const FreqGrid& grid, const WaveletFrame& wf, const Spectrum& comp,
                         int j, const std::vector<WaveletIndex>& cluster);
double relative_sparsity(const FreqGrid& grid, const ShearletFrame& sf, Variant variant,
                         const Spectrum& comp, int j, const std::vector<ShearletIndex>& cluster);

// 2 max{b1, b2} (delta1 + delta2) / (1 - 2 mu); +inf once mu >= 1/2.
double error_bound(double delta1, double delta2, double mu, double b1, double b2);

struct CoherenceReport {
  int j = 0;
  double mu1 = 0.0;  // isotropic cluster against the directional dual system
  double mu2 = 0.0;  // directional cluster against the isotropic system
  bool flag = false;  // max{mu1, mu2} < 1/2
  bool window_ok = true;
};

CoherenceReport coherence_bound_check(const FreqGrid& grid, const WaveletFrame& wf,
                                      const ShearletFrame& sf, int j, const AlphaParams& p,
                                      int kmax = 32);

// Max absolute inner product between scale-j isotropic atoms and scale-j
// directional atoms of the given variant, over all shears, cones and grid
// translates. Decays like 2^{-(2-alpha) j / 2}.
double cross_decay_max(const FreqGrid& grid, const WaveletFrame& wf, const ShearletFrame& sf,
                       int j, Variant variant);

struct ScaleReport {
  int j = 0;
  double mu1 = 0.0, mu2 = 0.0;
  bool mu_flag = false;
  bool window_ok = true;
  double delta1 = 0.0, delta2 = 0.0;
  double bound = 0.0;  // absolute two-part error bound; +inf when 2 mu >= 1
  double err_points = 0.0, err_curves = 0.0;  // relative l2 errors
  double err_points_abs = 0.0, err_curves_abs = 0.0;
  double energy_points = 0.0, energy_curves = 0.0;  // subband l2 norms
  long iterations = 0;
  double kkt = 0.0;
  bool converged = false;
};

struct StudyOptions {
  std::vector<int> scales;  // subband scales to run
  double alpha = 1.0;
  double eps = 0.1;
  SolverConfig solver;
  int kmax = 32;
  bool with_coherence = true;  // mu and bound columns; skipping leaves bound +inf
  bool with_sparsity = true;
  std::string out_dir;  // when nonempty: coherence.csv, sparsity.csv, study.csv
};

// For each requested scale: split the models into the scale-j subband, run
// the subband separator on their sum, and measure errors against the exact
// components alongside the coherence/sparsity certificates.
std::vector<ScaleReport> separation_study(const FreqGrid& grid, const ModelSpec& models,
                                          const StudyOptions& opt);

}  // namespace gsep
