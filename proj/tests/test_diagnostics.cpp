#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "doctest.h"
#include "gsep/diagnostics.hpp"
#include "gsep/grid.hpp"
#include "gsep/models.hpp"

using namespace gsep;

namespace {

Spectrum covered_component(const FreqGrid& g, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Spectrum s(g.n);
  for (int f1 = -g.covered_radius; f1 <= g.covered_radius; ++f1)
    for (int f2 = -g.covered_radius; f2 <= g.covered_radius; ++f2)
      s.atf(g, f1, f2) = cplx(u(rng), u(rng));
  return s;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("cluster parameter validation") {
  CHECK_NOTHROW(AlphaParams(1.0, 0.1));
  CHECK_NOTHROW(AlphaParams(1.5, 0.12));
  CHECK_THROWS(AlphaParams(1.0, 0.25));
  CHECK_THROWS(AlphaParams(1.0, 0.0));
  CHECK_THROWS(AlphaParams(1.0, -0.1));
  CHECK_THROWS(AlphaParams(1.5, 0.125));
  CHECK_THROWS(AlphaParams(1.9, 0.1));
  CHECK_THROWS(AlphaParams(0.9, 0.01));
  CHECK_THROWS(AlphaParams(2.0, 0.01));
}

TEST_CASE("point cluster membership") {
  const FreqGrid g = FreqGrid::make(1024);
  const auto l1 = build_lambda1(g, 4, AlphaParams(1.0, 0.2));
  // radius 2^{0.8} ~ 1.74 exceeds sqrt(2), so the diagonal neighbors join the
  // five axis translates: nine per scale over scales 3..5
  CHECK(l1.size() == 27);
  int per_scale[8] = {0};
  bool has_origin = false, has_diag = false;
  for (const WaveletIndex& w : l1) {
    CHECK(w.j >= 3);
    CHECK(w.j <= 5);
    per_scale[w.j]++;
    CHECK(std::hypot(double(w.m1), double(w.m2)) <= std::pow(2.0, 0.8) + 1e-12);
    if (w.j == 4 && w.m1 == 0 && w.m2 == 0) has_origin = true;
    if (w.j == 4 && w.m1 == 1 && w.m2 == -1) has_diag = true;
  }
  CHECK(per_scale[3] == 9);
  CHECK(per_scale[4] == 9);
  CHECK(per_scale[5] == 9);
  CHECK(has_origin);
  CHECK(has_diag);

  // a tighter exponent keeps only the axis translates
  const auto small = build_lambda1(g, 4, AlphaParams(1.0, 0.05));
  CHECK(small.size() == 15);
}

TEST_CASE("curve cluster membership") {
  const FreqGrid g = FreqGrid::make(64);
  ShearletFrame sf(g, 1.0);
  const auto l2 = build_lambda2(g, sf, 2, AlphaParams(1.0, 0.1));
  // scales 2 and 3; all shears; every coarse-axis index; |k2 - l k1| <= 1
  CHECK(l2.size() == size_t(17 * 4 * 3 + 33 * 8 * 3));
  for (const ShearletIndex& s : l2) {
    CHECK(s.band.cone == Cone::vertical);
    CHECK(s.band.j >= 2);
    CHECK(s.band.j <= 3);
    CHECK(std::abs(s.k2 - s.band.l * s.k1) <= 1);
    CHECK(s.k1 >= 0);
    CHECK(s.k1 < sf.k1_count(s.band.j));
  }
}

TEST_CASE("cluster coherence basics") {
  const FreqGrid g = FreqGrid::make(64);
  WaveletFrame wf(g);
  ShearletFrame sf(g, 1.0);
  const AlphaParams par(1.0, 0.1);

  const std::vector<WaveletIndex> empty;
  CHECK(cluster_coherence(g, wf, empty, sf, Variant::dual, 2, 8, nullptr) == 0.0);

  const auto l1 = build_lambda1(g, 2, par);
  REQUIRE(l1.size() > 1);
  const double full = cluster_coherence(g, wf, l1, sf, Variant::dual, 2, 8, nullptr);
  CHECK(full > 0.0);

  // max of sums grows with the cluster and is subadditive over members
  std::vector<WaveletIndex> head(l1.begin(), l1.begin() + l1.size() / 2);
  const double part = cluster_coherence(g, wf, head, sf, Variant::dual, 2, 8, nullptr);
  CHECK(part <= full + 1e-12);
  double singles = 0.0;
  for (const WaveletIndex& w : l1)
    singles += cluster_coherence(g, wf, {w}, sf, Variant::dual, 2, 8, nullptr);
  CHECK(full <= singles + 1e-12);
}

TEST_CASE("cluster coherence matches brute force") {
  const FreqGrid g = FreqGrid::make(64);
  WaveletFrame wf(g);
  ShearletFrame sf(g, 1.0);
  const int j = 2, kmax = 2;

  const std::vector<WaveletIndex> cl1 = {{2, 0, 0}, {2, 1, 0}, {2, 0, -1}, {3, 1, 1}, {3, -2, 0}};
  const double mu1 = cluster_coherence(g, wf, cl1, sf, Variant::dual, j, kmax, nullptr);
  double brute1 = 0.0;
  for (const ShearletBand& b : sf.bands()) {
    if (b.j < j - 1 || b.j > j + 1) continue;
    for (long k1 = -kmax; k1 <= kmax; ++k1)
      for (long k2 = -kmax; k2 <= kmax; ++k2) {
        double s = 0.0;
        for (const WaveletIndex& wi : cl1)
          s += std::abs(atom_inner_product(wf, wi, sf, {b, k1, k2}, Variant::dual));
        brute1 = std::max(brute1, s);
      }
  }
  CHECK(mu1 == doctest::Approx(brute1).epsilon(1e-10));

  const std::vector<ShearletIndex> cl2 = {{{2, 0, Cone::vertical}, 1, 2},
                                          {{2, 1, Cone::vertical}, 0, -1},
                                          {{3, -2, Cone::vertical}, 3, 5}};
  const double mu2 = cluster_coherence(g, sf, cl2, Variant::primal, wf, j, kmax, nullptr);
  double brute2 = 0.0;
  for (int jp = 2; jp <= 3; ++jp)
    for (long m1 = -kmax; m1 <= kmax; ++m1)
      for (long m2 = -kmax; m2 <= kmax; ++m2) {
        double s = 0.0;
        for (const ShearletIndex& si : cl2)
          s += std::abs(atom_inner_product(wf, {jp, m1, m2}, sf, si, Variant::primal));
        brute2 = std::max(brute2, s);
      }
  CHECK(mu2 == doctest::Approx(brute2).epsilon(1e-10));
}

TEST_CASE("coherence certificate at a mid grid") {
  const FreqGrid g = FreqGrid::make(256);
  WaveletFrame wf(g);
  ShearletFrame sf(g, 1.0);
  const CoherenceReport rep = coherence_bound_check(g, wf, sf, 4, AlphaParams(1.0, 0.1));
  CHECK(rep.j == 4);
  CHECK(rep.window_ok);
  CHECK(rep.mu1 > 0.0);
  CHECK(rep.mu2 > 0.0);
  CHECK(rep.mu1 < 0.5);
  // the curve-cluster side stays above one half at desk grids, so the flag
  // reports whichever way the joint bound lands
  CHECK(rep.flag == (rep.mu1 < 0.5 && rep.mu2 < 0.5));

  // coherence shrinks (up to a small slack) as the scale grows
  const CoherenceReport r2 = coherence_bound_check(g, wf, sf, 2, AlphaParams(1.0, 0.1));
  const CoherenceReport r3 = coherence_bound_check(g, wf, sf, 3, AlphaParams(1.0, 0.1));
  CHECK(std::log2(std::max(rep.mu1, 1e-300)) - std::log2(std::max(r3.mu1, 1e-300)) < 0.3);
  CHECK(std::log2(std::max(r3.mu1, 1e-300)) - std::log2(std::max(r2.mu1, 1e-300)) < 0.3);
}

TEST_CASE("relative sparsity of components") {
  const FreqGrid g = FreqGrid::make(64);
  WaveletFrame wf(g);
  ShearletFrame sf(g, 1.0);
  const Spectrum comp = covered_component(g, 77);
  const Spectrum zero(g.n);
  const int j = 2;

  const std::vector<WaveletIndex> none;
  const double total1 = relative_sparsity(g, wf, comp, j, none);
  CHECK(total1 > 0.0);
  CHECK(relative_sparsity(g, wf, zero, j, none) == 0.0);

  // the full index set leaves nothing outside
  std::vector<WaveletIndex> all1;
  for (int jp = 2; jp <= g.j_max; ++jp)
    for (long m1 = 0; m1 < (1L << (2 * jp)); ++m1)
      for (long m2 = 0; m2 < (1L << (2 * jp)); ++m2) all1.push_back({jp, m1, m2});
  CHECK(relative_sparsity(g, wf, comp, j, all1) <= 1e-10 * total1);

  const auto l1 = build_lambda1(g, j, AlphaParams(1.0, 0.1));
  const double d1 = relative_sparsity(g, wf, comp, j, l1);
  CHECK(d1 <= total1 + 1e-12);
  std::vector<WaveletIndex> head(l1.begin(), l1.begin() + l1.size() / 2);
  CHECK(relative_sparsity(g, wf, comp, j, head) >= d1 - 1e-12);

  const std::vector<ShearletIndex> none2;
  const double total2 = relative_sparsity(g, sf, Variant::primal, comp, j, none2);
  CHECK(total2 > 0.0);
  CHECK(relative_sparsity(g, sf, Variant::primal, zero, j, none2) == 0.0);
  std::vector<ShearletIndex> all2;
  for (const ShearletBand& b : sf.bands()) {
    const long n1 = b.cone == Cone::horizontal ? sf.fine_count(b.j) : sf.k1_count(b.j);
    const long n2 = b.cone == Cone::horizontal ? sf.k1_count(b.j) : sf.fine_count(b.j);
    for (long k1 = 0; k1 < n1; ++k1)
      for (long k2 = 0; k2 < n2; ++k2) all2.push_back({b, k1, k2});
  }
  CHECK(relative_sparsity(g, sf, Variant::primal, comp, j, all2) <= 1e-10 * total2);
}

TEST_CASE("error bound arithmetic") {
  CHECK(error_bound(0.05, 0.05, 0.25, 1.0, 1.0) == doctest::Approx(0.4).epsilon(1e-14));
  CHECK(error_bound(0.05, 0.05, 0.25, 1.0, 2.0) == doctest::Approx(0.8).epsilon(1e-14));
  CHECK(error_bound(0.0, 0.0, 0.49, 1.0, 1.0) == 0.0);
  CHECK(std::isinf(error_bound(0.1, 0.1, 0.5, 1.0, 1.0)));
  CHECK(std::isinf(error_bound(0.1, 0.1, 0.7, 1.0, 1.0)));
}

TEST_CASE("cross decay maxima") {
  const FreqGrid g = FreqGrid::make(64);
  WaveletFrame wf(g);
  ShearletFrame sf(g, 1.0);
  for (Variant v : {Variant::primal, Variant::dual}) {
    CHECK(cross_decay_max(g, wf, sf, 2, v) > 0.0);
    CHECK(cross_decay_max(g, wf, sf, 3, v) > 0.0);
  }
}

TEST_CASE("separation study") {
  const FreqGrid g = FreqGrid::make(64);
  ModelSpec models;
  models.points.push_back({0.0, 0.0, 1.5, 1.0});
  models.has_line = true;
  models.line = {0.25, 0.0};

  const auto dir1 = std::filesystem::temp_directory_path() / "gsep_study_a";
  const auto dir2 = std::filesystem::temp_directory_path() / "gsep_study_b";
  std::filesystem::remove_all(dir1);
  std::filesystem::remove_all(dir2);

  StudyOptions opt;
  opt.scales = {2, 3};
  opt.alpha = 1.0;
  opt.eps = 0.1;
  opt.kmax = 8;
  opt.solver.max_iters = 400;
  opt.out_dir = dir1.string();
  const auto reports = separation_study(g, models, opt);
  REQUIRE(reports.size() == 2);
  for (size_t i = 0; i < reports.size(); ++i) {
    const ScaleReport& r = reports[i];
    CHECK(r.j == opt.scales[i]);
    CHECK(r.mu1 >= 0.0);
    CHECK(r.mu2 >= 0.0);
    CHECK(r.delta1 >= 0.0);
    CHECK(r.delta2 >= 0.0);
    CHECK(r.err_points >= 0.0);
    CHECK(r.err_curves >= 0.0);
    CHECK(r.energy_points > 0.0);
    CHECK(r.energy_curves > 0.0);
    CHECK(r.iterations > 0);
    if (r.mu_flag && r.converged)
      CHECK(r.err_points_abs + r.err_curves_abs <= r.bound + 1e-5);
  }
  CHECK(std::filesystem::exists(dir1 / "study.csv"));
  CHECK(std::filesystem::exists(dir1 / "coherence.csv"));
  CHECK(std::filesystem::exists(dir1 / "sparsity.csv"));

  opt.out_dir = dir2.string();
  const auto reports2 = separation_study(g, models, opt);
  REQUIRE(reports2.size() == reports.size());
  CHECK(slurp(dir1 / "study.csv") == slurp(dir2 / "study.csv"));
  CHECK(slurp(dir1 / "coherence.csv") == slurp(dir2 / "coherence.csv"));
  CHECK(slurp(dir1 / "sparsity.csv") == slurp(dir2 / "sparsity.csv"));
}
