#include "gsep/diagnostics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <filesystem>
#include <limits>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "gsep/io.hpp"

namespace gsep {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

int wrap_mod(long a, int n) {
  long r = a % n;
  return static_cast<int>(r < 0 ? r + n : r);
}

void check_lattice_alignment(const FreqGrid& grid, const ShearletFrame& sf, int j) {
  const long fine = sf.fine_count(j);
  const long coarse = sf.k1_count(j);
  if (fine > grid.n || grid.n % fine != 0 || grid.n % coarse != 0)
    throw std::runtime_error(
        "scale " + std::to_string(j) + " translate lattice (" + std::to_string(fine) + " x " +
        std::to_string(coarse) + ") does not divide the grid n=" + std::to_string(grid.n));
}

// Translate t of the atom (band, k1, k2), scaled by n; integer by the
// alignment check above.
std::array<long, 2> translate_times_n(const FreqGrid& grid, const ShearletFrame& sf,
                                      const ShearletBand& band, long k1, long k2) {
  const long sfine = grid.n / sf.fine_count(band.j);
  const long scoarse = grid.n / sf.k1_count(band.j);
  if (band.cone == Cone::horizontal) return {(k1 - band.l * k2) * sfine, k2 * scoarse};
  return {k1 * scoarse, (k2 - band.l * k1) * sfine};
}

// Half-spectrum product of a directional band map with the scale-jw isotropic
// symbol; the inverse transform of this is the grid of cross inner products
// G(x) = <psi_{jw, m}, phi_{band, k}> at x = m/4^{jw} - t_k.
void fill_cross_half(const FreqGrid& grid, const WaveletFrame& wf, int jw, const GridImage& map,
                     std::vector<cplx>& half) {
  const int n = grid.n;
  const int hw = n / 2 + 1;
  std::fill(half.begin(), half.end(), cplx{});
  for (int k1 = 0; k1 < n; ++k1) {
    const int f1 = grid.freq(k1);
    for (int f2 = 0; f2 < n / 2; ++f2) {
      const double m = map.at(k1, f2);
      if (m == 0.0) continue;
      half[static_cast<size_t>(k1) * hw + f2] = m * wf.symbol(jw, f1, f2);
    }
  }
}

double l2_image(const GridImage& a) { return std::sqrt(image_norm_sq(a)); }

GridImage image_diff(const GridImage& a, const GridImage& b) {
  GridImage out(a.n);
  for (size_t i = 0; i < a.v.size(); ++i) out.v[i] = a.v[i] - b.v[i];
  return out;
}

}  // namespace

AlphaParams::AlphaParams(double alpha_, double eps_) : alpha(alpha_), eps(eps_) {
  if (!(alpha >= 1.0 && alpha < 2.0))
    throw std::invalid_argument("alpha must lie in [1, 2); got " + std::to_string(alpha));
  if (!(eps > 0.0 && eps < (2.0 - alpha) / 4.0))
    throw std::invalid_argument("eps must lie in (0, (2 - alpha)/4) = (0, " +
                                std::to_string((2.0 - alpha) / 4.0) +
                                "); got " + std::to_string(eps));
}

std::vector<WaveletIndex> build_lambda1(const FreqGrid& grid, int j, const AlphaParams& p) {
  if (j < 0 || j > grid.j_max)
    throw std::invalid_argument("build_lambda1: scale out of range");
  const double r = std::exp2(p.eps * j);
  const long box = static_cast<long>(std::floor(r));
  std::vector<WaveletIndex> out;
  const int lo = std::max(0, j - 1);
  const int hi = std::min(grid.j_max, j + 1);
  for (int jp = lo; jp <= hi; ++jp)
    for (long m1 = -box; m1 <= box; ++m1)
      for (long m2 = -box; m2 <= box; ++m2)
        if (std::sqrt(static_cast<double>(m1 * m1 + m2 * m2)) <= r)
          out.push_back({jp, m1, m2});
  return out;
}

std::vector<ShearletIndex> build_lambda2(const FreqGrid& grid, const ShearletFrame& sf, int j,
                                         const AlphaParams& p) {
  if (j < 0 || j > grid.j_max)
    throw std::invalid_argument("build_lambda2: scale out of range");
  const double r = std::exp2(p.eps * j);
  const long w = static_cast<long>(std::floor(r));
  std::vector<ShearletIndex> out;
  for (const ShearletBand& band : sf.bands()) {
    if (band.j < j - 1 || band.j > j + 1 || band.cone != Cone::vertical) continue;
    // vertical-cone translates: k1 runs over the coarse lattice along the
    // line, k2 - l k1 is the transverse offset in fine units
    const long kc = sf.k1_count(band.j);
    for (long k1 = 0; k1 < kc; ++k1)
      for (long d = -w; d <= w; ++d)
        out.push_back({band, k1, band.l * k1 + d});
  }
  return out;
}

double cluster_coherence(const FreqGrid& grid, const WaveletFrame& wf,
                         const std::vector<WaveletIndex>& cluster, const ShearletFrame& sf,
                         Variant target_variant, int j, int kmax, bool* window_ok) {
  if (window_ok) *window_ok = true;
  if (cluster.empty()) return 0.0;
  const int n = grid.n;
  FftEngine fft(n);

  // cluster members grouped by scale; scales below 2 carry no lattice mass
  std::map<int, std::vector<std::array<long, 2>>> members;
  for (const WaveletIndex& idx : cluster)
    if (idx.j >= 2 && idx.j <= grid.j_max) members[idx.j].push_back({idx.m1, idx.m2});

  const int wide = 2 * kmax;
  double mu_in = 0.0, mu_wide = 0.0;
  std::vector<cplx> half(static_cast<size_t>(n) * (n / 2 + 1));
  GridImage field(n);
  std::vector<GridImage> fields;
  std::vector<int> strides;

  for (const ShearletBand& band : sf.bands()) {
    if (band.j < j - 1 || band.j > j + 1) continue;
    check_lattice_alignment(grid, sf, band.j);
    const GridImage map = sf.band_symbol_map(band, target_variant);
    fields.clear();
    strides.clear();
    std::vector<const std::vector<std::array<long, 2>>*> lists;
    for (const auto& [jp, ms] : members) {
      if (std::abs(jp - band.j) > 1) continue;  // disjoint coronas
      if ((1L << (2 * jp)) > n || n % (1L << (2 * jp)) != 0)
        throw std::runtime_error("scale " + std::to_string(jp) +
                                 " translate lattice does not divide the grid");
      fill_cross_half(grid, wf, jp, map, half);
      GridImage g(n);
      fft.inverse_c2r(half.data(), g.v.data());
      fields.push_back(std::move(g));
      strides.push_back(n >> (2 * jp));
      lists.push_back(&ms);
    }
    if (fields.empty()) continue;
    for (long k1 = -wide; k1 <= wide; ++k1) {
      for (long k2 = -wide; k2 <= wide; ++k2) {
        const std::array<long, 2> t = translate_times_n(grid, sf, band, k1, k2);
        double s = 0.0;
        for (size_t q = 0; q < fields.size(); ++q) {
          const GridImage& g = fields[q];
          const int st = strides[q];
          for (const auto& m : *lists[q])
            s += std::abs(g.at(wrap_mod(m[0] * st - t[0], n), wrap_mod(m[1] * st - t[1], n)));
        }
        mu_wide = std::max(mu_wide, s);
        if (std::labs(k1) <= kmax && std::labs(k2) <= kmax) mu_in = std::max(mu_in, s);
      }
    }
  }
  if (window_ok && std::abs(mu_wide - mu_in) > 1e-6) *window_ok = false;
  return mu_in;
}

double cluster_coherence(const FreqGrid& grid, const ShearletFrame& sf,
                         const std::vector<ShearletIndex>& cluster, Variant source_variant,
                         const WaveletFrame& wf, int j, int kmax, bool* window_ok) {
  if (window_ok) *window_ok = true;
  if (cluster.empty()) return 0.0;
  const int n = grid.n;
  FftEngine fft(n);

  std::map<int, std::vector<std::array<long, 2>>> members;  // band index -> translates
  for (const ShearletIndex& idx : cluster)
    members[sf.band_index(idx.band)].push_back({idx.k1, idx.k2});

  const int lo = std::max(2, j - 1);
  const int hi = std::min(grid.j_max, j + 1);
  const int wide = 2 * kmax;
  const size_t side = static_cast<size_t>(2 * wide + 1);
  // per-target accumulators: sums over the whole cluster for each target atom
  std::vector<std::vector<double>> acc;
  std::vector<int> tscales;
  for (int jt = lo; jt <= hi; ++jt) {
    if ((1L << (2 * jt)) > n || n % (1L << (2 * jt)) != 0)
      throw std::runtime_error("scale " + std::to_string(jt) +
                               " translate lattice does not divide the grid");
    tscales.push_back(jt);
    acc.emplace_back(side * side, 0.0);
  }
  if (tscales.empty()) return 0.0;

  std::vector<cplx> half(static_cast<size_t>(n) * (n / 2 + 1));
  GridImage field(n);
  for (const auto& [bi, ks] : members) {
    const ShearletBand& band = sf.bands()[bi];
    check_lattice_alignment(grid, sf, band.j);
    const GridImage map = sf.band_symbol_map(band, source_variant);
    std::vector<std::array<long, 2>> tn(ks.size());
    for (size_t q = 0; q < ks.size(); ++q)
      tn[q] = translate_times_n(grid, sf, band, ks[q][0], ks[q][1]);
    for (size_t ti = 0; ti < tscales.size(); ++ti) {
      const int jt = tscales[ti];
      if (std::abs(jt - band.j) > 1) continue;  // disjoint coronas
      fill_cross_half(grid, wf, jt, map, half);
      fft.inverse_c2r(half.data(), field.v.data());
      const int st = n >> (2 * jt);
      std::vector<double>& a = acc[ti];
      for (long m1 = -wide; m1 <= wide; ++m1) {
        for (long m2 = -wide; m2 <= wide; ++m2) {
          double s = 0.0;
          for (const auto& t : tn)
            s += std::abs(
                field.at(wrap_mod(m1 * st - t[0], n), wrap_mod(m2 * st - t[1], n)));
          a[static_cast<size_t>(m1 + wide) * side + (m2 + wide)] += s;
        }
      }
    }
  }
  double mu_in = 0.0, mu_wide = 0.0;
  for (size_t ti = 0; ti < tscales.size(); ++ti) {
    for (long m1 = -wide; m1 <= wide; ++m1) {
      for (long m2 = -wide; m2 <= wide; ++m2) {
        const double s = acc[ti][static_cast<size_t>(m1 + wide) * side + (m2 + wide)];
        mu_wide = std::max(mu_wide, s);
        if (std::labs(m1) <= kmax && std::labs(m2) <= kmax) mu_in = std::max(mu_in, s);
      }
    }
  }
  if (window_ok && std::abs(mu_wide - mu_in) > 1e-6) *window_ok = false;
  return mu_in;
}

double relative_sparsity(const FreqGrid& grid, const WaveletFrame& wf, const Spectrum& comp,
                         int j, const std::vector<WaveletIndex>& cluster) {
  if (comp.n != grid.n) throw std::invalid_argument("relative_sparsity: size mismatch");
  const int n = grid.n;
  FftEngine fft(n);
  const int lo = std::max(2, j - 1);  // scales 0 and 1 have no lattice support
  const int hi = std::min(grid.j_max, j + 1);
  double total = 0.0;
  std::map<int, ComplexField> fields;
  for (int jp = lo; jp <= hi; ++jp) {
    if ((1L << (2 * jp)) > n || n % (1L << (2 * jp)) != 0)
      throw std::runtime_error("scale " + std::to_string(jp) +
                               " translate lattice does not divide the grid");
    Spectrum prod(n);
    const int r = wf.band_radius(jp);
    for (int f1 = -r; f1 <= r; ++f1) {
      if (f1 < -n / 2 || f1 >= n / 2) continue;
      for (int f2 = -r; f2 <= r; ++f2) {
        if (f2 < -n / 2 || f2 >= n / 2) continue;
        const double m = wf.symbol(jp, f1, f2);
        if (m == 0.0) continue;
        prod.atf(grid, f1, f2) = m * comp.atf(grid, f1, f2);
      }
    }
    ComplexField field = fft.inverse(prod);
    const int st = n >> (2 * jp);
    for (int p1 = 0; p1 < n; p1 += st)
      for (int p2 = 0; p2 < n; p2 += st) total += std::abs(field.at(p1, p2));
    fields.emplace(jp, std::move(field));
  }
  for (const WaveletIndex& idx : cluster) {
    auto it = fields.find(idx.j);
    if (it == fields.end()) continue;  // no lattice mass at that scale
    const auto pos = wf.decimated_grid_position(idx);
    total -= std::abs(it->second.at(pos[0], pos[1]));
  }
  return std::max(total, 0.0);
}

double relative_sparsity(const FreqGrid& grid, const ShearletFrame& sf, Variant variant,
                         const Spectrum& comp, int j, const std::vector<ShearletIndex>& cluster) {
  if (comp.n != grid.n) throw std::invalid_argument("relative_sparsity: size mismatch");
  const int n = grid.n;
  FftEngine fft(n);
  const int lo = std::max(sf.j_min(), j - 1);
  const int hi = std::min(grid.j_max, j + 1);

  std::map<int, std::vector<std::array<long, 2>>> members;
  for (const ShearletIndex& idx : cluster)
    members[sf.band_index(idx.band)].push_back({idx.k1, idx.k2});

  double total = 0.0;
  for (size_t bi = 0; bi < sf.bands().size(); ++bi) {
    const ShearletBand& band = sf.bands()[bi];
    if (band.j < lo || band.j > hi) continue;
    check_lattice_alignment(grid, sf, band.j);
    const ComplexField field = fft.inverse(sf.band_product(band, variant, comp));
    // translate lattice positions form the same product sublattice for every
    // shear: fine stride along the sheared axis, coarse stride along the other
    const int sfine = static_cast<int>(n / sf.fine_count(band.j));
    const int scoarse = static_cast<int>(n / sf.k1_count(band.j));
    const int st1 = band.cone == Cone::horizontal ? sfine : scoarse;
    const int st2 = band.cone == Cone::horizontal ? scoarse : sfine;
    for (int p1 = 0; p1 < n; p1 += st1)
      for (int p2 = 0; p2 < n; p2 += st2) total += std::abs(field.at(p1, p2));
    auto it = members.find(static_cast<int>(bi));
    if (it == members.end()) continue;
    for (const auto& k : it->second) {
      const auto pos = sf.decimated_grid_position({band, k[0], k[1]});
      total -= std::abs(field.at(pos[0], pos[1]));
    }
  }
  return std::max(total, 0.0);
}

double error_bound(double delta1, double delta2, double mu, double b1, double b2) {
  if (mu >= 0.5) return kInf;
  return 2.0 * std::max(b1, b2) * (delta1 + delta2) / (1.0 - 2.0 * mu);
}

CoherenceReport coherence_bound_check(const FreqGrid& grid, const WaveletFrame& wf,
                                      const ShearletFrame& sf, int j, const AlphaParams& p,
                                      int kmax) {
  CoherenceReport rep;
  rep.j = j;
  bool ok1 = true, ok2 = true;
  rep.mu1 = cluster_coherence(grid, wf, build_lambda1(grid, j, p), sf, Variant::dual, j, kmax,
                              &ok1);
  rep.mu2 = cluster_coherence(grid, sf, build_lambda2(grid, sf, j, p), Variant::primal, wf, j,
                              kmax, &ok2);
  rep.window_ok = ok1 && ok2;
  rep.flag = std::max(rep.mu1, rep.mu2) < 0.5;
  return rep;
}

double cross_decay_max(const FreqGrid& grid, const WaveletFrame& wf, const ShearletFrame& sf,
                       int j, Variant variant) {
  if (j < sf.j_min() || j > grid.j_max)
    throw std::invalid_argument("cross_decay_max: scale out of range");
  const int n = grid.n;
  FftEngine fft(n);
  std::vector<cplx> half(static_cast<size_t>(n) * (n / 2 + 1));
  GridImage field(n);
  double best = 0.0;
  for (const ShearletBand& band : sf.bands()) {
    if (band.j != j) continue;
    fill_cross_half(grid, wf, j, sf.band_symbol_map(band, variant), half);
    fft.inverse_c2r(half.data(), field.v.data());
    for (double v : field.v) best = std::max(best, std::abs(v));
  }
  return best;
}

std::vector<ScaleReport> separation_study(const FreqGrid& grid, const ModelSpec& models,
                                          const StudyOptions& opt) {
  const AlphaParams params(opt.alpha, opt.eps);
  const int n = grid.n;
  FftEngine fft(n);
  WaveletFrame wf(grid);
  ShearletFrame sf(grid, opt.alpha);
  const double b2 =
      opt.with_coherence ? sf.frame_bounds(Variant::primal).upper : 1.0;

  const Spectrum phat = point_spectrum(models.points, grid);
  const Spectrum lhat = models.has_line ? line_spectrum(models.line, grid) : Spectrum(n);

  std::vector<ScaleReport> reports;
  for (int j : opt.scales) {
    if (j < 2 || j > grid.j_max)
      throw std::invalid_argument("separation_study: scale " + std::to_string(j) +
                                  " outside the corona range [2, " +
                                  std::to_string(grid.j_max) + "]");
    ScaleReport rep;
    rep.j = j;
    const Spectrum pj = filter_subband(grid, phat, j);
    const Spectrum lj = filter_subband(grid, lhat, j);
    const GridImage pimg = fft.inverse_real(pj);
    const GridImage limg = fft.inverse_real(lj);
    GridImage fj(n);
    for (size_t i = 0; i < fj.v.size(); ++i) fj.v[i] = pimg.v[i] + limg.v[i];

    if (opt.with_coherence) {
      const CoherenceReport c = coherence_bound_check(grid, wf, sf, j, params, opt.kmax);
      rep.mu1 = c.mu1;
      rep.mu2 = c.mu2;
      rep.mu_flag = c.flag;
      rep.window_ok = c.window_ok;
    }
    if (opt.with_sparsity) {
      rep.delta1 = relative_sparsity(grid, wf, pj, j, build_lambda1(grid, j, params));
      rep.delta2 = relative_sparsity(grid, sf, Variant::primal, lj, j,
                                     build_lambda2(grid, sf, j, params));
    }
    rep.bound = (opt.with_coherence && opt.with_sparsity)
                    ? error_bound(rep.delta1, rep.delta2, std::max(rep.mu1, rep.mu2), 1.0, b2)
                    : kInf;

    const SeparationResult r = separate_subband(grid, fj, j, opt.alpha, opt.solver);
    rep.energy_points = l2_image(pimg);
    rep.energy_curves = l2_image(limg);
    rep.err_points_abs = l2_image(image_diff(r.points, pimg));
    rep.err_curves_abs = l2_image(image_diff(r.curves, limg));
    rep.err_points =
        rep.energy_points > 0.0 ? rep.err_points_abs / rep.energy_points : rep.err_points_abs;
    rep.err_curves =
        rep.energy_curves > 0.0 ? rep.err_curves_abs / rep.energy_curves : rep.err_curves_abs;
    rep.iterations = r.iterations;
    rep.kkt = r.kkt;
    rep.converged = r.converged;
    reports.push_back(rep);
  }

  if (!opt.out_dir.empty()) {
    std::filesystem::create_directories(opt.out_dir);
    if (opt.with_coherence) {
      CsvWriter cw(opt.out_dir + "/coherence.csv", "j,alpha,eps,mu1,mu2,flag");
      for (const ScaleReport& r : reports)
        cw.row({static_cast<double>(r.j), opt.alpha, opt.eps, r.mu1, r.mu2,
                r.mu_flag ? 1.0 : 0.0});
    }
    if (opt.with_sparsity) {
      CsvWriter sw(opt.out_dir + "/sparsity.csv", "j,delta1,delta2");
      for (const ScaleReport& r : reports)
        sw.row({static_cast<double>(r.j), r.delta1, r.delta2});
    }
    CsvWriter tw(opt.out_dir + "/study.csv", "j,errP,errC,bound,iters,kkt");
    for (const ScaleReport& r : reports)
      tw.row({static_cast<double>(r.j), r.err_points, r.err_curves, r.bound,
              static_cast<double>(r.iterations), r.kkt});
  }
  return reports;
}

}  // namespace gsep
