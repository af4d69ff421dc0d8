// Command-line driver: model generation, corona decomposition, subband
// separation, coherence/sparsity diagnostics, and report emission. Fields go
// to GSEP1 binary files, tables to CSV; identical configs give identical
// outputs. Exit codes: 0 success, 2 configuration or input error, 3 solver
// hit the iteration cap (results still written).
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "gsep/diagnostics.hpp"
#include "gsep/grid.hpp"
#include "gsep/io.hpp"
#include "gsep/models.hpp"
#include "gsep/separation.hpp"
#include "gsep/shearlet_frame.hpp"
#include "gsep/wavelet_frame.hpp"

namespace fs = std::filesystem;
using namespace gsep;

namespace {

struct Options {
  int grid = 256;
  double alpha = 1.0;
  double eps = -1.0;  // negative: auto min(0.1, (2 - alpha)/8)
  std::string model;
  std::string out = "out";
  long max_iters = 5000;
  double tol = 1e-5;
  std::vector<int> scales;
  std::vector<double> sweep_alpha;
  bool dump_symbols = false;
  bool low_band_to_points = true;
  int kmax = 32;
};

double effective_eps(const Options& o, double alpha) {
  return o.eps > 0.0 ? o.eps : std::min(0.1, (2.0 - alpha) / 8.0);
}

SolverConfig solver_config(const Options& o) {
  SolverConfig cfg;
  cfg.max_iters = o.max_iters;
  cfg.tol_kkt = o.tol;
  cfg.tol_change = o.tol * 1e-2;
  cfg.low_band_to_points = o.low_band_to_points;
  return cfg;
}

std::vector<int> effective_scales(const Options& o, const FreqGrid& grid) {
  if (!o.scales.empty()) {
    for (int j : o.scales)
      if (j < 2 || j > grid.j_max)
        throw std::invalid_argument("scale " + std::to_string(j) + " outside [2, " +
                                    std::to_string(grid.j_max) + "] for n=" +
                                    std::to_string(grid.n));
    return o.scales;
  }
  std::vector<int> s;
  for (int j = 2; j <= grid.j_max; ++j) s.push_back(j);
  return s;
}

// Origin-aligned canonical models matching the cluster geometry used by the
// certificates: one unit point source at (0,0) and the weighted line through
// the origin.
ModelSpec canonical_models() {
  ModelSpec m;
  PointSource p;
  p.x1 = 0.0;
  p.x2 = 0.0;
  p.lambda = 1.5;
  p.c = 1.0;
  m.points.push_back(p);
  m.has_line = true;
  m.line.rho = 0.25;
  m.line.offset = 0.0;
  return m;
}

ModelSpec load_required_model(const Options& o, const char* cmd) {
  if (o.model.empty())
    throw std::invalid_argument(std::string(cmd) + " requires --model <file>");
  ModelSpec m = ModelSpec::load(o.model);
  if (m.empty()) throw std::invalid_argument("model file defines no components: " + o.model);
  return m;
}

double l2(const GridImage& a) { return std::sqrt(image_norm_sq(a)); }

double l2_diff(const GridImage& a, const GridImage& b) {
  double s = 0.0;
  for (size_t i = 0; i < a.v.size(); ++i) {
    const double d = a.v[i] - b.v[i];
    s += d * d;
  }
  return std::sqrt(s / static_cast<double>(a.v.size()));
}

int cmd_gen(const Options& o) {
  const FreqGrid grid = FreqGrid::make(o.grid);
  const ModelSpec models = load_required_model(o, "gen");
  fs::create_directories(o.out);
  FftEngine fft(grid.n);
  const GridImage p = fft.inverse_real(point_spectrum(models.points, grid));
  const GridImage c = models.has_line ? fft.inverse_real(line_spectrum(models.line, grid))
                                      : GridImage(grid.n);
  GridImage f(grid.n);
  for (size_t i = 0; i < f.v.size(); ++i) f.v[i] = p.v[i] + c.v[i];
  write_field(o.out + "/points.gsep", p);
  write_field(o.out + "/curves.gsep", c);
  write_field(o.out + "/image.gsep", f);
  std::ofstream mf(o.out + "/model.txt");
  if (!mf) throw std::runtime_error("cannot write " + o.out + "/model.txt");
  mf << "# grid=" << grid.n << "\n" << models.serialize();
  std::printf("gen: n=%d, %zu point(s), line=%s -> %s/{points,curves,image}.gsep\n", grid.n,
              models.points.size(), models.has_line ? "yes" : "no", o.out.c_str());
  return 0;
}

int cmd_decompose(const Options& o, const std::string& input) {
  const GridImage img = read_real_field(input);
  const FreqGrid grid = FreqGrid::make(img.n);
  FftEngine fft(grid.n);
  const Spectrum spec = fft.forward(img);
  const SubbandStack stack = decompose(grid, spec);
  fs::create_directories(o.out);
  for (int j = 0; j <= grid.j_max; ++j)
    write_spectrum(o.out + "/band_" + std::to_string(j) + ".gsep", stack.band[j]);
  write_spectrum(o.out + "/low.gsep", stack.low);
  const std::vector<double> en = subband_energies(grid, spec);
  CsvWriter ew(o.out + "/energies.csv", "j,energy");
  for (int j = 0; j <= grid.j_max; ++j) ew.row({static_cast<double>(j), en[j]});
  std::printf("decompose: n=%d, scales 0..%d -> %s/band_*.gsep, low.gsep, energies.csv\n",
              grid.n, grid.j_max, o.out.c_str());
  return 0;
}

int cmd_separate(const Options& o) {
  const FreqGrid grid = FreqGrid::make(o.grid);
  const ModelSpec models = load_required_model(o, "separate");
  const double eps = effective_eps(o, o.alpha);
  const AlphaParams params(o.alpha, eps);
  const SolverConfig cfg = solver_config(o);
  const std::vector<int> scales = effective_scales(o, grid);
  fs::create_directories(o.out);

  FftEngine fft(grid.n);
  WaveletFrame wf(grid);
  ShearletFrame sf(grid, o.alpha);
  const double b2 = sf.frame_bounds(Variant::primal).upper;
  const Spectrum phat = point_spectrum(models.points, grid);
  const Spectrum lhat =
      models.has_line ? line_spectrum(models.line, grid) : Spectrum(grid.n);
  GridImage fimg(grid.n);
  {
    Spectrum fh(grid.n);
    for (size_t i = 0; i < fh.v.size(); ++i) fh.v[i] = phat.v[i] + lhat.v[i];
    fimg = fft.inverse_real(fh);
  }

  CsvWriter study(o.out + "/study.csv", "j,errP,errC,bound,iters,kkt");
  CsvWriter coh(o.out + "/coherence.csv", "j,alpha,eps,mu1,mu2,flag");
  CsvWriter spar(o.out + "/sparsity.csv", "j,delta1,delta2");
  Spectrum pacc(grid.n), cacc(grid.n);
  bool all_converged = true;
  for (int j : scales) {
    const Spectrum pj = filter_subband(grid, phat, j);
    const Spectrum lj = filter_subband(grid, lhat, j);
    const GridImage pimg = fft.inverse_real(pj);
    const GridImage limg = fft.inverse_real(lj);
    GridImage fj(grid.n);
    for (size_t i = 0; i < fj.v.size(); ++i) fj.v[i] = pimg.v[i] + limg.v[i];

    const SeparationResult r = separate_subband(grid, fj, j, o.alpha, cfg);
    all_converged = all_converged && r.converged;
    const std::string tag = "/scale_" + std::to_string(j);
    write_field(o.out + tag + "_points.gsep", r.points);
    write_field(o.out + tag + "_curves.gsep", r.curves);
    {
      CsvWriter tr(o.out + "/trace_" + std::to_string(j) + ".csv",
                   "iter,objective,best_objective,change,kkt");
      for (const TraceRow& row : r.trace)
        tr.row({static_cast<double>(row.iter), row.objective, row.best_objective, row.change,
                row.kkt});
    }

    const CoherenceReport c = coherence_bound_check(grid, wf, sf, j, params, o.kmax);
    const double d1 = relative_sparsity(grid, wf, pj, j, build_lambda1(grid, j, params));
    const double d2 = relative_sparsity(grid, sf, Variant::primal, lj, j,
                                        build_lambda2(grid, sf, j, params));
    const double bound = error_bound(d1, d2, std::max(c.mu1, c.mu2), 1.0, b2);
    const double pn = l2(pimg), ln = l2(limg);
    const double ep = pn > 0.0 ? l2_diff(r.points, pimg) / pn : l2_diff(r.points, pimg);
    const double ec = ln > 0.0 ? l2_diff(r.curves, limg) / ln : l2_diff(r.curves, limg);
    study.row({static_cast<double>(j), ep, ec, bound, static_cast<double>(r.iterations),
               r.kkt});
    coh.row({static_cast<double>(j), o.alpha, eps, c.mu1, c.mu2, c.flag ? 1.0 : 0.0});
    spar.row({static_cast<double>(j), d1, d2});
    std::printf("separate: j=%d iters=%ld errP=%.3g errC=%.3g%s\n", j, r.iterations, ep, ec,
                r.converged ? "" : " (not converged)");

    const Spectrum pw = filter_subband(grid, fft.forward(r.points), j);
    const Spectrum cw = filter_subband(grid, fft.forward(r.curves), j);
    for (size_t i = 0; i < pacc.v.size(); ++i) {
      pacc.v[i] += pw.v[i];
      cacc.v[i] += cw.v[i];
    }
  }

  // one side through the reconstruction filters, the other the exact
  // remainder carrying the coarse band and uncovered frequencies
  GridImage points(grid.n), curves(grid.n);
  if (cfg.low_band_to_points) {
    curves = fft.inverse_real(cacc);
    for (size_t i = 0; i < points.v.size(); ++i) points.v[i] = fimg.v[i] - curves.v[i];
  } else {
    points = fft.inverse_real(pacc);
    for (size_t i = 0; i < curves.v.size(); ++i) curves.v[i] = fimg.v[i] - points.v[i];
  }
  write_field(o.out + "/points.gsep", points);
  write_field(o.out + "/curves.gsep", curves);
  if (!all_converged)
    std::fprintf(stderr, "warning: iteration cap reached on at least one scale\n");
  return all_converged ? 0 : 3;
}

int cmd_diagnose(const Options& o) {
  const FreqGrid grid = FreqGrid::make(o.grid);
  fs::create_directories(o.out);
  const std::vector<double> alphas =
      o.sweep_alpha.empty() ? std::vector<double>{o.alpha} : o.sweep_alpha;
  const std::vector<int> scales = effective_scales(o, grid);
  const ModelSpec models = canonical_models();
  FftEngine fft(grid.n);
  WaveletFrame wf(grid);
  const Spectrum phat = point_spectrum(models.points, grid);
  const Spectrum lhat = line_spectrum(models.line, grid);

  CsvWriter coh(o.out + "/coherence.csv", "j,alpha,eps,mu1,mu2,flag");
  CsvWriter spar(o.out + "/sparsity.csv", "j,delta1,delta2");
  for (double a : alphas) {
    const double eps = effective_eps(o, a);
    const AlphaParams params(a, eps);
    ShearletFrame sf(grid, a);
    for (int j : scales) {
      const CoherenceReport c = coherence_bound_check(grid, wf, sf, j, params, o.kmax);
      if (!c.window_ok)
        std::fprintf(stderr, "warning: coherence window not converged at j=%d alpha=%g\n", j,
                     a);
      coh.row({static_cast<double>(j), a, eps, c.mu1, c.mu2, c.flag ? 1.0 : 0.0});
      const double d1 =
          relative_sparsity(grid, wf, filter_subband(grid, phat, j), j,
                            build_lambda1(grid, j, params));
      const double d2 =
          relative_sparsity(grid, sf, Variant::primal, filter_subband(grid, lhat, j), j,
                            build_lambda2(grid, sf, j, params));
      spar.row({static_cast<double>(j), d1, d2});
      std::printf("diagnose: j=%d alpha=%g mu1=%.4g mu2=%.4g flag=%d d1=%.4g d2=%.4g\n", j, a,
                  c.mu1, c.mu2, c.flag ? 1 : 0, d1, d2);
    }
    if (o.dump_symbols) {
      // tiling maps for the first requested scale, both variants
      const int j = scales.front();
      char name[160];
      for (const ShearletBand& band : sf.bands()) {
        if (band.j != j) continue;
        for (Variant v : {Variant::primal, Variant::dual}) {
          std::snprintf(name, sizeof(name), "%s/symbol_a%g_j%d_l%d_%s_%s.gsep",
                        o.out.c_str(), a, band.j, band.l,
                        band.cone == Cone::horizontal ? "h" : "v",
                        v == Variant::primal ? "primal" : "dual");
          write_field(name, sf.band_symbol_map(band, v));
        }
      }
    }
  }
  return 0;
}

// minimal CSV reader for report: header line then numeric rows
std::vector<std::vector<double>> read_csv(const std::string& path, std::string* header) {
  std::ifstream in(path);
  if (!in) return {};
  std::string line;
  if (!std::getline(in, line)) return {};
  if (header) *header = line;
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) row.push_back(std::strtod(cell.c_str(), nullptr));
    rows.push_back(std::move(row));
  }
  return rows;
}

int cmd_report(const Options& o) {
  std::string h;
  const auto study = read_csv(o.out + "/study.csv", &h);
  const auto coh = read_csv(o.out + "/coherence.csv", &h);
  const auto spar = read_csv(o.out + "/sparsity.csv", &h);
  if (study.empty() && coh.empty() && spar.empty())
    throw std::invalid_argument("no CSV outputs found in " + o.out);

  std::ostringstream rep;
  rep << "separation report (" << o.out << ")\n";
  if (!coh.empty()) {
    rep << "\ncluster coherence (flag: max < 1/2)\n";
    for (const auto& r : coh)
      if (r.size() >= 6) {
        char buf[160];
        std::snprintf(buf, sizeof(buf), "  j=%-2d alpha=%-4g eps=%-5g mu1=%-10.4g mu2=%-10.4g %s\n",
                      static_cast<int>(r[0]), r[1], r[2], r[3], r[4],
                      r[5] > 0.5 ? "ok" : "FAILED");
        rep << buf;
      }
  }
  if (!spar.empty()) {
    rep << "\nrelative sparsity outside the clusters\n";
    for (const auto& r : spar)
      if (r.size() >= 3) {
        char buf[120];
        std::snprintf(buf, sizeof(buf), "  j=%-2d delta1=%-12.5g delta2=%-12.5g\n",
                      static_cast<int>(r[0]), r[1], r[2]);
        rep << buf;
      }
  }
  if (!study.empty()) {
    rep << "\nper-scale separation errors\n";
    for (const auto& r : study)
      if (r.size() >= 6) {
        char buf[200];
        std::snprintf(buf, sizeof(buf),
                      "  j=%-2d errP=%-10.4g errC=%-10.4g total=%-10.4g bound=%-10.4g "
                      "iters=%-5d kkt=%.3g\n",
                      static_cast<int>(r[0]), r[1], r[2], r[1] + r[2], r[3],
                      static_cast<int>(r[4]), r[5]);
        rep << buf;
      }
  }
  const std::string text = rep.str();
  std::fputs(text.c_str(), stdout);
  std::ofstream out(o.out + "/report.txt");
  if (!out) throw std::runtime_error("cannot write " + o.out + "/report.txt");
  out << text;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"pointlike + curvelike image separation over dual frame systems"};
  app.require_subcommand(1);
  Options o;
  std::string decompose_input;

  app.set_config("--config", "", "key=value config file; # starts a comment");
  app.add_option("--grid", o.grid, "grid size N, power of two >= 16")->capture_default_str();
  app.add_option("--alpha", o.alpha, "anisotropy in [1,2)")->capture_default_str();
  app.add_option("--eps", o.eps,
                 "cluster growth rate, must lie in (0,(2-alpha)/4); default min(0.1,(2-alpha)/8)");
  app.add_option("--model", o.model, "model description file");
  app.add_option("--out", o.out, "output directory")->capture_default_str();
  app.add_option("--max-iters", o.max_iters, "solver iteration cap")->capture_default_str();
  app.add_option("--tol", o.tol, "solver optimality tolerance; iterate-change tolerance is 1e-2 of it")
      ->capture_default_str();
  app.add_option("--scales", o.scales, "subband scales, e.g. 2,3,4; default all valid scales")
      ->delimiter(',');
  app.add_option("--sweep-alpha", o.sweep_alpha, "diagnose over these alpha values")
      ->delimiter(',');
  app.add_option("--kmax", o.kmax, "coherence translate search half-width")->capture_default_str();
  app.add_flag("--dump-symbols", o.dump_symbols,
               "diagnose: write tiling symbol maps for the first requested scale");
  app.add_flag("!--low-band-to-curves", o.low_band_to_points,
               "send the coarse band to the curve part instead of the point part");

  CLI::App* gen = app.add_subcommand("gen", "write model component fields and their sum");
  CLI::App* dec = app.add_subcommand("decompose", "split an image into corona subbands");
  dec->add_option("input", decompose_input, "GSEP1 real field file")->required();
  CLI::App* sep = app.add_subcommand(
      "separate", "separate each model subband into point and curve parts");
  CLI::App* dia = app.add_subcommand(
      "diagnose", "coherence/sparsity certificates for the canonical origin-aligned models");
  CLI::App* rep = app.add_subcommand("report", "summarize CSV outputs from --out");
  for (CLI::App* s : {gen, dec, sep, dia, rep}) s->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (gen->parsed()) return cmd_gen(o);
    if (dec->parsed()) return cmd_decompose(o, decompose_input);
    if (sep->parsed()) return cmd_separate(o);
    if (dia->parsed()) return cmd_diagnose(o);
    if (rep->parsed()) return cmd_report(o);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 2;
}
