#include "gsep/shearlet_frame.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "gsep/wavelet_frame.hpp"

namespace gsep {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

double cone_factor(Cone cone, Variant variant, double f1, double f2) {
  if (cone == Cone::horizontal)
    return variant == Variant::primal ? chi_h(f1, f2) : gamma_h(f1, f2);
  return variant == Variant::primal ? chi_v(f1, f2) : gamma_v(f1, f2);
}

}  // namespace

ShearletFrame::ShearletFrame(const FreqGrid& grid, double alpha)
    : grid_(grid), alpha_(alpha), fft_(grid.n) {
  if (!(alpha >= 1.0 && alpha < 2.0))
    throw std::invalid_argument("shearlet frame: alpha must lie in [1, 2)");
  // band_index assumes this exact order: scales ascending, horizontal cone
  // before vertical, shears ascending
  for (int j = j_min(); j <= grid_.j_max; ++j) {
    int range = shear_range(j);
    for (Cone cone : {Cone::horizontal, Cone::vertical}) {
      for (int l = -range; l <= range; ++l) bands_.push_back({j, l, cone});
    }
  }
}

void ShearletFrame::check_band(const ShearletBand& band) const {
  if (band.j < 0) return;  // coarse band
  if (band.j < j_min() || band.j > grid_.j_max)
    throw std::invalid_argument("shearlet band: scale out of range");
  if (std::abs(band.l) > shear_range(band.j))
    throw std::invalid_argument("shearlet band: shear out of range");
}

int ShearletFrame::band_index(const ShearletBand& band) const {
  check_band(band);
  if (band.j < 0) throw std::invalid_argument("band_index: coarse band is stored separately");
  int idx = 0;
  for (int j = j_min(); j < band.j; ++j) idx += 2 * (2 * shear_range(j) + 1);
  int range = shear_range(band.j);
  if (band.cone == Cone::vertical) idx += 2 * range + 1;
  return idx + band.l + range;
}

int ShearletFrame::shear_range(int j) const {
  return static_cast<int>(std::ceil(2.0 * shear_scale(j)));
}

double ShearletFrame::shear_scale(int j) const { return std::exp2((2.0 - alpha_) * j); }

long ShearletFrame::k1_count(int j) const { return 1L << std::lround(alpha_ * j); }

long ShearletFrame::density(int j) const {
  if (j < 0) return 1;
  return fine_count(j) * k1_count(j);
}

double ShearletFrame::atom_norm(int j) const {
  return 1.0 / std::sqrt(static_cast<double>(density(j)));
}

int ShearletFrame::band_radius(int j) const {
  if (j < 1) return 0;
  long r = 1L << (2 * j - 2);
  return static_cast<int>(std::min<long>(r, grid_.n / 2));
}

double ShearletFrame::symbol_low(double f1, double f2) const {
  return (std::fabs(f1) < 0.5 && std::fabs(f2) < 0.5) ? 1.0 : 0.0;
}

double ShearletFrame::symbol(const ShearletBand& band, Variant variant, double f1,
                             double f2) const {
  check_band(band);
  if (band.j < 0) return symbol_low(f1, f2);
  double w = window_wj(band.j, f1, f2);
  if (w == 0.0) return 0.0;
  double c = cone_factor(band.cone, variant, f1, f2);
  if (c == 0.0) return 0.0;
  double r = band.cone == Cone::horizontal ? slope_ratio(f2, f1) : slope_ratio(f1, f2);
  double v = bump_v(shear_scale(band.j) * r - band.l);
  if (v == 0.0) return 0.0;
  return atom_norm(band.j) * c * w * v;
}

// Visits the lattice points where the band symbol can be nonzero: the slope
// window confines the off-axis frequency to a strip around l/shear_scale
// relative to the dominant axis, and the cone windows cut at slope 3/2.
template <typename Fn>
void ShearletFrame::for_each_band_point(const ShearletBand& band, Variant variant,
                                        Fn&& fn) const {
  const int n = grid_.n;
  const int radius = band_radius(band.j);
  const double s = shear_scale(band.j);
  const double nrm = atom_norm(band.j);
  const double inner = std::ldexp(1.0, 2 * band.j - 5);
  double rlo = std::max((band.l - 1.5) / s, -1.5);
  double rhi = std::min((band.l + 1.5) / s, 1.5);
  if (rlo >= rhi) return;
  for (int a = -radius; a <= radius; ++a) {
    if (a == 0 || a < -n / 2 || a > n / 2 - 1) continue;
    if (1.5 * std::abs(a) <= inner) continue;  // whole strip inside the corona hole
    double lo = a > 0 ? a * rlo : a * rhi;
    double hi = a > 0 ? a * rhi : a * rlo;
    int blo = std::max({static_cast<int>(std::ceil(lo)), -radius, -n / 2});
    int bhi = std::min({static_cast<int>(std::floor(hi)), radius, n / 2 - 1});
    for (int o = blo; o <= bhi; ++o) {
      int f1 = band.cone == Cone::horizontal ? a : o;
      int f2 = band.cone == Cone::horizontal ? o : a;
      double w = window_wj(band.j, f1, f2);
      if (w == 0.0) continue;
      double c = cone_factor(band.cone, variant, f1, f2);
      if (c == 0.0) continue;
      double r = band.cone == Cone::horizontal ? slope_ratio(f2, f1) : slope_ratio(f1, f2);
      double v = bump_v(s * r - band.l);
      if (v == 0.0) continue;
      fn(f1, f2, nrm * c * w * v);
    }
  }
}

Spectrum ShearletFrame::band_product(const ShearletBand& band, Variant variant,
                                     const Spectrum& spec) const {
  if (spec.n != grid_.n) throw std::invalid_argument("band_product: size mismatch");
  check_band(band);
  Spectrum out(grid_.n);
  if (band.j < 0) {
    out.at(0, 0) = spec.at(0, 0);
    return out;
  }
  for_each_band_point(band, variant, [&](int f1, int f2, double m) {
    out.atf(grid_, f1, f2) = m * spec.atf(grid_, f1, f2);
  });
  return out;
}

GridImage ShearletFrame::band_symbol_map(const ShearletBand& band, Variant variant) const {
  check_band(band);
  GridImage out(grid_.n);
  if (band.j < 0) {
    out.at(0, 0) = 1.0;
    return out;
  }
  for_each_band_point(band, variant, [&](int f1, int f2, double m) {
    out.at(grid_.index(f1), grid_.index(f2)) = m;
  });
  return out;
}

ShearletCoeffs ShearletFrame::analyze(const GridImage& img, Variant variant) const {
  return analyze(fft_.forward(img), variant);
}

ShearletCoeffs ShearletFrame::analyze(const Spectrum& spec, Variant variant) const {
  if (spec.n != grid_.n) throw std::invalid_argument("analyze: size mismatch");
  ShearletCoeffs out;
  out.n = grid_.n;
  out.band.reserve(bands_.size());
  for (const ShearletBand& band : bands_)
    out.band.push_back(fft_.inverse(band_product(band, variant, spec)));
  Spectrum lowband(grid_.n);
  lowband.at(0, 0) = spec.at(0, 0);
  out.low = fft_.inverse(lowband);
  return out;
}

Spectrum ShearletFrame::synthesize_spectrum(const ShearletCoeffs& coeffs,
                                            Variant variant) const {
  if (coeffs.n != grid_.n || coeffs.band.size() != bands_.size())
    throw std::invalid_argument("synthesize: coefficient shape mismatch");
  Spectrum acc(grid_.n);
  for (std::size_t i = 0; i < bands_.size(); ++i) {
    Spectrum chat = fft_.forward(coeffs.band[i]);
    double d = static_cast<double>(density(bands_[i].j));
    for_each_band_point(bands_[i], variant, [&](int f1, int f2, double m) {
      acc.atf(grid_, f1, f2) += d * m * chat.atf(grid_, f1, f2);
    });
  }
  Spectrum lhat = fft_.forward(coeffs.low);
  acc.at(0, 0) += lhat.at(0, 0);
  return acc;
}

GridImage ShearletFrame::synthesize(const ShearletCoeffs& coeffs, Variant variant) const {
  return fft_.inverse_real(synthesize_spectrum(coeffs, variant));
}

Spectrum ShearletFrame::reconstruct_spectrum(const Spectrum& spec,
                                             Variant analysis_variant) const {
  if (spec.n != grid_.n) throw std::invalid_argument("reconstruct: size mismatch");
  Variant synthesis_variant =
      analysis_variant == Variant::primal ? Variant::dual : Variant::primal;
  Spectrum acc(grid_.n);
  for (const ShearletBand& band : bands_) {
    ComplexField field = fft_.inverse(band_product(band, analysis_variant, spec));
    Spectrum chat = fft_.forward(field);
    double d = static_cast<double>(density(band.j));
    for_each_band_point(band, synthesis_variant, [&](int f1, int f2, double m) {
      acc.atf(grid_, f1, f2) += d * m * chat.atf(grid_, f1, f2);
    });
  }
  acc.at(0, 0) += spec.at(0, 0);  // coarse projector passes the origin through
  return acc;
}

double ShearletFrame::duality_aggregate(double f1, double f2) const {
  double low = symbol_low(f1, f2);
  double acc = low * low;
  for (int j = j_min(); j <= grid_.j_max; ++j) {
    double w = window_wj(j, f1, f2);
    if (w == 0.0) continue;
    double s = shear_scale(j);
    int range = shear_range(j);
    for (Cone cone : {Cone::horizontal, Cone::vertical}) {
      double cp = cone_factor(cone, Variant::primal, f1, f2);
      double cd = cone_factor(cone, Variant::dual, f1, f2);
      if (cp == 0.0 || cd == 0.0) continue;
      double r = cone == Cone::horizontal ? slope_ratio(f2, f1) : slope_ratio(f1, f2);
      double center = s * r;
      long lo = std::max<long>(-range, static_cast<long>(std::ceil(center - 1.5)));
      long hi = std::min<long>(range, static_cast<long>(std::floor(center + 1.5)));
      double vsum = 0.0;
      for (long l = lo; l <= hi; ++l) {
        double v = bump_v(center - l);
        vsum += v * v;
      }
      // density * atom_norm^2 == 1, so each band contributes c_p c_d W^2 V^2
      acc += cp * cd * w * w * vsum;
    }
  }
  return acc;
}

double ShearletFrame::unwindowed_cone_aggregate(Cone cone, double f1, double f2) const {
  double acc = 0.0;
  double r = cone == Cone::horizontal ? slope_ratio(f2, f1) : slope_ratio(f1, f2);
  if (!std::isfinite(r)) return 0.0;
  for (int j = j_min(); j <= grid_.j_max; ++j) {
    double w = window_wj(j, f1, f2);
    if (w == 0.0) continue;
    double center = shear_scale(j) * r;
    int range = shear_range(j);
    long lo = std::max<long>(-range, static_cast<long>(std::ceil(center - 1.5)));
    long hi = std::min<long>(range, static_cast<long>(std::floor(center + 1.5)));
    double vsum = 0.0;
    for (long l = lo; l <= hi; ++l) {
      double v = bump_v(center - l);
      vsum += v * v;
    }
    acc += w * w * vsum;
  }
  return acc;
}

FrameBounds ShearletFrame::frame_bounds(Variant variant) const {
  FrameBounds out{std::numeric_limits<double>::infinity(),
                  -std::numeric_limits<double>::infinity()};
  int radius = grid_.covered_radius;
  for (int f1 = -radius; f1 <= radius; ++f1) {
    for (int f2 = -radius; f2 <= radius; ++f2) {
      double low = symbol_low(f1, f2);
      double g = low * low;
      for (int j = j_min(); j <= grid_.j_max; ++j) {
        double w = window_wj(j, f1, f2);
        if (w == 0.0) continue;
        double s = shear_scale(j);
        int range = shear_range(j);
        for (Cone cone : {Cone::horizontal, Cone::vertical}) {
          double c = cone_factor(cone, variant, f1, f2);
          if (c == 0.0) continue;
          double r = cone == Cone::horizontal ? slope_ratio(f2, f1) : slope_ratio(f1, f2);
          double center = s * r;
          long lo = std::max<long>(-range, static_cast<long>(std::ceil(center - 1.5)));
          long hi = std::min<long>(range, static_cast<long>(std::floor(center + 1.5)));
          double vsum = 0.0;
          for (long l = lo; l <= hi; ++l) {
            double v = bump_v(center - l);
            vsum += v * v;
          }
          g += c * c * w * w * vsum;
        }
      }
      out.lower = std::min(out.lower, g);
      out.upper = std::max(out.upper, g);
    }
  }
  return out;
}

double ShearletFrame::coeffs_l1(const ShearletCoeffs& coeffs) const {
  double nn = static_cast<double>(grid_.n) * grid_.n;
  double acc = 0.0;
  for (std::size_t i = 0; i < bands_.size(); ++i) {
    double w = static_cast<double>(density(bands_[i].j)) / nn;
    for (const cplx& z : coeffs.band[i].v) acc += w * std::abs(z);
  }
  for (const cplx& z : coeffs.low.v) acc += std::abs(z) / nn;
  return acc;
}

double ShearletFrame::coeffs_l2_sq(const ShearletCoeffs& coeffs) const {
  double nn = static_cast<double>(grid_.n) * grid_.n;
  double acc = 0.0;
  for (std::size_t i = 0; i < bands_.size(); ++i) {
    double w = static_cast<double>(density(bands_[i].j)) / nn;
    for (const cplx& z : coeffs.band[i].v) acc += w * std::norm(z);
  }
  for (const cplx& z : coeffs.low.v) acc += std::norm(z) / nn;
  return acc;
}

std::array<double, 2> ShearletFrame::translate(const ShearletIndex& idx) const {
  check_band(idx.band);
  if (idx.band.j < 0)
    return {static_cast<double>(idx.k1), static_cast<double>(idx.k2)};
  double fine = std::ldexp(1.0, -2 * idx.band.j);
  double coarse = 1.0 / static_cast<double>(k1_count(idx.band.j));
  if (idx.band.cone == Cone::horizontal)
    return {static_cast<double>(idx.k1 - static_cast<long>(idx.band.l) * idx.k2) * fine,
            static_cast<double>(idx.k2) * coarse};
  return {static_cast<double>(idx.k1) * coarse,
          static_cast<double>(idx.k2 - static_cast<long>(idx.band.l) * idx.k1) * fine};
}

Spectrum ShearletFrame::atom_spectrum(const ShearletIndex& idx, Variant variant) const {
  check_band(idx.band);
  Spectrum out(grid_.n);
  if (idx.band.j < 0) {
    // integer translates modulate trivially on the integer lattice
    out.at(0, 0) = 1.0;
    return out;
  }
  std::array<double, 2> t = translate(idx);
  for_each_band_point(idx.band, variant, [&](int f1, int f2, double m) {
    double phase = kTwoPi * (f1 * t[0] + f2 * t[1]);
    out.atf(grid_, f1, f2) = m * cplx(std::cos(phase), std::sin(phase));
  });
  return out;
}

std::array<int, 2> ShearletFrame::decimated_grid_position(const ShearletIndex& idx) const {
  check_band(idx.band);
  const long n = grid_.n;
  if (idx.band.j < 0) return {0, 0};
  long fine = 1L << (2 * idx.band.j);
  long coarse = k1_count(idx.band.j);
  if (fine > n || n % fine != 0 || coarse > n || n % coarse != 0)
    throw std::invalid_argument("decimated lattice does not align with the grid");
  long fstep = n / fine;
  long cstep = n / coarse;
  long num1, num2;
  if (idx.band.cone == Cone::horizontal) {
    num1 = (idx.k1 - static_cast<long>(idx.band.l) * idx.k2) * fstep;
    num2 = idx.k2 * cstep;
  } else {
    num1 = idx.k1 * cstep;
    num2 = (idx.k2 - static_cast<long>(idx.band.l) * idx.k1) * fstep;
  }
  auto wrap = [n](long num) {
    long p = (-num) % n;
    return static_cast<int>(p < 0 ? p + n : p);
  };
  // the coefficient field holds <f, atom at -x>, so the sample sits at -t
  return {wrap(num1), wrap(num2)};
}

cplx ShearletFrame::decimated_sample(const ShearletCoeffs& coeffs,
                                     const ShearletIndex& idx) const {
  if (coeffs.n != grid_.n) throw std::invalid_argument("decimated_sample: size mismatch");
  if (idx.band.j < 0) return coeffs.low.at(0, 0);
  std::array<int, 2> pos = decimated_grid_position(idx);
  return coeffs.band[band_index(idx.band)].at(pos[0], pos[1]);
}

cplx atom_inner_product(const WaveletFrame& wavelets, const WaveletIndex& w,
                        const ShearletFrame& shearlets, const ShearletIndex& s,
                        Variant variant) {
  const FreqGrid& grid = wavelets.grid();
  if (grid.n != shearlets.grid().n)
    throw std::invalid_argument("atom_inner_product: grid mismatch");
  auto wavelet_symbol = [&](double f1, double f2) {
    return w.j < 0 ? wavelets.symbol_low(f1, f2) : wavelets.symbol(w.j, f1, f2);
  };
  if (s.band.j < 0) return wavelet_symbol(0.0, 0.0);
  double wstep = w.j < 0 ? 1.0 : std::ldexp(1.0, -2 * w.j);
  std::array<double, 2> tw{w.m1 * wstep, w.m2 * wstep};
  std::array<double, 2> ts = shearlets.translate(s);
  int radius = std::min(shearlets.band_radius(s.band.j), grid.n / 2);
  cplx acc = 0.0;
  for (int f1 = -radius; f1 <= radius; ++f1) {
    if (f1 < -grid.n / 2 || f1 > grid.n / 2 - 1) continue;
    for (int f2 = -radius; f2 <= radius; ++f2) {
      if (f2 < -grid.n / 2 || f2 > grid.n / 2 - 1) continue;
      double ms = shearlets.symbol(s.band, variant, f1, f2);
      if (ms == 0.0) continue;
      double mw = wavelet_symbol(f1, f2);
      if (mw == 0.0) continue;
      double phase = kTwoPi * (f1 * (tw[0] - ts[0]) + f2 * (tw[1] - ts[1]));
      acc += mw * ms * cplx(std::cos(phase), std::sin(phase));
    }
  }
  return acc;
}

}  // namespace gsep
