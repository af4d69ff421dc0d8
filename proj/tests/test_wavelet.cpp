#include <cmath>
#include <complex>
#include <random>

#include "doctest.h"
#include "gsep/grid.hpp"
#include "gsep/wavelet_frame.hpp"

using namespace gsep;

namespace {

// random real image whose spectrum lives on the covered band
GridImage random_covered_image(const FreqGrid& g, FftEngine& fft, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Spectrum s(g.n);
  for (int f1 = -g.covered_radius; f1 <= g.covered_radius; ++f1)
    for (int f2 = -g.covered_radius; f2 <= g.covered_radius; ++f2)
      s.atf(g, f1, f2) = cplx(u(rng), u(rng));
  Spectrum sym(g.n);
  for (int k1 = 0; k1 < g.n; ++k1)
    for (int k2 = 0; k2 < g.n; ++k2)
      sym.at(k1, k2) = 0.5 * (s.at(k1, k2) +
                              std::conj(s.at((g.n - k1) % g.n, (g.n - k2) % g.n)));
  double resid = 1.0;
  GridImage img = fft.inverse_real(sym, &resid);
  REQUIRE(resid < 1e-10);
  return img;
}

}  // namespace

TEST_CASE("wavelet parseval and roundtrip") {
  const FreqGrid g = FreqGrid::make(64);
  FftEngine fft(g.n);
  WaveletFrame wf(g);
  for (unsigned seed : {5u, 6u, 7u}) {
    const GridImage f = random_covered_image(g, fft, seed);
    const double nf = image_norm_sq(f);
    REQUIRE(nf > 0.0);
    const WaveletCoeffs c = wf.analyze(f);
    CHECK(std::abs(c.l2_sq() - nf) / nf < 1e-10);
    const GridImage back = wf.synthesize(c);
    double err = 0.0;
    for (size_t i = 0; i < f.v.size(); ++i) err += (back.v[i] - f.v[i]) * (back.v[i] - f.v[i]);
    CHECK(std::sqrt(err / (g.n * double(g.n)) / nf) < 1e-10);
  }
}

TEST_CASE("wavelet coefficients match atom inner products") {
  const FreqGrid g = FreqGrid::make(64);
  FftEngine fft(g.n);
  WaveletFrame wf(g);
  const GridImage f = random_covered_image(g, fft, 9);
  const Spectrum fh = fft.forward(f);
  const WaveletCoeffs c = wf.analyze(f);
  const WaveletIndex picks[] = {
      {2, 0, 0}, {2, 5, 11}, {2, -3, 7}, {3, 100, -17}, {3, 255, 255}, {-1, 0, 0}, {-1, 2, -4}};
  for (const WaveletIndex& idx : picks) {
    const Spectrum atom = wf.atom_spectrum(idx);
    const cplx want = plancherel_inner(fh, atom);
    const cplx got = wf.decimated_sample(c, idx);
    CHECK(std::abs(got - want) < 1e-12);
  }
}

TEST_CASE("wavelet symbol geometry") {
  const FreqGrid g = FreqGrid::make(256);
  WaveletFrame wf(g);
  CHECK(wf.density(0) == 1);
  CHECK(wf.density(2) == 256);
  CHECK(wf.density(3) == 4096);
  CHECK(wf.band_radius(2) == 4);
  CHECK(wf.band_radius(4) == 64);
  CHECK(wf.symbol(2, 2.0, 0.0) == doctest::Approx(0.0625).epsilon(1e-14));
  CHECK(wf.symbol(2, 0.5, 0.0) == 0.0);
  CHECK(wf.symbol(2, 4.0, 1.0) == 0.0);
  WaveletCoeffs c;
  c.n = g.n;
  c.j_max = g.j_max;
  CHECK(c.weight(2) == doctest::Approx(256.0 / (256.0 * 256.0)).epsilon(1e-15));
  CHECK(c.weight(-1) == doctest::Approx(1.0 / (256.0 * 256.0)).epsilon(1e-15));
}

TEST_CASE("wavelet atoms across distant scales are orthogonal") {
  const FreqGrid g = FreqGrid::make(256);
  WaveletFrame wf(g);
  const Spectrum a = wf.atom_spectrum({2, 1, 2});
  const Spectrum b = wf.atom_spectrum({4, 3, -1});
  CHECK(std::abs(plancherel_inner(a, b)) == 0.0);
  const Spectrum c = wf.atom_spectrum({3, 0, 0});
  CHECK(std::abs(plancherel_inner(a, c)) > 0.0);
}

TEST_CASE("low band is the zero-frequency projector") {
  const FreqGrid g = FreqGrid::make(64);
  WaveletFrame wf(g);
  CHECK(wf.symbol_low(0.0, 0.0) == 1.0);
  for (int f1 = -8; f1 <= 8; ++f1)
    for (int f2 = -8; f2 <= 8; ++f2) {
      if (f1 == 0 && f2 == 0) continue;
      CHECK(wf.symbol_low(f1, f2) == 0.0);
    }
  FftEngine fft(g.n);
  const GridImage f = random_covered_image(g, fft, 12);
  const Spectrum fh = fft.forward(f);
  const WaveletCoeffs c = wf.analyze(f);
  // the low coefficient field is constant at the mean value f_hat(0)
  for (const cplx& z : c.low.v) CHECK(std::abs(z - fh.at(0, 0)) < 1e-12);
}
