// Discrete torus [0,1)^2 at N x N with integer frequency lattice Z^2 cap [-N/2, N/2)^2.
// Forward transform approximates Fourier-series coefficients: hat f(xi) =
// (1/N^2) sum_n f(n/N) e^{-2 pi i n.xi / N}; inverse is the plain Fourier sum.
// Plancherel: sum_xi |hat f|^2 = (1/N^2) sum_n |f|^2.
#pragma once

#include <complex>
#include <cstdint>
#include <memory>
#include <vector>

namespace gsep {

using cplx = std::complex<double>;

// N power of two >= 16. j_max is the largest scale whose corona
// [-2^{2j-2}, 2^{2j-2}]^2 fits inside the frequency lattice; the multiplier
// partition of unity holds exactly for |xi|_inf <= covered_radius = 2^{2 j_max - 3}.
struct FreqGrid {
  int n = 0;
  int j_max = 0;
  int covered_radius = 0;

  static FreqGrid make(int n);

  // index k in [0, n) <-> frequency xi in [-n/2, n/2)
  int freq(int k) const { return k < n / 2 ? k : k - n; }
  int index(int f) const { return f >= 0 ? f : f + n; }
};

struct GridImage {
  int n = 0;
  std::vector<double> v;  // row-major, sample at x = (i1/n, i2/n)

  GridImage() = default;
  explicit GridImage(int n_) : n(n_), v(static_cast<size_t>(n_) * n_, 0.0) {}
  double& at(int i1, int i2) { return v[static_cast<size_t>(i1) * n + i2]; }
  double at(int i1, int i2) const { return v[static_cast<size_t>(i1) * n + i2]; }
};

struct Spectrum {
  int n = 0;
  std::vector<cplx> v;  // row-major over frequency indices (k1, k2)

  Spectrum() = default;
  explicit Spectrum(int n_) : n(n_), v(static_cast<size_t>(n_) * n_, cplx{}) {}
  cplx& at(int k1, int k2) { return v[static_cast<size_t>(k1) * n + k2]; }
  cplx at(int k1, int k2) const { return v[static_cast<size_t>(k1) * n + k2]; }
  // access by signed frequency
  cplx& atf(const FreqGrid& g, int f1, int f2) { return at(g.index(f1), g.index(f2)); }
  cplx atf(const FreqGrid& g, int f1, int f2) const { return at(g.index(f1), g.index(f2)); }
};

// Complex-valued spatial field (undecimated coefficient fields live here).
struct ComplexField {
  int n = 0;
  std::vector<cplx> v;

  ComplexField() = default;
  explicit ComplexField(int n_) : n(n_), v(static_cast<size_t>(n_) * n_, cplx{}) {}
  cplx& at(int i1, int i2) { return v[static_cast<size_t>(i1) * n + i2]; }
  cplx at(int i1, int i2) const { return v[static_cast<size_t>(i1) * n + i2]; }
};

// FFTW-backed executor with cached plans. Forward/inverse are exact mutual
// inverses up to roundoff. Plans use FFTW_ESTIMATE so the computation is
// deterministic for identical inputs.
class FftEngine {
 public:
  explicit FftEngine(int n);
  ~FftEngine();
  FftEngine(const FftEngine&) = delete;
  FftEngine& operator=(const FftEngine&) = delete;

  int size() const { return n_; }

  Spectrum forward(const GridImage& img) const;
  Spectrum forward(const ComplexField& f) const;
  ComplexField inverse(const Spectrum& spec) const;
  // Inverse for conjugate-symmetric spectra; imag_residue reports the largest
  // |Im| encountered (should be ~1e-16 x magnitude for symmetric input).
  GridImage inverse_real(const Spectrum& spec, double* imag_residue = nullptr) const;

  // Half-spectrum fast path for real fields: layout n x (n/2+1), row k1, col k2.
  int half_cols() const { return n_ / 2 + 1; }
  void forward_r2c(const double* in, cplx* out) const;   // includes 1/N^2
  void inverse_c2r(const cplx* in, double* out) const;   // plain Fourier sum

 private:
  struct Impl;
  int n_;
  std::unique_ptr<Impl> impl_;
};

// sum_xi a(xi) conj(b(xi)); equals the (1/N^2)-weighted spatial inner product.
cplx plancherel_inner(const Spectrum& a, const Spectrum& b);
double spectrum_norm_sq(const Spectrum& a);
cplx image_inner(const ComplexField& a, const ComplexField& b);  // (1/N^2) weighted
double image_inner(const GridImage& a, const GridImage& b);
double image_norm_sq(const GridImage& a);

}  // namespace gsep
