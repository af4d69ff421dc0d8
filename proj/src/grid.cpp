#include "gsep/grid.hpp"

#include <fftw3.h>

#include <cmath>
#include <mutex>
#include <stdexcept>

namespace gsep {

namespace {

// FFTW's planner is not thread-safe; all plan create/destroy goes through this.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

bool power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

}  // namespace

FreqGrid FreqGrid::make(int n) {
  if (n < 16 || !power_of_two(n))
    throw std::invalid_argument("grid size must be a power of two >= 16, got " +
                                std::to_string(n));
  FreqGrid g;
  g.n = n;
  int log2n = 0;
  while ((1 << log2n) < n) ++log2n;
  // largest j with 2^{2j-2} <= n/2
  g.j_max = (log2n + 1) / 2;
  g.covered_radius = 1 << (2 * g.j_max - 3);
  return g;
}

struct FftEngine::Impl {
  fftw_plan fwd = nullptr;       // c2c forward
  fftw_plan bwd = nullptr;       // c2c backward
  fftw_plan r2c = nullptr;
  fftw_plan c2r = nullptr;
  fftw_complex* cbuf_in = nullptr;
  fftw_complex* cbuf_out = nullptr;
  double* rbuf = nullptr;
  fftw_complex* hbuf = nullptr;  // half spectrum
};

FftEngine::FftEngine(int n) : n_(n), impl_(new Impl) {
  if (!power_of_two(n)) throw std::invalid_argument("FftEngine: size must be a power of two");
  const size_t nn = static_cast<size_t>(n) * n;
  const size_t hh = static_cast<size_t>(n) * (n / 2 + 1);
  std::lock_guard<std::mutex> lock(planner_mutex());
  impl_->cbuf_in = fftw_alloc_complex(nn);
  impl_->cbuf_out = fftw_alloc_complex(nn);
  impl_->rbuf = fftw_alloc_real(nn);
  impl_->hbuf = fftw_alloc_complex(hh);
  impl_->fwd = fftw_plan_dft_2d(n, n, impl_->cbuf_in, impl_->cbuf_out, FFTW_FORWARD, FFTW_ESTIMATE);
  impl_->bwd = fftw_plan_dft_2d(n, n, impl_->cbuf_in, impl_->cbuf_out, FFTW_BACKWARD, FFTW_ESTIMATE);
  impl_->r2c = fftw_plan_dft_r2c_2d(n, n, impl_->rbuf, impl_->hbuf, FFTW_ESTIMATE);
  impl_->c2r = fftw_plan_dft_c2r_2d(n, n, impl_->hbuf, impl_->rbuf, FFTW_ESTIMATE);
  if (!impl_->fwd || !impl_->bwd || !impl_->r2c || !impl_->c2r)
    throw std::runtime_error("FftEngine: plan creation failed");
}

FftEngine::~FftEngine() {
  std::lock_guard<std::mutex> lock(planner_mutex());
  fftw_destroy_plan(impl_->fwd);
  fftw_destroy_plan(impl_->bwd);
  fftw_destroy_plan(impl_->r2c);
  fftw_destroy_plan(impl_->c2r);
  fftw_free(impl_->cbuf_in);
  fftw_free(impl_->cbuf_out);
  fftw_free(impl_->rbuf);
  fftw_free(impl_->hbuf);
}

Spectrum FftEngine::forward(const ComplexField& f) const {
  if (f.n != n_) throw std::invalid_argument("forward: size mismatch");
  const size_t nn = f.v.size();
  const double scale = 1.0 / (static_cast<double>(n_) * n_);
  for (size_t i = 0; i < nn; ++i) {
    impl_->cbuf_in[i][0] = f.v[i].real();
    impl_->cbuf_in[i][1] = f.v[i].imag();
  }
  fftw_execute(impl_->fwd);
  Spectrum s(n_);
  for (size_t i = 0; i < nn; ++i)
    s.v[i] = cplx(impl_->cbuf_out[i][0] * scale, impl_->cbuf_out[i][1] * scale);
  return s;
}

Spectrum FftEngine::forward(const GridImage& img) const {
  if (img.n != n_) throw std::invalid_argument("forward: size mismatch");
  ComplexField f(n_);
  for (size_t i = 0; i < img.v.size(); ++i) f.v[i] = img.v[i];
  return forward(f);
}

ComplexField FftEngine::inverse(const Spectrum& spec) const {
  if (spec.n != n_) throw std::invalid_argument("inverse: size mismatch");
  const size_t nn = spec.v.size();
  for (size_t i = 0; i < nn; ++i) {
    impl_->cbuf_in[i][0] = spec.v[i].real();
    impl_->cbuf_in[i][1] = spec.v[i].imag();
  }
  fftw_execute(impl_->bwd);
  ComplexField f(n_);
  for (size_t i = 0; i < nn; ++i) f.v[i] = cplx(impl_->cbuf_out[i][0], impl_->cbuf_out[i][1]);
  return f;
}

GridImage FftEngine::inverse_real(const Spectrum& spec, double* imag_residue) const {
  ComplexField f = inverse(spec);
  GridImage img(n_);
  double worst = 0.0;
  for (size_t i = 0; i < f.v.size(); ++i) {
    img.v[i] = f.v[i].real();
    worst = std::max(worst, std::abs(f.v[i].imag()));
  }
  if (imag_residue) *imag_residue = worst;
  return img;
}

void FftEngine::forward_r2c(const double* in, cplx* out) const {
  const size_t nn = static_cast<size_t>(n_) * n_;
  const size_t hh = static_cast<size_t>(n_) * half_cols();
  const double scale = 1.0 / static_cast<double>(nn);
  std::copy(in, in + nn, impl_->rbuf);
  fftw_execute(impl_->r2c);
  for (size_t i = 0; i < hh; ++i)
    out[i] = cplx(impl_->hbuf[i][0] * scale, impl_->hbuf[i][1] * scale);
}

void FftEngine::inverse_c2r(const cplx* in, double* out) const {
  const size_t nn = static_cast<size_t>(n_) * n_;
  const size_t hh = static_cast<size_t>(n_) * half_cols();
  for (size_t i = 0; i < hh; ++i) {
    impl_->hbuf[i][0] = in[i].real();
    impl_->hbuf[i][1] = in[i].imag();
  }
  fftw_execute(impl_->c2r);  // destroys hbuf contents; that's fine, we copied in
  std::copy(impl_->rbuf, impl_->rbuf + nn, out);
}

cplx plancherel_inner(const Spectrum& a, const Spectrum& b) {
  if (a.n != b.n) throw std::invalid_argument("plancherel_inner: size mismatch");
  cplx acc{};
  for (size_t i = 0; i < a.v.size(); ++i) acc += a.v[i] * std::conj(b.v[i]);
  return acc;
}

double spectrum_norm_sq(const Spectrum& a) {
  double acc = 0.0;
  for (const cplx& z : a.v) acc += std::norm(z);
  return acc;
}

cplx image_inner(const ComplexField& a, const ComplexField& b) {
  if (a.n != b.n) throw std::invalid_argument("image_inner: size mismatch");
  cplx acc{};
  for (size_t i = 0; i < a.v.size(); ++i) acc += a.v[i] * std::conj(b.v[i]);
  return acc / (static_cast<double>(a.n) * a.n);
}

double image_inner(const GridImage& a, const GridImage& b) {
  if (a.n != b.n) throw std::invalid_argument("image_inner: size mismatch");
  double acc = 0.0;
  for (size_t i = 0; i < a.v.size(); ++i) acc += a.v[i] * b.v[i];
  return acc / (static_cast<double>(a.n) * a.n);
}

double image_norm_sq(const GridImage& a) { return image_inner(a, a); }

}  // namespace gsep
