#include "gsep/generators.hpp"

#include <cmath>

namespace gsep {

namespace {

// Even transition profile: 1 for |t| <= plateau, 0 for |t| >= support.
double fall(double t, double plateau, double support) {
  double a = std::fabs(t);
  if (a <= plateau) return 1.0;
  if (a >= support) return 0.0;
  return ramp_profile((support - a) / (support - plateau));
}

// Even rise: 0 for |t| <= lo, 1 for |t| >= hi.
double rise(double t, double lo, double hi) {
  double a = std::fabs(t);
  if (a <= lo) return 0.0;
  if (a >= hi) return 1.0;
  return ramp_profile((a - lo) / (hi - lo));
}

// Radial profiles of the cone windows: g_h turns on across [1/8, 1/2],
// g_v across [1/4, 1/2]; g_h == 1 wherever the slope profiles pair up.
double profile_g_h(double t) { return rise(t, 1.0 / 8.0, 1.0 / 2.0); }
double profile_g_v(double t) { return rise(t, 1.0 / 4.0, 1.0 / 2.0); }

// Slope profiles: h_h == 1 on [-4/3, 4/3], supported in [-3/2, 3/2];
// h_v == 1 on [-3/4, 3/4], supported in [-4/3, 4/3]. Together:
// h_h * h_v == h_v, and h_h(1/s) == 1 wherever h_v(s) < 1.
double profile_h_h(double t) { return fall(t, 4.0 / 3.0, 3.0 / 2.0); }
double profile_h_v(double t) { return fall(t, 3.0 / 4.0, 4.0 / 3.0); }

// Unnormalized directional bump: plateau [-1/2, 1/2], support [-3/2, 3/2].
double bump_u(double t) { return fall(t, 0.5, 1.5); }

}  // namespace

double ramp_profile(double t) {
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  double a = std::exp(-1.0 / t);
  double b = std::exp(-1.0 / (1.0 - t));
  return a / (a + b);
}

double xi_hat(double t) { return fall(t, 1.0 / 32.0, 1.0 / 16.0); }

double omega_hat(double f1, double f2) { return xi_hat(f1) * xi_hat(f2); }

double window_w(double f1, double f2) {
  double lo = omega_hat(f1 / 4.0, f2 / 4.0);
  double hi = omega_hat(f1, f2);
  double d = lo * lo - hi * hi;  // >= 0 since xi_hat is radially nonincreasing
  return d > 0.0 ? std::sqrt(d) : 0.0;
}

double window_wj(int j, double f1, double f2) {
  double s = std::ldexp(1.0, -2 * j);
  return window_w(f1 * s, f2 * s);
}

double bump_v(double t) {
  if (!(std::fabs(t) < 1.5)) return 0.0;  // also covers +-inf and nan
  double u = bump_u(t);
  if (u == 0.0) return 0.0;
  // 1-periodic normalizer; only translates with |t - l| < 3/2 contribute
  double p = 0.0;
  for (int l = static_cast<int>(std::ceil(t - 1.5)); l <= static_cast<int>(std::floor(t + 1.5));
       ++l) {
    double ul = bump_u(t - l);
    p += ul * ul;
  }
  return u / std::sqrt(p);
}

double slope_ratio(double num, double den) {
  if (den == 0.0) {
    if (num == 0.0) return 0.0;
    return num > 0.0 ? HUGE_VAL : -HUGE_VAL;
  }
  return num / den;
}

double cone_v(Cone c, double f1, double f2) {
  if (f1 == 0.0 && f2 == 0.0) return 0.0;
  double s = (c == Cone::horizontal) ? slope_ratio(f2, f1) : slope_ratio(f1, f2);
  return bump_v(s);
}

double chi_h(double f1, double f2) { return profile_g_h(f1) * profile_h_h(slope_ratio(f2, f1)); }

double chi_v(double f1, double f2) { return profile_g_h(f2) * profile_h_h(slope_ratio(f1, f2)); }

double chi_zero(double f1, double f2) {
  return fall(f1, 2.0 / 3.0, 1.0) * fall(f2, 2.0 / 3.0, 1.0);
}

double gamma_h(double f1, double f2) { return profile_g_v(f1) * profile_h_v(slope_ratio(f2, f1)); }

// Note the slope argument is f2/f1 here as well; the complement profile
// 1 - h_v opens up exactly where gamma_h closes.
double gamma_v(double f1, double f2) {
  return profile_g_v(f2) * (1.0 - profile_h_v(slope_ratio(f2, f1)));
}

double gamma_zero(double f1, double f2) {
  return 1.0 - chi_h(f1, f2) * gamma_h(f1, f2) - chi_v(f1, f2) * gamma_v(f1, f2);
}

}  // namespace gsep
