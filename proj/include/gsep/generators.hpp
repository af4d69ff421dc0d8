// Smooth window generators: the radial wavelet windows (xi/omega/W), the
// directional bump v with its shifted-square partition, and the cone window
// pairs (chi_*, gamma_*) whose products sum to one at every frequency.
//
// All windows take frequencies in the continuum units of the integer lattice;
// they are even, C-infinity, and valued in [0,1].
#pragma once

namespace gsep {

// C-infinity ramp: 0 for t <= 0, 1 for t >= 1, strictly increasing between,
// with ramp_profile(t) + ramp_profile(1-t) = 1.
double ramp_profile(double t);

// 1D low-pass profile: == 1 on [-1/32, 1/32], supported in [-1/16, 1/16].
double xi_hat(double t);

// Separable 2D low-pass: xi_hat(f1) * xi_hat(f2).
double omega_hat(double f1, double f2);

// Corona window W(f) = sqrt(omega_hat^2(f/4) - omega_hat^2(f)); supported in
// [-1/4,1/4]^2 \ [-1/32,1/32]^2. window_wj(j, .) = W(4^{-j} .), supported in
// the corona [-2^{2j-2}, 2^{2j-2}]^2 \ [-2^{2j-5}, 2^{2j-5}]^2.
double window_w(double f1, double f2);
double window_wj(int j, double f1, double f2);

// Directional bump: even, supported in [-3/2, 3/2], == u/sqrt(sum_l u(.-l)^2)
// so that sum_{l in Z} bump_v(w - l)^2 == 1 for every w.
double bump_v(double t);

// num/den with the slope conventions x/0 = +-inf for x != 0 and 0/0 = 0.
double slope_ratio(double num, double den);

enum class Cone { horizontal, vertical };

// Slope windows V_h(f) = v(f2/f1), V_v(f) = v(f1/f2); 0 at the origin and on
// the respective zero axis.
double cone_v(Cone c, double f1, double f2);

// Cone window pair. chi_* supported in the analysis cones, gamma_* in the
// slightly larger dual cones, with the exact identity
//   chi_h*gamma_h + chi_v*gamma_v + chi_zero*gamma_zero == 1  everywhere.
// chi_zero is a separable box window, == 1 on [-2/3, 2/3]^2, supported in
// [-1, 1]^2, so it covers supp gamma_zero.
double chi_h(double f1, double f2);
double chi_v(double f1, double f2);
double chi_zero(double f1, double f2);
double gamma_h(double f1, double f2);
double gamma_v(double f1, double f2);
double gamma_zero(double f1, double f2);

}  // namespace gsep
