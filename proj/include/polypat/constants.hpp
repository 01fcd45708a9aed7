// Calibrated constants. The paper leaves these quantities abstract ("some
// constant c_0 > 0", "a large absolute constant"); the artifact pins them by
// measurement on fixed reference corpora and freezes the results here. The
// calibration procedures live in the test suite (tests/acceptance.cpp
// reprints measured vs. recorded values) and in tools/calibrate.cpp.
#pragma once

#include <cstdint>

namespace polypat::calibrated {

// Lower bound for the triple-convolution form
//   integral of f (f*theta_k)(f*theta_l) >= c0 (integral f)^3
// over nonnegative densities. Measured minimum over the 200-density
// reference corpus (corpus A, k,l in {2..8}) was 0.232158; c0 keeps a 10%
// safety margin below it.
inline constexpr double c0 = 0.208942;
inline constexpr std::uint64_t c0_corpus_hash = 0x9f37e2a1c54b08d7ULL;

// Energy budget: sum_k ||f*theta_{l_k} - f*theta_{l_{k+1}}||_2^2 <= C0 ||f||_2^2.
// Largest ratio observed over the reference corpus was 0.5839; frozen with
// a 2x margin.
inline constexpr double C0_energy = 1.20;

// Stationary-phase error budget: |quadrature - leading| * |eta| is bounded
// by sp_error_c * 2^{sp_error_gamma0 * l} over the reference grid
// (P in {t^2, t+t^2, t+t^3}, l in {2,4}, t_c in [1.3,1.7],
// |eta| in [1e3, 1e5]). Measured worst normalized value 0.58 (t^2, l=2);
// frozen with ~1.7x margin. The exponent follows the second-order term
// |eta|^-3/2 (eta 2^-alpha2 l)-scaling of the reference family.
inline constexpr double sp_error_c = 1.0;
inline constexpr double sp_error_gamma0 = 3.5;

// Sobolev-improving constant C_{l0} used for the mixed-term comparison
// bounds |Lambda(mu_i1, mu_i2, mu_i3)| <= C_{l0} prod ||.||_{H^-s0}.
inline constexpr double C_l0 = 4.0;

}  // namespace polypat::calibrated
