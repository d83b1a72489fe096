// SPDX-License-Identifier: Apache-2.0
//
// nfcb: codebook construction and evaluation for near-field large antenna arrays

#ifndef NFCB_CORRELATION_HPP
#define NFCB_CORRELATION_HPP

#include <array>
#include <string>

#include "nfcb/types.hpp"

namespace nfcb {

// |w^H b| for unit-norm inputs. Throws std::invalid_argument on length mismatch.
double correlation(const BeamVector& w, const BeamVector& b);
double correlation(const VecXcd& w, const VecXcd& b);

// ULA codeword-channel correlation as a function of the transform-domain
// offsets only (exact under the Fresnel phase model):
//   f(da, db) = (1/N) | sum_n exp(-j pi (db m_n - da m_n^2)) |,  m_n = n - (N+1)/2.
// Assumes half-wavelength spacing, the regime the transform grid is built for.
double correlation_ula_delta(double d_alpha, double d_beta, int n);

// Antenna-count-free limit: |integral_{-1/2}^{1/2} exp(-j pi (db~ t - da~ t^2)) dt|
// with da~ = da N^2, db~ = db N. Adaptive quadrature, absolute error <= 1e-9.
double scaled_correlation(double d_alpha_scaled, double d_beta_scaled);

// Quadratic model f ~= 1 + p_alpha da^2 N^4 + p_beta db^2 N^2.
struct UlaFitCoefficients {
  double p_alpha = 0.0;  // < 0
  double p_beta = 0.0;   // < 0
  // Stock constants, valid across N for half-wavelength arrays; fits exist to
  // validate them and to study other correlation ranges.
  static UlaFitCoefficients defaults() { return {-0.025983670363830, -0.391749735984250}; }
};

double fitted_ula_correlation(double d_alpha, double d_beta, int n,
                              const UlaFitCoefficients& coeffs);

// Least-squares fit of (1 - f) against (da^2 N^4, db^2 N^2) over 32 rays x 16
// radii in normalized delta space, radii spanning f in [c_level, 0.999].
// Requires c_level in (0.8, 1). Throws if the sample set degenerates (< 8 points).
UlaFitCoefficients fit_ula_coefficients(int n, double c_level);

// Level-c ellipse semi-axes a_alpha = sqrt((c-1)/p_alpha)/N^2, a_beta likewise /N.
struct UlaContourSemiAxes {
  double a_alpha = 0.0;
  double a_beta = 0.0;
};
UlaContourSemiAxes ula_contour_semiaxes(double c, int n, const UlaFitCoefficients& coeffs);

// Interior membership for the level-c quantization cell around a codeword.
bool in_ula_contour(double d_alpha, double d_beta, double c, int n,
                    const UlaFitCoefficients& coeffs);

// Local ellipsoid model around a UPA codeword; coefficients vary with the
// center (the UPA correlation is non-stationary).
struct UpaFitCoefficients {
  double p_psi = 0.0;
  double p_varphi = 0.0;
  double p_rho = 0.0;
  TransformPoint center;
  double c_fit = 0.0;
};

double fitted_upa_correlation(const TransformPoint& delta, int n, const UpaFitCoefficients& coeffs);

// Samples correlation between the center beam and perturbed beams over rays in
// normalized delta space, then fits (1 - f) against (dpsi^2 N^2, dvarphi^2 N^2,
// drho^2 N^4). Rays that would leave the transform box are shortened, never
// dropped silently. c_level in (0.8, 1).
UpaFitCoefficients fit_upa_local(const ArrayConfig& cfg, const TransformPoint& center,
                                 double c_level);

// One-sided distance from `center` along `axis` (0 psi, 1 varphi, 2 rho;
// sign +1/-1) at which the true correlation first crosses c. Bisection to
// |f - c| <= 1e-6. Returns NaN when the crossing is outside the transform box.
double upa_level_halfwidth(const ArrayConfig& cfg, const TransformPoint& center, double c,
                           int axis, int direction);

// Per-axis minimum of level-c half-widths over a probe codeword grid; the
// conservative stationary surrogate used to size the UPA codebook.
struct ReferenceEllipsoid {
  double l_psi = 0.0;
  double l_varphi = 0.0;
  double l_rho = 0.0;
  UpaFitCoefficients p_star;
  double c = 0.0;
  std::string probe_grid_spec;
};

// Probes a midpoint grid of probe_counts = (S_psi, S_varphi, S_rho) codewords
// over the transform box (physical-disc points only), measures each probe's
// per-axis half-width by bisection, and keeps the per-axis minima. Throws
// std::runtime_error naming the probe/axis if no crossing exists in-domain.
ReferenceEllipsoid reference_ellipsoid(const ArrayConfig& cfg, double c,
                                       const std::array<int, 3>& probe_counts, int threads = 1);

}  // namespace nfcb

#endif  // NFCB_CORRELATION_HPP
