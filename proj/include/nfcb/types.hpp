// SPDX-License-Identifier: Apache-2.0
//
// nfcb: codebook construction and evaluation for near-field large antenna arrays

#ifndef NFCB_TYPES_HPP
#define NFCB_TYPES_HPP

#include <Eigen/Dense>
#include <complex>
#include <limits>
#include <optional>
#include <stdexcept>

namespace nfcb {

using cxd = std::complex<double>;
using VecXcd = Eigen::VectorXcd;
using MatXcd = Eigen::MatrixXcd;

template <typename Scalar>
using CVec = Eigen::Vector<std::complex<Scalar>, Eigen::Dynamic>;
template <typename Scalar>
using CMat = Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, Eigen::Dynamic>;

inline constexpr double kSpeedOfLight = 299792458.0;
inline constexpr double kDefaultCarrierHz = 3.0e9;
inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kInfValue = std::numeric_limits<double>::infinity();

enum class ArrayFamily { Ula, Upa };
enum class PhaseModel { Exact, Fresnel, FarField };

// Array geometry root. For UPA, `n` is the per-axis element count (n*n total)
// and the aperture used in region bounds is the per-axis aperture (n-1)*d.
struct ArrayConfig {
  ArrayFamily family = ArrayFamily::Ula;
  int n = 2;
  double spacing_m = 0.0;
  double wavelength_m = 0.0;
  double carrier_hz = 0.0;

  static ArrayConfig make(ArrayFamily family, int n, double carrier_hz = kDefaultCarrierHz,
                          double spacing_m = 0.0) {
    if (n < 2) throw std::invalid_argument("ArrayConfig: n must be >= 2");
    if (carrier_hz <= 0.0) throw std::invalid_argument("ArrayConfig: carrier must be positive");
    ArrayConfig cfg;
    cfg.family = family;
    cfg.n = n;
    cfg.carrier_hz = carrier_hz;
    cfg.wavelength_m = kSpeedOfLight / carrier_hz;
    cfg.spacing_m = spacing_m > 0.0 ? spacing_m : cfg.wavelength_m / 2.0;
    if (cfg.spacing_m <= 0.0) throw std::invalid_argument("ArrayConfig: spacing must be positive");
    return cfg;
  }
  static ArrayConfig ula(int n, double carrier_hz = kDefaultCarrierHz) {
    return make(ArrayFamily::Ula, n, carrier_hz);
  }
  static ArrayConfig upa(int n, double carrier_hz = kDefaultCarrierHz) {
    return make(ArrayFamily::Upa, n, carrier_hz);
  }

  long total_elements() const { return family == ArrayFamily::Ula ? n : long(n) * n; }
  double wavenumber() const { return 2.0 * kPi / wavelength_m; }
  // Per-axis aperture (n-1)*d; for UPA this is the scalar D used by region bounds.
  double aperture_m() const { return (n - 1) * spacing_m; }
};

// Location relative to the array center. ULA ignores phi_rad.
// theta in [-pi/2, pi/2]; phi in [0, pi] (UPA azimuth). r_m may be +inf for
// the far-field limit.
struct PhysicalPosition {
  double r_m = 1.0;
  double theta_rad = 0.0;
  double phi_rad = 0.0;
};

// Transform-domain coordinates. ULA: (alpha, beta) = (lambda*cos^2(theta)/(4r), sin(theta)).
// UPA: (psi, varphi, rho) = (sin(theta)cos(phi), sin(theta)sin(phi), 1/r).
struct TransformPoint {
  double u = 0.0;  // ULA alpha | UPA psi
  double v = 0.0;  // ULA beta  | UPA varphi
  double w = 0.0;  // UPA rho [1/m]; zero and unused for ULA

  static TransformPoint ula(double alpha, double beta) { return {alpha, beta, 0.0}; }
  static TransformPoint upa(double psi, double varphi, double rho) { return {psi, varphi, rho}; }

  double alpha() const { return u; }
  double beta() const { return v; }
  double psi() const { return u; }
  double varphi() const { return v; }
  double rho() const { return w; }
};

// Unit-norm array response. Row-major element order for UPA: index (m-1)*n + (n-1)
// over the (m,n) antenna grid.
struct BeamVector {
  VecXcd v;
  PhaseModel model = PhaseModel::Fresnel;
  std::optional<PhysicalPosition> origin;
};

// h = sqrt(total_elements) * gain * beam, gain = sqrt(eta) * exp(-jkr) / r.
struct ChannelVector {
  VecXcd v;
  cxd gain{0.0, 0.0};
};

// Quantization region in transform coordinates.
// ULA: alpha in [0, q_alpha], beta in [-q_beta/2, q_beta/2].
// UPA: psi, varphi in [-1, 1] (full widths q_psi, q_varphi), rho in [0, q_rho].
struct RegionBounds {
  double fresnel_min_r_m = 0.0;
  double rayleigh_r_m = 0.0;
  double q_alpha = 0.0;   // ULA
  double q_beta = 2.0;    // ULA, full width
  double q_psi = 2.0;     // UPA, full width
  double q_varphi = 2.0;  // UPA, full width
  double q_rho = 0.0;     // UPA [1/m]
};

}  // namespace nfcb

#endif  // NFCB_TYPES_HPP
