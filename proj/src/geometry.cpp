// SPDX-License-Identifier: Apache-2.0
//
// nfcb: codebook construction and evaluation for near-field large antenna arrays

#include "nfcb/geometry.hpp"

#include <cmath>

namespace nfcb {

namespace {

inline void check_position(const PhysicalPosition& ue) {
  if (!(ue.r_m > 0.0)) throw std::invalid_argument("PhysicalPosition: r must be positive");
}

// Centered element index: m_n = n - (N+1)/2 for n = 1..N.
inline double centered(long i, int n) { return double(i) - 0.5 * double(n - 1); }

}  // namespace

Eigen::MatrixXd element_coordinates(const ArrayConfig& cfg) {
  const double d = cfg.spacing_m;
  if (cfg.family == ArrayFamily::Ula) {
    Eigen::MatrixXd t(cfg.n, 2);
    for (int i = 0; i < cfg.n; ++i) {
      t(i, 0) = 0.0;
      t(i, 1) = centered(i, cfg.n) * d;
    }
    return t;
  }
  Eigen::MatrixXd t(cfg.total_elements(), 3);
  long row = 0;
  for (int m = 0; m < cfg.n; ++m)
    for (int n = 0; n < cfg.n; ++n, ++row) {
      t(row, 0) = centered(m, cfg.n) * d;
      t(row, 1) = centered(n, cfg.n) * d;
      t(row, 2) = 0.0;
    }
  return t;
}

double exact_distance(const ArrayConfig& cfg, long index, const PhysicalPosition& ue) {
  check_position(ue);
  const double d = cfg.spacing_m;
  if (cfg.family == ArrayFamily::Ula) {
    const double y = centered(index, cfg.n) * d;
    const double ux = ue.r_m * std::cos(ue.theta_rad);
    const double uy = ue.r_m * std::sin(ue.theta_rad);
    return std::hypot(ux, uy - y);
  }
  const long m = index / cfg.n;
  const long n = index % cfg.n;
  const double x = centered(m, cfg.n) * d;
  const double y = centered(n, cfg.n) * d;
  const double st = std::sin(ue.theta_rad);
  const double ux = ue.r_m * st * std::cos(ue.phi_rad);
  const double uy = ue.r_m * st * std::sin(ue.phi_rad);
  const double uz = ue.r_m * std::cos(ue.theta_rad);
  return std::sqrt((ux - x) * (ux - x) + (uy - y) * (uy - y) + uz * uz);
}

double fresnel_distance(const ArrayConfig& cfg, long index, const PhysicalPosition& ue) {
  check_position(ue);
  const double d = cfg.spacing_m;
  const double r = ue.r_m;
  if (cfg.family == ArrayFamily::Ula) {
    const double y = centered(index, cfg.n) * d;
    const double st = std::sin(ue.theta_rad);
    const double ct2 = 1.0 - st * st;
    return r - st * y + ct2 * y * y / (2.0 * r);
  }
  const long m = index / cfg.n;
  const long n = index % cfg.n;
  const double x = centered(m, cfg.n) * d;
  const double y = centered(n, cfg.n) * d;
  const double st = std::sin(ue.theta_rad);
  const double psi = st * std::cos(ue.phi_rad);
  const double vph = st * std::sin(ue.phi_rad);
  return r - psi * x - vph * y + (1.0 - psi * psi) * x * x / (2.0 * r) +
         (1.0 - vph * vph) * y * y / (2.0 * r) - psi * vph * x * y / r;
}

BeamVector beam_focusing(const ArrayConfig& cfg, const PhysicalPosition& ue, PhaseModel model) {
  check_position(ue);
  if (model != PhaseModel::Exact && model != PhaseModel::Fresnel)
    throw std::invalid_argument("beam_focusing: model must be Exact or Fresnel");
  if (std::isinf(ue.r_m)) {
    BeamVector b = beam_from_transform(cfg, to_transform(cfg, ue));
    b.origin = ue;
    return b;
  }
  const long total = cfg.total_elements();
  const double k = cfg.wavenumber();
  const double scale = 1.0 / std::sqrt(double(total));
  BeamVector b;
  b.v.resize(total);
  b.model = model;
  b.origin = ue;
  for (long i = 0; i < total; ++i) {
    const double rn = model == PhaseModel::Exact ? exact_distance(cfg, i, ue)
                                                 : fresnel_distance(cfg, i, ue);
    b.v[i] = std::polar(scale, -k * (rn - ue.r_m));
  }
  return b;
}

BeamVector far_field_steering(const ArrayConfig& cfg, double theta_rad, double phi_rad) {
  const double kd = cfg.wavenumber() * cfg.spacing_m;
  BeamVector a;
  a.model = PhaseModel::FarField;
  if (cfg.family == ArrayFamily::Ula) {
    const double st = std::sin(theta_rad);
    const double scale = 1.0 / std::sqrt(double(cfg.n));
    a.v.resize(cfg.n);
    for (int i = 0; i < cfg.n; ++i) a.v[i] = std::polar(scale, kd * double(i) * st);
    return a;
  }
  const double st = std::sin(theta_rad);
  const double psi = st * std::cos(phi_rad);
  const double vph = st * std::sin(phi_rad);
  const double scale = 1.0 / double(cfg.n);
  a.v.resize(cfg.total_elements());
  long row = 0;
  for (int m = 0; m < cfg.n; ++m)
    for (int n = 0; n < cfg.n; ++n, ++row)
      a.v[row] = std::polar(scale, kd * (double(m) * psi + double(n) * vph));
  return a;
}

TransformPoint to_transform(const ArrayConfig& cfg, const PhysicalPosition& ue) {
  check_position(ue);
  const double st = std::sin(ue.theta_rad);
  if (cfg.family == ArrayFamily::Ula) {
    const double ct2 = 1.0 - st * st;
    const double alpha = std::isinf(ue.r_m) ? 0.0 : cfg.wavelength_m * ct2 / (4.0 * ue.r_m);
    return TransformPoint::ula(alpha, st);
  }
  const double rho = std::isinf(ue.r_m) ? 0.0 : 1.0 / ue.r_m;
  return TransformPoint::upa(st * std::cos(ue.phi_rad), st * std::sin(ue.phi_rad), rho);
}

PhysicalPosition from_transform(const ArrayConfig& cfg, const TransformPoint& tp) {
  PhysicalPosition p;
  if (cfg.family == ArrayFamily::Ula) {
    if (std::abs(tp.beta()) > 1.0) throw std::domain_error("from_transform: |beta| > 1");
    if (tp.alpha() < 0.0) throw std::domain_error("from_transform: alpha < 0");
    p.theta_rad = std::asin(tp.beta());
    const double ct2 = 1.0 - tp.beta() * tp.beta();
    p.r_m = tp.alpha() == 0.0 ? kInfValue : cfg.wavelength_m * ct2 / (4.0 * tp.alpha());
    return p;
  }
  const double s2 = tp.psi() * tp.psi() + tp.varphi() * tp.varphi();
  if (s2 > 1.0 + 1e-12) throw std::domain_error("from_transform: psi^2 + varphi^2 > 1");
  if (tp.rho() < 0.0) throw std::domain_error("from_transform: rho < 0");
  const double s = std::sqrt(std::min(s2, 1.0));
  // theta in [-pi/2, pi/2] with phi in [0, pi]: sign(varphi) = sign(theta).
  if (tp.varphi() >= 0.0) {
    p.theta_rad = std::asin(s);
    p.phi_rad = s == 0.0 ? 0.0 : std::atan2(tp.varphi(), tp.psi());
  } else {
    p.theta_rad = -std::asin(s);
    p.phi_rad = std::atan2(-tp.varphi(), -tp.psi());
  }
  p.r_m = tp.rho() == 0.0 ? kInfValue : 1.0 / tp.rho();
  return p;
}

RegionBounds region_bounds(const ArrayConfig& cfg) {
  const double lambda = cfg.wavelength_m;
  const double d_ap = cfg.aperture_m();
  RegionBounds rb;
  rb.fresnel_min_r_m = std::sqrt(0.62 * d_ap * d_ap * d_ap / lambda);
  rb.rayleigh_r_m = 2.0 * d_ap * d_ap / lambda;
  // alpha_max = lambda / (4 r_min) over theta in [-pi/2, pi/2], r >= r_min.
  rb.q_alpha = lambda / (4.0 * rb.fresnel_min_r_m);
  rb.q_beta = 2.0;
  rb.q_rho = 1.0 / rb.fresnel_min_r_m;
  return rb;
}

ChannelVector channel(const ArrayConfig& cfg, const PhysicalPosition& ue, double eta,
                      PhaseModel model) {
  if (!(eta > 0.0)) throw std::invalid_argument("channel: eta must be positive");
  check_position(ue);
  BeamVector b = beam_focusing(cfg, ue, model);
  ChannelVector h;
  h.gain = std::polar(std::sqrt(eta) / ue.r_m, -cfg.wavenumber() * ue.r_m);
  h.v = std::sqrt(double(cfg.total_elements())) * h.gain * b.v;
  return h;
}

template <typename Scalar>
void synth_beam_column(const ArrayConfig& cfg, const TransformPoint& tp,
                       Eigen::Ref<CVec<Scalar>> out) {
  const long total = cfg.total_elements();
  const double k = cfg.wavenumber();
  const double d = cfg.spacing_m;
  const double scale = 1.0 / std::sqrt(double(total));
  if (cfg.family == ArrayFamily::Ula) {
    // phase = k (beta y - (2 alpha / lambda) y^2), y = m d with centered m
    const double lin = k * d * tp.beta();
    const double quad = k * (2.0 * tp.alpha() / cfg.wavelength_m) * d * d;
    for (long i = 0; i < total; ++i) {
      const double m = centered(i, cfg.n);
      out[i] = std::complex<Scalar>(std::polar(scale, lin * m - quad * m * m));
    }
    return;
  }
  // phase = k (psi x + varphi y - rho ((1-psi^2)x^2 + (1-varphi^2)y^2)/2 + rho psi varphi x y)
  const double psi = tp.psi(), vph = tp.varphi(), rho = tp.rho();
  const double cx = k * d * psi;
  const double cy = k * d * vph;
  const double cxx = k * rho * (1.0 - psi * psi) * d * d / 2.0;
  const double cyy = k * rho * (1.0 - vph * vph) * d * d / 2.0;
  const double cxy = k * rho * psi * vph * d * d;
  long row = 0;
  for (int m = 0; m < cfg.n; ++m) {
    const double xm = centered(m, cfg.n);
    for (int n = 0; n < cfg.n; ++n, ++row) {
      const double yn = centered(n, cfg.n);
      const double phase = cx * xm + cy * yn - cxx * xm * xm - cyy * yn * yn + cxy * xm * yn;
      out[row] = std::complex<Scalar>(std::polar(scale, phase));
    }
  }
}

template void synth_beam_column<double>(const ArrayConfig&, const TransformPoint&,
                                        Eigen::Ref<CVec<double>>);
template void synth_beam_column<float>(const ArrayConfig&, const TransformPoint&,
                                       Eigen::Ref<CVec<float>>);

BeamVector beam_from_transform(const ArrayConfig& cfg, const TransformPoint& tp) {
  BeamVector b;
  b.model = tp.rho() == 0.0 && (cfg.family == ArrayFamily::Upa || tp.alpha() == 0.0)
                ? PhaseModel::FarField
                : PhaseModel::Fresnel;
  b.v.resize(cfg.total_elements());
  synth_beam_column<double>(cfg, tp, b.v);
  return b;
}

}  // namespace nfcb
