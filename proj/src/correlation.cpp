// SPDX-License-Identifier: Apache-2.0
//
// nfcb: codebook construction and evaluation for near-field large antenna arrays

#include "nfcb/correlation.hpp"

#include <cmath>
#include <functional>
#include <vector>

#include "nfcb/geometry.hpp"
#include "nfcb/parallel.hpp"

namespace nfcb {

double correlation(const VecXcd& w, const VecXcd& b) {
  if (w.size() != b.size()) throw std::invalid_argument("correlation: length mismatch");
  return std::abs(cxd(w.adjoint() * b));
}

double correlation(const BeamVector& w, const BeamVector& b) { return correlation(w.v, b.v); }

double correlation_ula_delta(double d_alpha, double d_beta, int n) {
  if (n < 2) throw std::invalid_argument("correlation_ula_delta: n must be >= 2");
  cxd acc(0.0, 0.0);
  for (int i = 0; i < n; ++i) {
    const double m = double(i) - 0.5 * double(n - 1);
    acc += std::polar(1.0, -kPi * (d_beta * m - d_alpha * m * m));
  }
  return std::abs(acc) / double(n);
}

namespace {

// Adaptive Simpson on a complex integrand; the two correlation integrand
// components are smooth so recursion stays shallow.
cxd simpson(double a, double b, cxd fa, cxd fm, cxd fb) {
  return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

cxd adaptive_simpson(const std::function<cxd(double)>& g, double a, double b, cxd fa, cxd fm,
                     cxd fb, cxd whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const cxd flm = g(lm), frm = g(rm);
  const cxd left = simpson(a, m, fa, flm, fm);
  const cxd right = simpson(m, b, fm, frm, fb);
  const cxd delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
  return adaptive_simpson(g, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) +
         adaptive_simpson(g, m, b, fm, frm, fb, right, tol / 2.0, depth - 1);
}

cxd integrate(const std::function<cxd(double)>& g, double a, double b, double tol) {
  const cxd fa = g(a), fb = g(b), fm = g(0.5 * (a + b));
  return adaptive_simpson(g, a, b, fa, fm, fb, simpson(a, b, fa, fm, fb), tol, 40);
}

}  // namespace

double scaled_correlation(double d_alpha_scaled, double d_beta_scaled) {
  auto g = [&](double t) {
    return std::polar(1.0, -kPi * (d_beta_scaled * t - d_alpha_scaled * t * t));
  };
  return std::abs(integrate(g, -0.5, 0.5, 1e-10));
}

double fitted_ula_correlation(double d_alpha, double d_beta, int n,
                              const UlaFitCoefficients& coeffs) {
  const double n2 = double(n) * n;
  return 1.0 + coeffs.p_alpha * d_alpha * d_alpha * n2 * n2 +
         coeffs.p_beta * d_beta * d_beta * n2;
}

namespace {

// Bisect g(r) = c on [0, hi] assuming g(0) > c > g(hi). g is the correlation
// along a ray, monotone through its first crossing.
double bisect_crossing(const std::function<double(double)>& g, double hi, double c, double tol) {
  double lo = 0.0;
  for (int it = 0; it < 200 && hi - lo > 1e-15 * (1.0 + hi); ++it) {
    const double mid = 0.5 * (lo + hi);
    const double v = g(mid);
    if (std::abs(v - c) <= tol) return mid;
    (v > c ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

// Grow a bracket [0, R] along a ray until g(R) < c. Returns NaN if the level
// is not reached before `room`.
double bracket_crossing(const std::function<double(double)>& g, double start, double room,
                        double c) {
  double hi = std::min(start, room);
  for (int it = 0; it < 80; ++it) {
    if (g(hi) < c) return hi;
    if (hi >= room) return std::numeric_limits<double>::quiet_NaN();
    hi = std::min(2.0 * hi, room);
  }
  return std::numeric_limits<double>::quiet_NaN();
}

struct RaySamples {
  std::vector<double> x1sq, x2sq, x3sq, y;  // regressors and 1 - f
};

}  // namespace

UlaFitCoefficients fit_ula_coefficients(int n, double c_level) {
  if (!(c_level > 0.8 && c_level < 1.0))
    throw std::invalid_argument("fit_ula_coefficients: c_level must be in (0.8, 1)");
  const int rays = 32, radii = 16;
  const double n2 = double(n) * n;
  std::vector<double> usq, vsq, y;
  for (int kray = 0; kray < rays; ++kray) {
    const double omega = (kray + 0.5) * (kPi / 2.0) / rays;
    const double cu = std::cos(omega), cv = std::sin(omega);
    // Normalized radius r maps to deltas (r cu / N^2, r cv / N).
    auto f_at = [&](double r) {
      return correlation_ula_delta(r * cu / n2, r * cv / double(n), n);
    };
    const double r_outer = bracket_crossing(f_at, 0.25, 64.0, c_level);
    if (std::isnan(r_outer)) continue;
    const double r_c = bisect_crossing(f_at, r_outer, c_level, 1e-9);
    const double r_hi_bracket = bracket_crossing(f_at, r_c / 16.0, r_c, 0.999);
    const double r_999 = std::isnan(r_hi_bracket) ? r_c / radii
                                                  : bisect_crossing(f_at, r_hi_bracket, 0.999, 1e-9);
    for (int i = 1; i <= radii; ++i) {
      const double r = r_999 + (r_c - r_999) * double(i) / radii;
      const double u = r * cu, v = r * cv;
      usq.push_back(u * u);
      vsq.push_back(v * v);
      y.push_back(1.0 - f_at(r));
    }
  }
  if (y.size() < 8) throw std::runtime_error("fit_ula_coefficients: degenerate sample set");
  // Unweighted least squares for y = A u^2 + B v^2.
  double suu = 0, svv = 0, suv = 0, suy = 0, svy = 0;
  for (size_t i = 0; i < y.size(); ++i) {
    suu += usq[i] * usq[i];
    svv += vsq[i] * vsq[i];
    suv += usq[i] * vsq[i];
    suy += usq[i] * y[i];
    svy += vsq[i] * y[i];
  }
  const double det = suu * svv - suv * suv;
  if (std::abs(det) < 1e-30) throw std::runtime_error("fit_ula_coefficients: singular normal equations");
  const double a = (suy * svv - svy * suv) / det;
  const double b = (svy * suu - suy * suv) / det;
  return {-a, -b};
}

UlaContourSemiAxes ula_contour_semiaxes(double c, int n, const UlaFitCoefficients& coeffs) {
  if (!(c > 0.0 && c < 1.0)) throw std::invalid_argument("ula_contour_semiaxes: c must be in (0,1)");
  const double n2 = double(n) * n;
  return {std::sqrt((c - 1.0) / coeffs.p_alpha) / n2, std::sqrt((c - 1.0) / coeffs.p_beta) / n};
}

bool in_ula_contour(double d_alpha, double d_beta, double c, int n,
                    const UlaFitCoefficients& coeffs) {
  const double n2 = double(n) * n;
  return (coeffs.p_alpha * d_alpha * d_alpha * n2 * n2 + coeffs.p_beta * d_beta * d_beta * n2) /
             (c - 1.0) <=
         1.0 + 1e-12;
}

double fitted_upa_correlation(const TransformPoint& delta, int n,
                              const UpaFitCoefficients& coeffs) {
  const double n2 = double(n) * n;
  return 1.0 + coeffs.p_psi * delta.psi() * delta.psi() * n2 +
         coeffs.p_varphi * delta.varphi() * delta.varphi() * n2 +
         coeffs.p_rho * delta.rho() * delta.rho() * n2 * n2;
}

namespace {

// Room along a unit direction before the transform box boundary
// [-1,1] x [-1,1] x [0, q_rho]; deltas are in physical transform units.
double box_room(const TransformPoint& center, const std::array<double, 3>& dir, double q_rho) {
  double room = kInfValue;
  const double lo[3] = {-1.0, -1.0, 0.0};
  const double hi[3] = {1.0, 1.0, q_rho};
  const double pos[3] = {center.u, center.v, center.w};
  for (int k = 0; k < 3; ++k) {
    if (dir[k] > 1e-300) room = std::min(room, (hi[k] - pos[k]) / dir[k]);
    if (dir[k] < -1e-300) room = std::min(room, (lo[k] - pos[k]) / dir[k]);
  }
  return std::max(0.0, room);
}

}  // namespace

UpaFitCoefficients fit_upa_local(const ArrayConfig& cfg, const TransformPoint& center,
                                 double c_level) {
  if (cfg.family != ArrayFamily::Upa)
    throw std::invalid_argument("fit_upa_local: UPA config required");
  if (!(c_level > 0.8 && c_level < 1.0))
    throw std::invalid_argument("fit_upa_local: c_level must be in (0.8, 1)");
  const int n = cfg.n;
  const double n2 = double(n) * n;
  const RegionBounds rb = region_bounds(cfg);
  const BeamVector b0 = beam_from_transform(cfg, center);

  RaySamples s;
  const int radii = 12;
  // All 26 sign/axis combinations; symmetric rays keep the fit centered.
  for (int ix = -1; ix <= 1; ++ix)
    for (int iy = -1; iy <= 1; ++iy)
      for (int iz = -1; iz <= 1; ++iz) {
        if (ix == 0 && iy == 0 && iz == 0) continue;
        const double norm = std::sqrt(double(ix * ix + iy * iy + iz * iz));
        // Unit direction in normalized delta space; physical deltas divide by
        // N on the angle axes and N^2 on rho.
        const std::array<double, 3> dir = {ix / norm / double(n), iy / norm / double(n),
                                           iz / norm / n2};
        auto f_at = [&](double r) {
          const TransformPoint q{center.u + r * dir[0], center.v + r * dir[1],
                                 center.w + r * dir[2]};
          return correlation(b0.v, beam_from_transform(cfg, q).v);
        };
        // Shrink the ray to stay inside the box rather than fail.
        const double room = box_room(center, dir, rb.q_rho);
        if (room <= 0.0) continue;
        const double r_outer = bracket_crossing(f_at, 0.25, room, c_level);
        const double r_c = std::isnan(r_outer)
                               ? room
                               : bisect_crossing(f_at, r_outer, c_level, 1e-9);
        for (int i = 1; i <= radii; ++i) {
          const double r = r_c * double(i) / radii;
          const double dpsi = r * dir[0], dvph = r * dir[1], drho = r * dir[2];
          s.x1sq.push_back(dpsi * dpsi * n2);
          s.x2sq.push_back(dvph * dvph * n2);
          s.x3sq.push_back(drho * drho * n2 * n2);
          s.y.push_back(1.0 - f_at(r));
        }
      }
  if (s.y.size() < 8) throw std::runtime_error("fit_upa_local: degenerate sample set");

  Eigen::Matrix3d ata = Eigen::Matrix3d::Zero();
  Eigen::Vector3d aty = Eigen::Vector3d::Zero();
  for (size_t i = 0; i < s.y.size(); ++i) {
    const Eigen::Vector3d row(s.x1sq[i], s.x2sq[i], s.x3sq[i]);
    ata += row * row.transpose();
    aty += row * s.y[i];
  }
  const Eigen::Vector3d sol = ata.ldlt().solve(aty);
  UpaFitCoefficients out;
  out.p_psi = -sol[0];
  out.p_varphi = -sol[1];
  out.p_rho = -sol[2];
  out.center = center;
  out.c_fit = c_level;
  return out;
}

double upa_level_halfwidth(const ArrayConfig& cfg, const TransformPoint& center, double c,
                           int axis, int direction) {
  if (cfg.family != ArrayFamily::Upa)
    throw std::invalid_argument("upa_level_halfwidth: UPA config required");
  const RegionBounds rb = region_bounds(cfg);
  std::array<double, 3> dir = {0.0, 0.0, 0.0};
  dir[axis] = direction >= 0 ? 1.0 : -1.0;
  const double room = box_room(center, dir, rb.q_rho);
  if (room <= 0.0) return std::numeric_limits<double>::quiet_NaN();
  const BeamVector b0 = beam_from_transform(cfg, center);
  auto f_at = [&](double r) {
    const TransformPoint q{center.u + r * dir[0], center.v + r * dir[1], center.w + r * dir[2]};
    return correlation(b0.v, beam_from_transform(cfg, q).v);
  };
  // Initial scale from the stationary axis widths: ~0.36/N (angles), ~0.5/N^2-ish
  // in rho units q_rho-scaled; geometric growth covers the rest.
  const double start = axis == 2 ? rb.q_rho / 64.0 : 0.05 / cfg.n;
  const double r_outer = bracket_crossing(f_at, std::min(start, room), room, c);
  if (std::isnan(r_outer)) return std::numeric_limits<double>::quiet_NaN();
  return bisect_crossing(f_at, r_outer, c, 1e-6);
}

ReferenceEllipsoid reference_ellipsoid(const ArrayConfig& cfg, double c,
                                       const std::array<int, 3>& probe_counts, int threads) {
  if (cfg.family != ArrayFamily::Upa)
    throw std::invalid_argument("reference_ellipsoid: UPA config required");
  if (!(c > 0.0 && c < 1.0)) throw std::invalid_argument("reference_ellipsoid: c must be in (0,1)");
  for (int k = 0; k < 3; ++k)
    if (probe_counts[k] < 2) throw std::invalid_argument("reference_ellipsoid: probe counts must be >= 2");

  const RegionBounds rb = region_bounds(cfg);
  std::vector<TransformPoint> probes;
  for (int i = 0; i < probe_counts[0]; ++i)
    for (int j = 0; j < probe_counts[1]; ++j)
      for (int k = 0; k < probe_counts[2]; ++k) {
        const double psi = -1.0 + (i + 0.5) * 2.0 / probe_counts[0];
        const double vph = -1.0 + (j + 0.5) * 2.0 / probe_counts[1];
        const double rho = (k + 0.5) * rb.q_rho / probe_counts[2];
        if (psi * psi + vph * vph > 1.0) continue;  // virtual grid points carry no UEs
        probes.push_back(TransformPoint::upa(psi, vph, rho));
      }

  std::vector<std::array<double, 3>> widths(probes.size());
  parallel_for_blocks(long(probes.size()), 1, threads, [&](long i0, long i1) {
    for (long p = i0; p < i1; ++p) {
      for (int axis = 0; axis < 3; ++axis) {
        const double plus = upa_level_halfwidth(cfg, probes[p], c, axis, +1);
        const double minus = upa_level_halfwidth(cfg, probes[p], c, axis, -1);
        double w = std::numeric_limits<double>::quiet_NaN();
        if (!std::isnan(plus)) w = plus;
        if (!std::isnan(minus)) w = std::isnan(w) ? minus : std::min(w, minus);
        if (std::isnan(w))
          throw std::runtime_error("reference_ellipsoid: level " + std::to_string(c) +
                                   " not reached in-domain at probe " + std::to_string(p) +
                                   " axis " + std::to_string(axis));
        widths[p][axis] = w;
      }
    }
  });

  ReferenceEllipsoid ref;
  ref.c = c;
  ref.l_psi = ref.l_varphi = ref.l_rho = kInfValue;
  for (const auto& w : widths) {
    ref.l_psi = std::min(ref.l_psi, w[0]);
    ref.l_varphi = std::min(ref.l_varphi, w[1]);
    ref.l_rho = std::min(ref.l_rho, w[2]);
  }
  const double n2 = double(cfg.n) * cfg.n;
  ref.p_star.p_psi = (c - 1.0) / (ref.l_psi * cfg.n * ref.l_psi * cfg.n);
  ref.p_star.p_varphi = (c - 1.0) / (ref.l_varphi * cfg.n * ref.l_varphi * cfg.n);
  ref.p_star.p_rho = (c - 1.0) / (ref.l_rho * n2 * ref.l_rho * n2);
  ref.p_star.center = TransformPoint::upa(0.0, 0.0, 0.0);
  ref.p_star.c_fit = c;
  ref.probe_grid_spec = "midpoint " + std::to_string(probe_counts[0]) + "x" +
                        std::to_string(probe_counts[1]) + "x" + std::to_string(probe_counts[2]) +
                        " over [-1,1]^2 x [0,q_rho], disc-filtered";
  return ref;
}

}  // namespace nfcb
