// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include "nfcb/correlation.hpp"
#include "nfcb/geometry.hpp"
#include "nfcb/rng.hpp"
#include "oracles.hpp"

using namespace nfcb;

namespace {
ArrayConfig ula_lambda01(int n) { return ArrayConfig::make(ArrayFamily::Ula, n, kSpeedOfLight / 0.1); }
ArrayConfig upa_lambda01(int n) { return ArrayConfig::make(ArrayFamily::Upa, n, kSpeedOfLight / 0.1); }
}  // namespace

TEST_CASE("correlation basics") {
  auto cfg = ula_lambda01(64);
  auto b = beam_focusing(cfg, {40.0, 0.3}, PhaseModel::Fresnel);
  CHECK(correlation(b, b) == doctest::Approx(1.0).epsilon(1e-12));

  // orthogonal DFT columns
  auto a1 = far_field_steering(cfg, std::asin(0.0));
  auto a2 = far_field_steering(cfg, std::asin(2.0 / 64.0));
  CHECK(correlation(a1, a2) < 1e-12);

  BeamVector short_vec;
  short_vec.v = VecXcd::Ones(8) / std::sqrt(8.0);
  CHECK_THROWS_AS((void)correlation(b, short_vec), std::invalid_argument);
}

TEST_CASE("delta closed form equals the beam-vector correlation") {
  auto cfg = ula_lambda01(512);
  auto b1 = beam_focusing(cfg, {50.0, 0.0}, PhaseModel::Fresnel);
  auto b2 = beam_focusing(cfg, {50.0, 0.01}, PhaseModel::Fresnel);
  auto t1 = to_transform(cfg, {50.0, 0.0});
  auto t2 = to_transform(cfg, {50.0, 0.01});
  const double via_vectors = correlation(b1, b2);
  const double via_deltas =
      correlation_ula_delta(t2.alpha() - t1.alpha(), t2.beta() - t1.beta(), 512);
  CHECK(std::abs(via_vectors - via_deltas) <= 1e-10);
}

TEST_CASE("stationarity under the fresnel phase model") {
  auto cfg = ula_lambda01(256);
  const RegionBounds rb = region_bounds(cfg);
  CounterRng rng(21, 0);
  double worst = 0.0;
  for (int t = 0; t < 300; ++t) {
    const double da = rb.q_alpha * 0.2 * (rng.next_unit() - 0.5);
    const double db = 0.01 * (rng.next_unit() - 0.5);
    const TransformPoint s1{rb.q_alpha * 0.4 * rng.next_unit_pos(), -0.5 + rng.next_unit(), 0};
    const TransformPoint s2{rb.q_alpha * 0.4 * rng.next_unit_pos(), -0.5 + rng.next_unit(), 0};
    const double f1 = correlation(beam_from_transform(cfg, s1).v,
                                  beam_from_transform(cfg, {s1.u + da, s1.v + db, 0}).v);
    const double f2 = correlation(beam_from_transform(cfg, s2).v,
                                  beam_from_transform(cfg, {s2.u + da, s2.v + db, 0}).v);
    worst = std::max(worst, std::abs(f1 - f2));
  }
  CHECK(worst <= 1e-12);
}

TEST_CASE("symmetry in both delta signs") {
  CounterRng rng(22, 0);
  double worst = 0.0;
  for (int t = 0; t < 1000; ++t) {
    const double da = 4e-5 * (rng.next_unit() - 0.5);
    const double db = 4e-3 * (rng.next_unit() - 0.5);
    const double f = correlation_ula_delta(da, db, 512);
    worst = std::max(worst, std::abs(f - correlation_ula_delta(da, -db, 512)));
    worst = std::max(worst, std::abs(f - correlation_ula_delta(-da, db, 512)));
    worst = std::max(worst, std::abs(f - correlation_ula_delta(-da, -db, 512)));
  }
  CHECK(worst <= 1e-12);
}

TEST_CASE("correlation bound and equality case") {
  CounterRng rng(23, 0);
  for (int t = 0; t < 200; ++t) {
    const double f = correlation_ula_delta(1e-4 * rng.next_unit(), 0.2 * rng.next_unit(), 128);
    CHECK(f <= 1.0 + 1e-12);
  }
  CHECK(correlation_ula_delta(0.0, 0.0, 512) == doctest::Approx(1.0).epsilon(1e-14));
  // away from zero deltas the correlation strictly drops
  CHECK(correlation_ula_delta(0.0, 1e-5, 512) < 1.0 - 1e-9);
  CHECK(correlation_ula_delta(1e-8, 0.0, 512) < 1.0 - 1e-9);
  // first beta null at 2/N
  CHECK(correlation_ula_delta(0.0, 2.0 / 512.0, 512) <= 0.01);
}

TEST_CASE("scaled correlation") {
  CHECK(scaled_correlation(0.0, 0.0) == doctest::Approx(1.0).epsilon(1e-12));

  SUBCASE("linear-phase case is the sinc magnitude") {
    for (double v : {0.3, 0.7, 1.3, 1.9}) {
      const double x = kPi * v / 2.0;
      CHECK(scaled_correlation(0.0, v) == doctest::Approx(std::abs(std::sin(x) / x)).epsilon(1e-9));
    }
  }

  SUBCASE("antenna-count collapse at N = 512") {
    const double n2 = 512.0 * 512.0;
    double worst = 0.0;
    for (int i = 1; i <= 20; ++i)
      for (int j = 1; j <= 20; ++j) {
        const double ua = i * 0.15, vb = j * 0.04;
        const double sc = scaled_correlation(ua, vb);
        if (sc < 0.5) continue;
        worst = std::max(worst, std::abs(sc - correlation_ula_delta(ua / n2, vb / 512.0, 512)));
      }
    CHECK(worst <= 0.01);
  }

  SUBCASE("collapse across antenna counts") {
    for (int n : {128, 256, 512}) {
      const double n2 = double(n) * n;
      double worst = 0.0;
      for (int i = 0; i <= 8; ++i)
        for (int j = 0; j <= 8; ++j) {
          const double ua = i * 0.2, vb = j * 0.06;
          worst = std::max(worst,
                           std::abs(scaled_correlation(ua, vb) -
                                    correlation_ula_delta(ua / n2, vb / double(n), n)));
        }
      CHECK(worst <= 0.01);
    }
  }
}

TEST_CASE("ULA coefficient fit") {
  const auto fit = fit_ula_coefficients(512, 0.9);
  const auto stock = UlaFitCoefficients::defaults();
  CHECK(fit.p_alpha < 0.0);
  CHECK(fit.p_beta < 0.0);
  CHECK(std::abs(fit.p_alpha - stock.p_alpha) <= 0.15 * std::abs(stock.p_alpha));
  CHECK(std::abs(fit.p_beta - stock.p_beta) <= 0.15 * std::abs(stock.p_beta));

  SUBCASE("small-delta curvature sits between the aperture-limit and stock values") {
    // curvature of the scaled correlation at zero, by central differences
    const double h = 1e-3;
    const double curv_beta = (scaled_correlation(0.0, h) - 1.0) / (h * h);
    const double curv_alpha = (scaled_correlation(h, 0.0) - 1.0) / (h * h);
    CHECK(curv_beta == doctest::Approx(-kPi * kPi / 24.0).epsilon(1e-3));
    CHECK(curv_alpha == doctest::Approx(-kPi * kPi / 360.0).epsilon(1e-3));
    CHECK(fit.p_beta >= curv_beta - 2e-3);
    CHECK(fit.p_beta <= stock.p_beta + 2e-2);
    CHECK(fit.p_alpha >= curv_alpha - 2e-4);
    CHECK(fit.p_alpha <= stock.p_alpha + 2e-3);
  }

  SUBCASE("single-axis sample ratios stay near the stock constants") {
    // pure-beta effective coefficient over the fit range
    double pb_lo = 0.0, pb_hi = -1.0;
    for (double v = 0.15; v <= 0.5; v += 0.05) {
      const double p = (correlation_ula_delta(0.0, v / 512.0, 512) - 1.0) / (v * v);
      pb_lo = std::min(pb_lo, p);
      pb_hi = std::max(pb_hi, p);
    }
    CHECK(pb_lo >= -0.45);
    CHECK(pb_hi <= -0.35);
    double pa_lo = 0.0, pa_hi = -1.0;
    for (double u = 0.6; u <= 1.95; u += 0.15) {
      const double p = (correlation_ula_delta(u / (512.0 * 512.0), 0.0, 512) - 1.0) / (u * u);
      pa_lo = std::min(pa_lo, p);
      pa_hi = std::max(pa_hi, p);
    }
    CHECK(pa_lo >= -0.030);
    CHECK(pa_hi <= -0.022);
  }

  CHECK_THROWS_AS((void)fit_ula_coefficients(512, 0.5), std::invalid_argument);
}

TEST_CASE("contour semi-axes") {
  const auto stock = UlaFitCoefficients::defaults();
  auto ax = ula_contour_semiaxes(0.95, 512, stock);
  CHECK(ax.a_beta == doctest::Approx(6.98e-4).epsilon(5e-3));
  CHECK(ax.a_alpha == doctest::Approx(std::sqrt(0.05 / 0.025983670363830) / (512.0 * 512.0))
                          .epsilon(1e-12));

  SUBCASE("degenerate limit c -> 1") {
    auto tiny = ula_contour_semiaxes(1.0 - 1e-12, 512, stock);
    CHECK(tiny.a_alpha < 1e-10);
    CHECK(tiny.a_beta < 1e-8);
  }

  SUBCASE("antenna scaling: alpha axis 4x, beta axis 2x per doubling") {
    auto a1 = ula_contour_semiaxes(0.95, 256, stock);
    auto a2 = ula_contour_semiaxes(0.95, 512, stock);
    CHECK(a1.a_alpha / a2.a_alpha == doctest::Approx(4.0).epsilon(1e-12));
    CHECK(a1.a_beta / a2.a_beta == doctest::Approx(2.0).epsilon(1e-12));
  }

  SUBCASE("membership test brackets the contour") {
    CHECK(in_ula_contour(ax.a_alpha * 0.7, 0.0, 0.95, 512, stock));
    CHECK(!in_ula_contour(ax.a_alpha * 1.01, ax.a_beta * 0.2, 0.95, 512, stock));
  }
}

TEST_CASE("quadratic model accuracy on the c = 0.95 contour") {
  const auto stock = UlaFitCoefficients::defaults();
  auto ax = ula_contour_semiaxes(0.95, 512, stock);
  for (int k = 0; k < 64; ++k) {
    const double w = 2.0 * kPi * k / 64.0;
    const double f = correlation_ula_delta(ax.a_alpha * std::cos(w), ax.a_beta * std::sin(w), 512);
    CHECK(f >= 0.93);
    CHECK(f <= 0.97);
  }
}

TEST_CASE("UPA closed-form reference equals the beam-vector correlation") {
  auto cfg = upa_lambda01(16);
  const RegionBounds rb = region_bounds(cfg);
  CounterRng rng(31, 0);
  double worst = 0.0;
  for (int t = 0; t < 100; ++t) {
    auto draw = [&]() {
      double psi, vph;
      do {
        psi = -1.0 + 2.0 * rng.next_unit();
        vph = -1.0 + 2.0 * rng.next_unit();
      } while (psi * psi + vph * vph > 1.0);
      return TransformPoint::upa(psi, vph, rb.q_rho * rng.next_unit());
    };
    const TransformPoint s = draw(), q = draw();
    const double via_vectors =
        correlation(beam_from_transform(cfg, s).v, beam_from_transform(cfg, q).v);
    worst = std::max(worst, std::abs(via_vectors - oracle::upa_closed_form_correlation(cfg, s, q)));
  }
  CHECK(worst <= 1e-12);
}

TEST_CASE("UPA center symmetry in the angle deltas") {
  auto cfg = upa_lambda01(8);
  const TransformPoint c0 = TransformPoint::upa(0.0, 0.0, 0.1);
  auto b0 = beam_from_transform(cfg, c0);
  CounterRng rng(32, 0);
  double worst = 0.0;
  for (int t = 0; t < 250; ++t) {
    const double dp = 0.1 * (rng.next_unit() - 0.5);
    const double dv = 0.1 * (rng.next_unit() - 0.5);
    const double dr = 0.05 * rng.next_unit();
    auto f = [&](double a, double b) {
      return correlation(b0.v, beam_from_transform(cfg, {a, b, c0.w + dr}).v);
    };
    const double base = f(dp, dv);
    worst = std::max(worst, std::abs(base - f(-dp, dv)));
    worst = std::max(worst, std::abs(base - f(dp, -dv)));
    worst = std::max(worst, std::abs(base - f(-dp, -dv)));
  }
  CHECK(worst <= 1e-12);
}

TEST_CASE("local UPA fit") {
  auto cfg = upa_lambda01(16);

  SUBCASE("fitted level set tracks the true one at the domain center") {
    auto fit = fit_upa_local(cfg, TransformPoint::upa(0.0, 0.0, 0.0), 0.95);
    CHECK(fit.p_psi < 0.0);
    CHECK(fit.p_varphi < 0.0);
    CHECK(fit.p_rho < 0.0);
    auto b0 = beam_from_transform(cfg, fit.center);
    const double n2 = 256.0;
    CounterRng rng(33, 0);
    for (int t = 0; t < 60; ++t) {
      // random direction in normalized space; compare fitted and bisected radii
      double gx = rng.next_unit() - 0.5, gy = rng.next_unit() - 0.5, gz = rng.next_unit();
      const double norm = std::sqrt(gx * gx + gy * gy + gz * gz);
      if (norm < 0.1) continue;
      gx /= norm;
      gy /= norm;
      gz /= norm;
      const double denom =
          -(fit.p_psi * gx * gx + fit.p_varphi * gy * gy + fit.p_rho * gz * gz);
      const double r_fit = std::sqrt(0.05 / denom);
      auto f_at = [&](double r) {
        return correlation(b0.v, beam_from_transform(cfg, {r * gx / 16.0, r * gy / 16.0,
                                                           r * gz / n2}).v);
      };
      double hi = r_fit;
      while (f_at(hi) > 0.95) hi *= 1.3;
      double lo = 0.0;
      for (int it = 0; it < 60; ++it) {
        const double mid = 0.5 * (lo + hi);
        (f_at(mid) > 0.95 ? lo : hi) = mid;
      }
      const double r_true = 0.5 * (lo + hi);
      CHECK(std::abs(r_fit / r_true - 1.0) <= 0.10);
    }
  }

  SUBCASE("fitted formula is even in the angle deltas") {
    auto fit = fit_upa_local(cfg, TransformPoint::upa(0.2, -0.1, 0.2), 0.9);
    const TransformPoint d1{0.01, -0.02, 0.03};
    const TransformPoint d2{-0.01, 0.02, 0.03};
    CHECK(fitted_upa_correlation(d1, 16, fit) ==
          doctest::Approx(fitted_upa_correlation(d2, 16, fit)).epsilon(1e-15));
  }

  SUBCASE("non-stationarity: different centers, different coefficients") {
    auto f1 = fit_upa_local(cfg, TransformPoint::upa(0.0, 0.0, 0.05), 0.95);
    auto f2 = fit_upa_local(cfg, TransformPoint::upa(0.5, 0.0, 0.3), 0.95);
    const double rel = std::abs(f1.p_rho - f2.p_rho) / std::abs(f1.p_rho);
    CHECK(rel > 0.01);
  }

  SUBCASE("centers near the domain boundary shrink the probe rays instead of failing") {
    auto fit = fit_upa_local(cfg, TransformPoint::upa(0.98, 0.0, 0.01), 0.9);
    CHECK(fit.p_psi < 0.0);
    CHECK(fit.p_varphi < 0.0);
    CHECK(fit.p_rho < 0.0);
  }
}

TEST_CASE("reference ellipsoid") {
  auto cfg = upa_lambda01(8);
  auto ref = reference_ellipsoid(cfg, 0.95, {3, 3, 2}, 2);
  CHECK(ref.l_psi > 0.0);
  CHECK(ref.l_varphi > 0.0);
  CHECK(ref.l_rho > 0.0);

  SUBCASE("axis lengths are minima over the probes") {
    // re-measure a few probes with the public half-width helper
    const RegionBounds rb = region_bounds(cfg);
    for (double psi : {-2.0 / 3.0, 0.0}) {
      const TransformPoint probe{psi, 2.0 / 3.0 * 0.0, rb.q_rho * 0.25};
      for (int axis = 0; axis < 3; ++axis) {
        const double w = upa_level_halfwidth(cfg, probe, 0.95, axis, +1);
        if (!std::isnan(w)) {
          const double lmin = axis == 0 ? ref.l_psi : axis == 1 ? ref.l_varphi : ref.l_rho;
          CHECK(w >= lmin - 1e-6);
        }
      }
    }
  }

  SUBCASE("p-star consistency") {
    CHECK(ref.p_star.p_psi ==
          doctest::Approx((0.95 - 1.0) / (ref.l_psi * 8 * ref.l_psi * 8)).epsilon(1e-12));
    CHECK(ref.p_star.p_rho ==
          doctest::Approx((0.95 - 1.0) / (ref.l_rho * 64 * ref.l_rho * 64)).epsilon(1e-12));
  }

  SUBCASE("raising c shrinks every axis") {
    auto tight = reference_ellipsoid(cfg, 0.97, {3, 3, 2}, 2);
    CHECK(tight.l_psi < ref.l_psi);
    CHECK(tight.l_varphi < ref.l_varphi);
    CHECK(tight.l_rho < ref.l_rho);
  }

  CHECK_THROWS_AS((void)reference_ellipsoid(cfg, 0.95, {1, 3, 2}, 1), std::invalid_argument);
}
