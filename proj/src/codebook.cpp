// SPDX-License-Identifier: Apache-2.0
//
// nfcb: codebook construction and evaluation for near-field large antenna arrays

#include "nfcb/codebook.hpp"

#include <cmath>

namespace nfcb {

std::string scheme_name(Scheme s) {
  switch (s) {
    case Scheme::UlaUniform: return "ula-uniform";
    case Scheme::UlaDislocation: return "ula-dislocation";
    case Scheme::UpaUniform: return "upa-uniform";
    case Scheme::DftUla: return "dft";
    case Scheme::Dft2dUpa: return "dft2d";
    case Scheme::EqualGrid: return "equal-grid";
    case Scheme::LloydMax: return "lloyd";
  }
  return "unknown";
}

Scheme scheme_from_name(const std::string& name) {
  if (name == "ula-uniform") return Scheme::UlaUniform;
  if (name == "ula-dislocation") return Scheme::UlaDislocation;
  if (name == "upa-uniform") return Scheme::UpaUniform;
  if (name == "dft") return Scheme::DftUla;
  if (name == "dft2d") return Scheme::Dft2dUpa;
  if (name == "equal-grid") return Scheme::EqualGrid;
  if (name == "lloyd") return Scheme::LloydMax;
  throw std::invalid_argument("unknown scheme: " + name);
}

int Codebook::bits() const {
  long s = size();
  if (s <= 1) return 0;
  int b = 0;
  long cap = 1;
  while (cap < s) {
    cap <<= 1;
    ++b;
  }
  return b;
}

Codeword Codebook::codeword(long i) const {
  if (i < 0 || i >= size()) throw std::out_of_range("Codebook::codeword");
  Codeword cw;
  cw.index = i;
  if (scheme == Scheme::LloydMax) {
    cw.vector.v = explicit_vectors.col(i);
    cw.vector.model = PhaseModel::Fresnel;
    cw.center = TransformPoint{};
    return cw;
  }
  cw.center = centers[size_t(i)];
  cw.vector = beam_from_transform(cfg, cw.center);
  if (counts.size() >= 2) {
    long rest = i;
    // index layout is row-major over counts
    std::array<long, 3> dims{1, 1, 1};
    for (size_t k = 0; k < counts.size() && k < 3; ++k) dims[k] = counts[k];
    if (counts.size() == 2) {
      cw.grid_indices = {int(rest / dims[1]), int(rest % dims[1]), 0};
    } else {
      cw.grid_indices = {int(rest / (dims[1] * dims[2])), int((rest / dims[2]) % dims[1]),
                         int(rest % dims[2])};
    }
  }
  return cw;
}

template <typename Scalar>
void Codebook::synth_block(long i0, long i1, CMat<Scalar>& out) const {
  const long total = cfg.total_elements();
  out.resize(total, i1 - i0);
  if (scheme == Scheme::LloydMax) {
    out = explicit_vectors.middleCols(i0, i1 - i0).cast<std::complex<Scalar>>();
    return;
  }
  for (long i = i0; i < i1; ++i) {
    auto col = out.col(i - i0);
    synth_beam_column<Scalar>(cfg, centers[size_t(i)], col);
  }
}

template void Codebook::synth_block<double>(long, long, CMat<double>&) const;
template void Codebook::synth_block<float>(long, long, CMat<float>&) const;

namespace {

void require_c(double c) {
  if (!(c > 0.0 && c < 1.0)) throw std::invalid_argument("design correlation must be in (0,1)");
}

void require_coeffs(const UlaFitCoefficients& k) {
  if (!(k.p_alpha < 0.0 && k.p_beta < 0.0))
    throw std::invalid_argument("fit coefficients must be negative");
}

long ceil_count(double x) { return long(std::ceil(x - 1e-12)); }

}  // namespace

std::pair<double, double> ula_uniform_steps(int n, double c, const UlaFitCoefficients& coeffs) {
  require_c(c);
  require_coeffs(coeffs);
  const double n2 = double(n) * n;
  return {std::sqrt(2.0 * (c - 1.0) / coeffs.p_alpha) / n2,
          std::sqrt(2.0 * (c - 1.0) / coeffs.p_beta) / n};
}

Codebook build_ula_uniform(const ArrayConfig& cfg, double c, const UlaFitCoefficients& coeffs) {
  if (cfg.family != ArrayFamily::Ula) throw std::invalid_argument("build_ula_uniform: ULA config required");
  const auto [da, db] = ula_uniform_steps(cfg.n, c, coeffs);
  const RegionBounds rb = region_bounds(cfg);
  const long s_alpha = ceil_count(rb.q_alpha / da);
  const long s_beta = ceil_count(rb.q_beta / db);
  Codebook cb;
  cb.scheme = Scheme::UlaUniform;
  cb.cfg = cfg;
  cb.design_c = c;
  cb.steps = {da, db};
  cb.counts = {s_alpha, s_beta};
  cb.ula_coeffs = coeffs;
  cb.centers.reserve(size_t(s_alpha * s_beta));
  for (long i = 0; i < s_alpha; ++i)
    for (long j = 0; j < s_beta; ++j)
      cb.centers.push_back(TransformPoint::ula((i + 0.5) * da, -1.0 + (j + 0.5) * db));
  return cb;
}

std::pair<double, double> ula_dislocation_steps(int n, double c, const UlaFitCoefficients& coeffs) {
  require_c(c);
  require_coeffs(coeffs);
  const double n2 = double(n) * n;
  return {3.0 * std::sqrt((c - 1.0) / coeffs.p_alpha) / n2,
          std::sqrt(3.0 * (c - 1.0) / coeffs.p_beta) / n};
}

Codebook build_ula_dislocation(const ArrayConfig& cfg, double c, const UlaFitCoefficients& coeffs) {
  if (cfg.family != ArrayFamily::Ula)
    throw std::invalid_argument("build_ula_dislocation: ULA config required");
  const auto [da, db] = ula_dislocation_steps(cfg.n, c, coeffs);
  const RegionBounds rb = region_bounds(cfg);
  // Rows are anchored at alpha = 0 rather than mid-cell, so covering the top
  // edge (Q_alpha within the hexagon of the last offset row) costs an extra
  // 1/6 step before the ceiling.
  const long s_alpha = ceil_count(rb.q_alpha / da + 1.0 / 6.0);
  const long s_beta = ceil_count(rb.q_beta / db);
  Codebook cb;
  cb.scheme = Scheme::UlaDislocation;
  cb.cfg = cfg;
  cb.design_c = c;
  cb.steps = {da, db};
  cb.counts = {s_alpha, s_beta, 2};
  cb.ula_coeffs = coeffs;
  cb.centers.reserve(size_t(2 * s_alpha * s_beta));
  // Sublattice 0 anchored at (0, -1); sublattice 1 shifted by half a step on
  // both axes, which makes each cell the hexagon around its codeword.
  for (long i = 0; i < s_alpha; ++i)
    for (long j = 0; j < s_beta; ++j)
      for (int sub = 0; sub < 2; ++sub) {
        double a = (double(i) + (sub ? 0.5 : 0.0)) * da;
        double b = -1.0 + (double(j) + (sub ? 0.5 : 0.0)) * db;
        a = std::min(a, rb.q_alpha);
        b = std::min(b, 1.0);
        cb.centers.push_back(TransformPoint::ula(a, b));
      }
  return cb;
}

Codebook build_upa_uniform(const ArrayConfig& cfg, double c, const ReferenceEllipsoid& ref) {
  if (cfg.family != ArrayFamily::Upa) throw std::invalid_argument("build_upa_uniform: UPA config required");
  require_c(c);
  if (std::abs(ref.c - c) > 1e-9)
    throw std::invalid_argument("build_upa_uniform: reference ellipsoid was computed at a different c");
  // Maximum-volume cuboid inscribed in the ellipsoid: vertices at l/sqrt(3).
  const double dpsi = 2.0 * ref.l_psi / std::sqrt(3.0);
  const double dvph = 2.0 * ref.l_varphi / std::sqrt(3.0);
  const double drho = 2.0 * ref.l_rho / std::sqrt(3.0);
  const RegionBounds rb = region_bounds(cfg);
  const long s_psi = ceil_count(2.0 / dpsi);
  const long s_vph = ceil_count(2.0 / dvph);
  const long s_rho = ceil_count(rb.q_rho / drho);
  Codebook cb;
  cb.scheme = Scheme::UpaUniform;
  cb.cfg = cfg;
  cb.design_c = c;
  cb.steps = {dpsi, dvph, drho};
  cb.counts = {s_psi, s_vph, s_rho};
  cb.reference = ref;
  cb.centers.reserve(size_t(s_psi * s_vph * s_rho));
  cb.valid.reserve(size_t(s_psi * s_vph * s_rho));
  for (long i = 0; i < s_psi; ++i)
    for (long j = 0; j < s_vph; ++j)
      for (long k = 0; k < s_rho; ++k) {
        const double psi = -1.0 + (i + 0.5) * dpsi;
        const double vph = -1.0 + (j + 0.5) * dvph;
        const double rho = (k + 0.5) * drho;
        cb.centers.push_back(TransformPoint::upa(psi, vph, rho));
        cb.valid.push_back(psi * psi + vph * vph <= 1.0 ? 1 : 0);
      }
  return cb;
}

Codebook build_dft(const ArrayConfig& cfg) {
  Codebook cb;
  cb.cfg = cfg;
  if (cfg.family == ArrayFamily::Ula) {
    cb.scheme = Scheme::DftUla;
    cb.counts = {1, cfg.n};
    cb.steps = {0.0, 2.0 / cfg.n};
    cb.centers.reserve(size_t(cfg.n));
    for (int j = 0; j < cfg.n; ++j)
      cb.centers.push_back(TransformPoint::ula(0.0, -1.0 + 2.0 * j / cfg.n));
    return cb;
  }
  cb.scheme = Scheme::Dft2dUpa;
  cb.counts = {cfg.n, cfg.n, 1};
  cb.steps = {2.0 / cfg.n, 2.0 / cfg.n, 0.0};
  cb.centers.reserve(size_t(cfg.total_elements()));
  cb.valid.reserve(size_t(cfg.total_elements()));
  for (int i = 0; i < cfg.n; ++i)
    for (int j = 0; j < cfg.n; ++j) {
      const double psi = -1.0 + 2.0 * i / cfg.n;
      const double vph = -1.0 + 2.0 * j / cfg.n;
      cb.centers.push_back(TransformPoint::upa(psi, vph, 0.0));
      cb.valid.push_back(psi * psi + vph * vph <= 1.0 ? 1 : 0);
    }
  return cb;
}

Codebook build_equal_grid(const ArrayConfig& cfg, int per_domain) {
  if (per_domain < 2) throw std::invalid_argument("build_equal_grid: per_domain must be >= 2");
  const RegionBounds rb = region_bounds(cfg);
  Codebook cb;
  cb.scheme = Scheme::EqualGrid;
  cb.cfg = cfg;
  if (cfg.family == ArrayFamily::Ula) {
    const double da = rb.q_alpha / per_domain;
    const double db = 2.0 / per_domain;
    cb.steps = {da, db};
    cb.counts = {per_domain, per_domain};
    cb.centers.reserve(size_t(per_domain) * per_domain);
    for (int i = 0; i < per_domain; ++i)
      for (int j = 0; j < per_domain; ++j)
        cb.centers.push_back(TransformPoint::ula((i + 0.5) * da, -1.0 + (j + 0.5) * db));
    return cb;
  }
  const double dpsi = 2.0 / per_domain;
  const double drho = rb.q_rho / per_domain;
  cb.steps = {dpsi, dpsi, drho};
  cb.counts = {per_domain, per_domain, per_domain};
  const size_t total = size_t(per_domain) * per_domain * per_domain;
  cb.centers.reserve(total);
  cb.valid.reserve(total);
  for (int i = 0; i < per_domain; ++i)
    for (int j = 0; j < per_domain; ++j)
      for (int k = 0; k < per_domain; ++k) {
        const double psi = -1.0 + (i + 0.5) * dpsi;
        const double vph = -1.0 + (j + 0.5) * dpsi;
        cb.centers.push_back(TransformPoint::upa(psi, vph, (k + 0.5) * drho));
        cb.valid.push_back(psi * psi + vph * vph <= 1.0 ? 1 : 0);
      }
  return cb;
}

namespace {

DomainCounts finish_counts(std::vector<double> pre, std::vector<double> round_offsets,
                           long interleave) {
  DomainCounts dc;
  dc.pre_round = std::move(pre);
  dc.total_pre_round = double(interleave);
  dc.total = interleave;
  for (size_t k = 0; k < dc.pre_round.size(); ++k) {
    dc.rounded.push_back(ceil_count(dc.pre_round[k] + round_offsets[k]));
    dc.total_pre_round *= dc.pre_round[k];
    dc.total *= dc.rounded.back();
  }
  long cap = 1;
  dc.bits = 0;
  while (cap < dc.total) {
    cap <<= 1;
    ++dc.bits;
  }
  return dc;
}

}  // namespace

DomainCounts codeword_count(Scheme scheme, const ArrayConfig& cfg, double c,
                            const UlaFitCoefficients& coeffs) {
  const RegionBounds rb = region_bounds(cfg);
  switch (scheme) {
    case Scheme::UlaUniform: {
      const auto [da, db] = ula_uniform_steps(cfg.n, c, coeffs);
      return finish_counts({rb.q_alpha / da, rb.q_beta / db}, {0.0, 0.0}, 1);
    }
    case Scheme::UlaDislocation: {
      const auto [da, db] = ula_dislocation_steps(cfg.n, c, coeffs);
      // Edge-anchored rows: same 1/6-step coverage allowance as the builder.
      return finish_counts({rb.q_alpha / da, rb.q_beta / db}, {1.0 / 6.0, 0.0}, 2);
    }
    default:
      throw std::invalid_argument("codeword_count: closed-form counts exist for the proposed ULA schemes; use codeword_count_upa for UPA");
  }
}

DomainCounts codeword_count_upa(const ArrayConfig& cfg, double c, const ReferenceEllipsoid& ref) {
  if (std::abs(ref.c - c) > 1e-9)
    throw std::invalid_argument("codeword_count_upa: reference computed at a different c");
  const RegionBounds rb = region_bounds(cfg);
  const double dpsi = 2.0 * ref.l_psi / std::sqrt(3.0);
  const double dvph = 2.0 * ref.l_varphi / std::sqrt(3.0);
  const double drho = 2.0 * ref.l_rho / std::sqrt(3.0);
  return finish_counts({2.0 / dpsi, 2.0 / dvph, rb.q_rho / drho}, {0.0, 0.0, 0.0}, 1);
}

double ula_uniform_count_closed_form(int n, double c, const UlaFitCoefficients& coeffs) {
  require_c(c);
  require_coeffs(coeffs);
  return double(n) * std::sqrt(double(n) * coeffs.p_alpha * coeffs.p_beta) / (1.0 - c);
}

double ula_dislocation_count_closed_form(int n, double c, const UlaFitCoefficients& coeffs) {
  require_c(c);
  require_coeffs(coeffs);
  return 4.0 * double(n) / (3.0 * (1.0 - c)) *
         std::sqrt(double(n) * coeffs.p_alpha * coeffs.p_beta / 3.0);
}

double max_c_for_bits(Scheme scheme, const ArrayConfig& cfg, int bits,
                      const UlaFitCoefficients& coeffs) {
  if (bits < 1 || bits > 62) throw std::invalid_argument("max_c_for_bits: bits out of range");
  const long budget = 1L << bits;
  auto fits = [&](double c) { return codeword_count(scheme, cfg, c, coeffs).total <= budget; };
  double lo = 0.5, hi = 1.0 - 1e-9;
  if (!fits(lo)) throw std::invalid_argument("max_c_for_bits: budget too small for c = 0.5");
  if (fits(hi)) return hi;
  for (int it = 0; it < 100; ++it) {
    const double mid = 0.5 * (lo + hi);
    (fits(mid) ? lo : hi) = mid;
  }
  return lo;
}

}  // namespace nfcb
