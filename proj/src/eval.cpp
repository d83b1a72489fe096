// SPDX-License-Identifier: Apache-2.0
//
// nfcb: codebook construction and evaluation for near-field large antenna arrays

#include "nfcb/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <unordered_map>

#include "nfcb/parallel.hpp"
#include "nfcb/rng.hpp"

namespace nfcb {

namespace {

constexpr long kCodewordSlab = 4096;  // codeword columns per synth/GEMM slab
constexpr long kUeBlock = 256;        // UE columns per task

}  // namespace

std::pair<long, double> select_codeword(const VecXcd& h, const Codebook& cb, int threads) {
  if (h.size() != cb.cfg.total_elements())
    throw std::invalid_argument("select_codeword: dimension mismatch");
  (void)threads;
  const long s = cb.size();
  CVec<float> hf = (h / h.norm()).cast<std::complex<float>>();
  long best_index = 0;
  float best_sq = -1.0f;
  CMat<float> slab;
  for (long i0 = 0; i0 < s; i0 += kCodewordSlab) {
    const long i1 = std::min(s, i0 + kCodewordSlab);
    cb.synth_block<float>(i0, i1, slab);
    const Eigen::VectorXf scores = (slab.adjoint() * hf).cwiseAbs2();
    for (long i = 0; i < i1 - i0; ++i)
      if (scores[i] > best_sq) {
        best_sq = scores[i];
        best_index = i0 + i;
      }
  }
  // Re-evaluate the winner in double for a clean reported correlation.
  const VecXcd w = cb.codeword(best_index).vector.v;
  const double corr = std::abs(cxd(w.adjoint() * (h / h.norm())));
  return {best_index, corr};
}

double snr_linear(double p, double eta, long total_elements, double r, double sigma2) {
  if (!(p > 0.0 && eta > 0.0 && total_elements > 0 && r > 0.0 && sigma2 > 0.0))
    throw std::invalid_argument("snr_linear: all parameters must be positive");
  return p * eta * double(total_elements) / (r * r * sigma2);
}

double to_db(double linear) { return 10.0 * std::log10(linear); }
double from_db(double db) { return std::pow(10.0, db / 10.0); }

double achievable_rate(double snr, double corr) { return std::log2(1.0 + snr * corr * corr); }

double achievable_rate(const RateParams& params, const BeamVector& w, const BeamVector& b) {
  const double snr = snr_linear(params.p, params.eta, params.total_elements, params.r, params.sigma2);
  return achievable_rate(snr, correlation(w, b));
}

std::vector<UeSample> sample_ues(const ArrayConfig& cfg, long count, std::uint64_t seed,
                                 UeDistribution dist, double eta) {
  if (count < 1) throw std::invalid_argument("sample_ues: count must be >= 1");
  const RegionBounds rb = region_bounds(cfg);
  std::vector<UeSample> ues(static_cast<size_t>(count));
  for (long i = 0; i < count; ++i) {
    CounterRng rng(seed, std::uint64_t(i) + 1);
    UeSample& ue = ues[size_t(i)];
    if (dist == UeDistribution::UniformTransform) {
      if (cfg.family == ArrayFamily::Ula) {
        const double alpha = rb.q_alpha * rng.next_unit_pos();
        const double beta = -1.0 + 2.0 * rng.next_unit();
        ue.transform = TransformPoint::ula(alpha, beta);
      } else {
        double psi = 0.0, vph = 0.0;
        do {
          psi = -1.0 + 2.0 * rng.next_unit();
          vph = -1.0 + 2.0 * rng.next_unit();
        } while (psi * psi + vph * vph > 1.0);
        ue.transform = TransformPoint::upa(psi, vph, rb.q_rho * rng.next_unit_pos());
      }
      ue.position = from_transform(cfg, ue.transform);
    } else {
      PhysicalPosition p;
      p.theta_rad = -kPi / 2.0 + kPi * rng.next_unit();
      if (cfg.family == ArrayFamily::Upa) p.phi_rad = kPi * rng.next_unit();
      p.r_m = rb.fresnel_min_r_m + (rb.rayleigh_r_m - rb.fresnel_min_r_m) * rng.next_unit();
      ue.position = p;
      ue.transform = to_transform(cfg, p);
    }
    ue.channel = channel(cfg, ue.position, eta, PhaseModel::Fresnel);
  }
  return ues;
}

std::vector<double> best_correlations(const Codebook& cb, const std::vector<UeSample>& ues,
                                      int threads) {
  const long u_count = long(ues.size());
  const long dim = cb.cfg.total_elements();
  CMat<float> u(dim, u_count);
  for (long i = 0; i < u_count; ++i) {
    const VecXcd& h = ues[size_t(i)].channel.v;
    if (h.size() != dim) throw std::invalid_argument("best_correlations: dimension mismatch");
    u.col(i) = (h / h.norm()).cast<std::complex<float>>();
  }
  const long s = cb.size();
  std::vector<float> best(size_t(u_count), -1.0f);

  // Slabs of codewords stream through a GEMM against fixed UE blocks; both
  // partitions are independent of the worker count.
  CMat<float> slab;
  for (long i0 = 0; i0 < s; i0 += kCodewordSlab) {
    const long i1 = std::min(s, i0 + kCodewordSlab);
    cb.synth_block<float>(i0, i1, slab);
    parallel_for_blocks(u_count, kUeBlock, threads, [&](long c0, long c1) {
      const Eigen::MatrixXf scores = (slab.adjoint() * u.middleCols(c0, c1 - c0)).cwiseAbs2();
      for (long t = c0; t < c1; ++t) {
        float m = best[size_t(t)];
        const auto col = scores.col(t - c0);
        for (long k = 0; k < i1 - i0; ++k) m = std::max(m, col[k]);
        best[size_t(t)] = m;
      }
    });
  }
  std::vector<double> out(static_cast<size_t>(u_count));
  for (long i = 0; i < u_count; ++i)
    out[size_t(i)] = std::min(1.0, std::sqrt(double(std::max(0.0f, best[size_t(i)]))));
  return out;
}

std::vector<std::pair<double, double>> eval_cdf(const Codebook& cb,
                                                const std::vector<UeSample>& ues, int threads) {
  if (ues.empty()) throw std::invalid_argument("eval_cdf: empty UE set");
  std::vector<double> corr = best_correlations(cb, ues, threads);
  std::sort(corr.begin(), corr.end());
  std::vector<std::pair<double, double>> cdf(corr.size());
  for (size_t i = 0; i < corr.size(); ++i)
    cdf[i] = {corr[i], double(i + 1) / double(corr.size())};
  return cdf;
}

RateCurves eval_rate_curve(const std::vector<const Codebook*>& cbs,
                           const std::vector<std::string>& names,
                           const std::vector<UeSample>& ues, const std::vector<double>& snr_grid_db,
                           int threads) {
  if (cbs.empty() || ues.empty() || snr_grid_db.empty())
    throw std::invalid_argument("eval_rate_curve: empty input");
  if (cbs.size() != names.size())
    throw std::invalid_argument("eval_rate_curve: names/codebooks size mismatch");
  RateCurves rc;
  rc.snr_db = snr_grid_db;
  auto mean_rates = [&](const std::vector<double>& corr) {
    std::vector<double> mr;
    mr.reserve(snr_grid_db.size());
    for (double sdb : snr_grid_db) {
      const double snr = from_db(sdb);
      double acc = 0.0;
      for (double f : corr) acc += achievable_rate(snr, f);
      mr.push_back(acc / double(corr.size()));
    }
    return mr;
  };
  const std::vector<double> ones(ues.size(), 1.0);
  rc.curves.push_back({"perfect-csi", mean_rates(ones)});
  for (size_t k = 0; k < cbs.size(); ++k)
    rc.curves.push_back({names[k], mean_rates(best_correlations(*cbs[k], ues, threads))});
  return rc;
}

std::vector<OverheadRow> overhead_curve(const ArrayConfig& cfg, const std::vector<double>& c_grid,
                                        const UlaFitCoefficients& coeffs) {
  if (cfg.family != ArrayFamily::Ula)
    throw std::invalid_argument("overhead_curve: ULA config required");
  std::vector<OverheadRow> rows;
  rows.reserve(c_grid.size());
  for (double c : c_grid) {
    OverheadRow row;
    row.c = c;
    row.uniform_count = ula_uniform_count_closed_form(cfg.n, c, coeffs);
    row.dislocation_count = ula_dislocation_count_closed_form(cfg.n, c, coeffs);
    row.uniform_bits = codeword_count(Scheme::UlaUniform, cfg, c, coeffs).bits;
    row.dislocation_bits = codeword_count(Scheme::UlaDislocation, cfg, c, coeffs).bits;
    row.ratio = row.dislocation_count / row.uniform_count;
    rows.push_back(row);
  }
  return rows;
}

namespace {

// Memoized ULA delta correlation. The audit grid is aligned to the codeword
// lattice, so the (d_alpha, d_beta) pairs repeat and the cache stays small;
// keys are the exact double bit patterns, compared for full equality.
class UlaDeltaCache {
 public:
  explicit UlaDeltaCache(int n) : n_(n) {}
  double operator()(double da, double db) {
    std::uint64_t ka, kb;
    std::memcpy(&ka, &da, 8);
    std::memcpy(&kb, &db, 8);
    const Key key{ka, kb};
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;
    const double v = correlation_ula_delta(da, db, n_);
    cache_.emplace(key, v);
    return v;
  }

 private:
  using Key = std::pair<std::uint64_t, std::uint64_t>;
  struct KeyHash {
    size_t operator()(const Key& k) const {
      auto mix = [](std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
      };
      return size_t(mix(k.first + 0x9E3779B97F4A7C15ULL * k.second));
    }
  };
  int n_;
  std::unordered_map<Key, double, KeyHash> cache_;
};

struct UlaLattice {
  // centers: alpha = (i + off + 0.5 sub) * step_a, beta = -1 + (j + off + 0.5 sub) * step_b
  double step_a = 0.0, step_b = 0.0;
  double off = 0.5;
  long s_a = 0, s_b = 0;
  int sublattices = 1;
  double clamp_a = kInfValue, clamp_b = kInfValue;

  TransformPoint center(long i, long j, int sub) const {
    const double a = (double(i) + off + 0.5 * sub) * step_a;
    const double b = -1.0 + (double(j) + off + 0.5 * sub) * step_b;
    return TransformPoint::ula(std::min(a, clamp_a), std::min(b, clamp_b));
  }
};

UlaLattice lattice_of(const Codebook& cb) {
  UlaLattice lat;
  lat.step_a = cb.steps[0];
  lat.step_b = cb.steps[1];
  lat.s_a = cb.counts[0];
  lat.s_b = cb.counts[1];
  switch (cb.scheme) {
    case Scheme::UlaUniform:
    case Scheme::EqualGrid:
      break;
    case Scheme::UlaDislocation:
      lat.sublattices = 2;
      lat.off = 0.0;
      lat.clamp_a = region_bounds(cb.cfg).q_alpha;
      lat.clamp_b = 1.0;
      break;
    case Scheme::DftUla:
      lat.step_a = region_bounds(cb.cfg).q_alpha;  // single alpha row at 0
      lat.off = 0.0;
      break;
    default:
      throw std::invalid_argument("audit: unsupported ULA lattice scheme");
  }
  return lat;
}

AuditRecord audit_ula(const Codebook& cb, int ppc, int threads) {
  const RegionBounds rb = region_bounds(cb.cfg);
  const UlaLattice lat = lattice_of(cb);
  // Grid pitch divides the lattice step so every cell sees ppc points per axis
  // and the delta set repeats exactly; endpoints included so cell corners (the
  // worst in-cell points) are sampled exactly.
  const long ppc_b = ppc * lat.sublattices;
  const double ha = lat.step_a / ppc;
  const double hb = lat.step_b / ppc_b;
  const long ga = lat.s_a * ppc;
  const long gb = lat.s_b * ppc_b;

  const long nblocks = (ga + 1 + 7) / 8;
  std::vector<AuditRecord> block_min(size_t(nblocks), AuditRecord{2.0, {}});
  parallel_for_blocks(ga + 1, 8, threads, [&](long i0, long i1) {
    UlaDeltaCache f(cb.cfg.n);
    AuditRecord local{2.0, {}};
    for (long gi = i0; gi < i1; ++gi) {
      const double a = gi * ha;
      if (a > rb.q_alpha) continue;
      const long ia = std::min(gi / ppc, lat.s_a - 1);
      for (long gj = 0; gj <= gb; ++gj) {
        const double b = -1.0 + gj * hb;
        if (b > 1.0) continue;
        const long jb = std::min(gj / ppc_b, lat.s_b - 1);
        double best = 0.0;
        for (int sub = 0; sub < lat.sublattices; ++sub)
          for (long di = -3; di <= 3; ++di) {
            const long ci = std::clamp(ia + di, 0L, lat.s_a - 1);
            for (long dj = -3; dj <= 3; ++dj) {
              // beta wraps with period 2 at half-wavelength spacing (endfire
              // grating lobe): out-of-range rows alias to the opposite edge.
              long cj = jb + dj;
              double shift = 0.0;
              if (cj < 0) {
                cj += lat.s_b;
                shift = -2.0;
              } else if (cj >= lat.s_b) {
                cj -= lat.s_b;
                shift = 2.0;
              }
              const TransformPoint w = lat.center(ci, cj, sub);
              best = std::max(best, f(a - w.alpha(), b - (w.beta() + shift)));
            }
          }
        if (best < local.correlation) local = {best, TransformPoint::ula(a, b)};
      }
    }
    block_min[size_t(i0 / 8)] = local;
  });
  AuditRecord out{2.0, {}};
  for (const auto& r : block_min)
    if (r.correlation < out.correlation) out = r;
  return out;
}

AuditRecord audit_upa(const Codebook& cb, int ppc, int threads) {
  const RegionBounds rb = region_bounds(cb.cfg);
  const long sp = cb.counts[0], sv = cb.counts[1], sr = cb.counts[2];
  const double dp = cb.steps[0], dv = cb.steps[1], dr = cb.steps[2];
  const long gp = sp * ppc, gv = sv * ppc, gr = std::max<long>(2, sr * ppc);
  const double hp = 2.0 / double(gp), hv = 2.0 / double(gv), hr = rb.q_rho / double(gr);
  const long dim = cb.cfg.total_elements();

  // The candidate search touches codewords repeatedly; materialize them once.
  MatXcd w_all(dim, cb.size());
  for (long i = 0; i < cb.size(); ++i) {
    auto col = w_all.col(i);
    synth_beam_column<double>(cb.cfg, cb.centers[size_t(i)], col);
  }

  std::vector<AuditRecord> row_min(size_t(gp), AuditRecord{2.0, {}});
  parallel_for_blocks(gp, 1, threads, [&](long i0, long i1) {
    CVec<double> ue(dim);
    for (long gi = i0; gi < i1; ++gi) {
      AuditRecord local{2.0, {}};
      const double psi = -1.0 + (gi + 0.5) * hp;
      const long ip = std::min(sp - 1, long(std::floor((psi + 1.0) / dp)));
      for (long gj = 0; gj < gv; ++gj) {
        const double vph = -1.0 + (gj + 0.5) * hv;
        if (psi * psi + vph * vph > 1.0) continue;
        const long jv = std::min(sv - 1, long(std::floor((vph + 1.0) / dv)));
        for (long gk = 0; gk < gr; ++gk) {
          const double rho = (gk + 0.5) * hr;
          const long kr = std::min(sr - 1, long(std::floor(rho / dr)));
          synth_beam_column<double>(cb.cfg, TransformPoint::upa(psi, vph, rho), ue);
          double best = 0.0;
          for (long di = -1; di <= 1; ++di) {
            const long ci = std::clamp(ip + di, 0L, sp - 1);
            for (long dj = -1; dj <= 1; ++dj) {
              const long cj = std::clamp(jv + dj, 0L, sv - 1);
              for (long dk = -1; dk <= 1; ++dk) {
                const long ck = std::clamp(kr + dk, 0L, sr - 1);
                const long idx = (ci * sv + cj) * sr + ck;
                best = std::max(best, std::abs(cxd(w_all.col(idx).adjoint() * ue)));
              }
            }
          }
          if (best < local.correlation) local = {best, TransformPoint::upa(psi, vph, rho)};
        }
      }
      row_min[size_t(gi)] = local;
    }
  });
  AuditRecord out{2.0, {}};
  for (const auto& r : row_min)
    if (r.correlation < out.correlation) out = r;
  return out;
}

}  // namespace

AuditRecord min_correlation_audit(const Codebook& cb, int points_per_cell_axis, int threads) {
  if (points_per_cell_axis < 4)
    throw std::invalid_argument("min_correlation_audit: need >= 4 points per cell per axis");
  if (cb.cfg.family == ArrayFamily::Ula && cb.scheme != Scheme::LloydMax)
    return audit_ula(cb, points_per_cell_axis, threads);
  if (cb.cfg.family == ArrayFamily::Upa && cb.scheme != Scheme::LloydMax)
    return audit_upa(cb, points_per_cell_axis, threads);
  // Generic fallback: full argmax over a modest uniform grid.
  const RegionBounds rb = region_bounds(cb.cfg);
  const long per_axis = std::max<long>(
      8, points_per_cell_axis *
             long(std::ceil(std::pow(double(cb.size()),
                                     1.0 / (cb.cfg.family == ArrayFamily::Ula ? 2.0 : 3.0)))));
  std::vector<UeSample> grid;
  if (cb.cfg.family == ArrayFamily::Ula) {
    for (long i = 0; i < per_axis; ++i)
      for (long j = 0; j < per_axis; ++j) {
        UeSample ue;
        ue.transform = TransformPoint::ula((i + 0.5) * rb.q_alpha / per_axis,
                                           -1.0 + (j + 0.5) * 2.0 / per_axis);
        ue.channel.v = beam_from_transform(cb.cfg, ue.transform).v;
        ue.channel.gain = 1.0;
        grid.push_back(std::move(ue));
      }
  } else {
    for (long i = 0; i < per_axis; ++i)
      for (long j = 0; j < per_axis; ++j)
        for (long k = 0; k < per_axis; ++k) {
          const double psi = -1.0 + (i + 0.5) * 2.0 / per_axis;
          const double vph = -1.0 + (j + 0.5) * 2.0 / per_axis;
          if (psi * psi + vph * vph > 1.0) continue;
          UeSample ue;
          ue.transform = TransformPoint::upa(psi, vph, (k + 0.5) * rb.q_rho / per_axis);
          ue.channel.v = beam_from_transform(cb.cfg, ue.transform).v;
          ue.channel.gain = 1.0;
          grid.push_back(std::move(ue));
        }
  }
  const std::vector<double> corr = best_correlations(cb, grid, threads);
  AuditRecord out{2.0, {}};
  for (size_t i = 0; i < corr.size(); ++i)
    if (corr[i] < out.correlation) out = {corr[i], grid[i].transform};
  return out;
}

}  // namespace nfcb
