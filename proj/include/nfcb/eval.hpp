// SPDX-License-Identifier: Apache-2.0
//
// nfcb: codebook construction and evaluation for near-field large antenna arrays

#ifndef NFCB_EVAL_HPP
#define NFCB_EVAL_HPP

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "nfcb/codebook.hpp"

namespace nfcb {

enum class UeDistribution { UniformTransform, UniformPhysical };

struct UeSample {
  PhysicalPosition position;
  TransformPoint transform;
  ChannelVector channel;
};

// s* = argmax_s |h^H W_s|^2, ties to the lowest index. Returns the winning
// index and its correlation normalized to unit vectors. Scores run through
// single-precision GEMM blocks; the winner is re-evaluated in double.
std::pair<long, double> select_codeword(const VecXcd& h, const Codebook& cb, int threads = 1);

// Receive SNR = P eta N / (r^2 sigma^2).
double snr_linear(double p, double eta, long total_elements, double r, double sigma2);
double to_db(double linear);
double from_db(double db);

// R = log2(1 + snr * corr^2).
double achievable_rate(double snr, double corr);
struct RateParams {
  double p = 1.0;
  double eta = 1.0;
  long total_elements = 1;
  double r = 1.0;
  double sigma2 = 1.0;
};
double achievable_rate(const RateParams& params, const BeamVector& w, const BeamVector& b);

// Deterministic counter-seeded UE draw. UniformTransform draws uniformly over
// the transform-domain region (rho and alpha on (0, max], so r stays finite);
// UniformPhysical draws theta (and phi) uniformly and r uniformly on
// [fresnel_min, rayleigh]. UPA angle draws are rejected outside the unit disc.
// Channels use the Fresnel phase model, the regime the codebooks quantize.
std::vector<UeSample> sample_ues(const ArrayConfig& cfg, long count, std::uint64_t seed,
                                 UeDistribution dist, double eta = 1.0);

// Best-codeword correlation per UE (the heavy inner loop shared by the CDF and
// rate evaluations).
std::vector<double> best_correlations(const Codebook& cb, const std::vector<UeSample>& ues,
                                      int threads = 1);

// Sorted empirical CDF of the selected-codeword correlations.
std::vector<std::pair<double, double>> eval_cdf(const Codebook& cb,
                                                const std::vector<UeSample>& ues, int threads = 1);

struct RateCurve {
  std::string name;
  std::vector<double> mean_rate;  // one entry per SNR grid point
};
struct RateCurves {
  std::vector<double> snr_db;
  std::vector<RateCurve> curves;  // includes the perfect-CSI upper curve
};
RateCurves eval_rate_curve(const std::vector<const Codebook*>& cbs,
                           const std::vector<std::string>& names,
                           const std::vector<UeSample>& ues, const std::vector<double>& snr_grid_db,
                           int threads = 1);

struct OverheadRow {
  double c = 0.0;
  double uniform_count = 0.0;      // analytic closed form, pre-rounding
  double dislocation_count = 0.0;  // analytic closed form, pre-rounding
  int uniform_bits = 0;            // from the ceiling-rounded builder counts
  int dislocation_bits = 0;
  double ratio = 0.0;              // dislocation_count / uniform_count
};
std::vector<OverheadRow> overhead_curve(const ArrayConfig& cfg, const std::vector<double>& c_grid,
                                        const UlaFitCoefficients& coeffs);

struct AuditRecord {
  double correlation = 1.0;
  TransformPoint ue;
};

// Dense in-region sweep of the best-codeword correlation; grid density is
// points per codeword cell per axis (>= 4). Grid-scheme codebooks use a local
// candidate search (exact for cell-sized steps); LloydMax falls back to the
// full argmax.
AuditRecord min_correlation_audit(const Codebook& cb, int points_per_cell_axis, int threads = 1);

struct EvalReport {
  std::vector<std::pair<double, double>> cdf;
  std::map<std::string, std::vector<std::pair<double, double>>> rate_curves;
  std::vector<OverheadRow> overhead;
  std::uint64_t seed = 0;
  std::string config_digest;
};

}  // namespace nfcb

#endif  // NFCB_EVAL_HPP
