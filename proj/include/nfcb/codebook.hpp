// SPDX-License-Identifier: Apache-2.0
//
// nfcb: codebook construction and evaluation for near-field large antenna arrays

#ifndef NFCB_CODEBOOK_HPP
#define NFCB_CODEBOOK_HPP

#include <string>
#include <vector>

#include "nfcb/correlation.hpp"
#include "nfcb/geometry.hpp"
#include "nfcb/types.hpp"

namespace nfcb {

enum class Scheme {
  UlaUniform,
  UlaDislocation,
  UpaUniform,
  DftUla,
  Dft2dUpa,
  EqualGrid,
  LloydMax,
};

std::string scheme_name(Scheme s);
Scheme scheme_from_name(const std::string& name);

struct Codeword {
  BeamVector vector;
  TransformPoint center;
  long index = 0;
  std::array<int, 3> grid_indices{0, 0, 0};
};

// Codeword centers plus the metadata needed to regenerate every vector.
// Vectors are synthesized on demand (Fresnel phases in transform coordinates)
// so a codebook stays O(S) in memory and on disk; Lloyd-Max codebooks are the
// exception and carry their trained vectors explicitly.
struct Codebook {
  Scheme scheme = Scheme::UlaUniform;
  ArrayConfig cfg;
  std::optional<double> design_c;
  std::vector<double> steps;   // per-domain sampling steps
  std::vector<long> counts;    // per-domain counts; dislocation appends the interleave factor 2
  std::vector<TransformPoint> centers;
  std::vector<uint8_t> valid;  // physically-valid flag (UPA disc); empty means all valid
  UlaFitCoefficients ula_coeffs{};             // schemes built from the ULA fit
  std::optional<ReferenceEllipsoid> reference; // UPA proposed scheme
  MatXcd explicit_vectors;                     // LloydMax only, total x S

  long size() const { return scheme == Scheme::LloydMax ? explicit_vectors.cols() : long(centers.size()); }
  int bits() const;
  bool is_valid_center(long i) const { return valid.empty() || valid[size_t(i)] != 0; }

  Codeword codeword(long i) const;

  // Materializes codeword columns [i0, i1) into `out` (total x (i1-i0)).
  template <typename Scalar>
  void synth_block(long i0, long i1, CMat<Scalar>& out) const;
};

extern template void Codebook::synth_block<double>(long, long, CMat<double>&) const;
extern template void Codebook::synth_block<float>(long, long, CMat<float>&) const;

// Optimal uniform sampling steps: the level-c cell is the maximum-area
// rectangle inscribed in the fitted ellipse, so the half-steps sit at the
// ellipse "corner" (da, db) with da sqrt((c-1)/(p_b N^2)) = db sqrt((c-1)/(p_a N^4)).
std::pair<double, double> ula_uniform_steps(int n, double c, const UlaFitCoefficients& coeffs);

// Midpoint grid over [0, q_alpha] x [-1, 1] with ceiling counts.
Codebook build_ula_uniform(const ArrayConfig& cfg, double c,
                           const UlaFitCoefficients& coeffs = UlaFitCoefficients::defaults());

// Hexagonal-lattice steps: the level-c cell is the hexagon spanned by the
// maximum inscribed triangle of the fitted ellipse.
std::pair<double, double> ula_dislocation_steps(int n, double c, const UlaFitCoefficients& coeffs);

// Two interleaved rectangular lattices offset by (step_a/2, step_b/2); rows
// start at alpha = 0 and beta = -1, out-of-range centers are clamped to the
// region bounds.
Codebook build_ula_dislocation(const ArrayConfig& cfg, double c,
                               const UlaFitCoefficients& coeffs = UlaFitCoefficients::defaults());

// Box grid over [-1,1]^2 x [0, q_rho] whose cell vertices lie on the reference
// ellipsoid; grid points outside the physical disc are kept but flagged.
Codebook build_upa_uniform(const ArrayConfig& cfg, double c, const ReferenceEllipsoid& ref);

// DFT (ULA) / 2D-DFT (UPA) baseline: far-field steering codewords with sin's
// on the N-point uniform grid of [-1, 1).
Codebook build_dft(const ArrayConfig& cfg);

// Baseline with `per_domain` midpoints per transform axis over region bounds.
Codebook build_equal_grid(const ArrayConfig& cfg, int per_domain);

// Closed-form pre-rounding counts and the ceiling-rounded counts used by the
// builders. `pre_round` divides the true transform ranges by the steps.
struct DomainCounts {
  std::vector<double> pre_round;
  std::vector<long> rounded;
  double total_pre_round = 0.0;
  long total = 0;
  int bits = 0;
};
DomainCounts codeword_count(Scheme scheme, const ArrayConfig& cfg, double c,
                            const UlaFitCoefficients& coeffs = UlaFitCoefficients::defaults());
DomainCounts codeword_count_upa(const ArrayConfig& cfg, double c, const ReferenceEllipsoid& ref);

// Analytic totals with the flat quantization-range approximation
// Q_alpha ~ 1/(N sqrt(N)) folded in; these drive the overhead curve. Their
// ratio is exactly 4/(3 sqrt(3)) at every c.
double ula_uniform_count_closed_form(int n, double c, const UlaFitCoefficients& coeffs);
double ula_dislocation_count_closed_form(int n, double c, const UlaFitCoefficients& coeffs);

// Largest design correlation whose ceiling-rounded codebook still fits in
// 2^bits codewords. Used to compare schemes at a matched feedback budget.
double max_c_for_bits(Scheme scheme, const ArrayConfig& cfg, int bits,
                      const UlaFitCoefficients& coeffs = UlaFitCoefficients::defaults());

}  // namespace nfcb

#endif  // NFCB_CODEBOOK_HPP
