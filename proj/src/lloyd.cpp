// SPDX-License-Identifier: Apache-2.0
//
// nfcb: codebook construction and evaluation for near-field large antenna arrays

#include "nfcb/lloyd.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "nfcb/parallel.hpp"
#include "nfcb/rng.hpp"

namespace nfcb {

namespace {

constexpr long kAssignBlock = 1024;  // training columns per GEMM task

// Principal eigenvector of sum_i h_i h_i^H over the cell, by power iteration
// on the implicit covariance. Warm-started from the current codeword.
VecXcd cell_centroid(const CMat<float>& train, const std::vector<long>& members,
                     const VecXcd& warm_start) {
  VecXcd v = warm_start;
  for (int it = 0; it < 15; ++it) {
    VecXcd next = VecXcd::Zero(v.size());
    for (long t : members) {
      const VecXcd h = train.col(t).cast<cxd>();
      next.noalias() += h * (h.adjoint() * v)(0);
    }
    const double norm = next.norm();
    if (norm < 1e-30) return warm_start;
    next /= norm;
    const double move = (next - v).norm();
    v.swap(next);
    if (move < 1e-12) break;
  }
  return v;
}

}  // namespace

LloydResult lloyd_train(const ArrayConfig& cfg, const std::vector<BeamVector>& training, long s,
                        int max_iter, double tol, std::uint64_t seed, int threads) {
  const long t_count = long(training.size());
  if (s < 1) throw std::invalid_argument("lloyd_train: s must be >= 1");
  if (t_count < 10 * s)
    throw std::invalid_argument("lloyd_train: training size must be >= 10 * codeword count");
  const long dim = cfg.total_elements();

  CMat<float> train(dim, t_count);
  for (long t = 0; t < t_count; ++t) {
    if (training[size_t(t)].v.size() != dim)
      throw std::invalid_argument("lloyd_train: training vector dimension mismatch");
    train.col(t) = training[size_t(t)].v.cast<std::complex<float>>();
  }

  // Seeded partial Fisher-Yates draw of s distinct training indices.
  std::vector<long> pick(static_cast<size_t>(t_count));
  std::iota(pick.begin(), pick.end(), 0L);
  CounterRng rng(seed, 0);
  for (long i = 0; i < s; ++i)
    std::swap(pick[size_t(i)], pick[size_t(i + long(rng.next_below(std::uint64_t(t_count - i))))]);

  MatXcd codewords(dim, s);
  for (long i = 0; i < s; ++i) codewords.col(i) = training[size_t(pick[size_t(i)])].v;

  std::vector<long> assign(static_cast<size_t>(t_count), 0);
  std::vector<float> best_sq(static_cast<size_t>(t_count), 0.0f);

  LloydResult result;
  double prev_distortion = kInfValue;
  for (int iter = 0; iter < max_iter; ++iter) {
    const CMat<float> w = codewords.cast<std::complex<float>>();
    parallel_for_blocks(t_count, kAssignBlock, threads, [&](long c0, long c1) {
      const Eigen::MatrixXf scores =
          (w.adjoint() * train.middleCols(c0, c1 - c0)).cwiseAbs2();
      for (long t = c0; t < c1; ++t) {
        long arg = 0;
        float best = scores(0, t - c0);
        for (long k = 1; k < s; ++k) {
          const float v = scores(k, t - c0);
          if (v > best) {
            best = v;
            arg = k;
          }
        }
        assign[size_t(t)] = arg;
        best_sq[size_t(t)] = best;
      }
    });

    double distortion = 0.0;
    for (long t = 0; t < t_count; ++t) distortion += 1.0 - double(best_sq[size_t(t)]);
    distortion /= double(t_count);
    result.distortion_per_iter.push_back(distortion);
    result.iterations = iter + 1;
    const bool converged = prev_distortion - distortion < tol;
    prev_distortion = distortion;
    if (converged) break;

    std::vector<std::vector<long>> cells(static_cast<size_t>(s));
    for (long t = 0; t < t_count; ++t) cells[size_t(assign[size_t(t)])].push_back(t);

    // Reseed empty cells to the worst-quantized vectors (ascending cell index,
    // each empty cell takes the next-worst remaining training point).
    std::vector<long> empties;
    for (long k = 0; k < s; ++k)
      if (cells[size_t(k)].empty()) empties.push_back(k);
    if (!empties.empty()) {
      std::vector<long> order(static_cast<size_t>(t_count));
      std::iota(order.begin(), order.end(), 0L);
      std::stable_sort(order.begin(), order.end(), [&](long a, long b) {
        return best_sq[size_t(a)] < best_sq[size_t(b)];
      });
      size_t take = 0;
      for (long k : empties) {
        codewords.col(k) = train.col(order[take]).cast<cxd>().normalized();
        cells[size_t(k)].push_back(order[take]);
        ++take;
      }
    }

    parallel_for_blocks(s, 64, threads, [&](long k0, long k1) {
      for (long k = k0; k < k1; ++k)
        if (!cells[size_t(k)].empty())
          codewords.col(k) = cell_centroid(train, cells[size_t(k)], codewords.col(k));
    });
  }

  // canonical representative: rotate each codeword so its first element is
  // real and non-negative (correlation is phase-invariant)
  for (long k = 0; k < s; ++k) {
    const cxd lead = codewords(0, k);
    if (std::abs(lead) > 1e-300) codewords.col(k) *= std::conj(lead) / std::abs(lead);
  }
  result.codebook.scheme = Scheme::LloydMax;
  result.codebook.cfg = cfg;
  result.codebook.counts = {s};
  result.codebook.explicit_vectors = std::move(codewords);
  return result;
}

Codebook lloyd_codebook(const ArrayConfig& cfg, const std::vector<BeamVector>& training, long s,
                        int max_iter, double tol, std::uint64_t seed, int threads) {
  return lloyd_train(cfg, training, s, max_iter, tol, seed, threads).codebook;
}

}  // namespace nfcb
