// SPDX-License-Identifier: Apache-2.0
//
// nfcb: codebook construction and evaluation for near-field large antenna arrays

#ifndef NFCB_LLOYD_HPP
#define NFCB_LLOYD_HPP

#include <cstdint>
#include <vector>

#include "nfcb/codebook.hpp"

namespace nfcb {

struct LloydResult {
  Codebook codebook;
  std::vector<double> distortion_per_iter;  // mean(1 - |corr|^2) after each assignment
  int iterations = 0;
};

// Alternating max-correlation assignment and per-cell principal-eigenvector
// centroid updates over unit-norm training vectors. Initial codewords are a
// seeded random subset of the training set; empty cells are reseeded to the
// worst-quantized training vector. Stops when the distortion improvement
// drops below tol or after max_iter iterations. Deterministic for a fixed
// seed and any thread count. Requires training.size() >= 10 * s.
//
// Assignment scores run in single-precision GEMM blocks; centroids and
// distortions accumulate in double.
LloydResult lloyd_train(const ArrayConfig& cfg, const std::vector<BeamVector>& training, long s,
                        int max_iter, double tol, std::uint64_t seed, int threads = 1);

Codebook lloyd_codebook(const ArrayConfig& cfg, const std::vector<BeamVector>& training, long s,
                        int max_iter, double tol, std::uint64_t seed, int threads = 1);

}  // namespace nfcb

#endif  // NFCB_LLOYD_HPP
