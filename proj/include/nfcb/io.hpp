// SPDX-License-Identifier: Apache-2.0
//
// nfcb: codebook construction and evaluation for near-field large antenna arrays

#ifndef NFCB_IO_HPP
#define NFCB_IO_HPP

#include <cstdint>
#include <string>

#include "nfcb/eval.hpp"

namespace nfcb {

inline constexpr const char* kCodeVersion = "nfcb 0.1.0";

// Locale-independent float formatting ('.' decimal, 17 significant digits).
std::string format_double(double v);

// FNV-1a 64-bit over a byte string, rendered as "fnv1a64:<hex>".
std::string fnv1a64_digest(const std::string& bytes);

// Binary codebook container, version 1, little-endian:
//   magic "NFCB", u16 version, u8 family, u8 scheme, u32 n, f64 spacing,
//   f64 wavelength, f64 carrier, u8 has_c + f64 c, u8 ncoeff + f64[],
//   u8 nsteps + f64[], u8 ncounts + u32[], u64 codewords, u8 center_dims,
//   f64 centers[codewords * dims].
// Vectors are regenerated on load from the centers; Lloyd-Max codebooks carry
// no generating grid, so for them the trained vectors follow the centers as
// interleaved f64 re/im pairs.
void save_codebook(const Codebook& cb, const std::string& path);
Codebook load_codebook(const std::string& path);

// Human-readable sidecar with the same metadata.
void write_codebook_sidecar(const Codebook& cb, const std::string& path);

// CSV emitters; '.' decimals, ',' delimiter, LF line endings.
std::string cdf_csv(const std::vector<std::pair<double, double>>& cdf);
std::string rates_csv(const RateCurves& rc);
std::string overhead_csv(const std::vector<OverheadRow>& rows);
void write_text_file(const std::string& path, const std::string& body);
std::string read_text_file(const std::string& path);

// Run manifest: seed, config digest, code version, input list.
std::string manifest_json(std::uint64_t seed, const std::string& config_digest,
                          const std::vector<std::string>& inputs);

}  // namespace nfcb

#endif  // NFCB_IO_HPP
