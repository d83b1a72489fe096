// SPDX-License-Identifier: Apache-2.0
//
// nfcb: codebook construction and evaluation for near-field large antenna arrays

#include "nfcb/io.hpp"

#include <charconv>
#include <cstring>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace nfcb {

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

std::string fnv1a64_digest(const std::string& bytes) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[32];
  std::snprintf(buf, sizeof(buf), "fnv1a64:%016llx", static_cast<unsigned long long>(h));
  return buf;
}

namespace {

constexpr std::uint16_t kFormatVersion = 1;

void put_bytes(std::string& out, const void* p, size_t n) {
  out.append(reinterpret_cast<const char*>(p), n);
}
template <typename T>
void put(std::string& out, T v) {
  put_bytes(out, &v, sizeof(T));
}

class Reader {
 public:
  explicit Reader(std::string bytes) : bytes_(std::move(bytes)) {}
  template <typename T>
  T get() {
    if (pos_ + sizeof(T) > bytes_.size()) throw std::runtime_error("codebook file truncated");
    T v;
    std::memcpy(&v, bytes_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return v;
  }
  bool at_end() const { return pos_ == bytes_.size(); }

 private:
  std::string bytes_;
  size_t pos_ = 0;
};

std::uint8_t scheme_tag(Scheme s) { return std::uint8_t(s); }

}  // namespace

void save_codebook(const Codebook& cb, const std::string& path) {
  std::string out;
  out.reserve(64 + cb.centers.size() * 24);
  out.append("NFCB");
  put<std::uint16_t>(out, kFormatVersion);
  put<std::uint8_t>(out, cb.cfg.family == ArrayFamily::Ula ? 0 : 1);
  put<std::uint8_t>(out, scheme_tag(cb.scheme));
  put<std::uint32_t>(out, std::uint32_t(cb.cfg.n));
  put<double>(out, cb.cfg.spacing_m);
  put<double>(out, cb.cfg.wavelength_m);
  put<double>(out, cb.cfg.carrier_hz);
  put<std::uint8_t>(out, cb.design_c ? 1 : 0);
  put<double>(out, cb.design_c.value_or(0.0));

  std::vector<double> coeffs;
  if (cb.scheme == Scheme::UlaUniform || cb.scheme == Scheme::UlaDislocation)
    coeffs = {cb.ula_coeffs.p_alpha, cb.ula_coeffs.p_beta};
  else if (cb.reference)
    coeffs = {cb.reference->l_psi,         cb.reference->l_varphi,     cb.reference->l_rho,
              cb.reference->p_star.p_psi, cb.reference->p_star.p_varphi,
              cb.reference->p_star.p_rho};
  put<std::uint8_t>(out, std::uint8_t(coeffs.size()));
  for (double v : coeffs) put<double>(out, v);

  put<std::uint8_t>(out, std::uint8_t(cb.steps.size()));
  for (double v : cb.steps) put<double>(out, v);
  put<std::uint8_t>(out, std::uint8_t(cb.counts.size()));
  for (long v : cb.counts) put<std::uint32_t>(out, std::uint32_t(v));

  const long s = cb.size();
  put<std::uint64_t>(out, std::uint64_t(s));
  const std::uint8_t dims = cb.cfg.family == ArrayFamily::Ula ? 2 : 3;
  put<std::uint8_t>(out, dims);
  if (cb.scheme == Scheme::LloydMax) {
    for (long i = 0; i < s; ++i)
      for (int k = 0; k < dims; ++k) put<double>(out, 0.0);
    const long total = cb.cfg.total_elements();
    for (long i = 0; i < s; ++i)
      for (long e = 0; e < total; ++e) {
        put<double>(out, cb.explicit_vectors(e, i).real());
        put<double>(out, cb.explicit_vectors(e, i).imag());
      }
  } else {
    for (const TransformPoint& tp : cb.centers) {
      put<double>(out, tp.u);
      put<double>(out, tp.v);
      if (dims == 3) put<double>(out, tp.w);
    }
  }

  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw std::ios_base::failure("cannot open for writing: " + path);
  f.write(out.data(), std::streamsize(out.size()));
  if (!f) throw std::ios_base::failure("write failed: " + path);
}

Codebook load_codebook(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::ios_base::failure("cannot open: " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  Reader r(ss.str());

  char magic[4];
  for (char& c : magic) c = r.get<char>();
  if (std::memcmp(magic, "NFCB", 4) != 0) throw std::runtime_error("not a NFCB codebook file");
  if (r.get<std::uint16_t>() != kFormatVersion)
    throw std::runtime_error("unsupported codebook format version");

  Codebook cb;
  const std::uint8_t family = r.get<std::uint8_t>();
  cb.scheme = Scheme(r.get<std::uint8_t>());
  const std::uint32_t n = r.get<std::uint32_t>();
  const double spacing = r.get<double>();
  const double wavelength = r.get<double>();
  const double carrier = r.get<double>();
  cb.cfg = ArrayConfig::make(family == 0 ? ArrayFamily::Ula : ArrayFamily::Upa, int(n), carrier,
                             spacing);
  cb.cfg.wavelength_m = wavelength;
  const bool has_c = r.get<std::uint8_t>() != 0;
  const double c = r.get<double>();
  if (has_c) cb.design_c = c;

  const int ncoeff = r.get<std::uint8_t>();
  std::vector<double> coeffs(static_cast<size_t>(ncoeff));
  for (double& v : coeffs) v = r.get<double>();
  if (ncoeff == 2) cb.ula_coeffs = {coeffs[0], coeffs[1]};
  if (ncoeff == 6) {
    ReferenceEllipsoid ref;
    ref.l_psi = coeffs[0];
    ref.l_varphi = coeffs[1];
    ref.l_rho = coeffs[2];
    ref.p_star.p_psi = coeffs[3];
    ref.p_star.p_varphi = coeffs[4];
    ref.p_star.p_rho = coeffs[5];
    ref.c = c;
    ref.probe_grid_spec = "loaded";
    cb.reference = ref;
  }

  const int nsteps = r.get<std::uint8_t>();
  cb.steps.resize(size_t(nsteps));
  for (double& v : cb.steps) v = r.get<double>();
  const int ncounts = r.get<std::uint8_t>();
  cb.counts.resize(size_t(ncounts));
  for (long& v : cb.counts) v = long(r.get<std::uint32_t>());

  const long s = long(r.get<std::uint64_t>());
  const int dims = r.get<std::uint8_t>();
  cb.centers.resize(size_t(s));
  for (TransformPoint& tp : cb.centers) {
    tp.u = r.get<double>();
    tp.v = r.get<double>();
    tp.w = dims == 3 ? r.get<double>() : 0.0;
  }
  if (cb.scheme == Scheme::LloydMax) {
    const long total = cb.cfg.total_elements();
    cb.explicit_vectors.resize(total, s);
    for (long i = 0; i < s; ++i)
      for (long e = 0; e < total; ++e) {
        const double re = r.get<double>();
        const double im = r.get<double>();
        cb.explicit_vectors(e, i) = cxd(re, im);
      }
    cb.centers.clear();
  } else if (cb.cfg.family == ArrayFamily::Upa) {
    cb.valid.reserve(size_t(s));
    for (const TransformPoint& tp : cb.centers)
      cb.valid.push_back(tp.psi() * tp.psi() + tp.varphi() * tp.varphi() <= 1.0 ? 1 : 0);
  }
  if (!r.at_end()) throw std::runtime_error("trailing bytes in codebook file");
  return cb;
}

void write_codebook_sidecar(const Codebook& cb, const std::string& path) {
  nlohmann::ordered_json j;
  j["format"] = "nfcb-sidecar";
  j["version"] = 1;
  j["scheme"] = scheme_name(cb.scheme);
  j["family"] = cb.cfg.family == ArrayFamily::Ula ? "ula" : "upa";
  j["n"] = cb.cfg.n;
  j["spacing_m"] = format_double(cb.cfg.spacing_m);
  j["wavelength_m"] = format_double(cb.cfg.wavelength_m);
  j["carrier_hz"] = format_double(cb.cfg.carrier_hz);
  if (cb.design_c) j["design_c"] = format_double(*cb.design_c);
  j["counts"] = cb.counts;
  nlohmann::ordered_json steps = nlohmann::ordered_json::array();
  for (double sv : cb.steps) steps.push_back(format_double(sv));
  j["steps"] = steps;
  j["codewords"] = cb.size();
  j["bits"] = cb.bits();
  if (cb.scheme == Scheme::UlaUniform || cb.scheme == Scheme::UlaDislocation) {
    j["p_alpha"] = format_double(cb.ula_coeffs.p_alpha);
    j["p_beta"] = format_double(cb.ula_coeffs.p_beta);
  }
  if (cb.reference) {
    j["l_psi"] = format_double(cb.reference->l_psi);
    j["l_varphi"] = format_double(cb.reference->l_varphi);
    j["l_rho"] = format_double(cb.reference->l_rho);
    j["p_psi"] = format_double(cb.reference->p_star.p_psi);
    j["p_varphi"] = format_double(cb.reference->p_star.p_varphi);
    j["p_rho"] = format_double(cb.reference->p_star.p_rho);
    j["probe_grid"] = cb.reference->probe_grid_spec;
  }
  write_text_file(path, j.dump(2) + "\n");
}

std::string cdf_csv(const std::vector<std::pair<double, double>>& cdf) {
  std::string out = "correlation,cdf\n";
  for (const auto& [corr, p] : cdf) out += format_double(corr) + "," + format_double(p) + "\n";
  return out;
}

std::string rates_csv(const RateCurves& rc) {
  std::string out = "codebook,snr_db,mean_rate\n";
  for (const RateCurve& curve : rc.curves)
    for (size_t i = 0; i < rc.snr_db.size(); ++i)
      out += curve.name + "," + format_double(rc.snr_db[i]) + "," +
             format_double(curve.mean_rate[i]) + "\n";
  return out;
}

std::string overhead_csv(const std::vector<OverheadRow>& rows) {
  std::string out = "c,uniform_count,dislocation_count,uniform_bits,dislocation_bits,ratio\n";
  for (const OverheadRow& r : rows)
    out += format_double(r.c) + "," + format_double(r.uniform_count) + "," +
           format_double(r.dislocation_count) + "," + std::to_string(r.uniform_bits) + "," +
           std::to_string(r.dislocation_bits) + "," + format_double(r.ratio) + "\n";
  return out;
}

void write_text_file(const std::string& path, const std::string& body) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw std::ios_base::failure("cannot open for writing: " + path);
  f.write(body.data(), std::streamsize(body.size()));
  if (!f) throw std::ios_base::failure("write failed: " + path);
}

std::string read_text_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::ios_base::failure("cannot open: " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

std::string manifest_json(std::uint64_t seed, const std::string& config_digest,
                          const std::vector<std::string>& inputs) {
  nlohmann::ordered_json j;
  j["seed"] = seed;
  j["config_digest"] = config_digest;
  j["code_version"] = kCodeVersion;
  j["inputs"] = inputs;
  return j.dump(2) + "\n";
}

}  // namespace nfcb
