// SPDX-License-Identifier: Apache-2.0
//
// nfcb command-line front end: builds codebooks, runs Monte-Carlo evaluations,
// and emits the CSV/JSON artifacts. Exit codes: 0 success, 2 configuration or
// precondition error, 3 I/O failure.

#include <clocale>
#include <filesystem>
#include <iostream>
#include <set>

#include <CLI11.hpp>
#include <json.hpp>

#include "nfcb/io.hpp"
#include "nfcb/lloyd.hpp"
#include "nfcb/parallel.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct RunConfig {
  nfcb::ArrayConfig array;
  std::string scheme = "ula-uniform";
  double design_c = 0.95;
  int bit_budget = 0;  // when > 0, pick the largest c fitting the budget
  std::string coeff_source = "defaults";
  std::string coeff_file;
  double fit_c_level = 0.9;
  int per_domain = 0;
  std::array<int, 3> probes{5, 5, 3};
  long lloyd_codewords = 1024;
  long lloyd_training = 10240;
  int lloyd_max_iter = 8;
  double lloyd_tol = 1e-5;
  long ue_count = 1000;
  std::uint64_t seed = 1;
  std::string distribution = "uniform-transform";
  double snr_db_min = -10.0, snr_db_max = 20.0, snr_db_step = 2.0;
  double eta = 1.0;
  int audit_points_per_cell = 5;
  double overhead_c_min = 0.90, overhead_c_max = 0.99, overhead_c_step = 0.01;
  std::string out_dir = ".";
  std::string name = "codebook";
  int threads = 0;
  std::string digest;
};

const std::set<std::string> kKnownKeys = {
    "array", "n", "carrier_hz", "wavelength_m", "spacing_m", "scheme", "design_c", "bit_budget",
    "coeff_source", "coeff_file", "fit_c_level", "per_domain", "probe_psi", "probe_varphi",
    "probe_rho", "lloyd_codewords", "lloyd_training", "lloyd_max_iter", "lloyd_tol", "ue_count",
    "seed", "distribution", "snr_db_min", "snr_db_max", "snr_db_step", "eta",
    "audit_points_per_cell", "overhead_c_min", "overhead_c_max", "overhead_c_step", "out_dir",
    "name", "threads"};

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

RunConfig load_config(const std::string& path) {
  json j;
  try {
    j = json::parse(nfcb::read_text_file(path));
  } catch (const std::ios_base::failure&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(std::string("config parse error: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config must be a flat JSON object");
  for (const auto& [key, _] : j.items())
    if (!kKnownKeys.count(key)) throw ConfigError("unknown config key: " + key);

  RunConfig rc;
  const std::string family = j.value("array", "ula");
  if (family != "ula" && family != "upa") throw ConfigError("array must be 'ula' or 'upa'");
  const int n = j.value("n", 0);
  if (n < 2) throw ConfigError("n must be an integer >= 2");
  double carrier = j.value("carrier_hz", 0.0);
  if (j.contains("wavelength_m")) {
    if (carrier > 0.0) throw ConfigError("give carrier_hz or wavelength_m, not both");
    const double lambda = j["wavelength_m"].get<double>();
    if (lambda <= 0.0) throw ConfigError("wavelength_m must be positive");
    carrier = nfcb::kSpeedOfLight / lambda;
  }
  if (carrier == 0.0) carrier = nfcb::kDefaultCarrierHz;
  try {
    rc.array = nfcb::ArrayConfig::make(family == "ula" ? nfcb::ArrayFamily::Ula
                                                       : nfcb::ArrayFamily::Upa,
                                       n, carrier, j.value("spacing_m", 0.0));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }

  rc.scheme = j.value("scheme", rc.scheme);
  rc.design_c = j.value("design_c", rc.design_c);
  rc.bit_budget = j.value("bit_budget", rc.bit_budget);
  rc.coeff_source = j.value("coeff_source", rc.coeff_source);
  rc.coeff_file = j.value("coeff_file", rc.coeff_file);
  rc.fit_c_level = j.value("fit_c_level", rc.fit_c_level);
  rc.per_domain = j.value("per_domain", rc.per_domain);
  rc.probes = {j.value("probe_psi", 5), j.value("probe_varphi", 5), j.value("probe_rho", 3)};
  rc.lloyd_codewords = j.value("lloyd_codewords", rc.lloyd_codewords);
  rc.lloyd_training = j.value("lloyd_training", rc.lloyd_training);
  rc.lloyd_max_iter = j.value("lloyd_max_iter", rc.lloyd_max_iter);
  rc.lloyd_tol = j.value("lloyd_tol", rc.lloyd_tol);
  rc.ue_count = j.value("ue_count", rc.ue_count);
  rc.seed = j.value("seed", rc.seed);
  rc.distribution = j.value("distribution", rc.distribution);
  rc.snr_db_min = j.value("snr_db_min", rc.snr_db_min);
  rc.snr_db_max = j.value("snr_db_max", rc.snr_db_max);
  rc.snr_db_step = j.value("snr_db_step", rc.snr_db_step);
  rc.eta = j.value("eta", rc.eta);
  rc.audit_points_per_cell = j.value("audit_points_per_cell", rc.audit_points_per_cell);
  rc.overhead_c_min = j.value("overhead_c_min", rc.overhead_c_min);
  rc.overhead_c_max = j.value("overhead_c_max", rc.overhead_c_max);
  rc.overhead_c_step = j.value("overhead_c_step", rc.overhead_c_step);
  rc.out_dir = j.value("out_dir", rc.out_dir);
  rc.name = j.value("name", rc.name);
  rc.threads = j.value("threads", rc.threads);

  if (rc.distribution != "uniform-transform" && rc.distribution != "uniform-physical")
    throw ConfigError("distribution must be 'uniform-transform' or 'uniform-physical'");
  if (!(rc.design_c > 0.0 && rc.design_c < 1.0) && rc.bit_budget == 0)
    throw ConfigError("design_c must be in (0, 1)");
  if (rc.ue_count < 1) throw ConfigError("ue_count must be >= 1");
  if (rc.snr_db_step <= 0.0 || rc.snr_db_max < rc.snr_db_min)
    throw ConfigError("invalid SNR sweep");

  // Canonical digest: sorted keys, rendered values.
  json sorted = json::object();
  for (const auto& [key, value] : j.items()) sorted[key] = value;
  rc.digest = nfcb::fnv1a64_digest(sorted.dump());
  return rc;
}

nfcb::UlaFitCoefficients resolve_coeffs(const RunConfig& rc) {
  if (rc.coeff_source == "defaults") return nfcb::UlaFitCoefficients::defaults();
  if (rc.coeff_source == "fitted")
    return nfcb::fit_ula_coefficients(rc.array.n, rc.fit_c_level);
  if (rc.coeff_source == "file") {
    const json j = json::parse(nfcb::read_text_file(rc.coeff_file));
    return {j.at("p_alpha").get<double>(), j.at("p_beta").get<double>()};
  }
  throw ConfigError("coeff_source must be defaults | fitted | file");
}

std::vector<double> snr_grid(const RunConfig& rc) {
  std::vector<double> grid;
  for (double s = rc.snr_db_min; s <= rc.snr_db_max + 1e-9; s += rc.snr_db_step)
    grid.push_back(s);
  return grid;
}

nfcb::Codebook build_from_config(const RunConfig& rc) {
  const nfcb::Scheme scheme = nfcb::scheme_from_name(rc.scheme);
  switch (scheme) {
    case nfcb::Scheme::UlaUniform:
    case nfcb::Scheme::UlaDislocation: {
      const auto coeffs = resolve_coeffs(rc);
      const double c = rc.bit_budget > 0
                           ? nfcb::max_c_for_bits(scheme, rc.array, rc.bit_budget, coeffs)
                           : rc.design_c;
      return scheme == nfcb::Scheme::UlaUniform
                 ? nfcb::build_ula_uniform(rc.array, c, coeffs)
                 : nfcb::build_ula_dislocation(rc.array, c, coeffs);
    }
    case nfcb::Scheme::UpaUniform: {
      const auto ref = nfcb::reference_ellipsoid(rc.array, rc.design_c, rc.probes,
                                                 nfcb::resolve_threads(rc.threads));
      return nfcb::build_upa_uniform(rc.array, rc.design_c, ref);
    }
    case nfcb::Scheme::DftUla:
    case nfcb::Scheme::Dft2dUpa:
      return nfcb::build_dft(rc.array);
    case nfcb::Scheme::EqualGrid:
      return nfcb::build_equal_grid(rc.array, rc.per_domain > 0 ? rc.per_domain : rc.array.n);
    case nfcb::Scheme::LloydMax: {
      const auto dist = rc.distribution == "uniform-transform"
                            ? nfcb::UeDistribution::UniformTransform
                            : nfcb::UeDistribution::UniformPhysical;
      const auto training =
          nfcb::sample_ues(rc.array, rc.lloyd_training, rc.seed + 1, dist, rc.eta);
      std::vector<nfcb::BeamVector> beams(training.size());
      for (size_t i = 0; i < training.size(); ++i) {
        beams[i].v = training[i].channel.v / training[i].channel.v.norm();
      }
      return nfcb::lloyd_codebook(rc.array, beams, rc.lloyd_codewords, rc.lloyd_max_iter,
                                  rc.lloyd_tol, rc.seed, nfcb::resolve_threads(rc.threads));
    }
  }
  throw ConfigError("unhandled scheme");
}

int cmd_build(const RunConfig& rc) {
  const nfcb::Codebook cb = build_from_config(rc);
  fs::create_directories(rc.out_dir);
  const std::string stem = (fs::path(rc.out_dir) / rc.name).string();
  nfcb::save_codebook(cb, stem + ".nfcb");
  nfcb::write_codebook_sidecar(cb, stem + ".json");
  std::cout << "scheme=" << nfcb::scheme_name(cb.scheme) << " codewords=" << cb.size()
            << " bits=" << cb.bits();
  if (cb.design_c) std::cout << " design_c=" << nfcb::format_double(*cb.design_c);
  std::cout << " counts=";
  for (size_t i = 0; i < cb.counts.size(); ++i)
    std::cout << (i ? "x" : "") << cb.counts[i];
  std::cout << "\n";
  return 0;
}

int cmd_eval(const RunConfig& rc, const std::vector<std::string>& paths) {
  if (paths.empty()) throw ConfigError("eval: at least one codebook file required");
  std::vector<nfcb::Codebook> cbs;
  std::vector<std::string> names;
  for (const std::string& p : paths) {
    nfcb::Codebook cb = nfcb::load_codebook(p);
    if (cb.cfg.family != rc.array.family || cb.cfg.n != rc.array.n ||
        std::abs(cb.cfg.wavelength_m - rc.array.wavelength_m) > 1e-12)
      throw ConfigError("eval: codebook " + p + " does not match the configured array");
    names.push_back(std::to_string(names.size()) + "_" + nfcb::scheme_name(cb.scheme));
    cbs.push_back(std::move(cb));
  }
  const auto dist = rc.distribution == "uniform-transform"
                        ? nfcb::UeDistribution::UniformTransform
                        : nfcb::UeDistribution::UniformPhysical;
  const int threads = nfcb::resolve_threads(rc.threads);
  std::cerr << "sampling " << rc.ue_count << " UEs (seed " << rc.seed << ")\n";
  const auto ues = nfcb::sample_ues(rc.array, rc.ue_count, rc.seed, dist, rc.eta);

  fs::create_directories(rc.out_dir);
  std::vector<const nfcb::Codebook*> ptrs;
  for (const auto& cb : cbs) ptrs.push_back(&cb);
  const auto curves = nfcb::eval_rate_curve(ptrs, names, ues, snr_grid(rc), threads);
  nfcb::write_text_file((fs::path(rc.out_dir) / "rates.csv").string(), nfcb::rates_csv(curves));
  for (size_t k = 0; k < cbs.size(); ++k) {
    const auto cdf = nfcb::eval_cdf(cbs[k], ues, threads);
    nfcb::write_text_file((fs::path(rc.out_dir) / ("cdf_" + names[k] + ".csv")).string(),
                          nfcb::cdf_csv(cdf));
  }
  nfcb::write_text_file((fs::path(rc.out_dir) / "manifest.json").string(),
                        nfcb::manifest_json(rc.seed, rc.digest, paths));
  std::cerr << "wrote rates.csv, cdf_*.csv, manifest.json to " << rc.out_dir << "\n";
  return 0;
}

int cmd_overhead(const RunConfig& rc) {
  std::vector<double> grid;
  for (double c = rc.overhead_c_min; c <= rc.overhead_c_max + 1e-12; c += rc.overhead_c_step)
    grid.push_back(c);
  const auto rows = nfcb::overhead_curve(rc.array, grid, resolve_coeffs(rc));
  fs::create_directories(rc.out_dir);
  nfcb::write_text_file((fs::path(rc.out_dir) / "overhead.csv").string(),
                        nfcb::overhead_csv(rows));
  std::cerr << "wrote overhead.csv to " << rc.out_dir << "\n";
  return 0;
}

int cmd_fit(const RunConfig& rc) {
  nlohmann::ordered_json j;
  j["code_version"] = nfcb::kCodeVersion;
  j["n"] = rc.array.n;
  j["c_level"] = nfcb::format_double(rc.fit_c_level);
  if (rc.array.family == nfcb::ArrayFamily::Ula) {
    const auto coeffs = nfcb::fit_ula_coefficients(rc.array.n, rc.fit_c_level);
    j["family"] = "ula";
    j["p_alpha"] = nfcb::format_double(coeffs.p_alpha);
    j["p_beta"] = nfcb::format_double(coeffs.p_beta);
    j["sample_design"] = "32 rays x 16 radii, f in [c_level, 0.999], unweighted LS";
  } else {
    const auto ref = nfcb::reference_ellipsoid(rc.array, rc.design_c, rc.probes,
                                               nfcb::resolve_threads(rc.threads));
    j["family"] = "upa";
    j["c"] = nfcb::format_double(rc.design_c);
    j["l_psi"] = nfcb::format_double(ref.l_psi);
    j["l_varphi"] = nfcb::format_double(ref.l_varphi);
    j["l_rho"] = nfcb::format_double(ref.l_rho);
    j["p_psi"] = nfcb::format_double(ref.p_star.p_psi);
    j["p_varphi"] = nfcb::format_double(ref.p_star.p_varphi);
    j["p_rho"] = nfcb::format_double(ref.p_star.p_rho);
    j["probe_grid_spec"] = ref.probe_grid_spec;
  }
  fs::create_directories(rc.out_dir);
  nfcb::write_text_file((fs::path(rc.out_dir) / "coefficients.json").string(), j.dump(2) + "\n");
  std::cerr << "wrote coefficients.json to " << rc.out_dir << "\n";
  return 0;
}

int cmd_audit(const RunConfig* rc, const std::string& path, int points, int threads) {
  const nfcb::Codebook cb = nfcb::load_codebook(path);
  if (rc) {
    points = rc->audit_points_per_cell;
    threads = nfcb::resolve_threads(rc->threads);
  }
  const auto rec = nfcb::min_correlation_audit(cb, points, threads);
  nlohmann::ordered_json j;
  j["correlation"] = nfcb::format_double(rec.correlation);
  if (cb.cfg.family == nfcb::ArrayFamily::Ula) {
    j["alpha"] = nfcb::format_double(rec.ue.alpha());
    j["beta"] = nfcb::format_double(rec.ue.beta());
  } else {
    j["psi"] = nfcb::format_double(rec.ue.psi());
    j["varphi"] = nfcb::format_double(rec.ue.varphi());
    j["rho"] = nfcb::format_double(rec.ue.rho());
  }
  std::cout << j.dump(2) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  std::setlocale(LC_NUMERIC, "C");
  CLI::App app{"near-field codebook construction and evaluation"};
  app.require_subcommand(1);

  std::string config_path, out_override;
  std::uint64_t seed_override = 0;
  bool seed_set = false;
  int threads_override = -1;
  std::vector<std::string> codebook_paths;
  int audit_points = 5;

  auto add_common = [&](CLI::App* sub, bool config_required) {
    auto* opt = sub->add_option("--config", config_path, "flat JSON config file");
    if (config_required) opt->required();
    sub->add_option("--out", out_override, "output directory override");
    sub->add_option("--seed", seed_override, "seed override")->each([&](const std::string&) {
      seed_set = true;
    });
    sub->add_option("--threads", threads_override, "worker cap (0 = hardware)");
  };

  CLI::App* build = app.add_subcommand("build", "construct a codebook and write it to disk");
  add_common(build, true);
  CLI::App* eval = app.add_subcommand("eval", "Monte-Carlo CDF and rate evaluation");
  add_common(eval, true);
  eval->add_option("codebooks", codebook_paths, "codebook .nfcb files")->required();
  CLI::App* overhead = app.add_subcommand("overhead", "codeword-count curve over c");
  add_common(overhead, true);
  CLI::App* fit = app.add_subcommand("fit", "fit correlation-model coefficients");
  add_common(fit, true);
  CLI::App* audit = app.add_subcommand("audit", "worst-case correlation sweep of a codebook");
  add_common(audit, false);
  audit->add_option("codebook", codebook_paths, "codebook .nfcb file")->required();
  audit->add_option("--points-per-cell", audit_points, "audit grid density");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    std::optional<RunConfig> rc;
    if (!config_path.empty()) {
      rc = load_config(config_path);
      if (seed_set) rc->seed = seed_override;
      if (!out_override.empty()) rc->out_dir = out_override;
      if (threads_override >= 0) rc->threads = threads_override;
    }
    if (build->parsed()) return cmd_build(*rc);
    if (eval->parsed()) return cmd_eval(*rc, codebook_paths);
    if (overhead->parsed()) return cmd_overhead(*rc);
    if (fit->parsed()) return cmd_fit(*rc);
    if (audit->parsed())
      return cmd_audit(rc ? &*rc : nullptr, codebook_paths.at(0), audit_points,
                       threads_override >= 0 ? nfcb::resolve_threads(threads_override)
                                             : nfcb::resolve_threads(0));
  } catch (const std::ios_base::failure& e) {
    std::cerr << "I/O error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
