// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "nfcb/io.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const fs::path kWork = fs::temp_directory_path() / "nfcb_cli_test";

int run(const std::string& args, std::string* out = nullptr) {
  const std::string out_file = (kWork / "stdout.txt").string();
  const std::string cmd = std::string(NFCB_CLI_PATH) + " " + args + " > " + out_file + " 2> " +
                          (kWork / "stderr.txt").string();
  const int rc = std::system(cmd.c_str());
  if (out) *out = nfcb::read_text_file(out_file);
  return WEXITSTATUS(rc);
}

void write_json(const fs::path& p, const json& j) {
  std::ofstream f(p);
  f << j.dump(2);
}

json base_config() {
  return json{{"array", "ula"},     {"n", 64},        {"wavelength_m", 0.1},
              {"scheme", "ula-uniform"}, {"design_c", 0.95}, {"ue_count", 64},
              {"seed", 9},          {"threads", 2}};
}

}  // namespace

TEST_CASE("cli build writes the container and reports table counts") {
  fs::create_directories(kWork);
  auto cfg = base_config();
  cfg["out_dir"] = (kWork / "b1").string();
  cfg["name"] = "uni64";
  write_json(kWork / "build.json", cfg);

  std::string out;
  CHECK(run("build --config " + (kWork / "build.json").string(), &out) == 0);
  CHECK(out.find("codewords=1016") != std::string::npos);
  CHECK(out.find("counts=4x254") != std::string::npos);

  const json sidecar = json::parse(nfcb::read_text_file((kWork / "b1" / "uni64.json").string()));
  CHECK(sidecar.at("counts")[1] == 254);
  CHECK(sidecar.at("scheme") == "ula-uniform");

  SUBCASE("rebuild is byte-identical") {
    cfg["out_dir"] = (kWork / "b2").string();
    write_json(kWork / "build.json", cfg);
    CHECK(run("build --config " + (kWork / "build.json").string()) == 0);
    CHECK(nfcb::read_text_file((kWork / "b1" / "uni64.nfcb").string()) ==
          nfcb::read_text_file((kWork / "b2" / "uni64.nfcb").string()));
  }
}

TEST_CASE("cli rejects bad configs with exit code 2") {
  fs::create_directories(kWork);
  auto cfg = base_config();
  cfg["design_c"] = 1.0;
  write_json(kWork / "bad_c.json", cfg);
  CHECK(run("build --config " + (kWork / "bad_c.json").string()) == 2);

  auto cfg2 = base_config();
  cfg2["no_such_key"] = 1;
  write_json(kWork / "bad_key.json", cfg2);
  CHECK(run("build --config " + (kWork / "bad_key.json").string()) == 2);

  CHECK(run("build --config " + (kWork / "missing.json").string()) == 3);
}

TEST_CASE("cli eval emits deterministic csv artifacts") {
  fs::create_directories(kWork);
  auto bc = base_config();
  bc["out_dir"] = (kWork / "cb").string();
  bc["name"] = "uni";
  write_json(kWork / "b.json", bc);
  REQUIRE(run("build --config " + (kWork / "b.json").string()) == 0);

  auto ec = base_config();
  ec["out_dir"] = (kWork / "e1").string();
  write_json(kWork / "e.json", ec);
  const std::string cb_path = (kWork / "cb" / "uni.nfcb").string();
  REQUIRE(run("eval --config " + (kWork / "e.json").string() + " " + cb_path) == 0);

  const std::string rates = nfcb::read_text_file((kWork / "e1" / "rates.csv").string());
  CHECK(rates.rfind("codebook,snr_db,mean_rate\n", 0) == 0);
  CHECK(rates.find("perfect-csi") != std::string::npos);
  CHECK(rates.find("0_ula-uniform") != std::string::npos);
  const json manifest = json::parse(nfcb::read_text_file((kWork / "e1" / "manifest.json").string()));
  CHECK(manifest.at("seed") == 9);
  CHECK(manifest.at("code_version") == nfcb::kCodeVersion);

  SUBCASE("second run, identical bytes") {
    ec["out_dir"] = (kWork / "e2").string();
    write_json(kWork / "e.json", ec);
    REQUIRE(run("eval --config " + (kWork / "e.json").string() + " " + cb_path) == 0);
    CHECK(nfcb::read_text_file((kWork / "e1" / "rates.csv").string()) ==
          nfcb::read_text_file((kWork / "e2" / "rates.csv").string()));
    CHECK(nfcb::read_text_file((kWork / "e1" / "cdf_0_ula-uniform.csv").string()) ==
          nfcb::read_text_file((kWork / "e2" / "cdf_0_ula-uniform.csv").string()));
  }

  SUBCASE("array mismatch is a config error") {
    auto mc = base_config();
    mc["n"] = 128;
    mc["out_dir"] = (kWork / "e3").string();
    write_json(kWork / "m.json", mc);
    CHECK(run("eval --config " + (kWork / "m.json").string() + " " + cb_path) == 2);
  }
}

TEST_CASE("cli overhead emits the ratio column") {
  fs::create_directories(kWork);
  auto cfg = base_config();
  cfg["n"] = 512;
  cfg["out_dir"] = (kWork / "ovh").string();
  write_json(kWork / "o.json", cfg);
  REQUIRE(run("overhead --config " + (kWork / "o.json").string()) == 0);
  std::istringstream csv(nfcb::read_text_file((kWork / "ovh" / "overhead.csv").string()));
  std::string line;
  std::getline(csv, line);
  CHECK(line == "c,uniform_count,dislocation_count,uniform_bits,dislocation_bits,ratio");
  int rows = 0;
  while (std::getline(csv, line)) {
    const auto pos = line.rfind(',');
    const double ratio = std::stod(line.substr(pos + 1));
    CHECK(ratio == doctest::Approx(0.7698).epsilon(1e-3));
    ++rows;
  }
  CHECK(rows == 10);
}

TEST_CASE("cli fit reproduces the stock coefficients") {
  fs::create_directories(kWork);
  auto cfg = base_config();
  cfg["n"] = 256;
  cfg["fit_c_level"] = 0.9;
  cfg["out_dir"] = (kWork / "fit").string();
  write_json(kWork / "f.json", cfg);
  REQUIRE(run("fit --config " + (kWork / "f.json").string()) == 0);
  const json j = json::parse(nfcb::read_text_file((kWork / "fit" / "coefficients.json").string()));
  const double pa = std::stod(j.at("p_alpha").get<std::string>());
  CHECK(std::abs(pa - (-0.02598)) <= 0.15 * 0.02598);
}

TEST_CASE("cli audit prints the worst-case record") {
  fs::create_directories(kWork);
  auto bc = base_config();
  bc["out_dir"] = (kWork / "cb2").string();
  bc["name"] = "uni";
  write_json(kWork / "b2.json", bc);
  REQUIRE(run("build --config " + (kWork / "b2.json").string()) == 0);
  std::string out;
  CHECK(run("audit " + (kWork / "cb2" / "uni.nfcb").string() + " --points-per-cell 5", &out) == 0);
  const json j = json::parse(out);
  const double corr = std::stod(j.at("correlation").get<std::string>());
  CHECK(corr >= 0.93);
  CHECK(corr <= 1.0);
}

TEST_CASE("cli builds and audits a planar-array codebook") {
  fs::create_directories(kWork);
  json cfg{{"array", "upa"},   {"n", 8},          {"wavelength_m", 0.1},
           {"scheme", "upa-uniform"}, {"design_c", 0.9}, {"probe_psi", 3},
           {"probe_varphi", 3}, {"probe_rho", 2},   {"threads", 2},
           {"out_dir", (kWork / "upa").string()}, {"name", "prop8"}};
  write_json(kWork / "u.json", cfg);
  std::string out;
  REQUIRE(run("build --config " + (kWork / "u.json").string(), &out) == 0);
  CHECK(out.find("scheme=upa-uniform") != std::string::npos);
  const json sidecar = json::parse(nfcb::read_text_file((kWork / "upa" / "prop8.json").string()));
  CHECK(sidecar.contains("l_psi"));

  std::string audit_out;
  CHECK(run("audit " + (kWork / "upa" / "prop8.nfcb").string() + " --points-per-cell 4",
            &audit_out) == 0);
  const double corr = std::stod(json::parse(audit_out).at("correlation").get<std::string>());
  CHECK(corr >= 0.9);  // reference-ellipsoid design floor
}

TEST_CASE("cli trains and stores a lloyd codebook") {
  fs::create_directories(kWork);
  json cfg{{"array", "ula"},  {"n", 16},          {"wavelength_m", 0.1},
           {"scheme", "lloyd"}, {"lloyd_codewords", 32}, {"lloyd_training", 320},
           {"lloyd_max_iter", 3}, {"seed", 4},      {"threads", 1},
           {"out_dir", (kWork / "ll").string()}, {"name", "lloyd16"}};
  write_json(kWork / "l.json", cfg);
  REQUIRE(run("build --config " + (kWork / "l.json").string()) == 0);
  auto cb = nfcb::load_codebook((kWork / "ll" / "lloyd16.nfcb").string());
  CHECK(cb.scheme == nfcb::Scheme::LloydMax);
  CHECK(cb.size() == 32);
  CHECK(cb.explicit_vectors.cols() == 32);
}
