#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

namespace fs = std::filesystem;

namespace {

const std::string kBinary = CPFSIM_BINARY;

fs::path work_root() {
  static const fs::path root = [] {
    auto p = fs::temp_directory_path() / "cpfsim_cli_tests";
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
  }();
  return root;
}

int run_cli(const std::string& args) {
  const std::string cmd = kBinary + " " + args + " > /dev/null 2>&1";
  const int rc = std::system(cmd.c_str());
  REQUIRE(rc != -1);
  REQUIRE(WIFEXITED(rc));
  return WEXITSTATUS(rc);
}

int run_cli_capture(const std::string& args, const fs::path& stdout_file) {
  const std::string cmd =
      kBinary + " " + args + " > " + stdout_file.string() + " 2>/dev/null";
  const int rc = std::system(cmd.c_str());
  REQUIRE(rc != -1);
  REQUIRE(WIFEXITED(rc));
  return WEXITSTATUS(rc);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream ss(text);
  std::string line;
  while (std::getline(ss, line)) out.push_back(line);
  return out;
}

nlohmann::json load_json(const fs::path& p) {
  return nlohmann::json::parse(slurp(p));
}

}  // namespace

TEST_CASE("reflect: outputs, summary values, determinism") {
  const auto d1 = work_root() / "reflect1";
  const auto d2 = work_root() / "reflect2";
  CHECK(run_cli("reflect --out " + d1.string()) == 0);
  CHECK(run_cli("reflect --out " + d2.string()) == 0);

  REQUIRE(fs::exists(d1 / "phase_profile.csv"));
  REQUIRE(fs::exists(d1 / "summary.json"));
  REQUIRE(fs::exists(d1 / "config_effective.json"));

  const auto csv = slurp(d1 / "phase_profile.csv");
  auto rows = lines_of(csv);
  REQUIRE(rows.size() > 1);
  CHECK(rows[0] == "omega_rad_s,dtheta0_rad,dtheta1_rad,weight");
  CHECK(rows.size() == 99);  // header + one row per default-grid mode

  // Byte-identical across identical runs.
  CHECK(csv == slurp(d2 / "phase_profile.csv"));
  CHECK(slurp(d1 / "summary.json") == slurp(d2 / "summary.json"));

  auto summary = load_json(d1 / "summary.json");
  CHECK(summary.at("T_s").get<double>() == 3.0e-6);
  CHECK(summary.at("F_min").get<double>() >= 0.9999);
  CHECK(summary.at("grid").at("n_modes").get<int>() == 98);
  CHECK(summary.at("xi1_re").get<double>() >= 0.9999);
  CHECK(summary.at("xi2_re").get<double>() >= 0.9999);
  CHECK(summary.at("eta").get<double>() > 0.0);
  CHECK(summary.at("uncoupled").contains("norm_leak"));
  CHECK(summary.at("coupled").contains("loss_integral"));
}

TEST_CASE("reflect: kappa = 0 zeroes the dtheta0 column") {
  const auto dir = work_root() / "reflect_k0";
  CHECK(run_cli("reflect --kappa 0 --out " + dir.string()) == 0);
  auto rows = lines_of(slurp(dir / "phase_profile.csv"));
  REQUIRE(rows.size() > 1);
  for (size_t i = 1; i < rows.size(); ++i) {
    // Column 2 of omega,dtheta0,dtheta1,weight.
    const auto first_comma = rows[i].find(',');
    const auto second_comma = rows[i].find(',', first_comma + 1);
    const auto field = rows[i].substr(first_comma + 1,
                                      second_comma - first_comma - 1);
    CHECK(field == "0");
  }
}

TEST_CASE("reflect: config round-trip reproduces outputs byte-for-byte") {
  const auto d1 = work_root() / "round1";
  const auto d2 = work_root() / "round2";
  CHECK(run_cli("reflect --gamma 2e3 --T 2e-6 --seed 99 --out " +
                d1.string()) == 0);
  CHECK(run_cli("reflect --config " + (d1 / "config_effective.json").string() +
                " --out " + d2.string()) == 0);
  CHECK(slurp(d1 / "phase_profile.csv") == slurp(d2 / "phase_profile.csv"));
  CHECK(slurp(d1 / "summary.json") == slurp(d2 / "summary.json"));

  // The echoed configs agree except for the output directory.
  auto c1 = load_json(d1 / "config_effective.json");
  auto c2 = load_json(d2 / "config_effective.json");
  c1.erase("out");
  c2.erase("out");
  CHECK(c1 == c2);
}

TEST_CASE("fidelity-sweep: trend, eta column, parallel determinism") {
  const auto d1 = work_root() / "sweep1";
  const auto d2 = work_root() / "sweep2";
  CHECK(run_cli("fidelity-sweep --out " + d1.string()) == 0);
  CHECK(run_cli("fidelity-sweep --jobs 4 --out " + d2.string()) == 0);

  const auto csv = slurp(d1 / "fidelity_vs_T.csv");
  CHECK(csv == slurp(d2 / "fidelity_vs_T.csv"));  // jobs must not reorder

  auto rows = lines_of(csv);
  REQUIRE(rows.size() == 7);  // header + 6 default sweep points
  CHECK(rows[0] == "T_s,kappa_T,F_min,x_min,eta");

  double prev_f = -1.0;
  std::string prev_eta;
  double last_f = 0.0;
  for (size_t i = 1; i < rows.size(); ++i) {
    std::istringstream ss(rows[i]);
    std::string t, kt, f, x, eta;
    std::getline(ss, t, ',');
    std::getline(ss, kt, ',');
    std::getline(ss, f, ',');
    std::getline(ss, x, ',');
    std::getline(ss, eta, ',');
    const double fv = std::stod(f);
    CHECK(fv >= prev_f - 1e-6);  // non-decreasing within tolerance
    prev_f = fv;
    last_f = fv;
    if (i > 1) CHECK(eta == prev_eta);  // eta independent of T
    prev_eta = eta;
  }
  CHECK(last_f >= 0.9999);  // the T = 3 us row
}

TEST_CASE("fidelity-sweep: a single-point sweep is a config error") {
  const auto dir = work_root() / "sweep_bad";
  fs::create_directories(dir);
  const auto cfg = dir / "cfg.json";
  std::ofstream(cfg) << R"({"sweep_T": [3.0e-6]})";
  CHECK(run_cli("fidelity-sweep --config " + cfg.string() + " --out " +
                dir.string()) == 2);
}

TEST_CASE("two-atom-gate: ideal flag, realistic fidelity floor, identity") {
  const auto di = work_root() / "gate_ideal";
  CHECK(run_cli("two-atom-gate --ideal --out " + di.string()) == 0);
  auto ideal = load_json(di / "summary.json");
  CHECK(ideal.at("ideal_profiles").get<bool>());
  CHECK(std::abs(ideal.at("worst_F12").get<double>() - 1.0) <= 1e-10);
  CHECK(ideal.at("phase_flip_identity_max_error").get<double>() <= 1e-12);
  CHECK(ideal.at("photon_restored_max_error").get<double>() <= 1e-12);

  auto rows = lines_of(slurp(di / "gate_fidelity.csv"));
  REQUIRE(rows.size() == 82);  // header + 9x9 beta grid
  CHECK(rows[0] == "beta1_sq,beta2_sq,F12");

  const auto dr = work_root() / "gate_real";
  CHECK(run_cli("two-atom-gate --out " + dr.string()) == 0);
  auto real = load_json(dr / "summary.json");
  CHECK_FALSE(real.at("ideal_profiles").get<bool>());
  CHECK(real.at("worst_F12").get<double>() >= 0.9997);
  CHECK(real.at("phase_flip_identity_max_error").get<double>() <= 1e-12);
}

TEST_CASE("params: derived quantities in JSON and CSV") {
  const auto dir = work_root() / "params_out";
  fs::create_directories(dir);

  const auto jf = dir / "params.json";
  CHECK(run_cli_capture("params", jf) == 0);
  auto j = nlohmann::json::parse(slurp(jf));
  CHECK(std::abs(j.at("g0_rad_s").get<double>() / 5.711e10 - 1.0) <= 1e-3);
  CHECK(std::abs(j.at("kappa_rad_s").get<double>() / 3.2484e7 - 1.0) <= 1e-4);
  CHECK(std::abs(j.at("eta").get<double>() / 8.0e-9 - 1.0) <= 1e-4);
  CHECK(std::abs(j.at("n_op").get<double>() / 13666.67 - 1.0) <= 1e-4);
  CHECK(j.at("g0_ratio_to_nominal").get<double>() ==
        doctest::Approx(57.11).epsilon(1e-3));

  const auto cf = dir / "params.csv";
  CHECK(run_cli_capture("params --format csv", cf) == 0);
  auto rows = lines_of(slurp(cf));
  REQUIRE(rows.size() > 1);
  CHECK(rows[0] == "quantity,value");
  bool has_nop = false;
  for (const auto& row : rows)
    if (row.rfind("n_op,", 0) == 0) has_nop = true;
  CHECK(has_nop);
}

TEST_CASE("exit codes: config errors are 2, usage errors are 2") {
  CHECK(run_cli("reflect --g -5") == 2);           // invalid physics
  CHECK(run_cli("reflect --method nonsense") == 2);  // bad enum value
  CHECK(run_cli("totally-unknown-subcommand") == 2);
  CHECK(run_cli("") == 2);  // a subcommand is required

  const auto dir = work_root() / "bad_cfg";
  fs::create_directories(dir);
  const auto cfg = dir / "cfg.json";
  std::ofstream(cfg) << R"({"ion": {"dipole": 0.0}})";
  CHECK(run_cli("params --config " + cfg.string()) == 2);

  const auto unknown = dir / "unknown.json";
  std::ofstream(unknown) << R"({"no_such_key": 1})";
  CHECK(run_cli("reflect --config " + unknown.string()) == 2);
}
