#include "cpf/cli.hpp"

#include <atomic>
#include <charconv>
#include <cmath>
#include <complex>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <random>
#include <stdexcept>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "cpf/detail.hpp"
#include "cpf/fidelity.hpp"
#include "cpf/gate.hpp"
#include "cpf/pulse.hpp"
#include "cpf/scattering.hpp"

namespace cpf::cli {

using json = nlohmann::ordered_json;
using cd = std::complex<double>;

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

namespace {

// ---- config ---------------------------------------------------------------

Method parse_method(const std::string& name) {
  if (name == "exact") return Method::exact;
  if (name == "stepped") return Method::stepped;
  throw std::invalid_argument("method must be 'exact' or 'stepped', got '" +
                              name + "'");
}

std::string method_name(Method m) {
  return m == Method::exact ? "exact" : "stepped";
}

double require_number(const json& j, const std::string& key) {
  if (!j.at(key).is_number())
    throw std::invalid_argument("config field '" + key + "' must be a number");
  return j.at(key).get<double>();
}

}  // namespace

void merge_config_file(RunConfig& cfg, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config file: " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("config parse error: ") +
                                e.what());
  }
  if (!j.is_object())
    throw std::invalid_argument("config root must be a JSON object");

  for (const auto& [key, value] : j.items()) {
    if (key == "g") cfg.params.g = require_number(j, key);
    else if (key == "kappa") cfg.params.kappa = require_number(j, key);
    else if (key == "gamma") cfg.params.gamma = require_number(j, key);
    else if (key == "delta") cfg.params.delta = require_number(j, key);
    else if (key == "T") cfg.T = require_number(j, key);
    else if (key == "sweep_T") {
      if (!value.is_array())
        throw std::invalid_argument("config field 'sweep_T' must be an array");
      cfg.sweep_T.clear();
      for (const auto& e : value) {
        if (!e.is_number())
          throw std::invalid_argument("'sweep_T' entries must be numbers");
        cfg.sweep_T.push_back(e.get<double>());
      }
    } else if (key == "omega_b") {
      if (value.is_null()) cfg.omega_b.reset();
      else cfg.omega_b = require_number(j, key);
    } else if (key == "grid_n") {
      if (value.is_null()) cfg.grid_n.reset();
      else cfg.grid_n = static_cast<int>(require_number(j, key));
    } else if (key == "method") {
      cfg.method = parse_method(value.get<std::string>());
    } else if (key == "jobs") {
      cfg.jobs = static_cast<int>(require_number(j, key));
    } else if (key == "seed") {
      cfg.seed = value.get<unsigned long long>();
    } else if (key == "out") {
      cfg.out_dir = value.get<std::string>();
    } else if (key == "format") {
      cfg.format = value.get<std::string>();
    } else if (key == "ideal") {
      cfg.ideal = value.get<bool>();
    } else if (key == "cavity") {
      if (!value.is_object())
        throw std::invalid_argument("config field 'cavity' must be an object");
      for (const auto& [sub, sv] : value.items()) {
        if (sub == "wavelength") cfg.cavity.wavelength = require_number(value, sub);
        else if (sub == "quality") cfg.cavity.quality = require_number(value, sub);
        else if (sub == "mode_volume") cfg.cavity.mode_volume = require_number(value, sub);
        else throw std::invalid_argument("unknown config field 'cavity." + sub + "'");
        (void)sv;
      }
    } else if (key == "ion") {
      if (!value.is_object())
        throw std::invalid_argument("config field 'ion' must be an object");
      for (const auto& [sub, sv] : value.items()) {
        if (sub == "dipole") cfg.ion.dipole = require_number(value, sub);
        else if (sub == "coherence_time") cfg.ion.coherence_time = require_number(value, sub);
        else throw std::invalid_argument("unknown config field 'ion." + sub + "'");
        (void)sv;
      }
    } else {
      throw std::invalid_argument("unknown config field '" + key + "'");
    }
  }
}

std::string serialize_config(const RunConfig& cfg) {
  json j;
  j["g"] = cfg.params.g;
  j["kappa"] = cfg.params.kappa;
  j["gamma"] = cfg.params.gamma;
  j["delta"] = cfg.params.delta;
  j["T"] = cfg.T;
  j["sweep_T"] = cfg.sweep_T;
  if (cfg.omega_b) j["omega_b"] = *cfg.omega_b;
  else j["omega_b"] = nullptr;
  if (cfg.grid_n) j["grid_n"] = *cfg.grid_n;
  else j["grid_n"] = nullptr;
  j["method"] = method_name(cfg.method);
  j["jobs"] = cfg.jobs;
  j["seed"] = cfg.seed;
  j["out"] = cfg.out_dir;
  j["format"] = cfg.format;
  j["ideal"] = cfg.ideal;
  j["cavity"] = {{"wavelength", cfg.cavity.wavelength},
                 {"quality", cfg.cavity.quality},
                 {"mode_volume", cfg.cavity.mode_volume}};
  j["ion"] = {{"dipole", cfg.ion.dipole},
              {"coherence_time", cfg.ion.coherence_time}};
  return j.dump(2) + "\n";
}

namespace {

// ---- shared run helpers ----------------------------------------------------

ModeGrid build_run_grid(const RunConfig& cfg, const PulseSpec& pulse) {
  const double dw_rule = 2.0 * detail::pi / (10.0 * pulse.duration);
  if (cfg.omega_b && cfg.grid_n) return make_grid(*cfg.omega_b, *cfg.grid_n);
  if (cfg.omega_b) {
    const int n = detail::ceil_even(2.0 * *cfg.omega_b / dw_rule);
    return make_grid(*cfg.omega_b, n);
  }
  if (cfg.grid_n) {
    const double target = std::max(cfg.params.kappa / detail::pi,
                                   4.0 * pulse_sigma_omega(pulse));
    return make_grid(target, *cfg.grid_n);
  }
  return default_grid(cfg.params, pulse);
}

void ensure_out_dir(const RunConfig& cfg) {
  std::error_code ec;
  std::filesystem::create_directories(cfg.out_dir, ec);
  if (ec)
    throw std::runtime_error("cannot create output directory '" +
                             cfg.out_dir + "': " + ec.message());
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open output file: " + path);
  out << content;
  if (!out) throw std::runtime_error("failed writing output file: " + path);
}

void echo_config(const RunConfig& cfg) {
  write_text_file(cfg.out_dir + "/config_effective.json",
                  serialize_config(cfg));
}

// Runs `body(i)` for i in [0, n) on up to `jobs` threads. Results must be
// written to index-addressed slots; row order is by index, never completion
// order. The first thrown exception is rethrown after all threads join.
template <class F>
void parallel_for(int n, int jobs, F&& body) {
  jobs = std::max(1, std::min(jobs, n));
  if (jobs <= 1) {
    for (int i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<int> next{0};
  std::mutex error_mutex;
  std::exception_ptr first_error;
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(jobs));
  for (int t = 0; t < jobs; ++t) {
    pool.emplace_back([&] {
      while (true) {
        const int i = next.fetch_add(1);
        if (i >= n) break;
        try {
          body(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!first_error) first_error = std::current_exception();
          break;
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

struct BranchRuns {
  SpectralAmplitudes c0;
  EvolutionReport uncoupled;
  EvolutionReport coupled;
};

BranchRuns run_both_branches(const RunConfig& cfg, const PulseSpec& pulse,
                             const ModeGrid& grid) {
  BranchRuns runs{spectral_amplitudes(pulse, grid), {}, {}};
  const Integrator integ{cfg.method, std::nullopt};
  runs.uncoupled = evolve_uncoupled(runs.c0, cfg.params, grid, pulse, integ);
  runs.coupled = evolve_coupled(runs.c0, cfg.params, grid, pulse, integ);
  return runs;
}

json grid_json(const ModeGrid& grid) {
  return json{{"omega_b_rad_s", grid.omega_b},
              {"n_modes", grid.n_modes},
              {"delta_omega_rad_s", grid.delta_omega}};
}

}  // namespace

void cmd_reflect(const RunConfig& cfg) {
  validate_params(cfg.params);
  const PulseSpec pulse = make_pulse(cfg.T);
  const ModeGrid grid = build_run_grid(cfg, pulse);
  ensure_out_dir(cfg);
  echo_config(cfg);

  BranchRuns runs = run_both_branches(cfg, pulse, grid);
  const PhaseProfile prof =
      phase_profile(runs.uncoupled, runs.coupled, runs.c0, grid, cfg.T);

  std::string csv = "omega_rad_s,dtheta0_rad,dtheta1_rad,weight\n";
  for (int k = 0; k < grid.n_modes; ++k) {
    csv += format_double(prof.omegas[k]);
    csv += ',';
    csv += format_double(prof.dtheta0[k]);
    csv += ',';
    csv += format_double(prof.dtheta1[k]);
    csv += ',';
    csv += format_double(prof.weights[k]);
    csv += '\n';
  }
  write_text_file(cfg.out_dir + "/phase_profile.csv", csv);

  const XiPair xi =
      xi_coefficients(runs.uncoupled, runs.coupled, runs.c0, grid, cfg.T);
  const auto [x_min, f_min] = fidelity_min(xi);

  json summary;
  summary["T_s"] = cfg.T;
  summary["method"] = method_name(cfg.method);
  summary["grid"] = grid_json(grid);
  summary["xi1_re"] = xi.xi1.real();
  summary["xi1_im"] = xi.xi1.imag();
  summary["xi2_re"] = xi.xi2.real();
  summary["xi2_im"] = xi.xi2.imag();
  summary["F_min"] = f_min;
  summary["x_min"] = x_min;
  if (cfg.params.kappa * cfg.params.gamma > 0.0)
    summary["eta"] = spontaneous_loss(cfg.params);
  summary["uncoupled"] = {{"norm_leak", runs.uncoupled.norm_leak},
                          {"cavity_residual_sq",
                           runs.uncoupled.cavity_residual}};
  summary["coupled"] = {{"norm_leak", runs.coupled.norm_leak},
                        {"cavity_residual_sq", runs.coupled.cavity_residual},
                        {"excited_residual_sq",
                         runs.coupled.excited_residual},
                        {"loss_integral", runs.coupled.loss_integral}};
  write_text_file(cfg.out_dir + "/summary.json", summary.dump(2) + "\n");
}

void cmd_fidelity_sweep(const RunConfig& cfg) {
  validate_params(cfg.params);
  if (cfg.sweep_T.size() < 2)
    throw std::invalid_argument(
        "fidelity-sweep needs at least two T values in 'sweep_T'");
  for (double t : cfg.sweep_T)
    if (!(t > 0.0))
      throw std::invalid_argument("sweep T values must all be > 0");
  ensure_out_dir(cfg);
  echo_config(cfg);

  struct Row {
    double T = 0.0, kappa_T = 0.0, f_min = 0.0, x_min = 0.0, eta = 0.0;
  };
  const int n = static_cast<int>(cfg.sweep_T.size());
  std::vector<Row> rows(static_cast<std::size_t>(n));
  const double eta = spontaneous_loss(cfg.params);

  parallel_for(n, cfg.jobs, [&](int i) {
    const double T = cfg.sweep_T[static_cast<std::size_t>(i)];
    const PulseSpec pulse = make_pulse(T);
    RunConfig point = cfg;
    point.T = T;
    const ModeGrid grid = build_run_grid(point, pulse);
    BranchRuns runs = run_both_branches(point, pulse, grid);
    const XiPair xi =
        xi_coefficients(runs.uncoupled, runs.coupled, runs.c0, grid, T);
    const auto [x_min, f_min] = fidelity_min(xi);
    rows[static_cast<std::size_t>(i)] =
        Row{T, cfg.params.kappa * T, f_min, x_min, eta};
  });

  std::string csv = "T_s,kappa_T,F_min,x_min,eta\n";
  for (const Row& r : rows) {
    csv += format_double(r.T);
    csv += ',';
    csv += format_double(r.kappa_T);
    csv += ',';
    csv += format_double(r.f_min);
    csv += ',';
    csv += format_double(r.x_min);
    csv += ',';
    csv += format_double(r.eta);
    csv += '\n';
  }
  write_text_file(cfg.out_dir + "/fidelity_vs_T.csv", csv);
}

void cmd_two_atom_gate(const RunConfig& cfg) {
  validate_params(cfg.params);
  const PulseSpec pulse = make_pulse(cfg.T);
  const ModeGrid grid = build_run_grid(cfg, pulse);
  ensure_out_dir(cfg);
  echo_config(cfg);

  SpectralAmplitudes c0 = spectral_amplitudes(pulse, grid);
  ScatteringProfile profile;
  if (cfg.ideal) {
    profile.omegas = grid.omegas;
    profile.r0 = Eigen::VectorXcd::Constant(grid.n_modes, cd(-1.0, 0.0));
    profile.r1 = Eigen::VectorXcd::Constant(grid.n_modes, cd(+1.0, 0.0));
    profile.valid_mask.assign(static_cast<std::size_t>(grid.n_modes), true);
  } else {
    const Integrator integ{cfg.method, std::nullopt};
    EvolutionReport rep0 = evolve_uncoupled(c0, cfg.params, grid, pulse, integ);
    EvolutionReport rep1 = evolve_coupled(c0, cfg.params, grid, pulse, integ);
    profile = scattering_profile(rep0, rep1, c0, grid, cfg.T);
  }

  constexpr int kGridPoints = 9;
  struct Cell {
    double b1_sq = 0.0, b2_sq = 0.0, f12 = 0.0;
  };
  std::vector<Cell> cells(kGridPoints * kGridPoints);
  parallel_for(kGridPoints * kGridPoints, cfg.jobs, [&](int idx) {
    const int i = idx / kGridPoints;
    const int j = idx % kGridPoints;
    const double x1 = static_cast<double>(i) / (kGridPoints - 1);
    const double x2 = static_cast<double>(j) / (kGridPoints - 1);
    MultimodeJointState st = make_multimode_state(
        std::sqrt(x1), std::sqrt(1.0 - x1), std::sqrt(x2),
        std::sqrt(1.0 - x2), c0, grid);
    CompositeResult res = compose_realistic_cpf(st, profile, profile, cfg.T);
    cells[static_cast<std::size_t>(idx)] = Cell{x1, x2, res.f12};
  });

  std::string csv = "beta1_sq,beta2_sq,F12\n";
  double worst = 2.0, worst_b1 = 0.0, worst_b2 = 0.0;
  for (const Cell& c : cells) {
    csv += format_double(c.b1_sq);
    csv += ',';
    csv += format_double(c.b2_sq);
    csv += ',';
    csv += format_double(c.f12);
    csv += '\n';
    if (c.f12 < worst) {
      worst = c.f12;
      worst_b1 = c.b1_sq;
      worst_b2 = c.b2_sq;
    }
  }
  write_text_file(cfg.out_dir + "/gate_fidelity.csv", csv);

  // Ideal-algebra identity check on random product inputs: the five-step
  // sequence must equal the two-qubit phase flip with the photon restored.
  std::mt19937 gen(static_cast<std::mt19937::result_type>(cfg.seed));
  std::normal_distribution<double> normal(0.0, 1.0);
  auto random_pair = [&](cd& b0, cd& b1) {
    do {
      b0 = cd(normal(gen), normal(gen));
      b1 = cd(normal(gen), normal(gen));
    } while (std::sqrt(std::norm(b0) + std::norm(b1)) < 1e-3);
    const double inv = 1.0 / std::sqrt(std::norm(b0) + std::norm(b1));
    b0 *= inv;
    b1 *= inv;
  };
  double identity_err = 0.0, photon_err = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    cd b10, b11, b20, b21;
    random_pair(b10, b11);
    random_pair(b20, b21);
    const IdealJointState input = make_ideal_state(b10, b11, b20, b21);
    const IdealJointState output = compose_ideal_cpf(input);
    IdealJointState expected = input;
    expected.amplitudes[0] = -expected.amplitudes[0];
    expected.amplitudes[1] = -expected.amplitudes[1];
    for (int a = 0; a < 8; ++a)
      identity_err = std::max(
          std::abs(output.amplitudes[static_cast<std::size_t>(a)] -
                   expected.amplitudes[static_cast<std::size_t>(a)]),
          identity_err);
    for (int b = 0; b < 4; ++b)
      photon_err = std::max(
          std::abs(output.amplitudes[static_cast<std::size_t>(2 * b)] -
                   output.amplitudes[static_cast<std::size_t>(2 * b + 1)]),
          photon_err);
  }

  json summary;
  summary["T_s"] = cfg.T;
  summary["ideal_profiles"] = cfg.ideal;
  summary["grid"] = grid_json(grid);
  summary["worst_F12"] = worst;
  summary["worst_beta1_sq"] = worst_b1;
  summary["worst_beta2_sq"] = worst_b2;
  summary["phase_flip_identity_max_error"] = identity_err;
  summary["photon_restored_max_error"] = photon_err;
  write_text_file(cfg.out_dir + "/summary.json", summary.dump(2) + "\n");
}

void cmd_params(const RunConfig& cfg) {
  validate_ion_spec(cfg.ion);
  validate_cavity_spec(cfg.cavity);
  validate_params(cfg.params);
  const PulseSpec pulse = make_pulse(cfg.T);

  const double g0 = coupling_rate(cfg.ion, cfg.cavity);
  const double kappa = cavity_decay(cfg.cavity);
  const double eta = spontaneous_loss(cfg.params);
  const double n_op = operation_count(cfg.ion, pulse);
  const double nominal_g = cfg.params.g;

  if (cfg.format == "csv") {
    std::string csv = "quantity,value\n";
    csv += "g0_rad_s," + format_double(g0) + "\n";
    csv += "nominal_g_rad_s," + format_double(nominal_g) + "\n";
    csv += "g0_ratio_to_nominal," + format_double(g0 / nominal_g) + "\n";
    csv += "kappa_rad_s," + format_double(kappa) + "\n";
    csv += "eta," + format_double(eta) + "\n";
    csv += "n_op," + format_double(n_op) + "\n";
    std::cout << csv;
    return;
  }
  json out;
  out["g0_rad_s"] = g0;
  out["nominal_g_rad_s"] = nominal_g;
  out["g0_ratio_to_nominal"] = g0 / nominal_g;
  out["kappa_rad_s"] = kappa;
  out["eta"] = eta;
  out["n_op"] = n_op;
  std::cout << out.dump(2) << "\n";
}

int run_cli(int argc, const char* const* argv) {
  RunConfig cfg;

  // The config file provides the base layer; flags override it. Pre-scan for
  // --config so the file is merged before CLI11 applies flag values.
  try {
    for (int i = 1; i < argc; ++i) {
      const std::string arg = argv[i];
      if (arg == "--config") {
        if (i + 1 >= argc)
          throw std::invalid_argument("--config requires a path");
        merge_config_file(cfg, argv[i + 1]);
      } else if (arg.rfind("--config=", 0) == 0) {
        merge_config_file(cfg, arg.substr(9));
      }
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }

  CLI::App app{"Single-photon cavity reflection and controlled-phase-flip "
               "gate simulator"};
  app.fallthrough(true);
  app.require_subcommand(1);

  std::string config_path;  // consumed by the pre-scan; declared for help
  app.add_option("--config", config_path, "JSON config file (flags override)");
  app.add_option("--g", cfg.params.g, "ion-cavity coupling rate, rad/s");
  app.add_option("--kappa", cfg.params.kappa, "cavity decay rate, rad/s");
  app.add_option("--gamma", cfg.params.gamma,
                 "spontaneous-emission rate, rad/s");
  app.add_option("--delta", cfg.params.delta, "ion detuning, rad/s");
  app.add_option("--T", cfg.T, "pulse duration, s");
  app.add_option("--grid-n", cfg.grid_n, "mode-count override");
  app.add_option("--omega-b", cfg.omega_b, "grid bandwidth override, rad/s");
  std::string method_str = method_name(cfg.method);
  app.add_option("--method", method_str, "propagator: exact or stepped")
      ->check(CLI::IsMember({"exact", "stepped"}));
  app.add_option("--jobs", cfg.jobs, "max parallel sweep workers")
      ->check(CLI::PositiveNumber);
  app.add_option("--seed", cfg.seed, "seed for randomized checks");
  app.add_option("--out", cfg.out_dir, "output directory");
  app.add_flag("--ideal", cfg.ideal,
               "two-atom-gate: use ideal reflection profiles");
  app.add_option("--format", cfg.format, "params output format")
      ->check(CLI::IsMember({"csv", "json"}));

  CLI::App* sub_reflect = app.add_subcommand(
      "reflect", "Single-pulse reflection: phase profile and fidelity");
  CLI::App* sub_sweep = app.add_subcommand(
      "fidelity-sweep", "F_min across the configured pulse durations");
  CLI::App* sub_gate = app.add_subcommand(
      "two-atom-gate", "Composite two-atom gate fidelity over the beta grid");
  CLI::App* sub_params = app.add_subcommand(
      "params", "Derived experimental quantities");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  cfg.method = parse_method(method_str);

  try {
    if (sub_reflect->parsed()) cmd_reflect(cfg);
    else if (sub_sweep->parsed()) cmd_fidelity_sweep(cfg);
    else if (sub_gate->parsed()) cmd_two_atom_gate(cfg);
    else if (sub_params->parsed()) cmd_params(cfg);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}

}  // namespace cpf::cli
