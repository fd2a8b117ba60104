#pragma once

// Command-line front end: config handling, the four subcommands, and
// byte-stable CSV/JSON emission.

#include <optional>
#include <string>
#include <vector>

#include "cpf/core.hpp"
#include "cpf/dynamics.hpp"
#include "cpf/params.hpp"

namespace cpf::cli {

// Complete, serializable description of a run. A run is reproducible from
// this struct alone.
struct RunConfig {
  PhysicalParams params{1.0e9, 3.2e7, 1.0e3, 0.0};
  double T = 3.0e-6;                      // pulse duration, s
  std::vector<double> sweep_T = {0.5e-6, 1.0e-6, 1.5e-6,
                                 2.0e-6, 2.5e-6, 3.0e-6};
  std::optional<double> omega_b;          // grid bandwidth override, rad/s
  std::optional<int> grid_n;              // mode-count override
  Method method = Method::exact;
  int jobs = 1;
  unsigned long long seed = 12345;
  std::string out_dir = "out";
  std::string format = "json";            // "json" or "csv" (cmd_params)
  bool ideal = false;                     // two-atom-gate: ideal profiles
  CavitySpec cavity{579.879e-9, 5.0e7, 3.0e-16};
  IonSpec ion{7.5e-28, 8.2e-2};
};

// Shortest decimal representation that round-trips the binary double.
std::string format_double(double v);

// Merges a JSON config file into `cfg`. Unknown keys are rejected.
// Throws std::invalid_argument on parse or schema errors.
void merge_config_file(RunConfig& cfg, const std::string& path);

// Serializes the effective config (defaults filled) as a JSON document.
std::string serialize_config(const RunConfig& cfg);

// Subcommand bodies. Each throws on failure: std::invalid_argument /
// std::domain_error for configuration problems, std::runtime_error for
// numerical failures.
void cmd_reflect(const RunConfig& cfg);
void cmd_fidelity_sweep(const RunConfig& cfg);
void cmd_two_atom_gate(const RunConfig& cfg);
void cmd_params(const RunConfig& cfg);

// Full argv entry point. Exit codes: 0 success, 2 configuration error,
// 3 numerical failure.
int run_cli(int argc, const char* const* argv);

}  // namespace cpf::cli
