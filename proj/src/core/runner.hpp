// Copyright 2026 The qpinem Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef QPINEM_CORE_RUNNER_HPP
#define QPINEM_CORE_RUNNER_HPP

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "core/classical.hpp"
#include "core/evolution.hpp"
#include "core/states.hpp"
#include "core/stats.hpp"

namespace qpinem {

enum class Engine { Auto, Smatrix, Evolution };

struct PhotonSpec {
  StateKind kind = StateKind::Fock;
  int n = 0;           // Fock occupation
  double n_avg = 0.0;  // coherent / thermal mean
  int n_cutoff = -1;   // -1: choose automatically
};

struct SweepSpec {
  std::vector<double> coupling_abs;
  std::vector<double> photon_number;  // n_i for Fock, n_avg otherwise
  StateKind kind = StateKind::Fock;
  bool simultaneous = true;
  bool successive = true;
};

// Declarative description of one run; the JSON schema mirrors the fields.
struct ScenarioConfig {
  std::string label = "scenario";
  PhotonSpec photon;
  std::vector<Complex> couplings;
  InteractionMode mode = InteractionMode::Simultaneous;
  bool successive_measurement = false;
  std::map<std::string, int> post_select;

  SeriesControl series;
  double dropped_budget = 1e-6;
  double truncation_tol = 1e-10;
  int n_cutoff = -1;  // joint-basis photon cutoff; -1 auto
  bool has_j_window = false;
  int j_min = 0;
  int j_max = 0;
  std::size_t max_cells = 16u << 20;  // guard on the joint basis size

  std::vector<std::string> outputs{"joint_table", "pcc"};
  Engine engine = Engine::Auto;
  std::optional<SweepSpec> sweep;
  std::vector<double> classical_script_g_abs;  // empty: |G_mu| sqrt(n_avg)
  long seed = 0;  // reserved; no randomness in the core
};

ScenarioConfig parse_scenario_text(const std::string& json_text);
ScenarioConfig parse_scenario_file(const std::string& path);
std::string scenario_to_json(const ScenarioConfig& cfg);

// Throws ErrorCode::Validation listing every problem found.
void validate_scenario(const ScenarioConfig& cfg);

struct TruncationReport {
  double state_deficit = 0.0;          // photon-state cutoff loss
  double dropped_mass = 0.0;           // evolution cutoff loss (weighted for mixtures)
  double mixture_weight_deficit = 0.0; // thermal components above the cutoff
};

struct RunResult {
  JointDistribution joint;  // post-selected when the config asks for it
  PccResult electron_pcc;   // between the first two electron axes of `joint`
  double success_probability = 1.0;
  TruncationReport truncation;
  bool classical_requested = false;
  PccResult classical_pcc;
  double classical_tv = 0.0;
  double wall_seconds = 0.0;
  std::string manifest_json;
  std::vector<std::string> files;
};

// out_dir empty: compute only, write nothing.
RunResult run_scenario(const ScenarioConfig& cfg, const std::string& out_dir);

struct SweepPoint {
  std::string mode;
  double coupling = 0.0;
  double photon = 0.0;
  PccResult pcc;
  std::string error;  // empty on success
};

struct SweepResult {
  std::vector<SweepPoint> points;
  double wall_seconds = 0.0;
  std::string manifest_json;
  std::vector<std::string> files;
};

RunResult run_scenario(const ScenarioConfig& cfg);
SweepResult run_sweep(const ScenarioConfig& cfg, const std::string& out_dir);

// Runs the configured scenario through the factorized evolution, the closed
// forms (when applicable) and the dense oracle; returns the largest
// probability deviation between any two paths.
double oracle_check(const ScenarioConfig& cfg);

// Resolved joint basis for a config (exposed for tests and oracle sizing).
Box resolve_box(const ScenarioConfig& cfg, int state_top, double state_mean);

unsigned worker_threads();  // QPINEM_THREADS, default hardware concurrency

}  // namespace qpinem

#endif
