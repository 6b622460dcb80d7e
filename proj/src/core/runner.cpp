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

#include "core/runner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <atomic>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "core/error.hpp"
#include "core/smatrix.hpp"
#include "core/version.hpp"

namespace qpinem {

using nlohmann::json;

unsigned worker_threads() {
  if (const char* env = std::getenv("QPINEM_THREADS")) {
    long v = std::strtol(env, nullptr, 10);
    if (v >= 1 && v <= 1024) return static_cast<unsigned>(v);
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

namespace {

StateKind parse_kind(const std::string& s) {
  if (s == "fock") return StateKind::Fock;
  if (s == "coherent") return StateKind::Coherent;
  if (s == "thermal") return StateKind::Thermal;
  throw Error(ErrorCode::Parse, "unknown photon state kind: " + s);
}

std::string kind_name(StateKind k) {
  switch (k) {
    case StateKind::Fock: return "fock";
    case StateKind::Coherent: return "coherent";
    case StateKind::Thermal: return "thermal";
  }
  return "?";
}

std::uint64_t fnv1a64(const std::string& text) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

}  // namespace

ScenarioConfig parse_scenario_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::Parse, std::string("scenario JSON: ") + e.what());
  }
  ScenarioConfig cfg;
  try {
    cfg.label = j.value("label", std::string("scenario"));
    if (j.contains("photon")) {
      const json& p = j.at("photon");
      cfg.photon.kind = parse_kind(p.value("kind", std::string("fock")));
      cfg.photon.n = p.value("n", 0);
      cfg.photon.n_avg = p.value("n_avg", 0.0);
      cfg.photon.n_cutoff = p.value("n_cutoff", -1);
    }
    if (j.contains("couplings")) {
      for (const json& c : j.at("couplings")) {
        double mag = c.at("abs").get<double>();
        double arg = c.value("arg", 0.0);
        cfg.couplings.push_back(std::polar(mag, arg));
      }
    }
    std::string mode = j.value("mode", std::string("simultaneous"));
    if (mode == "simultaneous") {
      cfg.mode = InteractionMode::Simultaneous;
    } else if (mode == "successive") {
      cfg.mode = InteractionMode::Successive;
    } else {
      throw Error(ErrorCode::Parse, "unknown mode: " + mode);
    }
    cfg.successive_measurement = j.value("successive_measurement", false);
    if (j.contains("post_select")) {
      for (auto& [axis, value] : j.at("post_select").items()) {
        cfg.post_select[axis] = value.get<int>();
      }
    }
    if (j.contains("series")) {
      const json& s = j.at("series");
      cfg.series.term_tol = s.value("term_tol", cfg.series.term_tol);
      cfg.series.max_index = s.value("max_index", cfg.series.max_index);
      std::string arith = s.value("arithmetic", std::string("loggamma"));
      if (arith == "loggamma") {
        cfg.series.arithmetic = Arithmetic::LogGammaFloat;
      } else if (arith == "rational") {
        cfg.series.arithmetic = Arithmetic::ExactRational;
      } else {
        throw Error(ErrorCode::Parse, "unknown series arithmetic: " + arith);
      }
    }
    if (j.contains("cutoffs")) {
      const json& c = j.at("cutoffs");
      cfg.n_cutoff = c.value("n_cutoff", -1);
      cfg.dropped_budget = c.value("dropped_mass_budget", cfg.dropped_budget);
      cfg.truncation_tol = c.value("truncation_tol", cfg.truncation_tol);
      cfg.max_cells = c.value("max_cells", cfg.max_cells);
      if (c.contains("j_min") || c.contains("j_max")) {
        cfg.has_j_window = true;
        cfg.j_min = c.at("j_min").get<int>();
        cfg.j_max = c.at("j_max").get<int>();
      }
    }
    if (j.contains("outputs")) {
      cfg.outputs.clear();
      for (const json& o : j.at("outputs")) cfg.outputs.push_back(o.get<std::string>());
    }
    std::string engine = j.value("engine", std::string("auto"));
    if (engine == "auto") {
      cfg.engine = Engine::Auto;
    } else if (engine == "smatrix") {
      cfg.engine = Engine::Smatrix;
    } else if (engine == "evolution") {
      cfg.engine = Engine::Evolution;
    } else {
      throw Error(ErrorCode::Parse, "unknown engine: " + engine);
    }
    if (j.contains("sweep")) {
      const json& s = j.at("sweep");
      SweepSpec sw;
      for (const json& v : s.at("coupling_abs")) sw.coupling_abs.push_back(v.get<double>());
      for (const json& v : s.at("photon_number")) sw.photon_number.push_back(v.get<double>());
      sw.kind = parse_kind(s.value("kind", std::string("fock")));
      if (s.contains("modes")) {
        sw.simultaneous = false;
        sw.successive = false;
        for (const json& m : s.at("modes")) {
          std::string name = m.get<std::string>();
          if (name == "simultaneous") sw.simultaneous = true;
          else if (name == "successive") sw.successive = true;
          else throw Error(ErrorCode::Parse, "unknown sweep mode: " + name);
        }
      }
      cfg.sweep = sw;
    }
    if (j.contains("classical_script_g_abs")) {
      for (const json& v : j.at("classical_script_g_abs")) {
        cfg.classical_script_g_abs.push_back(v.get<double>());
      }
    }
    cfg.seed = j.value("seed", 0L);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::Parse, std::string("scenario JSON: ") + e.what());
  }
  return cfg;
}

ScenarioConfig parse_scenario_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open config: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_scenario_text(ss.str());
}

std::string scenario_to_json(const ScenarioConfig& cfg) {
  json j;
  j["label"] = cfg.label;
  j["photon"] = {{"kind", kind_name(cfg.photon.kind)},
                 {"n", cfg.photon.n},
                 {"n_avg", cfg.photon.n_avg},
                 {"n_cutoff", cfg.photon.n_cutoff}};
  j["couplings"] = json::array();
  for (const Complex& g : cfg.couplings) {
    j["couplings"].push_back({{"abs", std::abs(g)}, {"arg", std::arg(g)}});
  }
  j["mode"] = cfg.mode == InteractionMode::Simultaneous ? "simultaneous" : "successive";
  j["successive_measurement"] = cfg.successive_measurement;
  if (!cfg.post_select.empty()) {
    json ps = json::object();
    for (const auto& [axis, value] : cfg.post_select) ps[axis] = value;
    j["post_select"] = ps;
  }
  j["series"] = {{"term_tol", cfg.series.term_tol},
                 {"max_index", cfg.series.max_index},
                 {"arithmetic", cfg.series.arithmetic == Arithmetic::LogGammaFloat
                                    ? "loggamma"
                                    : "rational"}};
  json cut = {{"n_cutoff", cfg.n_cutoff},
              {"dropped_mass_budget", cfg.dropped_budget},
              {"truncation_tol", cfg.truncation_tol},
              {"max_cells", cfg.max_cells}};
  if (cfg.has_j_window) {
    cut["j_min"] = cfg.j_min;
    cut["j_max"] = cfg.j_max;
  }
  j["cutoffs"] = cut;
  j["outputs"] = cfg.outputs;
  j["engine"] = cfg.engine == Engine::Auto ? "auto"
               : cfg.engine == Engine::Smatrix ? "smatrix"
                                               : "evolution";
  if (cfg.sweep) {
    json sw;
    sw["coupling_abs"] = cfg.sweep->coupling_abs;
    sw["photon_number"] = cfg.sweep->photon_number;
    sw["kind"] = kind_name(cfg.sweep->kind);
    json modes = json::array();
    if (cfg.sweep->simultaneous) modes.push_back("simultaneous");
    if (cfg.sweep->successive) modes.push_back("successive");
    sw["modes"] = modes;
    j["sweep"] = sw;
  }
  if (!cfg.classical_script_g_abs.empty()) {
    j["classical_script_g_abs"] = cfg.classical_script_g_abs;
  }
  j["seed"] = cfg.seed;
  return j.dump();
}

void validate_scenario(const ScenarioConfig& cfg) {
  std::vector<std::string> problems;
  if (cfg.couplings.empty() && !cfg.sweep) {
    problems.push_back("at least one electron coupling is required");
  }
  for (const Complex& g : cfg.couplings) {
    if (!std::isfinite(g.real()) || !std::isfinite(g.imag())) {
      problems.push_back("couplings must be finite");
      break;
    }
  }
  if (cfg.photon.kind == StateKind::Fock && cfg.photon.n < 0) {
    problems.push_back("fock occupation must be >= 0");
  }
  if (cfg.photon.kind != StateKind::Fock &&
      (!std::isfinite(cfg.photon.n_avg) || cfg.photon.n_avg < 0.0)) {
    problems.push_back("n_avg must be finite and >= 0");
  }
  if (cfg.series.term_tol <= 0.0) problems.push_back("series.term_tol must be > 0");
  if (cfg.series.max_index < 1) problems.push_back("series.max_index must be >= 1");
  if (cfg.dropped_budget <= 0.0) problems.push_back("dropped_mass_budget must be > 0");
  if (cfg.truncation_tol <= 0.0) problems.push_back("truncation_tol must be > 0");
  if (cfg.has_j_window && (cfg.j_min > 0 || cfg.j_max < 0)) {
    problems.push_back("the electron window must contain j = 0");
  }
  for (const std::string& o : cfg.outputs) {
    if (o != "joint_table" && o != "marginals" && o != "pcc" && o != "classical_comparison") {
      problems.push_back("unknown output kind: " + o);
    }
  }
  for (const auto& [axis, value] : cfg.post_select) {
    (void)value;
    if (axis.size() < 2 || axis[0] != 'e') {
      problems.push_back("post_select axes must name electrons (e1, e2, ...): " + axis);
    }
  }
  if (cfg.successive_measurement && cfg.mode != InteractionMode::Successive) {
    problems.push_back("successive_measurement requires successive mode");
  }
  if (cfg.successive_measurement && cfg.engine == Engine::Smatrix) {
    problems.push_back("the measured protocol is only available through the evolution engine");
  }
  if (cfg.engine == Engine::Smatrix && cfg.couplings.size() != 2 && !cfg.sweep) {
    problems.push_back("the smatrix engine handles exactly two electrons");
  }
  if (cfg.engine == Engine::Smatrix && cfg.photon.kind == StateKind::Coherent) {
    problems.push_back("the smatrix engine requires number-basis (fock or thermal) input");
  }
  if (cfg.sweep) {
    if (cfg.sweep->coupling_abs.empty() || cfg.sweep->photon_number.empty()) {
      problems.push_back("sweep grids must be non-empty");
    }
    if (!cfg.sweep->simultaneous && !cfg.sweep->successive) {
      problems.push_back("sweep needs at least one interaction mode");
    }
  }
  std::vector<std::string> requested = cfg.outputs;
  if (std::find(requested.begin(), requested.end(), "classical_comparison") != requested.end() &&
      cfg.couplings.size() != 2 && !cfg.sweep) {
    problems.push_back("classical_comparison is defined for two electrons");
  }
  if (!problems.empty()) {
    std::string msg = "invalid scenario:";
    for (const std::string& p : problems) msg += "\n  - " + p;
    throw Error(ErrorCode::Validation, msg);
  }
}

namespace {

double coupling_sum_sq(const std::vector<Complex>& g) {
  double s = 0.0;
  for (const Complex& z : g) s += std::norm(z);
  return s;
}

int photon_margin(double sum_x, double state_mean) {
  double sigma = std::sqrt(sum_x * (2.0 * state_mean + 1.0) + 1.0);
  double deep = 12.0 * std::sqrt(sum_x + 1.0);  // vacuum-style tails, taken deep
  return static_cast<int>(std::ceil(sum_x + std::max(deep, 5.0 * sigma) + 14.0));
}

}  // namespace

Box resolve_box(const ScenarioConfig& cfg, int state_top, double state_mean) {
  const int n_el = static_cast<int>(cfg.couplings.size());
  const double sum_x = coupling_sum_sq(cfg.couplings);
  int ncut = cfg.n_cutoff >= 0 ? cfg.n_cutoff : state_top + photon_margin(sum_x, state_mean);
  int j_lo, j_hi;
  if (cfg.has_j_window) {
    j_lo = cfg.j_min;
    j_hi = cfg.j_max;
  } else {
    int w = ncut + static_cast<int>(std::ceil(4.0 * sum_x));
    j_lo = -w;
    j_hi = w;
  }
  Box box{ncut, std::vector<int>(static_cast<std::size_t>(n_el), j_lo),
          std::vector<int>(static_cast<std::size_t>(n_el), j_hi)};
  if (box.size() > cfg.max_cells) {
    throw Error(ErrorCode::DimensionTooLarge,
                "joint basis has " + std::to_string(box.size()) + " cells, above max_cells = " +
                    std::to_string(cfg.max_cells) +
                    "; set cutoffs.n_cutoff / j_min / j_max explicitly");
  }
  return box;
}

namespace {

// One pure Fock component evaluated through the closed-form elements. Only
// labels on the energy-conservation manifold are populated.
std::vector<double> smatrix_component(int n_i, const ScenarioConfig& cfg, const Box& box) {
  CouplingSet c{cfg.couplings};
  std::vector<double> probs(box.size(), 0.0);
  const int j_lo = box.j_min[0], j_hi = box.j_max[0];
  const int k_lo = box.j_min[1], k_hi = box.j_max[1];
  for (int dj = j_lo; dj <= j_hi; ++dj) {
    for (int dk = k_lo; dk <= k_hi; ++dk) {
      int n_f = n_i - dj - dk;
      if (n_f < 0 || n_f > box.n_cutoff) continue;
      double p;
      if (cfg.mode == InteractionMode::Simultaneous) {
        p = std::norm(element_two_electron(c, {n_i, n_f, dj, dk}, cfg.series));
      } else {
        int n_mid = n_i - dj;
        if (n_mid < 0) continue;
        p = std::norm(element_single_electron(c.g[0], n_i, n_mid, cfg.series)) *
            std::norm(element_single_electron(c.g[1], n_mid, n_f, cfg.series));
      }
      int j[2] = {dj, dk};
      probs[box.index(n_f, j)] = p;
    }
  }
  return probs;
}

std::vector<double> evolution_component_fock(int n_i, const ScenarioConfig& cfg, const Box& box,
                                             double component_budget, double* dropped) {
  EvolveControl ctl{cfg.series, component_budget};
  JointAmplitude st = make_initial_fock(n_i, box);
  CouplingSet c{cfg.couplings};
  if (cfg.successive_measurement) {
    return scatter_successive_measured(st, c, ctl, dropped);
  }
  JointAmplitude out = scatter(st, c, cfg.mode, ctl);
  *dropped = out.dropped_mass;
  std::vector<double> probs(out.amp.size());
  for (std::size_t i = 0; i < out.amp.size(); ++i) probs[i] = std::norm(out.amp[i]);
  return probs;
}

struct ComponentPlan {
  double weight = 1.0;
  int n_i = 0;
  int n_cutoff = 0;       // component boxes share j windows with the global box
  double budget = 1e-6;
};

struct PipelineOutput {
  JointDistribution full;  // photon + all electrons
  TruncationReport truncation;
};

PipelineOutput run_pipeline(const ScenarioConfig& cfg) {
  const int n_el = static_cast<int>(cfg.couplings.size());
  const double sum_x = coupling_sum_sq(cfg.couplings);

  PipelineOutput out;

  // Resolve the initial photon state and the component decomposition.
  PhotonState state;
  std::vector<ComponentPlan> plan;
  int state_top;
  double state_mean;
  double skipped_weight = 0.0;
  switch (cfg.photon.kind) {
    case StateKind::Fock: {
      state = make_fock(cfg.photon.n, cfg.photon.n_cutoff);
      state_top = cfg.photon.n;
      state_mean = cfg.photon.n;
      plan.push_back({1.0, cfg.photon.n, 0, cfg.dropped_budget});
      break;
    }
    case StateKind::Coherent: {
      state = make_coherent(cfg.photon.n_avg, cfg.photon.n_cutoff, cfg.truncation_tol);
      state_top = state.n_cutoff;
      state_mean = cfg.photon.n_avg;
      break;  // single coherent component, handled separately below
    }
    case StateKind::Thermal: {
      state = make_thermal(cfg.photon.n_avg, cfg.photon.n_cutoff, cfg.truncation_tol);
      state_top = state.n_cutoff;
      // mixtures need photon headroom above their heaviest component, not
      // above the ensemble mean
      state_mean = state.n_cutoff;
      const int n_comp = state.n_cutoff + 1;
      double weight_floor =
          std::max(cfg.truncation_tol, cfg.dropped_budget) / (4.0 * n_comp);
      for (int n = 0; n <= state.n_cutoff; ++n) {
        double w = state.probabilities[static_cast<std::size_t>(n)];
        if (w <= weight_floor) {
          skipped_weight += w;
          continue;
        }
        // Light components may lose proportionally more without hurting the
        // total budget; their margins shrink accordingly.
        double target = cfg.dropped_budget / (2.0 * n_comp * w);
        target = std::min(0.5, std::max(1e-16, target));
        plan.push_back({w, n, 0, target});
      }
      break;
    }
    default:
      throw Error(ErrorCode::Internal, "unhandled state kind");
  }
  out.truncation.state_deficit = state.truncation_deficit;

  Box box = resolve_box(cfg, state_top, state_mean);

  // Engine choice: closed forms for two electrons with number-basis input,
  // the factorized evolution for everything else.
  Engine engine = cfg.engine;
  if (engine == Engine::Auto) {
    bool smatrix_ok =
        n_el == 2 && cfg.photon.kind == StateKind::Fock && !cfg.successive_measurement;
    // The alternating closed-form series loses float precision once photon
    // numbers run high at strong coupling; those runs go to the evolution
    // engine (an explicit engine choice is always honored).
    double reach = cfg.photon.n + sum_x + 4.0 * std::sqrt(sum_x * (2.0 * cfg.photon.n + 1.0) + 1.0);
    smatrix_ok = smatrix_ok && reach <= 40.0;
    engine = smatrix_ok ? Engine::Smatrix : Engine::Evolution;
  }

  std::vector<double> probs(box.size(), 0.0);
  KahanSum dropped_total;

  if (cfg.photon.kind == StateKind::Coherent) {
    double dropped = 0.0;
    EvolveControl ctl{cfg.series, cfg.dropped_budget};
    JointAmplitude st = make_initial_state(state.amplitudes, box);
    st.dropped_mass = 0.0;
    CouplingSet c{cfg.couplings};
    if (cfg.successive_measurement) {
      probs = scatter_successive_measured(st, c, ctl, &dropped);
    } else {
      JointAmplitude fin = scatter(st, c, cfg.mode, ctl);
      dropped = fin.dropped_mass;
      for (std::size_t i = 0; i < fin.amp.size(); ++i) probs[i] = std::norm(fin.amp[i]);
    }
    dropped_total.add(dropped);
  } else {
    const bool mixture = plan.size() > 1;
    double max_x = 0.0;
    for (const Complex& g : cfg.couplings) max_x = std::max(max_x, std::norm(g));
    for (ComponentPlan& comp : plan) {
      Box comp_box = box;
      std::vector<double> comp_probs;
      double dropped = 0.0;
      // The margin factor follows the measured tail decay, roughly a decade
      // per quarter-sigma; if a component still drops more than its share of
      // the budget the margins grow and it reruns.
      double fm = 1.2 + 0.25 * std::log10(1.0 / comp.budget);
      for (int attempt = 0;; ++attempt) {
        comp_box = box;
        if (mixture && cfg.n_cutoff < 0) {
          double sigma = std::sqrt(sum_x * (2.0 * comp.n_i + 1.0) + 1.0);
          comp_box.n_cutoff = std::min(
              box.n_cutoff, comp.n_i + static_cast<int>(std::ceil(sum_x + fm * sigma + 6.0)));
          double sigma_j = std::sqrt(max_x * (2.0 * comp.n_i + 1.0) + 1.0);
          int half = static_cast<int>(std::ceil(fm * sigma_j + sum_x + 6.0));
          for (int mu = 0; mu < n_el; ++mu) {
            comp_box.j_min[static_cast<std::size_t>(mu)] =
                std::max(box.j_min[static_cast<std::size_t>(mu)], -half);
            comp_box.j_max[static_cast<std::size_t>(mu)] =
                std::min(box.j_max[static_cast<std::size_t>(mu)], half);
          }
        }
        comp.n_cutoff = comp_box.n_cutoff;
        bool box_maxed = comp_box.n_cutoff == box.n_cutoff && comp_box.j_min == box.j_min &&
                         comp_box.j_max == box.j_max;
        try {
          if (engine == Engine::Smatrix) {
            comp_probs = smatrix_component(comp.n_i, cfg, comp_box);
            KahanSum mass;
            for (double p : comp_probs) mass.add(p);
            dropped = std::max(0.0, 1.0 - mass.value());
            if (dropped > comp.budget) {
              throw Error(ErrorCode::CutoffBudgetExceeded,
                          "closed-form component drops " + std::to_string(dropped) +
                              " of its mass; enlarge cutoffs");
            }
          } else {
            comp_probs =
                evolution_component_fock(comp.n_i, cfg, comp_box, comp.budget, &dropped);
          }
          break;
        } catch (const Error& e) {
          if (e.code() != ErrorCode::CutoffBudgetExceeded || box_maxed || attempt >= 4) throw;
          fm += 1.0;
        }
      }
      if (comp_box.j_min == box.j_min && comp_box.j_max == box.j_max) {
        // identical windows: component cells are a prefix of the global layout
        for (std::size_t i = 0; i < comp_probs.size(); ++i) {
          probs[i] += comp.weight * comp_probs[i];
        }
      } else {
        std::vector<int> j(static_cast<std::size_t>(n_el));
        int n = 0;
        for (std::size_t i = 0; i < comp_probs.size(); ++i) {
          if (comp_probs[i] == 0.0) continue;
          comp_box.decode(i, &n, j.data());
          probs[box.index(n, j.data())] += comp.weight * comp_probs[i];
        }
      }
      dropped_total.add(comp.weight * dropped);
    }
    if (cfg.photon.kind == StateKind::Thermal) {
      out.truncation.mixture_weight_deficit = skipped_weight;
    }
  }

  out.truncation.dropped_mass = dropped_total.value();
  if (out.truncation.dropped_mass > cfg.dropped_budget) {
    throw Error(ErrorCode::CutoffBudgetExceeded,
                "run drops " + std::to_string(out.truncation.dropped_mass) +
                    " probability mass, above the budget of " +
                    std::to_string(cfg.dropped_budget));
  }
  out.full = distribution_from_probabilities(probs, box);
  return out;
}

std::vector<std::string> electron_axes_of(const JointDistribution& d) {
  std::vector<std::string> names;
  for (const Axis& a : d.axes) {
    if (!a.name.empty() && a.name[0] == 'e') names.push_back(a.name);
  }
  return names;
}

bool wants(const ScenarioConfig& cfg, const std::string& what) {
  return std::find(cfg.outputs.begin(), cfg.outputs.end(), what) != cfg.outputs.end();
}

std::string join_path(const std::string& dir, const std::string& name) {
  return (std::filesystem::path(dir) / name).string();
}

}  // namespace

RunResult run_scenario(const ScenarioConfig& cfg) { return run_scenario(cfg, ""); }

RunResult run_scenario(const ScenarioConfig& cfg, const std::string& out_dir) {
  validate_scenario(cfg);
  if (cfg.sweep) {
    throw Error(ErrorCode::Validation, "config has a sweep grid; use run_sweep");
  }
  auto t0 = std::chrono::steady_clock::now();
  if (!out_dir.empty()) std::filesystem::create_directories(out_dir);

  PipelineOutput pipe = run_pipeline(cfg);

  RunResult res;
  res.truncation = pipe.truncation;

  JointDistribution conditioned = pipe.full;
  if (!cfg.post_select.empty()) {
    PostSelectResult ps = post_select(pipe.full, cfg.post_select);
    conditioned = std::move(ps.dist);
    res.success_probability = ps.success_probability;
  }
  std::vector<std::string> e_axes = electron_axes_of(conditioned);
  res.joint = marginalize(conditioned, e_axes);
  if (e_axes.size() >= 2) {
    res.electron_pcc = pcc(res.joint, e_axes[0], e_axes[1]);
  }

  // Classical Bessel-product comparison on the first two electron axes.
  if (wants(cfg, "classical_comparison")) {
    res.classical_requested = true;
    std::vector<double> mags = cfg.classical_script_g_abs;
    if (mags.empty()) {
      double scale = std::sqrt(cfg.photon.kind == StateKind::Fock
                                   ? static_cast<double>(cfg.photon.n)
                                   : cfg.photon.n_avg);
      for (const Complex& g : cfg.couplings) mags.push_back(std::abs(g) * scale);
    }
    ClassicalCoupling cc{{Complex(mags[0], 0.0), Complex(mags.size() > 1 ? mags[1] : mags[0], 0.0)}};
    JointDistribution pair = marginalize(res.joint, {e_axes[0], e_axes[1]});
    const Axis& aj = pair.axes[0];
    const Axis& ak = pair.axes[1];
    JointDistribution cl = classical_joint(cc, aj.lo, aj.hi, ak.lo, ak.hi);
    res.classical_pcc = pcc(cl, "e1", "e2");
    res.classical_tv = classical_limit_distance(pair, cc);
    if (!out_dir.empty()) {
      write_csv(cl, join_path(out_dir, cfg.label + "_classical.csv"));
      write_json(cl, join_path(out_dir, cfg.label + "_classical.json"),
                 R"({"content":"classical_bessel_product"})");
      res.files.push_back(cfg.label + "_classical.csv");
      res.files.push_back(cfg.label + "_classical.json");
    }
  }

  json trunc_meta = {{"state_deficit", res.truncation.state_deficit},
                     {"dropped_mass", res.truncation.dropped_mass},
                     {"mixture_weight_deficit", res.truncation.mixture_weight_deficit}};
  if (!out_dir.empty()) {
    if (wants(cfg, "joint_table")) {
      write_csv(res.joint, join_path(out_dir, cfg.label + "_joint.csv"));
      json meta = {{"content", "electron_joint"}, {"truncation", trunc_meta}};
      write_json(res.joint, join_path(out_dir, cfg.label + "_joint.json"), meta.dump());
      res.files.push_back(cfg.label + "_joint.csv");
      res.files.push_back(cfg.label + "_joint.json");
    }
    if (wants(cfg, "marginals")) {
      for (const Axis& a : conditioned.axes) {
        JointDistribution m = marginalize(conditioned, {a.name});
        std::string name = cfg.label + "_marginal_" + a.name + ".csv";
        write_csv(m, join_path(out_dir, name));
        res.files.push_back(name);
      }
      if (!e_axes.empty()) {
        JointDistribution pe = marginalize(conditioned, {"photon", e_axes[0]});
        std::string name = cfg.label + "_photon_" + e_axes[0] + ".csv";
        write_csv(pe, join_path(out_dir, name));
        res.files.push_back(name);
      }
    }
    if (wants(cfg, "pcc")) {
      json pj;
      pj["axes"] = e_axes.size() >= 2 ? json::array({e_axes[0], e_axes[1]}) : json::array();
      pj["pcc"] = res.electron_pcc.defined ? json(res.electron_pcc.value) : json();
      pj["defined"] = res.electron_pcc.defined;
      pj["variance_a"] = res.electron_pcc.variance_a;
      pj["variance_b"] = res.electron_pcc.variance_b;
      pj["success_probability"] = res.success_probability;
      if (res.classical_requested) {
        pj["classical_pcc"] = res.classical_pcc.defined ? json(res.classical_pcc.value) : json();
        pj["classical_tv_distance"] = res.classical_tv;
      }
      std::ofstream outp(join_path(out_dir, cfg.label + "_pcc.json"));
      if (!outp) throw Error(ErrorCode::Io, "cannot write pcc output");
      outp << pj.dump() << "\n";
      res.files.push_back(cfg.label + "_pcc.json");
    }
  }

  auto t1 = std::chrono::steady_clock::now();
  res.wall_seconds = std::chrono::duration<double>(t1 - t0).count();

  std::string resolved = scenario_to_json(cfg);
  json manifest;
  manifest["tool"] = "qpinem";
  manifest["version"] = QPINEM_VERSION;
  manifest["config_hash"] = "fnv1a64:" + hex64(fnv1a64(resolved));
  manifest["config"] = json::parse(resolved);
  manifest["truncation"] = {{"state_deficit", res.truncation.state_deficit},
                            {"dropped_mass", res.truncation.dropped_mass},
                            {"mixture_weight_deficit", res.truncation.mixture_weight_deficit}};
  manifest["results"] = {
      {"pcc", res.electron_pcc.defined ? json(res.electron_pcc.value) : json()},
      {"pcc_defined", res.electron_pcc.defined},
      {"success_probability", res.success_probability}};
  if (res.classical_requested) {
    manifest["results"]["classical_pcc"] =
        res.classical_pcc.defined ? json(res.classical_pcc.value) : json();
    manifest["results"]["classical_tv_distance"] = res.classical_tv;
  }
  manifest["outputs"] = res.files;
  manifest["wall_seconds"] = res.wall_seconds;
  res.manifest_json = manifest.dump();
  if (!out_dir.empty()) {
    std::ofstream m(join_path(out_dir, cfg.label + "_manifest.json"));
    if (!m) throw Error(ErrorCode::Io, "cannot write manifest");
    m << res.manifest_json << "\n";
    res.files.push_back(cfg.label + "_manifest.json");
  }
  return res;
}

SweepResult run_sweep(const ScenarioConfig& cfg, const std::string& out_dir) {
  validate_scenario(cfg);
  if (!cfg.sweep) {
    throw Error(ErrorCode::Validation, "config has no sweep grid");
  }
  auto t0 = std::chrono::steady_clock::now();
  const SweepSpec& sw = *cfg.sweep;

  std::vector<SweepPoint> points;
  for (int mode = 0; mode < 2; ++mode) {
    if (mode == 0 && !sw.simultaneous) continue;
    if (mode == 1 && !sw.successive) continue;
    for (double g : sw.coupling_abs) {
      for (double n : sw.photon_number) {
        SweepPoint pt;
        pt.mode = mode == 0 ? "simultaneous" : "successive";
        pt.coupling = g;
        pt.photon = n;
        points.push_back(pt);
      }
    }
  }

  auto eval_point = [&cfg, &sw](SweepPoint& pt) {
    try {
      ScenarioConfig sub = cfg;
      sub.sweep.reset();
      sub.outputs = {"pcc"};
      sub.label = "sweep_point";
      sub.photon.kind = sw.kind;
      sub.photon.n_cutoff = -1;
      if (sw.kind == StateKind::Fock) {
        sub.photon.n = static_cast<int>(std::lround(pt.photon));
      } else {
        sub.photon.n_avg = pt.photon;
      }
      sub.couplings = {Complex(pt.coupling, 0.0), Complex(pt.coupling, 0.0)};
      sub.mode = pt.mode == "simultaneous" ? InteractionMode::Simultaneous
                                           : InteractionMode::Successive;
      sub.post_select.clear();
      sub.n_cutoff = -1;       // grid points size their own boxes
      sub.has_j_window = false;
      RunResult r = run_scenario(sub, "");
      pt.pcc = r.electron_pcc;
    } catch (const Error& e) {
      pt.error = std::string(error_code_name(e.code())) + ": " + e.what();
    } catch (const std::exception& e) {
      pt.error = std::string("internal: ") + e.what();
    }
  };

  // Grid points are independent; evaluate them on a small worker pool and
  // keep the output order fixed by the grid, not by completion time.
  unsigned n_workers = std::min<unsigned>(worker_threads(), static_cast<unsigned>(points.size()));
  if (n_workers <= 1) {
    for (SweepPoint& pt : points) eval_point(pt);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < n_workers; ++w) {
      pool.emplace_back([&]() {
        for (;;) {
          std::size_t i = next.fetch_add(1);
          if (i >= points.size()) return;
          eval_point(points[i]);
        }
      });
    }
    for (std::thread& t : pool) t.join();
  }

  SweepResult res;
  res.points = std::move(points);
  auto t1 = std::chrono::steady_clock::now();
  res.wall_seconds = std::chrono::duration<double>(t1 - t0).count();

  json rows = json::array();
  for (const SweepPoint& pt : res.points) {
    rows.push_back({{"mode", pt.mode},
                    {"coupling_abs", pt.coupling},
                    {"photon", pt.photon},
                    {"pcc", pt.pcc.defined ? json(pt.pcc.value) : json()},
                    {"defined", pt.pcc.defined},
                    {"error", pt.error}});
  }
  std::string resolved = scenario_to_json(cfg);
  json manifest;
  manifest["tool"] = "qpinem";
  manifest["version"] = QPINEM_VERSION;
  manifest["config_hash"] = "fnv1a64:" + hex64(fnv1a64(resolved));
  manifest["config"] = json::parse(resolved);
  manifest["points"] = rows;
  manifest["wall_seconds"] = res.wall_seconds;
  res.manifest_json = manifest.dump();

  if (!out_dir.empty()) {
    std::filesystem::create_directories(out_dir);
    std::string csv_name = cfg.label + "_sweep.csv";
    std::ofstream csv(join_path(out_dir, csv_name));
    if (!csv) throw Error(ErrorCode::Io, "cannot write sweep output");
    csv << "mode,coupling_abs,photon,pcc,defined,abs_pcc,error\n";
    char buf[64];
    for (const SweepPoint& pt : res.points) {
      csv << pt.mode << ",";
      std::snprintf(buf, sizeof buf, "%.12g", pt.coupling);
      csv << buf << ",";
      std::snprintf(buf, sizeof buf, "%.12g", pt.photon);
      csv << buf << ",";
      if (pt.pcc.defined) {
        std::snprintf(buf, sizeof buf, "%.12g", pt.pcc.value);
        csv << buf << ",1,";
        std::snprintf(buf, sizeof buf, "%.12g", std::abs(pt.pcc.value));
        csv << buf;
      } else {
        csv << ",0,";
      }
      csv << "," << pt.error << "\n";
    }
    csv.close();
    res.files.push_back(csv_name);
    std::string mf_name = cfg.label + "_sweep_manifest.json";
    std::ofstream m(join_path(out_dir, mf_name));
    m << res.manifest_json << "\n";
    res.files.push_back(mf_name);
  }
  return res;
}

double oracle_check(const ScenarioConfig& cfg) {
  validate_scenario(cfg);
  if (cfg.photon.kind != StateKind::Fock || !cfg.post_select.empty() ||
      cfg.successive_measurement || cfg.sweep) {
    throw Error(ErrorCode::Validation,
                "oracle-check needs a plain fock-input scenario without post-selection");
  }
  Box box = resolve_box(cfg, cfg.photon.n, cfg.photon.n);
  constexpr std::size_t kOracleLimit = 400000;
  if (box.size() > kOracleLimit) {
    throw Error(ErrorCode::DimensionTooLarge,
                "oracle basis has " + std::to_string(box.size()) +
                    " states; tighten cutoffs below " + std::to_string(kOracleLimit));
  }
  CouplingSet c{cfg.couplings};
  EvolveControl ctl{cfg.series, cfg.dropped_budget};

  JointAmplitude evo = scatter(make_initial_fock(cfg.photon.n, box), c, cfg.mode, ctl);
  JointAmplitude ora = dense_oracle(c, box, cfg.mode, cfg.photon.n, kOracleLimit);

  double max_dev = 0.0;
  for (std::size_t i = 0; i < box.size(); ++i) {
    max_dev = std::max(max_dev, std::abs(std::norm(evo.amp[i]) - std::norm(ora.amp[i])));
  }
  if (cfg.couplings.size() == 2) {
    std::vector<double> probs = smatrix_component(cfg.photon.n, cfg, box);
    for (std::size_t i = 0; i < box.size(); ++i) {
      max_dev = std::max(max_dev, std::abs(probs[i] - std::norm(ora.amp[i])));
    }
  }
  return max_dev;
}

}  // namespace qpinem
