#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <doctest.h>

#include <json.hpp>

#include "core/error.hpp"
#include "core/runner.hpp"

using namespace qpinem;
using nlohmann::json;

namespace {

ScenarioConfig base_config() {
  ScenarioConfig cfg;
  cfg.label = "t";
  cfg.photon.kind = StateKind::Fock;
  cfg.photon.n = 0;
  cfg.couplings = {Complex(1.0, 0.0), Complex(1.0, 0.0)};
  return cfg;
}

// Exact second-moment law of this interaction for number-diagonal inputs and
// equal couplings x = |G|^2: cov = x^2/2, var = x(2 n_avg + 1) + x^2/2,
// hence PCC = x / (x + 2 (2 n_avg + 1)). Derivable in the Heisenberg picture;
// used as an analytic oracle for the whole pipeline.
double pcc_law(double x, double n_avg) { return x / (x + 2.0 * (2.0 * n_avg + 1.0)); }

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("scenario JSON round-trips through parse and serialize") {
  std::string text = R"({
    "label": "demo",
    "photon": {"kind": "coherent", "n_avg": 9.0},
    "couplings": [{"abs": 1.5, "arg": 0.25}, {"abs": 0.5}],
    "mode": "successive",
    "series": {"term_tol": 1e-13, "max_index": 150, "arithmetic": "rational"},
    "cutoffs": {"n_cutoff": 40, "j_min": -20, "j_max": 10, "dropped_mass_budget": 1e-5},
    "outputs": ["joint_table", "pcc"],
    "engine": "evolution",
    "post_select": {"e2": 1},
    "seed": 7
  })";
  ScenarioConfig cfg = parse_scenario_text(text);
  CHECK(cfg.label == "demo");
  CHECK(cfg.photon.kind == StateKind::Coherent);
  CHECK(cfg.photon.n_avg == 9.0);
  CHECK(cfg.couplings.size() == 2);
  CHECK(std::abs(cfg.couplings[0]) == doctest::Approx(1.5));
  CHECK(std::arg(cfg.couplings[0]) == doctest::Approx(0.25));
  CHECK(cfg.mode == InteractionMode::Successive);
  CHECK(cfg.series.max_index == 150);
  CHECK(cfg.series.arithmetic == Arithmetic::ExactRational);
  CHECK(cfg.n_cutoff == 40);
  CHECK(cfg.has_j_window);
  CHECK(cfg.j_min == -20);
  CHECK(cfg.post_select.at("e2") == 1);
  CHECK(cfg.seed == 7);

  ScenarioConfig again = parse_scenario_text(scenario_to_json(cfg));
  CHECK(scenario_to_json(again) == scenario_to_json(cfg));
}

TEST_CASE("validation rejects broken configs with a reason per problem") {
  ScenarioConfig cfg = base_config();
  cfg.couplings.clear();
  cfg.outputs = {"nonsense"};
  cfg.series.term_tol = -1.0;
  try {
    validate_scenario(cfg);
    FAIL("expected validation error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::Validation);
    std::string msg = e.what();
    CHECK(msg.find("coupling") != std::string::npos);
    CHECK(msg.find("nonsense") != std::string::npos);
    CHECK(msg.find("term_tol") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_scenario_text("{nope"), Error);
  CHECK_THROWS_AS(parse_scenario_text(R"({"mode": "both"})"), Error);
}

TEST_CASE("runner reproduces the exact PCC law across engines") {
  ScenarioConfig cfg = base_config();
  for (Engine engine : {Engine::Smatrix, Engine::Evolution}) {
    cfg.engine = engine;
    RunResult r = run_scenario(cfg);
    REQUIRE(r.electron_pcc.defined);
    CHECK(r.electron_pcc.value == doctest::Approx(pcc_law(1.0, 0.0)).epsilon(1e-7));
  }
}

TEST_CASE("the exact PCC law holds across couplings and photon numbers") {
  for (double g : {0.5, 1.5}) {
    for (int n_i : {0, 3}) {
      ScenarioConfig cfg = base_config();
      cfg.couplings = {Complex(g, 0.0), Complex(g, 0.0)};
      cfg.photon.n = n_i;
      RunResult r = run_scenario(cfg);
      REQUIRE(r.electron_pcc.defined);
      CHECK(r.electron_pcc.value ==
            doctest::Approx(pcc_law(g * g, n_i)).epsilon(1e-7));
    }
  }
}

TEST_CASE("measured successive protocol is reachable through the runner") {
  ScenarioConfig cfg = base_config();
  cfg.mode = InteractionMode::Successive;
  RunResult plain = run_scenario(cfg);
  cfg.successive_measurement = true;
  RunResult measured = run_scenario(cfg);
  REQUIRE(plain.electron_pcc.defined);
  REQUIRE(measured.electron_pcc.defined);
  // measuring each electron right after its interaction leaves the final
  // energy statistics unchanged
  CHECK(std::abs(plain.electron_pcc.value - measured.electron_pcc.value) < 1e-12);
  CHECK(tv_distance(plain.joint, measured.joint) < 1e-12);
}

TEST_CASE("runner handles the coherent and thermal state families") {
  ScenarioConfig cfg = base_config();
  cfg.photon.kind = StateKind::Coherent;
  cfg.photon.n_avg = 4.0;
  cfg.has_j_window = true;
  cfg.j_min = -40;
  cfg.j_max = 40;
  RunResult coherent = run_scenario(cfg);
  REQUIRE(coherent.electron_pcc.defined);
  CHECK(coherent.electron_pcc.value == doctest::Approx(pcc_law(1.0, 4.0)).epsilon(1e-6));

  cfg.photon.kind = StateKind::Thermal;
  RunResult thermal = run_scenario(cfg);
  REQUIRE(thermal.electron_pcc.defined);
  CHECK(thermal.electron_pcc.value == doctest::Approx(pcc_law(1.0, 4.0)).epsilon(1e-5));
  CHECK(thermal.truncation.dropped_mass < 1e-6);
  // state cutoff loss plus the skipped featherweight components
  CHECK(thermal.truncation.mixture_weight_deficit <= 1e-10 + 1e-6 / 4.0);
}

TEST_CASE("single-electron runs have no second axis to correlate") {
  ScenarioConfig cfg = base_config();
  cfg.couplings = {Complex(0.8, 0.0)};
  RunResult r = run_scenario(cfg);
  CHECK_FALSE(r.electron_pcc.defined);
  CHECK(r.joint.axes.size() == 1);
  CHECK(r.joint.total_mass == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("post-selection flows through the runner") {
  ScenarioConfig cfg = base_config();
  cfg.couplings = {Complex(1, 0), Complex(1, 0), Complex(1, 0)};
  cfg.has_j_window = true;
  cfg.j_min = -12;
  cfg.j_max = 7;
  cfg.post_select = {{"e1", 0}};
  RunResult r = run_scenario(cfg);
  CHECK(r.success_probability > 0.05);
  CHECK(r.success_probability < 1.0);
  CHECK(r.joint.axes.size() == 2);  // e2, e3
  CHECK(r.joint.axes[0].name == "e2");
  REQUIRE(r.electron_pcc.defined);
  // conditioned table is symmetric under e2 <-> e3 for equal couplings
  for (int a = r.joint.axes[0].lo; a <= r.joint.axes[0].hi; ++a) {
    for (int b = a + 1; b <= r.joint.axes[1].hi; ++b) {
      if (a < r.joint.axes[1].lo || b > r.joint.axes[0].hi) continue;
      CHECK(r.joint.value_or_zero({a, b}) ==
            doctest::Approx(r.joint.value_or_zero({b, a})).epsilon(1e-9));
    }
  }
  cfg.post_select = {{"e1", 9999}};
  CHECK_THROWS_AS(run_scenario(cfg), Error);
}

TEST_CASE("post-selection support obeys the photon budget exactly") {
  // Conditioned on a post-selected gain, the remaining electrons can share at
  // most n_i - (selected gains) quanta of total gain.
  ScenarioConfig cfg = base_config();
  cfg.couplings = {Complex(1, 0), Complex(1, 0), Complex(1, 0)};
  cfg.has_j_window = true;
  cfg.j_min = -12;
  cfg.j_max = 7;
  for (int k1 : {0, 2}) {
    cfg.post_select = {{"e1", k1}};
    RunResult r = run_scenario(cfg);
    int bound = 0 - k1;  // vacuum input
    for (int a = r.joint.axes[0].lo; a <= r.joint.axes[0].hi; ++a) {
      for (int b = r.joint.axes[1].lo; b <= r.joint.axes[1].hi; ++b) {
        if (a + b > bound) CHECK(r.joint.value_or_zero({a, b}) == 0.0);
      }
    }
  }
}

TEST_CASE("classical limit: in regime it converges, out of regime it does not") {
  // coherent drive with script-g = |G| sqrt(n_avg) = 1 approaches the Bessel
  // product; a vacuum run at strong coupling is nowhere near it
  ScenarioConfig cfg = base_config();
  cfg.photon.kind = StateKind::Coherent;
  cfg.photon.n_avg = 100.0;
  cfg.couplings = {Complex(0.1, 0.0), Complex(0.1, 0.0)};
  cfg.engine = Engine::Evolution;
  cfg.has_j_window = true;
  cfg.j_min = -24;
  cfg.j_max = 24;
  RunResult in_regime = run_scenario(cfg);
  ClassicalCoupling unit{{Complex(1, 0), Complex(1, 0)}};
  double tv_in = classical_limit_distance(in_regime.joint, unit);
  CHECK(tv_in < 0.02);

  ScenarioConfig vac = base_config();
  vac.couplings = {Complex(2, 0), Complex(2, 0)};
  RunResult out_of_regime = run_scenario(vac);
  ClassicalCoupling zero{{Complex(0, 0), Complex(0, 0)}};
  double tv_out = classical_limit_distance(out_of_regime.joint, zero);
  CHECK(tv_out > 0.5);
}

TEST_CASE("classical comparison rides along the quantum run") {
  ScenarioConfig cfg = base_config();
  cfg.photon.kind = StateKind::Coherent;
  cfg.photon.n_avg = 9.0;
  cfg.couplings = {Complex(1.5, 0.0), Complex(1.5, 0.0)};
  cfg.n_cutoff = 122;
  cfg.has_j_window = true;
  cfg.j_min = -60;
  cfg.j_max = 60;
  cfg.outputs = {"pcc", "classical_comparison"};
  RunResult r = run_scenario(cfg);
  REQUIRE(r.classical_requested);
  REQUIRE(r.classical_pcc.defined);
  CHECK(std::abs(r.classical_pcc.value) < 1e-12);
  CHECK(r.classical_tv > 0.0);
  CHECK(r.classical_tv < 1.0);
}

TEST_CASE("a 1x1 sweep equals the plain scenario") {
  ScenarioConfig cfg = base_config();
  cfg.sweep = SweepSpec{{1.0}, {0.0}, StateKind::Fock, true, false};
  SweepResult sweep = run_sweep(cfg, "");
  REQUIRE(sweep.points.size() == 1);
  REQUIRE(sweep.points[0].error.empty());
  ScenarioConfig plain = base_config();
  RunResult r = run_scenario(plain);
  CHECK(sweep.points[0].pcc.value == doctest::Approx(r.electron_pcc.value).epsilon(1e-12));
}

TEST_CASE("sweep records per-point failures and continues") {
  ScenarioConfig cfg = base_config();
  // The second point needs a basis beyond max_cells and must fail alone.
  cfg.sweep = SweepSpec{{0.1, 25.0}, {0.0}, StateKind::Fock, true, false};
  SweepResult sweep = run_sweep(cfg, "");
  REQUIRE(sweep.points.size() == 2);
  CHECK(sweep.points[0].error.empty());
  CHECK_FALSE(sweep.points[1].error.empty());
  CHECK(sweep.points[1].error.find("dimension_too_large") != std::string::npos);
}

TEST_CASE("outputs are deterministic and reproducible from the manifest") {
  namespace fs = std::filesystem;
  ScenarioConfig cfg = base_config();
  cfg.label = "det";
  cfg.outputs = {"joint_table", "marginals", "pcc"};
  fs::path dir1 = "test_runner_out1";
  fs::path dir2 = "test_runner_out2";
  fs::remove_all(dir1);
  fs::remove_all(dir2);
  RunResult r1 = run_scenario(cfg, dir1.string());
  RunResult r2 = run_scenario(cfg, dir2.string());
  for (const std::string& name : r1.files) {
    if (name.find("manifest") != std::string::npos) continue;
    CHECK(slurp((dir1 / name).string()) == slurp((dir2 / name).string()));
  }
  // manifests agree except for the wall time
  json m1 = json::parse(slurp((dir1 / "det_manifest.json").string()));
  json m2 = json::parse(slurp((dir2 / "det_manifest.json").string()));
  m1.erase("wall_seconds");
  m2.erase("wall_seconds");
  CHECK(m1 == m2);

  // a run rebuilt from the manifest's embedded config reproduces the files
  ScenarioConfig from_manifest = parse_scenario_text(m1["config"].dump());
  fs::path dir3 = "test_runner_out3";
  fs::remove_all(dir3);
  run_scenario(from_manifest, dir3.string());
  for (const std::string& name : r1.files) {
    if (name.find("manifest") != std::string::npos) continue;
    CHECK(slurp((dir1 / name).string()) == slurp((dir3 / name).string()));
  }
  fs::remove_all(dir1);
  fs::remove_all(dir2);
  fs::remove_all(dir3);
}

TEST_CASE("oracle check agrees across paths on a small scenario") {
  ScenarioConfig cfg = base_config();
  cfg.couplings = {Complex(1.0, 0.0), Complex(0.6, 0.0)};
  cfg.photon.n = 1;
  cfg.n_cutoff = 20;
  cfg.has_j_window = true;
  cfg.j_min = -14;
  cfg.j_max = 10;
  CHECK(oracle_check(cfg) < 1e-8);

  cfg.mode = InteractionMode::Successive;
  CHECK(oracle_check(cfg) < 1e-8);

  cfg.n_cutoff = -1;
  cfg.has_j_window = false;
  cfg.max_cells = 1u << 30;
  cfg.couplings = {Complex(2.0, 0.0), Complex(2.0, 0.0)};
  cfg.photon.n = 5;
  // auto windows at this coupling produce a basis beyond the oracle limit
  CHECK_THROWS_AS(oracle_check(cfg), Error);
}

TEST_CASE("the joint basis size guard trips before allocating") {
  ScenarioConfig cfg = base_config();
  cfg.couplings = {Complex(1, 0), Complex(1, 0), Complex(1, 0), Complex(1, 0)};
  CHECK_THROWS_AS(run_scenario(cfg), Error);  // auto windows for N=4 are enormous
}
