#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "translev/errors.hpp"
#include "translev/experiment.hpp"

using namespace translev;

namespace {

nlohmann::json minimal_config() {
  return nlohmann::json::parse(R"({
    "space": {"d": 1, "N": 16, "p": 1.5, "Q": 40},
    "initial": {
      "xi": {"type": "hermite-sum", "terms": [{"n": [0], "c": 1.0}]},
      "kappa": [0.0]
    },
    "coefficients": {
      "sigma": [[{"type": "zero"}]],
      "b": [{"type": "zero"}],
      "F": {"type": "zero"},
      "G": {"type": "zero"}
    },
    "noise": {
      "T": 0.5, "dt": 0.05,
      "small": {"type": "none"},
      "large": {"type": "none"},
      "seed": 101, "paths": 4
    },
    "run": {"m": 1e6, "snapshot_paths": 1, "test_degree_max": 3}
  })");
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::filesystem::path fresh_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("translev_test_" + name);
  std::filesystem::remove_all(dir);
  return dir;
}

bool dirs_byte_identical(const std::filesystem::path& a, const std::filesystem::path& b) {
  std::vector<std::filesystem::path> fa, fb;
  for (const auto& e : std::filesystem::recursive_directory_iterator(a)) {
    if (e.is_regular_file()) fa.push_back(std::filesystem::relative(e.path(), a));
  }
  for (const auto& e : std::filesystem::recursive_directory_iterator(b)) {
    if (e.is_regular_file()) fb.push_back(std::filesystem::relative(e.path(), b));
  }
  std::sort(fa.begin(), fa.end());
  std::sort(fb.begin(), fb.end());
  if (fa != fb) return false;
  for (const auto& rel : fa) {
    if (slurp(a / rel) != slurp(b / rel)) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("config parses, round-trips bit-exactly, and hashes stably") {
  const ExperimentConfig cfg = ExperimentConfig::from_json(minimal_config());
  CHECK(cfg.space.d == 1);
  CHECK(cfg.space.N == 16);
  CHECK(cfg.run.snapshot_paths == 1);

  const nlohmann::json first = cfg.to_json();
  const ExperimentConfig cfg2 = ExperimentConfig::from_json(first);
  CHECK(cfg2.to_json().dump() == first.dump());
  CHECK(cfg2.content_hash() == cfg.content_hash());

  // Seed override changes the hash.
  ExperimentConfig cfg3 = ExperimentConfig::from_json(first);
  cfg3.override_seed(999);
  CHECK(cfg3.content_hash() != cfg.content_hash());
}

TEST_CASE("config errors carry field paths") {
  nlohmann::json broken = minimal_config();
  broken["space"].erase("N");
  try {
    ExperimentConfig::from_json(broken);
    FAIL("expected config error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::config);
    CHECK(std::string(e.what()).find("$.space.N") != std::string::npos);
  }

  nlohmann::json bad_dim = minimal_config();
  bad_dim["initial"]["kappa"] = {0.0, 0.0};
  CHECK_THROWS_AS(ExperimentConfig::from_json(bad_dim), Error);

  nlohmann::json bad_headroom = minimal_config();
  bad_headroom["run"]["test_degree_max"] = 15;
  CHECK_THROWS_AS(ExperimentConfig::from_json(bad_headroom), Error);
}

TEST_CASE("delta initial condition and measure parsing") {
  nlohmann::json j = minimal_config();
  j["initial"]["xi"] = {{"type", "delta-at-x0"}, {"x0", {0.25}}};
  j["noise"]["small"] = {{"type", "atoms"},
                         {"atoms", {{{"x", {0.5}}, {"rate", 2.0}}}}};
  j["coefficients"]["F"] = {{"type", "mark"}};
  const ExperimentConfig cfg = ExperimentConfig::from_json(j);
  CHECK(cfg.model().small.total_mass() == doctest::Approx(2.0));
  // Delta coefficients are h_n(0.25).
  CHECK(cfg.xi().coeffs()[0] ==
        doctest::Approx(0.75112554446494248 * std::exp(-0.25 * 0.25 / 2.0)).epsilon(1e-13));

  nlohmann::json pl = minimal_config();
  pl["noise"]["small"] = {{"type", "power-law"}, {"scale", 0.05}, {"alpha", 0.5}, {"eps", 0.05}};
  const ExperimentConfig cfg2 = ExperimentConfig::from_json(pl);
  CHECK(cfg2.model().small.total_mass() > 0.0);
  // Power-law spec round-trips through its original form.
  CHECK(cfg2.to_json()["noise"]["small"]["type"] == "power-law");
}

TEST_CASE("simulate: all-zero config emits constant trajectories and zero residuals") {
  const ExperimentConfig cfg = ExperimentConfig::from_json(minimal_config());
  const auto dir = fresh_dir("sim_zero");
  const CommandResult res = run_simulate(cfg, dir.string());
  CHECK(res.exit_code == 0);
  CHECK(res.summary["survival_fraction"].get<double>() == 1.0);
  for (const auto& r : res.summary["weak_residuals"]) {
    CHECK(r["max_max_abs"].get<double>() == 0.0);
  }
  CHECK(std::filesystem::exists(dir / "traj_0000.csv"));
  CHECK(std::filesystem::exists(dir / "noise_0003.jsonl"));
  CHECK(std::filesystem::exists(dir / "spde_0000.json"));
  CHECK(!std::filesystem::exists(dir / "spde_0001.json"));
  CHECK(std::filesystem::exists(dir / "summary.json"));

  // Per-t residual statistics are emitted for every test function.
  nlohmann::json residuals;
  std::ifstream(dir / "residuals.json") >> residuals;
  CHECK(residuals["per_phi"].size() == 4);  // test_degree_max = 3
  for (const auto& phi : residuals["per_phi"]) {
    CHECK(phi["times"].size() == phi["max"].size());
    for (const auto& v : phi["max"]) CHECK(v.get<double>() == 0.0);
  }
}

TEST_CASE("simulate is byte-identical across re-runs and thread counts") {
  nlohmann::json j = minimal_config();
  j["coefficients"]["b"] = {nlohmann::json{{"type", "hermite-sum"},
                                           {"terms", {{{"n", {0}}, {"c", 1.0}}}}}};
  j["noise"]["small"] = {{"type", "atoms"}, {"atoms", {{{"x", {0.4}}, {"rate", 1.0}}}}};
  j["coefficients"]["F"] = {{"type", "mark"}};
  j["noise"]["paths"] = 6;
  ExperimentConfig cfg = ExperimentConfig::from_json(j);

  const auto dir1 = fresh_dir("det_a");
  const auto dir2 = fresh_dir("det_b");
  const auto dir3 = fresh_dir("det_c");
  run_simulate(cfg, dir1.string());
  run_simulate(cfg, dir2.string());
  cfg.override_threads(3);
  run_simulate(cfg, dir3.string());
  CHECK(dirs_byte_identical(dir1, dir2));
  CHECK(dirs_byte_identical(dir1, dir3));
}

TEST_CASE("verify suites on a small correspondence config") {
  nlohmann::json j = minimal_config();
  j["coefficients"]["b"] = {nlohmann::json{{"type", "hermite-sum"},
                                           {"terms", {{{"n", {0}}, {"c", 1.0}}}}}};
  const ExperimentConfig cfg = ExperimentConfig::from_json(j);
  const auto dir = fresh_dir("verify");
  CHECK(run_verify(cfg, "correspondence", dir.string()).exit_code == 0);
  CHECK(std::filesystem::exists(dir / "verify_correspondence.json"));
  CHECK(run_verify(cfg, "uniqueness", dir.string()).exit_code == 0);
  CHECK_THROWS_AS(run_verify(cfg, "bogus", dir.string()), Error);
}

TEST_CASE("hypotheses command flags the violating config with exit code 1") {
  nlohmann::json j = minimal_config();
  j["coefficients"]["F"] = {
      {"type", "separable"},
      {"h", 1.0},
      {"f1", {{"kind", "inv-one-minus"}, {"c", 1.0}}},
      {"gamma", {nlohmann::json{{"type", "hermite-sum"}, {"terms", {{{"n", {0}}, {"c", 1.0}}}}}}}};
  j["noise"]["small"] = {{"type", "atoms"}, {"atoms", {{{"x", {0.999}}, {"rate", 1.0}}}}};
  const ExperimentConfig cfg = ExperimentConfig::from_json(j);
  const auto dir = fresh_dir("hyp");
  const CommandResult res = run_hypotheses(cfg, dir.string());
  CHECK(res.exit_code == 1);
  bool f2 = false;
  for (const auto& v : res.summary["violations"]) f2 = f2 || (v == "F2");
  CHECK(f2);
}

TEST_CASE("inequalities command writes reports and passes on defaults") {
  nlohmann::json j = minimal_config();
  j["space"]["N"] = 40;
  j["space"]["Q"] = 88;
  j["run"]["inequalities"] = {{"samples", 200}, {"seed", 31},
                              {"stability_levels", {20, 30, 40}}};
  const ExperimentConfig cfg = ExperimentConfig::from_json(j);
  const auto dir = fresh_dir("ineq");
  const CommandResult res = run_inequalities(cfg, dir.string());
  CHECK(res.exit_code == 0);
  CHECK(std::filesystem::exists(dir / "monotonicity_zero.json"));
  CHECK(std::filesystem::exists(dir / "spl_mono.json"));
  CHECK(std::filesystem::exists(dir / "translation_bounds.json"));
  CHECK(std::filesystem::exists(dir / "inequalities.json"));
}
