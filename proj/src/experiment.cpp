#include "translev/experiment.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include "translev/errors.hpp"
#include "translev/inequality_lab.hpp"
#include "translev/spde_engine.hpp"

namespace translev {

namespace {

[[noreturn]] void config_error(const std::string& path, const std::string& what) {
  throw_config("config error at " + path + ": " + what);
}

const nlohmann::json& require(const nlohmann::json& j, const char* key, const std::string& path) {
  auto it = j.find(key);
  if (it == j.end()) config_error(path + "." + key, "missing");
  return *it;
}

template <typename T>
T get_or(const nlohmann::json& j, const char* key, T fallback) {
  auto it = j.find(key);
  if (it == j.end()) return fallback;
  return it->get<T>();
}

MultiIndex parse_multi_index(const nlohmann::json& j, int d, const std::string& path) {
  if (!j.is_array() || static_cast<int>(j.size()) != d) {
    config_error(path, "expected an array of " + std::to_string(d) + " nonnegative integers");
  }
  MultiIndex n;
  for (const auto& v : j) n.entries.push_back(v.get<int>());
  return n;
}

HermiteRep parse_coeff_spec(const nlohmann::json& j, std::shared_ptr<const Basis> basis, double p,
                            const std::string& path) {
  const std::string type = require(j, "type", path).get<std::string>();
  if (type == "zero") return HermiteRep::zero(basis, p);
  if (type == "hermite-sum") {
    HermiteRep rep = HermiteRep::zero(basis, p);
    const auto& terms = require(j, "terms", path);
    for (std::size_t i = 0; i < terms.size(); ++i) {
      const std::string tpath = path + ".terms[" + std::to_string(i) + "]";
      const MultiIndex n = parse_multi_index(require(terms[i], "n", tpath), basis->dim(), tpath);
      const double c = require(terms[i], "c", tpath).get<double>();
      const std::ptrdiff_t k = basis->find(n);
      if (k < 0) config_error(tpath, "multi-index outside the truncation");
      rep.coeffs()[static_cast<Eigen::Index>(k)] += c;
    }
    return rep;
  }
  config_error(path + ".type", "unknown coefficient spec '" + type + "'");
}

ScalarProfile parse_profile(const nlohmann::json& j, const std::string& path) {
  ScalarProfile prof;
  const std::string kind = require(j, "kind", path).get<std::string>();
  prof.c = get_or(j, "c", 1.0);
  if (kind == "const") {
    prof.kind = ScalarProfile::Kind::constant;
  } else if (kind == "abs-pow") {
    prof.kind = ScalarProfile::Kind::abs_pow;
    prof.k = require(j, "k", path).get<double>();
  } else if (kind == "inv-one-minus") {
    prof.kind = ScalarProfile::Kind::inv_one_minus;
  } else {
    config_error(path + ".kind", "unknown profile '" + kind + "'");
  }
  return prof;
}

JumpCoefficient parse_jump_coefficient(const nlohmann::json& j, std::shared_ptr<const Basis> basis,
                                       double gamma_p, const std::string& path) {
  JumpCoefficient coeff;
  const std::string type = require(j, "type", path).get<std::string>();
  if (type == "zero") {
    coeff.kind = JumpCoefficient::Kind::zero;
  } else if (type == "mark") {
    coeff.kind = JumpCoefficient::Kind::mark_identity;
  } else if (type == "separable") {
    coeff.kind = JumpCoefficient::Kind::separable;
    coeff.h = get_or(j, "h", 1.0);
    coeff.profile = parse_profile(require(j, "f1", path), path + ".f1");
    const auto& gam = require(j, "gamma", path);
    if (static_cast<int>(gam.size()) != basis->dim()) {
      config_error(path + ".gamma", "expected d entries");
    }
    for (std::size_t i = 0; i < gam.size(); ++i) {
      coeff.gamma.push_back(
          parse_coeff_spec(gam[i], basis, gamma_p, path + ".gamma[" + std::to_string(i) + "]"));
    }
  } else {
    config_error(path + ".type", "unknown jump coefficient '" + type + "'");
  }
  return coeff;
}

JumpMeasure parse_measure(const nlohmann::json& j, int d, JumpMeasure::Annulus annulus,
                          const std::string& path) {
  const std::string type = require(j, "type", path).get<std::string>();
  if (type == "none") return JumpMeasure::zero(d, annulus);
  if (type == "atoms") {
    std::vector<WeightedMark> marks;
    const auto& atoms = require(j, "atoms", path);
    for (std::size_t i = 0; i < atoms.size(); ++i) {
      const std::string apath = path + ".atoms[" + std::to_string(i) + "]";
      const auto xv = require(atoms[i], "x", apath).get<std::vector<double>>();
      if (static_cast<int>(xv.size()) != d) config_error(apath + ".x", "dimension mismatch");
      Eigen::VectorXd x(d);
      for (int k = 0; k < d; ++k) x[k] = xv[static_cast<std::size_t>(k)];
      marks.push_back({x, require(atoms[i], "rate", apath).get<double>()});
    }
    try {
      return JumpMeasure::atoms(d, annulus, std::move(marks));
    } catch (const Error& e) {
      config_error(path, e.what());
    }
  }
  if (type == "power-law") {
    if (annulus != JumpMeasure::Annulus::small) {
      config_error(path, "power-law densities are supported for the small measure only");
    }
    if (d != 1) config_error(path, "power-law densities are supported for d = 1 only");
    try {
      return JumpMeasure::power_law_truncated(require(j, "scale", path).get<double>(),
                                              require(j, "alpha", path).get<double>(),
                                              require(j, "eps", path).get<double>(),
                                              get_or(j, "quad_points", 256));
    } catch (const Error& e) {
      config_error(path, e.what());
    }
  }
  config_error(path + ".type", "unknown measure '" + type + "'");
}

nlohmann::json coeff_to_json(const HermiteRep& rep) {
  nlohmann::json j;
  if (rep.coeffs().isZero(0.0)) {
    j["type"] = "zero";
    return j;
  }
  j["type"] = "hermite-sum";
  nlohmann::json terms = nlohmann::json::array();
  for (std::size_t k = 0; k < rep.basis()->size(); ++k) {
    const double c = rep.coeffs()[static_cast<Eigen::Index>(k)];
    if (c != 0.0) {
      terms.push_back({{"n", rep.basis()->index(k).entries}, {"c", c}});
    }
  }
  j["terms"] = terms;
  return j;
}

nlohmann::json profile_to_json(const ScalarProfile& prof) {
  nlohmann::json j;
  switch (prof.kind) {
    case ScalarProfile::Kind::constant:
      j["kind"] = "const";
      break;
    case ScalarProfile::Kind::abs_pow:
      j["kind"] = "abs-pow";
      j["k"] = prof.k;
      break;
    case ScalarProfile::Kind::inv_one_minus:
      j["kind"] = "inv-one-minus";
      break;
  }
  j["c"] = prof.c;
  return j;
}

nlohmann::json jump_coeff_to_json(const JumpCoefficient& coeff) {
  nlohmann::json j;
  switch (coeff.kind) {
    case JumpCoefficient::Kind::zero:
      j["type"] = "zero";
      break;
    case JumpCoefficient::Kind::mark_identity:
      j["type"] = "mark";
      break;
    case JumpCoefficient::Kind::separable: {
      j["type"] = "separable";
      j["h"] = coeff.h;
      j["f1"] = profile_to_json(coeff.profile);
      nlohmann::json gam = nlohmann::json::array();
      for (const HermiteRep& g : coeff.gamma) gam.push_back(coeff_to_json(g));
      j["gamma"] = gam;
      break;
    }
  }
  return j;
}

nlohmann::json measure_to_json(const JumpMeasure& m, const nlohmann::json& original) {
  // Density measures round-trip through their original spec; atoms are
  // re-emitted canonically.
  if (original.contains("type") && original["type"] == "power-law") return original;
  nlohmann::json j;
  if (m.is_zero()) {
    j["type"] = "none";
    return j;
  }
  j["type"] = "atoms";
  nlohmann::json atoms = nlohmann::json::array();
  for (const WeightedMark& a : m.integration_points()) {
    atoms.push_back({{"x", std::vector<double>(a.x.data(), a.x.data() + a.x.size())},
                     {"rate", a.weight}});
  }
  j["atoms"] = atoms;
  return j;
}

}  // namespace

ExperimentConfig ExperimentConfig::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw_config("cannot open config file " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw_config(std::string("config parse failure: ") + e.what());
  }
  return from_json(j);
}

ExperimentConfig ExperimentConfig::from_json(const nlohmann::json& j) {
  ExperimentConfig cfg;
  try {
    const auto& space = require(j, "space", "$");
    cfg.space.d = require(space, "d", "$.space").get<int>();
    cfg.space.N = require(space, "N", "$.space").get<int>();
    cfg.space.p = require(space, "p", "$.space").get<double>();
    cfg.space.Q = get_or(space, "Q", 2 * cfg.space.N + 8);
    if (cfg.space.d < 1 || cfg.space.d > 8) config_error("$.space.d", "d must be in [1, 8]");
    if (cfg.space.N < 2) config_error("$.space.N", "N must be >= 2");
    cfg.basis_ = Basis::get(cfg.space.d, cfg.space.N);

    const auto& initial = require(j, "initial", "$");
    const auto& xij = require(initial, "xi", "$.initial");
    const std::string xtype = require(xij, "type", "$.initial.xi").get<std::string>();
    if (xtype == "hermite-sum" || xtype == "zero") {
      cfg.xi_ = parse_coeff_spec(xij, cfg.basis_, -cfg.space.p, "$.initial.xi");
    } else if (xtype == "delta-at-x0") {
      const auto x0 = require(xij, "x0", "$.initial.xi").get<std::vector<double>>();
      if (static_cast<int>(x0.size()) != cfg.space.d) {
        config_error("$.initial.xi.x0", "dimension mismatch");
      }
      cfg.xi_ = HermiteRep::delta_at(cfg.basis_, std::span<const double>(x0.data(), x0.size()),
                                     -cfg.space.p);
    } else if (xtype == "file") {
      const std::string path = require(xij, "path", "$.initial.xi").get<std::string>();
      std::ifstream in(path);
      if (!in) config_error("$.initial.xi.path", "cannot open " + path);
      HermiteRep rep = read_rep_json(in);
      if (rep.dim() != cfg.space.d || rep.max_degree() != cfg.space.N) {
        config_error("$.initial.xi.path", "rep shape does not match the space");
      }
      cfg.xi_ = std::move(rep);
    } else {
      config_error("$.initial.xi.type", "unknown constructor '" + xtype + "'");
    }
    const auto kap = require(initial, "kappa", "$.initial").get<std::vector<double>>();
    if (static_cast<int>(kap.size()) != cfg.space.d) {
      config_error("$.initial.kappa", "dimension mismatch");
    }
    cfg.kappa_.resize(cfg.space.d);
    for (int i = 0; i < cfg.space.d; ++i) cfg.kappa_[i] = kap[static_cast<std::size_t>(i)];

    const auto& co = require(j, "coefficients", "$");
    CoefficientSet set;
    set.basis = cfg.basis_;
    set.p = cfg.space.p;
    const auto& sig = require(co, "sigma", "$.coefficients");
    if (static_cast<int>(sig.size()) != cfg.space.d) {
      config_error("$.coefficients.sigma", "expected d rows");
    }
    for (std::size_t r = 0; r < sig.size(); ++r) {
      if (static_cast<int>(sig[r].size()) != cfg.space.d) {
        config_error("$.coefficients.sigma[" + std::to_string(r) + "]", "expected d entries");
      }
      std::vector<HermiteRep> row;
      for (std::size_t c = 0; c < sig[r].size(); ++c) {
        row.push_back(parse_coeff_spec(
            sig[r][c], cfg.basis_, cfg.space.p,
            "$.coefficients.sigma[" + std::to_string(r) + "][" + std::to_string(c) + "]"));
      }
      set.sigma.push_back(std::move(row));
    }
    const auto& bj = require(co, "b", "$.coefficients");
    if (static_cast<int>(bj.size()) != cfg.space.d) config_error("$.coefficients.b", "expected d entries");
    for (std::size_t i = 0; i < bj.size(); ++i) {
      set.b.push_back(
          parse_coeff_spec(bj[i], cfg.basis_, cfg.space.p, "$.coefficients.b[" + std::to_string(i) + "]"));
    }
    set.F = parse_jump_coefficient(require(co, "F", "$.coefficients"), cfg.basis_,
                                   cfg.space.p + 0.5, "$.coefficients.F");
    set.G = parse_jump_coefficient(require(co, "G", "$.coefficients"), cfg.basis_, cfg.space.p,
                                   "$.coefficients.G");
    cfg.set_ = std::move(set);

    const auto& noise = require(j, "noise", "$");
    cfg.noise_cfg.T = require(noise, "T", "$.noise").get<double>();
    cfg.noise_cfg.dt = require(noise, "dt", "$.noise").get<double>();
    cfg.noise_cfg.seed = require(noise, "seed", "$.noise").get<std::uint64_t>();
    cfg.noise_cfg.paths = require(noise, "paths", "$.noise").get<int>();
    if (!(cfg.noise_cfg.T > 0.0) || !(cfg.noise_cfg.dt > 0.0)) {
      config_error("$.noise", "T and dt must be positive");
    }
    if (cfg.noise_cfg.paths < 1) config_error("$.noise.paths", "paths must be >= 1");
    cfg.model_.dim = cfg.space.d;
    cfg.model_.small = parse_measure(require(noise, "small", "$.noise"), cfg.space.d,
                                     JumpMeasure::Annulus::small, "$.noise.small");
    cfg.model_.large = parse_measure(require(noise, "large", "$.noise"), cfg.space.d,
                                     JumpMeasure::Annulus::large, "$.noise.large");
    cfg.raw_["noise_small_original"] = require(noise, "small", "$.noise");
    cfg.raw_["noise_large_original"] = require(noise, "large", "$.noise");

    const nlohmann::json run = j.contains("run") ? j["run"] : nlohmann::json::object();
    cfg.run.m = get_or(run, "m", 1e6);
    cfg.run.snapshot_paths = get_or(run, "snapshot_paths", 2);
    cfg.run.test_degree_max = get_or(run, "test_degree_max", 5);
    if (cfg.run.test_degree_max > cfg.space.N - 2) {
      config_error("$.run.test_degree_max", "exceeds degree headroom N-2");
    }
    if (run.contains("tolerances")) {
      const auto& tol = run["tolerances"];
      cfg.run.tolerances.correspondence_max = get_or(tol, "correspondence_max", 0.0);
      cfg.run.tolerances.jump_identity_max = get_or(tol, "jump_identity_max", 1e-8);
      cfg.run.tolerances.ito_max_residual = get_or(tol, "ito_max_residual", 1e-8);
      cfg.run.tolerances.uniqueness_refinements = get_or(tol, "uniqueness_refinements", 3);
    }
    if (run.contains("hypothesis_ceilings")) {
      const auto& ce = run["hypothesis_ceilings"];
      cfg.run.ceilings.sup_cx = get_or(ce, "sup_cx", 1e2);
      cfg.run.ceilings.integral_cx2 = get_or(ce, "integral_cx2", 1e4);
      cfg.run.ceilings.sup_f0 = get_or(ce, "sup_f0", 1e2);
      cfg.run.ceilings.integral_f0_sq = get_or(ce, "integral_f0_sq", 1e4);
      cfg.run.ceilings.g_bound = get_or(ce, "g_bound", 1e3);
    }
    if (run.contains("inequalities")) {
      const auto& iq = run["inequalities"];
      cfg.run.inequalities.samples = get_or(iq, "samples", 1000);
      cfg.run.inequalities.seed = get_or(iq, "seed", std::uint64_t{777});
      cfg.run.inequalities.stability_levels =
          get_or(iq, "stability_levels", std::vector<int>{20, 30, 40});
      cfg.run.inequalities.stability_tol = get_or(iq, "stability_tol", 0.10);
      cfg.run.inequalities.equality_tol = get_or(iq, "equality_tol", 1e-8);
      cfg.run.inequalities.taylor_rel_tol = get_or(iq, "taylor_rel_tol", 1e-6);
      cfg.run.inequalities.x_grid = get_or(
          iq, "x_grid", std::vector<double>{0.0, 0.25, 0.5, 1.0, 1.5, 2.0, 2.5, 3.0});
      cfg.run.inequalities.emit_sample_csv = get_or(iq, "emit_sample_csv", false);
    }
    cfg.run.threads = 1;
  } catch (const nlohmann::json::exception& e) {
    throw_config(std::string("config parse failure: ") + e.what());
  }
  return cfg;
}

nlohmann::json ExperimentConfig::to_json() const {
  nlohmann::json j;
  j["space"] = {{"d", space.d}, {"N", space.N}, {"p", space.p}, {"Q", space.Q}};
  nlohmann::json xi = coeff_to_json(*xi_);
  j["initial"] = {{"xi", xi},
                  {"kappa", std::vector<double>(kappa_.data(), kappa_.data() + kappa_.size())}};
  nlohmann::json sig = nlohmann::json::array();
  for (const auto& row : set_->sigma) {
    nlohmann::json r = nlohmann::json::array();
    for (const HermiteRep& e : row) r.push_back(coeff_to_json(e));
    sig.push_back(r);
  }
  nlohmann::json bj = nlohmann::json::array();
  for (const HermiteRep& e : set_->b) bj.push_back(coeff_to_json(e));
  j["coefficients"] = {{"sigma", sig},
                       {"b", bj},
                       {"F", jump_coeff_to_json(set_->F)},
                       {"G", jump_coeff_to_json(set_->G)}};
  j["noise"] = {{"T", noise_cfg.T},
                {"dt", noise_cfg.dt},
                {"seed", noise_cfg.seed},
                {"paths", noise_cfg.paths},
                {"small", measure_to_json(model_.small, raw_.value("noise_small_original",
                                                                   nlohmann::json::object()))},
                {"large", measure_to_json(model_.large, raw_.value("noise_large_original",
                                                                   nlohmann::json::object()))}};
  j["run"] = {
      {"m", run.m},
      {"snapshot_paths", run.snapshot_paths},
      {"test_degree_max", run.test_degree_max},
      {"tolerances",
       {{"correspondence_max", run.tolerances.correspondence_max},
        {"jump_identity_max", run.tolerances.jump_identity_max},
        {"ito_max_residual", run.tolerances.ito_max_residual},
        {"uniqueness_refinements", run.tolerances.uniqueness_refinements}}},
      {"hypothesis_ceilings",
       {{"sup_cx", run.ceilings.sup_cx},
        {"integral_cx2", run.ceilings.integral_cx2},
        {"sup_f0", run.ceilings.sup_f0},
        {"integral_f0_sq", run.ceilings.integral_f0_sq},
        {"g_bound", run.ceilings.g_bound}}},
      {"inequalities",
       {{"samples", run.inequalities.samples},
        {"seed", run.inequalities.seed},
        {"stability_levels", run.inequalities.stability_levels},
        {"stability_tol", run.inequalities.stability_tol},
        {"equality_tol", run.inequalities.equality_tol},
        {"taylor_rel_tol", run.inequalities.taylor_rel_tol},
        {"x_grid", run.inequalities.x_grid},
        {"emit_sample_csv", run.inequalities.emit_sample_csv}}}};
  return j;
}

std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return std::string(buf);
}

std::string ExperimentConfig::content_hash() const { return fnv1a_hex(to_json().dump()); }

void ExperimentConfig::override_seed(std::uint64_t seed) { noise_cfg.seed = seed; }
void ExperimentConfig::override_threads(int threads) {
  if (threads < 1) throw_config("threads must be >= 1");
  run.threads = threads;
}

namespace {

void parallel_paths(int count, int threads, const std::function<void(int)>& body) {
  if (threads <= 1 || count <= 1) {
    for (int i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(threads));
  const int workers = std::min(threads, count);
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        while (true) {
          const int i = next.fetch_add(1);
          if (i >= count) break;
          body(i);
        }
      } catch (...) {
        errors[static_cast<std::size_t>(w)] = std::current_exception();
      }
    });
  }
  for (std::thread& t : pool) t.join();
  for (const std::exception_ptr& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

std::vector<HermiteRep> test_functions(std::shared_ptr<const Basis> basis, int degree_max,
                                       double p) {
  std::vector<HermiteRep> phis;
  for (std::size_t k = 0; k < basis->size() && static_cast<int>(phis.size()) <= degree_max; ++k) {
    phis.push_back(HermiteRep::basis_function(basis, basis->index(k), p));
  }
  return phis;
}

void write_text_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw_io("cannot write " + path.string());
  out << content;
}

nlohmann::json spde_path_to_json(const SpdePath& path) {
  nlohmann::json snaps = nlohmann::json::array();
  for (const SpdeSample& s : path.samples) {
    snaps.push_back({{"t", s.t},
                     {"flag", sample_flag_name(s.flag)},
                     {"tail_mass", s.tail},
                     {"norm_sq", s.norm_sq},
                     {"coeffs", std::vector<double>(s.y.coeffs().data(),
                                                    s.y.coeffs().data() + s.y.coeffs().size())}});
  }
  nlohmann::json j;
  j["stopped"] = path.stopped;
  if (path.stopped) j["theta_m"] = path.theta_m;
  j["samples"] = snaps;
  return j;
}

struct PathArtifacts {
  std::string traj_csv;
  std::string noise_jsonl;
  std::string spde_json;
  std::vector<double> residual_max;                  // per test function
  std::vector<std::vector<double>> residual_on_grid;  // per phi, per uniform time
  double tail_max = 0.0;
  double z_minus_u_max = 0.0;
  double jump_identity = 0.0;
  bool stopped = false;
};

PathArtifacts simulate_one_path(const ExperimentConfig& cfg, int path_index, bool want_snapshots,
                                const std::vector<HermiteRep>& phis) {
  PathArtifacts art;
  auto noise = std::make_shared<const NoisePath>(
      sample_noise_path(cfg.model(), cfg.noise_cfg.T, cfg.noise_cfg.dt, cfg.noise_cfg.seed,
                        static_cast<std::uint64_t>(path_index)));
  auto traj = std::make_shared<const Trajectory>(solve_sde(
      cfg.coefficients(), cfg.xi(), cfg.kappa(), cfg.model(), noise, cfg.noise_cfg.dt, cfg.run.m,
      cfg.space.Q));
  const SpdePath spde = translate_solution(traj, cfg.xi(), cfg.space.Q);
  art.stopped = traj->stopped;

  {
    std::ostringstream os;
    write_trajectory_csv(*traj, os);
    art.traj_csv = os.str();
  }
  {
    std::ostringstream os;
    write_noise_jsonl(*noise, os);
    art.noise_jsonl = os.str();
  }
  if (want_snapshots) {
    art.spde_json = spde_path_to_json(spde).dump(2) + "\n";
  }

  for (const SpdeSample& s : spde.samples) art.tail_max = std::max(art.tail_max, s.tail);

  const double t_max = spde.stopped ? spde.theta_m : std::numeric_limits<double>::infinity();
  const auto residuals = weak_residual(spde, cfg.coefficients(), cfg.model(), *noise, phis,
                                       cfg.space.p, cfg.space.Q, t_max);
  for (const ResidualSeries& r : residuals) art.residual_max.push_back(r.max_abs());

  // Residual values at the uniform grid times (shared across paths; jump
  // times are path specific). The last value at each time is the post state.
  std::vector<double> grid_times;
  for (std::size_t k = 0; k < noise->times.size(); ++k) {
    if (noise->uniform_index[k] >= 0) grid_times.push_back(noise->times[k]);
  }
  art.residual_on_grid.resize(residuals.size());
  for (std::size_t f = 0; f < residuals.size(); ++f) {
    const ResidualSeries& r = residuals[f];
    std::size_t cursor = 0;
    for (double t : grid_times) {
      double value = std::numeric_limits<double>::quiet_NaN();
      while (cursor < r.times.size() && r.times[cursor] <= t) {
        if (r.times[cursor] == t) value = r.values[cursor];
        ++cursor;
      }
      if (std::isnan(value)) break;  // stopped before this time
      art.residual_on_grid[f].push_back(value);
    }
  }

  const auto z = reconstruct_Z(spde, cfg.coefficients(), cfg.model(), *noise);
  for (std::size_t i = 0; i < z.size(); ++i) {
    art.z_minus_u_max =
        std::max(art.z_minus_u_max, (z[i] - traj->samples[i].u).lpNorm<Eigen::Infinity>());
  }
  art.jump_identity = jump_identity_max(spde, cfg.coefficients(), *noise, cfg.space.Q);
  return art;
}

}  // namespace

CommandResult run_simulate(const ExperimentConfig& cfg, const std::string& out_dir) {
  std::filesystem::create_directories(out_dir);
  const int paths = cfg.noise_cfg.paths;
  const auto phis = test_functions(cfg.basis(), cfg.run.test_degree_max, cfg.space.p);

  std::vector<PathArtifacts> artifacts(static_cast<std::size_t>(paths));
  parallel_paths(paths, cfg.run.threads, [&](int i) {
    artifacts[static_cast<std::size_t>(i)] =
        simulate_one_path(cfg, i, i < cfg.run.snapshot_paths, phis);
  });

  char name[64];
  for (int i = 0; i < paths; ++i) {
    const PathArtifacts& art = artifacts[static_cast<std::size_t>(i)];
    std::snprintf(name, sizeof(name), "traj_%04d.csv", i);
    write_text_file(std::filesystem::path(out_dir) / name, art.traj_csv);
    std::snprintf(name, sizeof(name), "noise_%04d.jsonl", i);
    write_text_file(std::filesystem::path(out_dir) / name, art.noise_jsonl);
    if (!art.spde_json.empty()) {
      std::snprintf(name, sizeof(name), "spde_%04d.json", i);
      write_text_file(std::filesystem::path(out_dir) / name, art.spde_json);
    }
  }

  nlohmann::json summary;
  summary["config_hash"] = cfg.content_hash();
  summary["seed"] = cfg.noise_cfg.seed;
  summary["paths"] = paths;
  int survivors = 0;
  double tail_max = 0.0, zmu = 0.0, jump_id = 0.0;
  for (const PathArtifacts& art : artifacts) {
    if (!art.stopped) ++survivors;
    tail_max = std::max(tail_max, art.tail_max);
    zmu = std::max(zmu, art.z_minus_u_max);
    jump_id = std::max(jump_id, art.jump_identity);
  }
  summary["survival_fraction"] = static_cast<double>(survivors) / paths;
  summary["max_tail_mass"] = tail_max;
  summary["max_abs_z_minus_u"] = zmu;
  summary["max_jump_identity_defect"] = jump_id;

  nlohmann::json rj = nlohmann::json::array();
  for (std::size_t f = 0; f < phis.size(); ++f) {
    double mean = 0.0, rms = 0.0, mx = 0.0;
    int n = 0;
    for (const PathArtifacts& art : artifacts) {
      if (art.residual_max.size() <= f) continue;
      const double v = art.residual_max[f];
      mean += v;
      rms += v * v;
      mx = std::max(mx, v);
      ++n;
    }
    if (n > 0) {
      mean /= n;
      rms = std::sqrt(rms / n);
    }
    rj.push_back({{"phi_index", f}, {"mean_max_abs", mean}, {"rms_max_abs", rms},
                  {"max_max_abs", mx}, {"paths_counted", n}});
  }
  summary["weak_residuals"] = rj;

  const nlohmann::json hyp = hypothesis_report(cfg.coefficients(), cfg.xi(), cfg.model(),
                                               cfg.run.ceilings, cfg.space.Q);
  summary["hypothesis_warnings"] = hyp["violations"];

  // Per-phi, per-t residual statistics over paths at the uniform grid times.
  {
    std::vector<double> grid_times;
    const int K = static_cast<int>(std::ceil(cfg.noise_cfg.T / cfg.noise_cfg.dt - 1e-9));
    grid_times.push_back(0.0);
    for (int k = 1; k < K; ++k) grid_times.push_back(k * cfg.noise_cfg.dt);
    grid_times.push_back(cfg.noise_cfg.T);

    nlohmann::json per_phi = nlohmann::json::array();
    for (std::size_t f = 0; f < phis.size(); ++f) {
      std::vector<double> mean(grid_times.size(), 0.0), rms(grid_times.size(), 0.0),
          mx(grid_times.size(), 0.0), count(grid_times.size(), 0.0);
      for (const PathArtifacts& art : artifacts) {
        if (art.residual_on_grid.size() <= f) continue;
        const auto& series = art.residual_on_grid[f];
        for (std::size_t t = 0; t < series.size() && t < grid_times.size(); ++t) {
          mean[t] += series[t];
          rms[t] += series[t] * series[t];
          mx[t] = std::max(mx[t], std::abs(series[t]));
          count[t] += 1.0;
        }
      }
      for (std::size_t t = 0; t < grid_times.size(); ++t) {
        if (count[t] > 0.0) {
          mean[t] /= count[t];
          rms[t] = std::sqrt(rms[t] / count[t]);
        }
      }
      per_phi.push_back({{"phi_index", f}, {"times", grid_times}, {"mean", mean},
                         {"rms", rms}, {"max", mx}, {"paths_per_time", count}});
    }
    nlohmann::json rj;
    rj["config_hash"] = cfg.content_hash();
    rj["seed"] = cfg.noise_cfg.seed;
    rj["per_phi"] = per_phi;
    write_text_file(std::filesystem::path(out_dir) / "residuals.json", rj.dump(2) + "\n");
  }

  write_text_file(std::filesystem::path(out_dir) / "summary.json", summary.dump(2) + "\n");
  return {0, summary};
}

namespace {

CommandResult verify_correspondence(const ExperimentConfig& cfg, const std::string& out_dir) {
  const int paths = cfg.noise_cfg.paths;
  std::vector<double> zmu(static_cast<std::size_t>(paths), 0.0);
  std::vector<double> jid(static_cast<std::size_t>(paths), 0.0);
  parallel_paths(paths, cfg.run.threads, [&](int i) {
    auto noise = std::make_shared<const NoisePath>(
        sample_noise_path(cfg.model(), cfg.noise_cfg.T, cfg.noise_cfg.dt, cfg.noise_cfg.seed,
                          static_cast<std::uint64_t>(i)));
    auto traj = std::make_shared<const Trajectory>(
        solve_sde(cfg.coefficients(), cfg.xi(), cfg.kappa(), cfg.model(), noise, cfg.noise_cfg.dt,
                  cfg.run.m, cfg.space.Q));
    const SpdePath spde = translate_solution(traj, cfg.xi(), cfg.space.Q);
    const auto z = reconstruct_Z(spde, cfg.coefficients(), cfg.model(), *noise);
    double m = 0.0;
    for (std::size_t k = 0; k < z.size(); ++k) {
      m = std::max(m, (z[k] - traj->samples[k].u).lpNorm<Eigen::Infinity>());
    }
    zmu[static_cast<std::size_t>(i)] = m;
    jid[static_cast<std::size_t>(i)] = jump_identity_max(spde, cfg.coefficients(), *noise,
                                                          cfg.space.Q);
  });
  double worst_z = 0.0, worst_j = 0.0;
  for (int i = 0; i < paths; ++i) {
    worst_z = std::max(worst_z, zmu[static_cast<std::size_t>(i)]);
    worst_j = std::max(worst_j, jid[static_cast<std::size_t>(i)]);
  }
  nlohmann::json rep;
  rep["suite"] = "correspondence";
  rep["config_hash"] = cfg.content_hash();
  rep["seed"] = cfg.noise_cfg.seed;
  rep["paths"] = paths;
  rep["max_abs_z_minus_u"] = worst_z;
  rep["tolerance_z_minus_u"] = cfg.run.tolerances.correspondence_max;
  rep["max_jump_identity_defect"] = worst_j;
  rep["tolerance_jump_identity"] = cfg.run.tolerances.jump_identity_max;
  const bool pass = worst_z <= cfg.run.tolerances.correspondence_max &&
                    worst_j <= cfg.run.tolerances.jump_identity_max;
  rep["pass"] = pass;
  write_text_file(std::filesystem::path(out_dir) / "verify_correspondence.json",
                  rep.dump(2) + "\n");
  return {pass ? 0 : 1, rep};
}

CommandResult verify_ito(const ExperimentConfig& cfg, const std::string& out_dir) {
  const int paths = cfg.noise_cfg.paths;
  const auto phis = test_functions(cfg.basis(), cfg.run.test_degree_max, cfg.space.p);
  std::vector<double> worst(static_cast<std::size_t>(paths), 0.0);
  parallel_paths(paths, cfg.run.threads, [&](int i) {
    auto noise = std::make_shared<const NoisePath>(
        sample_noise_path(cfg.model(), cfg.noise_cfg.T, cfg.noise_cfg.dt, cfg.noise_cfg.seed,
                          static_cast<std::uint64_t>(i)));
    const Trajectory traj = solve_sde(cfg.coefficients(), cfg.xi(), cfg.kappa(), cfg.model(), noise,
                                      cfg.noise_cfg.dt, cfg.run.m, cfg.space.Q);
    const auto residuals = ito_residual(traj, cfg.xi(), phis, cfg.space.p, cfg.space.Q);
    double m = 0.0;
    for (const ResidualSeries& r : residuals) m = std::max(m, r.max_abs());
    worst[static_cast<std::size_t>(i)] = m;
  });
  double w = 0.0;
  for (double v : worst) w = std::max(w, v);
  nlohmann::json rep;
  rep["suite"] = "ito";
  rep["config_hash"] = cfg.content_hash();
  rep["seed"] = cfg.noise_cfg.seed;
  rep["paths"] = paths;
  rep["max_residual"] = w;
  rep["tolerance"] = cfg.run.tolerances.ito_max_residual;
  const bool pass = w <= cfg.run.tolerances.ito_max_residual;
  rep["pass"] = pass;
  write_text_file(std::filesystem::path(out_dir) / "verify_ito.json", rep.dump(2) + "\n");
  return {pass ? 0 : 1, rep};
}

CommandResult verify_uniqueness(const ExperimentConfig& cfg, const std::string& out_dir) {
  const int refinements = std::max(2, cfg.run.tolerances.uniqueness_refinements);
  const int paths = cfg.noise_cfg.paths;
  const int levels = refinements + 1;

  // One fine noise realization per path; coarser levels view the same path.
  std::vector<std::vector<SpdePath>> ensembles(static_cast<std::size_t>(levels));
  for (auto& e : ensembles) e.resize(static_cast<std::size_t>(paths), SpdePath{});
  const double fine_dt = cfg.noise_cfg.dt / std::pow(2.0, refinements);
  parallel_paths(paths, cfg.run.threads, [&](int i) {
    const NoisePath fine = sample_noise_path(cfg.model(), cfg.noise_cfg.T, fine_dt,
                                             cfg.noise_cfg.seed, static_cast<std::uint64_t>(i));
    for (int level = 0; level < levels; ++level) {
      const int factor = 1 << (refinements - level);
      auto noise = std::make_shared<const NoisePath>(coarsen(fine, factor));
      auto traj = std::make_shared<const Trajectory>(
          solve_sde(cfg.coefficients(), cfg.xi(), cfg.kappa(), cfg.model(), noise, noise->dt,
                    cfg.run.m, cfg.space.Q));
      ensembles[static_cast<std::size_t>(level)][static_cast<std::size_t>(i)] =
          translate_solution(traj, cfg.xi(), cfg.space.Q);
    }
  });

  nlohmann::json gaps = nlohmann::json::array();
  std::vector<double> gap_max;
  for (int level = 0; level + 1 < levels; ++level) {
    const GapSeries g = uniqueness_gap(ensembles[static_cast<std::size_t>(level)],
                                       ensembles[static_cast<std::size_t>(level) + 1], cfg.space.p);
    double m = 0.0;
    for (double v : g.mean_sq_gap) m = std::max(m, v);
    gap_max.push_back(m);
    gaps.push_back({{"coarse_dt", cfg.noise_cfg.dt / std::pow(2.0, level)},
                    {"max_mean_sq_gap", m},
                    {"survival_fraction", g.survival_fraction}});
  }
  bool monotone = true;
  for (std::size_t i = 0; i + 1 < gap_max.size(); ++i) {
    if (gap_max[i + 1] > gap_max[i]) monotone = false;
  }
  nlohmann::json rep;
  rep["suite"] = "uniqueness";
  rep["config_hash"] = cfg.content_hash();
  rep["seed"] = cfg.noise_cfg.seed;
  rep["paths"] = paths;
  rep["gaps"] = gaps;
  rep["monotone_decreasing"] = monotone;
  rep["pass"] = monotone;
  write_text_file(std::filesystem::path(out_dir) / "verify_uniqueness.json", rep.dump(2) + "\n");
  return {monotone ? 0 : 1, rep};
}

}  // namespace

CommandResult run_verify(const ExperimentConfig& cfg, const std::string& suite,
                         const std::string& out_dir) {
  std::filesystem::create_directories(out_dir);
  if (suite == "correspondence") return verify_correspondence(cfg, out_dir);
  if (suite == "ito") return verify_ito(cfg, out_dir);
  if (suite == "uniqueness") return verify_uniqueness(cfg, out_dir);
  if (suite == "all") {
    const CommandResult a = verify_correspondence(cfg, out_dir);
    const CommandResult b = verify_ito(cfg, out_dir);
    const CommandResult c = verify_uniqueness(cfg, out_dir);
    nlohmann::json rep;
    rep["correspondence"] = a.summary;
    rep["ito"] = b.summary;
    rep["uniqueness"] = c.summary;
    const int code = std::max({a.exit_code, b.exit_code, c.exit_code});
    return {code, rep};
  }
  throw_config("unknown verify suite '" + suite + "' (expected correspondence|ito|uniqueness|all)");
}

CommandResult run_inequalities(const ExperimentConfig& cfg, const std::string& out_dir) {
  std::filesystem::create_directories(out_dir);
  const InequalityConfig& iq = cfg.run.inequalities;
  const int d = cfg.space.d;
  const int N = cfg.space.N;

  std::vector<InequalityReport> reports;

  // Exact-zero monotonicity case (integration by parts).
  reports.push_back(monotonicity_check(0.0, Eigen::MatrixXd::Identity(1, 1),
                                       Eigen::VectorXd::Zero(1), iq.samples, N, iq.seed, {},
                                       iq.stability_tol, 1e-8));
  reports.back().id = "monotonicity_zero";

  // General constant-coefficient case at the config's p.
  reports.push_back(monotonicity_check(cfg.space.p, Eigen::MatrixXd::Identity(d, d),
                                       Eigen::VectorXd::Ones(d), iq.samples, N, iq.seed,
                                       iq.stability_levels, iq.stability_tol));

  reports.push_back(spl_mono_check(cfg.space.p, d, iq.samples, N, iq.seed, iq.stability_levels,
                                   iq.equality_tol, iq.stability_tol));
  reports.push_back(first_order_identity_check(cfg.space.p, d, iq.samples, N, iq.seed,
                                               iq.stability_levels, iq.equality_tol,
                                               iq.stability_tol));

  {
    Eigen::VectorXd z = Eigen::VectorXd::Zero(d);
    z[0] = 0.3;
    const HermiteRep psi = HermiteRep::basis_function(cfg.basis(), cfg.basis()->index(0),
                                                      -cfg.space.p);
    reports.push_back(taylor_jump_check(cfg.space.p, z, psi, cfg.space.Q, iq.taylor_rel_tol));
  }

  nlohmann::json all = nlohmann::json::array();
  bool pass = true;
  for (const InequalityReport& r : reports) {
    nlohmann::json j = r.to_json();
    j["config_hash"] = cfg.content_hash();
    write_text_file(std::filesystem::path(out_dir) / (r.id + ".json"), j.dump(2) + "\n");
    if (iq.emit_sample_csv && !r.sample_ratios.empty()) {
      std::ostringstream os;
      r.write_sample_csv(os);
      write_text_file(std::filesystem::path(out_dir) / (r.id + "_samples.csv"), os.str());
    }
    all.push_back(j);
    pass = pass && r.pass;
  }
  if (d == 1) {
    const TranslationBoundReport tb =
        translation_bound_fit(cfg.space.p, N, iq.x_grid, cfg.space.Q, iq.seed);
    nlohmann::json j = tb.to_json();
    j["config_hash"] = cfg.content_hash();
    write_text_file(std::filesystem::path(out_dir) / "translation_bounds.json", j.dump(2) + "\n");
    all.push_back(j);
    pass = pass && tb.growth.pass && tb.lipschitz.pass;
  }

  nlohmann::json rep;
  rep["reports"] = all;
  rep["pass"] = pass;
  write_text_file(std::filesystem::path(out_dir) / "inequalities.json", rep.dump(2) + "\n");
  return {pass ? 0 : 1, rep};
}

CommandResult run_hypotheses(const ExperimentConfig& cfg, const std::string& out_dir) {
  std::filesystem::create_directories(out_dir);
  nlohmann::json rep = hypothesis_report(cfg.coefficients(), cfg.xi(), cfg.model(),
                                         cfg.run.ceilings, cfg.space.Q);
  rep["config_hash"] = cfg.content_hash();
  write_text_file(std::filesystem::path(out_dir) / "hypotheses.json", rep.dump(2) + "\n");
  return {rep["pass"].get<bool>() ? 0 : 1, rep};
}

}  // namespace translev
