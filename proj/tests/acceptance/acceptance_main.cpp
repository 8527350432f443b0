// Acceptance suite: one check per shipped guarantee, each printed as a
// PASS/FAIL line with its measured figure. Exit code 0 iff all pass.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "translev/experiment.hpp"
#include "translev/inequality_lab.hpp"
#include "translev/spde_engine.hpp"

using namespace translev;

namespace {

constexpr double kP = 1.5;
constexpr int kN = 40;
constexpr int kQ = 88;

int g_failures = 0;

void report(const std::string& id, bool pass, const std::string& detail) {
  std::printf("[%s] %s: %s\n", pass ? "PASS" : "FAIL", id.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!pass) ++g_failures;
}

double seconds_since(const std::chrono::steady_clock::time_point& t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Eigen::VectorXd scalar(double v) { return Eigen::VectorXd::Constant(1, v); }

HermiteRep basis_fn(std::shared_ptr<const Basis> basis, std::vector<int> n, double p) {
  return HermiteRep::basis_function(basis, MultiIndex{std::move(n)}, p);
}

struct NamedConfig {
  std::string name;
  CoefficientSet set;
  LevyModel model;
  HermiteRep xi;
  double T;
  double dt;
};

NamedConfig all_zero_config() {
  auto basis = Basis::get(1, kN);
  return {"all-zero", CoefficientSet::all_zero(basis, kP),
          LevyModel{1, JumpMeasure::zero(1, JumpMeasure::Annulus::small),
                    JumpMeasure::zero(1, JumpMeasure::Annulus::large)},
          basis_fn(basis, {0}, -kP), 1.0, 0.01};
}

NamedConfig drift_config() {
  auto basis = Basis::get(1, kN);
  CoefficientSet set = CoefficientSet::all_zero(basis, kP);
  set.b[0] = basis_fn(basis, {0}, kP);
  return {"deterministic-drift", std::move(set),
          LevyModel{1, JumpMeasure::zero(1, JumpMeasure::Annulus::small),
                    JumpMeasure::zero(1, JumpMeasure::Annulus::large)},
          basis_fn(basis, {0}, -kP), 1.0, 0.01};
}

// Mark-identity family: sigma = b = G = 0, F(y, x) = x.
NamedConfig mark_family_config(double dt = 0.01) {
  auto basis = Basis::get(1, kN);
  CoefficientSet set = CoefficientSet::all_zero(basis, kP);
  set.F.kind = JumpCoefficient::Kind::mark_identity;
  return {"small-jump-mark", std::move(set),
          LevyModel{1,
                    JumpMeasure::atoms(1, JumpMeasure::Annulus::small, {{scalar(0.5), 2.0}}),
                    JumpMeasure::zero(1, JumpMeasure::Annulus::large)},
          basis_fn(basis, {0}, -kP), 1.0, dt};
}

NamedConfig full_1d_config() {
  auto basis = Basis::get(1, kN);
  CoefficientSet set = CoefficientSet::all_zero(basis, kP);
  set.sigma[0][0] = HermiteRep(basis, 0.3 * basis_fn(basis, {0}, kP).coeffs(), kP);
  set.b[0] = HermiteRep(basis, 0.2 * basis_fn(basis, {1}, kP).coeffs(), kP);
  set.F.kind = JumpCoefficient::Kind::separable;
  set.F.h = 0.5;
  set.F.profile = ScalarProfile{ScalarProfile::Kind::abs_pow, 1.0, 1.0};
  set.F.gamma = {basis_fn(basis, {0}, kP + 0.5)};
  set.G.kind = JumpCoefficient::Kind::separable;
  set.G.h = 0.3;
  set.G.profile = ScalarProfile{ScalarProfile::Kind::constant, 1.0, 0.0};
  set.G.gamma = {basis_fn(basis, {0}, kP)};
  return {"full-1d", std::move(set),
          LevyModel{1,
                    JumpMeasure::atoms(1, JumpMeasure::Annulus::small, {{scalar(0.4), 1.0}}),
                    JumpMeasure::atoms(1, JumpMeasure::Annulus::large, {{scalar(1.5), 0.5}})},
          basis_fn(basis, {0}, -kP), 1.0, 0.01};
}

NamedConfig full_2d_config() {
  auto basis = Basis::get(2, kN);
  CoefficientSet set = CoefficientSet::all_zero(basis, kP);
  set.sigma[0][0] = HermiteRep(basis, 0.3 * basis_fn(basis, {0, 0}, kP).coeffs(), kP);
  set.sigma[1][1] = HermiteRep(basis, 0.2 * basis_fn(basis, {0, 0}, kP).coeffs(), kP);
  set.b[0] = HermiteRep(basis, 0.2 * basis_fn(basis, {0, 0}, kP).coeffs(), kP);
  set.b[1] = HermiteRep(basis, 0.1 * basis_fn(basis, {0, 0}, kP).coeffs(), kP);
  set.F.kind = JumpCoefficient::Kind::mark_identity;
  set.G.kind = JumpCoefficient::Kind::separable;
  set.G.h = 0.25;
  set.G.profile = ScalarProfile{ScalarProfile::Kind::constant, 1.0, 0.0};
  set.G.gamma = {basis_fn(basis, {0, 0}, kP), basis_fn(basis, {0, 0}, kP)};
  Eigen::VectorXd small_mark(2), large_mark(2);
  small_mark << 0.3, 0.2;
  large_mark << 1.2, 0.0;
  return {"full-2d", std::move(set),
          LevyModel{2, JumpMeasure::atoms(2, JumpMeasure::Annulus::small, {{small_mark, 1.0}}),
                    JumpMeasure::atoms(2, JumpMeasure::Annulus::large, {{large_mark, 0.3}})},
          HermiteRep::basis_function(basis, MultiIndex{{0, 0}}, -kP), 0.5, 0.01};
}

std::vector<HermiteRep> low_tests(std::shared_ptr<const Basis> basis, int jmax) {
  std::vector<HermiteRep> phis;
  for (int j = 0; j <= jmax; ++j) {
    phis.push_back(HermiteRep::basis_function(basis, basis->index(static_cast<std::size_t>(j)), kP));
  }
  return phis;
}

// ---- criterion 1: bitwise SDE <-> SPDE correspondence --------------------

void criterion_correspondence() {
  const auto t0 = std::chrono::steady_clock::now();
  const int paths = 100;
  double worst = 0.0;
  bool aligned = true;
  std::vector<NamedConfig> configs;
  configs.push_back(all_zero_config());
  configs.push_back(drift_config());
  configs.push_back(mark_family_config());
  configs.push_back(full_1d_config());
  configs.push_back(full_2d_config());
  for (const NamedConfig& cfg : configs) {
    const Eigen::VectorXd kappa = Eigen::VectorXd::Zero(cfg.model.dim);
    for (int i = 0; i < paths; ++i) {
      auto noise = std::make_shared<const NoisePath>(
          sample_noise_path(cfg.model, cfg.T, cfg.dt, 1001, static_cast<std::uint64_t>(i)));
      auto traj = std::make_shared<const Trajectory>(
          solve_sde(cfg.set, cfg.xi, kappa, cfg.model, noise, cfg.dt, 1e6, kQ));
      const SpdePath spde = translate_solution(traj, cfg.xi, kQ);
      const auto z = reconstruct_Z(spde, cfg.set, cfg.model, *noise);
      if (z.size() != traj->samples.size()) aligned = false;
      for (std::size_t k = 0; k < z.size(); ++k) {
        worst = std::max(worst, (z[k] - traj->samples[k].u).lpNorm<Eigen::Infinity>());
      }
    }
  }
  const double elapsed = seconds_since(t0);
  std::ostringstream detail;
  detail << "max |Z-U| = " << worst << " over 5 configs x " << paths
         << " paths (bitwise target 0); " << elapsed << " s (budget 60)";
  report("criterion 1: correspondence Z == U", aligned && worst == 0.0 && elapsed < 60.0,
         detail.str());
}

// ---- criterion 2: interlacing bitwise -------------------------------------

void criterion_interlacing() {
  const NamedConfig cfg = full_1d_config();
  const int paths = 100;
  bool all_equal = true;
  for (int i = 0; i < paths && all_equal; ++i) {
    auto noise = std::make_shared<const NoisePath>(
        sample_noise_path(cfg.model, cfg.T, cfg.dt, 2002, static_cast<std::uint64_t>(i)));
    const Trajectory inline_traj =
        solve_sde(cfg.set, cfg.xi, scalar(0.0), cfg.model, noise, cfg.dt, 1e6, kQ);

    std::vector<TrajectorySample> rebuilt;
    Eigen::VectorXd u = scalar(0.0);
    rebuilt.push_back({0.0, u, SampleFlag::regular});
    double window_start = 0.0;
    for (const JumpEvent& arrival : noise->large_jumps) {
      const Trajectory window =
          solve_reduced(cfg.set, cfg.xi, u, cfg.model, noise, window_start, arrival.t, 1e6, kQ);
      for (std::size_t k = 1; k < window.samples.size(); ++k) rebuilt.push_back(window.samples[k]);
      u = window.samples.back().u;
      rebuilt.push_back({arrival.t, u, SampleFlag::pre_large});
      u = apply_large_jump(u, arrival.x, cfg.set, cfg.xi, kQ);
      rebuilt.push_back({arrival.t, u, SampleFlag::post_large});
      window_start = arrival.t;
    }
    const Trajectory tail =
        solve_reduced(cfg.set, cfg.xi, u, cfg.model, noise, window_start, cfg.T, 1e6, kQ);
    for (std::size_t k = 1; k < tail.samples.size(); ++k) rebuilt.push_back(tail.samples[k]);

    if (inline_traj.samples.size() != rebuilt.size()) {
      all_equal = false;
      break;
    }
    for (std::size_t k = 0; k < rebuilt.size(); ++k) {
      if (inline_traj.samples[k].t != rebuilt[k].t || inline_traj.samples[k].u != rebuilt[k].u) {
        all_equal = false;
        break;
      }
    }
  }
  report("criterion 2: interlacing bitwise", all_equal,
         all_equal ? "inline == reduced-plus-G on 100 seeded paths"
                   : "trajectory mismatch detected");
}

// ---- criterion 3: Ito formula ---------------------------------------------

void criterion_ito() {
  // (a) pure compound-Poisson driver: residual <= 1e-8 for all t, j <= 5.
  auto basis = Basis::get(1, kN);
  CoefficientSet set = CoefficientSet::all_zero(basis, kP);
  set.G.kind = JumpCoefficient::Kind::mark_identity;
  LevyModel model{1, JumpMeasure::zero(1, JumpMeasure::Annulus::small),
                  JumpMeasure::atoms(1, JumpMeasure::Annulus::large,
                                     {{scalar(1.3), 2.0}, {scalar(-1.1), 1.0}})};
  const HermiteRep xi = basis_fn(basis, {0}, -kP);
  const auto phis = low_tests(basis, 5);
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    auto noise = std::make_shared<const NoisePath>(
        sample_noise_path(model, 1.0, 0.02, 3003, static_cast<std::uint64_t>(i)));
    const Trajectory traj = solve_sde(set, xi, scalar(0.0), model, noise, 0.02, 1e6, kQ);
    for (const ResidualSeries& r : ito_residual(traj, xi, phis, kP, kQ)) {
      worst = std::max(worst, r.max_abs());
    }
  }
  {
    std::ostringstream detail;
    detail << "pure-jump max residual = " << worst << " (tol 1e-8, 100 paths, j <= 5)";
    report("criterion 3a: Ito formula, compound-Poisson driver", worst <= 1e-8, detail.str());
  }

  // (b) drift-only driver: O(dt) with halving factor in [1.7, 2.3],
  // three refinements.
  const NamedConfig drift = drift_config();
  std::vector<double> maxima;
  for (double dt : {0.02, 0.01, 0.005, 0.0025}) {
    auto noise = std::make_shared<const NoisePath>(sample_noise_path(drift.model, 1.0, dt, 1, 0));
    const Trajectory traj = solve_sde(drift.set, drift.xi, scalar(0.0), drift.model, noise, dt,
                                      1e6, kQ);
    double m = 0.0;
    for (const ResidualSeries& r : ito_residual(traj, drift.xi, phis, kP, kQ)) {
      m = std::max(m, r.max_abs());
    }
    maxima.push_back(m);
  }
  bool ratios_ok = true;
  std::ostringstream detail;
  detail << "halving factors:";
  for (std::size_t i = 0; i + 1 < maxima.size(); ++i) {
    const double ratio = maxima[i] / maxima[i + 1];
    detail << " " << ratio;
    ratios_ok = ratios_ok && ratio >= 1.7 && ratio <= 2.3;
  }
  detail << " (target [1.7, 2.3])";
  report("criterion 3b: Ito formula, drift-only O(dt)", ratios_ok, detail.str());
}

// ---- criterion 4: weak SPDE residual, mark family -------------------------

void criterion_weak_residual() {
  const auto t0 = std::chrono::steady_clock::now();
  auto basis = Basis::get(1, kN);
  const NamedConfig base = mark_family_config();
  const auto phis = low_tests(basis, 5);
  const int paths = 200;
  const int levels = 4;  // dt, dt/2, dt/4, dt/8
  const double fine_dt = 0.004 / (1 << (levels - 1));

  std::vector<std::vector<double>> rms(static_cast<std::size_t>(levels),
                                       std::vector<double>(phis.size(), 0.0));
  for (int i = 0; i < paths; ++i) {
    const NoisePath fine =
        sample_noise_path(base.model, base.T, fine_dt, 4004, static_cast<std::uint64_t>(i));
    for (int level = 0; level < levels; ++level) {
      auto noise = std::make_shared<const NoisePath>(coarsen(fine, 1 << (levels - 1 - level)));
      auto traj = std::make_shared<const Trajectory>(
          solve_sde(base.set, base.xi, scalar(0.0), base.model, noise, noise->dt, 1e6, kQ));
      const SpdePath spde = translate_solution(traj, base.xi, kQ);
      const auto residuals = weak_residual(spde, base.set, base.model, *noise, phis, kP, kQ);
      for (std::size_t f = 0; f < phis.size(); ++f) {
        const double m = residuals[f].max_abs();
        rms[static_cast<std::size_t>(level)][f] += m * m;
      }
    }
  }
  bool ok = true;
  double min_factor = std::numeric_limits<double>::infinity();
  for (std::size_t f = 0; f < phis.size(); ++f) {
    for (int level = 0; level + 1 < levels; ++level) {
      const double a = std::sqrt(rms[static_cast<std::size_t>(level)][f] / paths);
      const double b = std::sqrt(rms[static_cast<std::size_t>(level) + 1][f] / paths);
      const double factor = a / b;
      min_factor = std::min(min_factor, factor);
      ok = ok && factor >= 1.3;
    }
  }
  const double elapsed = seconds_since(t0);
  std::ostringstream detail;
  detail << "min RMS halving factor = " << min_factor << " (target >= 1.3, j <= 5, 200 paths); "
         << elapsed << " s (budget 300)";
  report("criterion 4: weak residual decay, mark family", ok && elapsed < 300.0, detail.str());
}

// ---- criterion 5: monotonicity inequality ----------------------------------

void criterion_monotonicity() {
  const auto zero = monotonicity_check(0.0, Eigen::MatrixXd::Identity(1, 1),
                                       Eigen::VectorXd::Zero(1), 10000, kN, 5005, {}, 0.10, 1e-8);
  {
    std::ostringstream detail;
    detail << "max |ratio| = " << zero.empirical_max_abs_ratio << " over 10^4 samples (tol 1e-8)";
    report("criterion 5a: monotonicity exact-zero case", zero.pass, detail.str());
  }

  bool ok = true;
  std::ostringstream detail;
  for (double p : {-1.0, 1.0}) {
    for (int d : {1, 2}) {
      const int n_here = d == 1 ? kN : 40;
      const auto rep =
          monotonicity_check(p, Eigen::MatrixXd::Identity(d, d), Eigen::VectorXd::Ones(d), 400,
                             n_here, 5006, {20, 30, 40}, 0.10);
      detail << "p=" << p << ",d=" << d << ": C=" << rep.fitted_constant << " spread "
             << rep.stability_spread << "; ";
      ok = ok && rep.pass && rep.stability_spread <= 0.10;
    }
  }
  detail << "(spread target <= 0.10)";
  report("criterion 5b: monotonicity constant stability", ok, detail.str());
}

// ---- criterion 6: special monotonicity and first-order identities ----------

void criterion_identities() {
  const auto spl = spl_mono_check(kP, 1, 1000, kN, 6006, {20, 30, 40}, 1e-8, 0.10);
  const auto first = first_order_identity_check(kP, 1, 1000, kN, 6007, {20, 30, 40}, 1e-8, 0.10);
  std::ostringstream detail;
  detail << "spl-mono residual " << spl.max_equality_residual << ", R=" << spl.fitted_constant
         << " spread " << spl.stability_spread << "; first-order residual "
         << first.max_equality_residual << ", |T| spread " << first.stability_spread
         << " (residual tol 1e-8, spread tol 0.10)";
  report("criterion 6: jump-term identities", spl.pass && first.pass, detail.str());
}

// ---- criterion 7: second-order Taylor identity ------------------------------

void criterion_taylor() {
  auto basis = Basis::get(1, kN);
  std::vector<HermiteRep> psis;
  psis.push_back(basis_fn(basis, {0}, -kP));
  psis.push_back(basis_fn(basis, {1}, -kP));
  Eigen::VectorXd c = Eigen::VectorXd::Zero(kN + 1);
  std::uint64_t state = 0x9e3779b97f4a7c15ull;
  for (int k = 0; k <= 10; ++k) {
    state ^= state << 13; state ^= state >> 7; state ^= state << 17;
    c[k] = static_cast<double>(static_cast<std::int64_t>(state % 2000) - 1000) / 500.0;
  }
  psis.emplace_back(basis, c, -kP);

  bool ok = true;
  double worst = 0.0;
  for (double z : {0.1, 0.25, 0.5}) {
    for (const HermiteRep& psi : psis) {
      const auto rep = taylor_jump_check(kP, Eigen::VectorXd::Constant(1, z), psi, kQ, 1e-6);
      worst = std::max(worst, rep.max_equality_residual);
      ok = ok && rep.pass;
    }
  }
  std::ostringstream detail;
  detail << "max relative disagreement = " << worst
         << " over |z| <= 0.5, psi in {h0, h1, random deg <= 10} (tol 1e-6)";
  report("criterion 7: second-order Taylor identity", ok, detail.str());
}

// ---- criterion 8: translation operator suite --------------------------------

void criterion_translation() {
  auto basis = Basis::get(1, kN);
  bool ok = true;
  std::ostringstream detail;

  // tau_0 = Id within 1e-10.
  const double zero_shift[1] = {0.0};
  const Eigen::MatrixXd t0 = TranslationOp(basis, std::span<const double>(zero_shift, 1), kQ).dense();
  const double id_defect = (t0 - Eigen::MatrixXd::Identity(kN + 1, kN + 1)).cwiseAbs().maxCoeff();
  ok = ok && id_defect <= 1e-10;
  detail << "tau_0 defect " << id_defect;

  // L2 isometry within 1e-6 for |x| <= 1, psi of degree <= 20.
  double iso_defect = 0.0;
  std::uint64_t state = 12345;
  Eigen::VectorXd c = Eigen::VectorXd::Zero(kN + 1);
  for (int k = 0; k <= 20; ++k) {
    state ^= state << 13; state ^= state >> 7; state ^= state << 17;
    c[k] = static_cast<double>(static_cast<std::int64_t>(state % 2000) - 1000) / 500.0;
  }
  const HermiteRep psi(basis, c, 0.0);
  for (double x : {-1.0, -0.5, 0.25, 0.7, 1.0}) {
    const double xv[1] = {x};
    const HermiteRep shifted = translate(psi, std::span<const double>(xv, 1), kQ);
    iso_defect = std::max(iso_defect,
                          std::abs(norm_p(shifted, 0.0) - norm_p(psi, 0.0)) / norm_p(psi, 0.0));
  }
  ok = ok && iso_defect <= 1e-6;
  detail << ", isometry defect " << iso_defect;

  // Growth exponent at p = -1 over |x| in [1,3] bounded by 4, and the
  // Prop-2.2-style Lipschitz bound with a single fitted D.
  const auto bounds =
      translation_bound_fit(-1.0, kN, {1.0, 1.25, 1.5, 2.0, 2.5, 3.0}, kQ, 8008);
  ok = ok && bounds.growth.pass && bounds.growth.fitted_constant <= 4.0;
  detail << ", growth exponent " << bounds.growth.fitted_constant << " (bound 4)";
  ok = ok && bounds.lipschitz.pass;
  detail << ", fitted D " << bounds.lipschitz.fitted_constant << " spread "
         << bounds.lipschitz.stability_spread;

  // Pointwise verification of the fitted D on a sampled grid.
  const double fitted_d = bounds.lipschitz.fitted_constant;
  double margin = 0.0;
  for (double x1 : {-2.0, -1.0, 0.0, 1.0, 2.0}) {
    for (double x2 : {-1.5, -0.5, 0.5, 1.5}) {
      const double xv1[1] = {x1}, xv2[1] = {x2};
      const HermiteRep t1 = translate(psi, std::span<const double>(xv1, 1), kQ);
      const HermiteRep t2 = translate(psi, std::span<const double>(xv2, 1), kQ);
      Eigen::VectorXd diff = t1.coeffs() - t2.coeffs();
      const double lhs = norm_p(HermiteRep(basis, diff, -1.0), -1.0);
      const double rhs = fitted_d * norm_p(psi, -0.5) * std::abs(x1 - x2);
      margin = std::max(margin, lhs / rhs);
    }
  }
  ok = ok && margin <= 1.0 + 1e-12;
  detail << ", pointwise Lipschitz margin " << margin << " (<= 1)";

  report("criterion 8: translation operator suite", ok, detail.str());
}

// ---- criterion 9: hypothesis validators -------------------------------------

void criterion_hypotheses() {
  auto basis = Basis::get(1, 16);
  const double p = kP;
  const HermiteRep xi = HermiteRep::basis_function(basis, MultiIndex{{0}}, -p);

  // The separable example family passes.
  CoefficientSet good = CoefficientSet::all_zero(basis, p);
  good.sigma[0][0] = HermiteRep::basis_function(basis, MultiIndex{{0}}, p);
  good.b[0] = HermiteRep::basis_function(basis, MultiIndex{{1}}, p);
  good.F.kind = JumpCoefficient::Kind::separable;
  good.F.h = 0.5;
  good.F.profile = ScalarProfile{ScalarProfile::Kind::abs_pow, 1.0, 1.0};
  good.F.gamma = {HermiteRep::basis_function(basis, MultiIndex{{0}}, p + 0.5)};
  good.G.kind = JumpCoefficient::Kind::separable;
  good.G.h = 0.5;
  good.G.profile = ScalarProfile{ScalarProfile::Kind::constant, 1.0, 0.0};
  good.G.gamma = {HermiteRep::basis_function(basis, MultiIndex{{0}}, p)};
  LevyModel model{1,
                  JumpMeasure::atoms(1, JumpMeasure::Annulus::small, {{scalar(0.4), 1.0}}),
                  JumpMeasure::atoms(1, JumpMeasure::Annulus::large, {{scalar(1.5), 0.5}})};
  const auto good_rep = hypothesis_report(good, xi, model, HypothesisCeilings{}, 40);

  // f1 unbounded near |x| = 1 with a near-boundary atom: flagged on (F2).
  CoefficientSet bad = good;
  bad.F.profile = ScalarProfile{ScalarProfile::Kind::inv_one_minus, 1.0, 0.0};
  LevyModel bad_model{1,
                      JumpMeasure::atoms(1, JumpMeasure::Annulus::small, {{scalar(0.999), 1.0}}),
                      model.large};
  const auto bad_rep = hypothesis_report(bad, xi, bad_model, HypothesisCeilings{}, 40);
  bool f2_flagged = false;
  for (const auto& v : bad_rep["violations"]) f2_flagged = f2_flagged || (v == "F2");

  std::ostringstream detail;
  detail << "separable family pass = " << good_rep["pass"].get<bool>()
         << ", violating config flagged = " << f2_flagged;
  report("criterion 9: hypothesis validators", good_rep["pass"].get<bool>() && f2_flagged,
         detail.str());
}

// ---- criterion 10: determinism ----------------------------------------------

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
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

void criterion_determinism() {
  const nlohmann::json j = nlohmann::json::parse(R"({
    "space": {"d": 1, "N": 40, "p": 1.5, "Q": 88},
    "initial": {"xi": {"type": "hermite-sum", "terms": [{"n": [0], "c": 1.0}]}, "kappa": [0.0]},
    "coefficients": {
      "sigma": [[{"type": "hermite-sum", "terms": [{"n": [0], "c": 0.3}]}]],
      "b": [{"type": "hermite-sum", "terms": [{"n": [1], "c": 0.2}]}],
      "F": {"type": "mark"},
      "G": {"type": "zero"}
    },
    "noise": {"T": 1.0, "dt": 0.02,
              "small": {"type": "atoms", "atoms": [{"x": [0.5], "rate": 2.0}]},
              "large": {"type": "none"}, "seed": 90210, "paths": 10},
    "run": {"m": 1e6, "snapshot_paths": 2, "test_degree_max": 5}
  })");
  ExperimentConfig cfg = ExperimentConfig::from_json(j);
  const auto base = std::filesystem::temp_directory_path() / "translev_acceptance";
  std::filesystem::remove_all(base);
  const auto d1 = base / "run1";
  const auto d2 = base / "run2";
  const auto d3 = base / "run_threads";
  run_simulate(cfg, d1.string());
  run_simulate(cfg, d2.string());
  cfg.override_threads(4);
  run_simulate(cfg, d3.string());
  const bool rerun_same = dirs_byte_identical(d1, d2);
  const bool threads_same = dirs_byte_identical(d1, d3);

  cfg.override_threads(1);
  const auto v1 = base / "verify1";
  const auto v2 = base / "verify2";
  run_verify(cfg, "all", v1.string());
  run_verify(cfg, "all", v2.string());
  const bool verify_same = dirs_byte_identical(v1, v2);

  std::ostringstream detail;
  detail << "re-run identical = " << rerun_same << ", threads(4) identical = " << threads_same
         << ", verify re-run identical = " << verify_same;
  report("criterion 10: byte-identical determinism", rerun_same && threads_same && verify_same,
         detail.str());
}

}  // namespace

int main() {
  std::printf("translev acceptance suite\n");
  criterion_correspondence();
  criterion_interlacing();
  criterion_ito();
  criterion_weak_residual();
  criterion_monotonicity();
  criterion_identities();
  criterion_taylor();
  criterion_translation();
  criterion_hypotheses();
  criterion_determinism();
  if (g_failures == 0) {
    std::printf("all acceptance criteria passed\n");
    return 0;
  }
  std::printf("%d acceptance criteria FAILED\n", g_failures);
  return 1;
}
