#include "translev/sde_engine.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>

#include "translev/errors.hpp"
#include "translev/sde_internal.hpp"

namespace translev {

const char* sample_flag_name(SampleFlag flag) {
  switch (flag) {
    case SampleFlag::regular: return "regular";
    case SampleFlag::pre_small: return "pre_small";
    case SampleFlag::post_small: return "post_small";
    case SampleFlag::pre_large: return "pre_large";
    case SampleFlag::post_large: return "post_large";
    case SampleFlag::stopped: return "stopped";
  }
  return "unknown";
}

namespace detail {

Eigen::VectorXd continuous_increment(const Eigen::MatrixXd& sig, const Eigen::VectorXd& bb,
                                     const Eigen::VectorXd& comp, double dt,
                                     const Eigen::VectorXd& dB) {
  Eigen::VectorXd incr = bb * dt;
  incr.noalias() += sig * dB;
  incr -= comp * dt;
  return incr;
}

Eigen::VectorXd small_compensator(const HermiteRep& y_left, const CoefficientSet& set,
                                  const JumpMeasure& nu_small, bool reverse) {
  const int d = y_left.dim();
  Eigen::VectorXd comp = Eigen::VectorXd::Zero(d);
  if (set.F.is_zero() || nu_small.is_zero()) return comp;
  const auto& pts = nu_small.integration_points();
  if (!reverse) {
    for (const WeightedMark& m : pts) comp += m.weight * set.F.eval(y_left, m.x);
  } else {
    for (auto it = pts.rbegin(); it != pts.rend(); ++it) comp += it->weight * set.F.eval(y_left, it->x);
  }
  return comp;
}

}  // namespace detail

namespace {

void check_finite_state(const Eigen::VectorXd& u, double t) {
  if (!u.allFinite()) {
    std::ostringstream msg;
    msg << "numerical blowup at t=" << t << ", state=(";
    for (Eigen::Index i = 0; i < u.size(); ++i) msg << (i ? "," : "") << u[i];
    msg << ")";
    throw_numeric(msg.str());
  }
}

struct EngineState {
  Eigen::VectorXd u;
  bool stopped = false;
  double theta = std::numeric_limits<double>::infinity();
};

bool coefficients_active(const CoefficientSet& set) {
  for (const auto& row : set.sigma) {
    for (const HermiteRep& e : row) {
      if (!e.coeffs().isZero(0.0)) return true;
    }
  }
  for (const HermiteRep& e : set.b) {
    if (!e.coeffs().isZero(0.0)) return true;
  }
  return false;
}

// Advance over grid segments (seg_begin, seg_end], applying the continuous
// Euler update on each segment and small jumps at their grid times. Large
// jumps are the callers' business (window boundaries).
void advance_window(Trajectory& traj, EngineState& st, const CoefficientSet& set,
                    const HermiteRep& xi, const LevyModel& model, const NoisePath& noise,
                    std::size_t seg_begin, std::size_t seg_end, double m, int quad_order,
                    bool reverse_compensator) {
  const int d = noise.dim;
  const bool cont_active =
      coefficients_active(set) || (!set.F.is_zero() && !model.small.is_zero());
  std::size_t small_cursor = 0;
  while (small_cursor < noise.small_jumps.size() &&
         noise.small_jumps[small_cursor].t <= noise.times[seg_begin]) {
    ++small_cursor;
  }

  for (std::size_t k = seg_begin; k < seg_end && !st.stopped; ++k) {
    const double t0 = noise.times[k];
    const double t1 = noise.times[k + 1];
    const double seg_dt = t1 - t0;
    Eigen::MatrixXd bracket = Eigen::MatrixXd::Zero(d, d);
    if (cont_active) {
      const BarValues bar = eval_bar(st.u, xi, set, quad_order);
      const Eigen::VectorXd comp =
          detail::small_compensator(bar.translated, set, model.small, reverse_compensator);
      st.u += detail::continuous_increment(bar.sigma, bar.b, comp, seg_dt,
                                           noise.brownian[k]);
      bracket = bar.sigma * bar.sigma.transpose() * seg_dt;
    }
    check_finite_state(st.u, t1);

    // Small jumps landing exactly at this grid time, applied at the left limit.
    std::vector<const JumpEvent*> here;
    while (small_cursor < noise.small_jumps.size() && noise.small_jumps[small_cursor].t == t1) {
      here.push_back(&noise.small_jumps[small_cursor]);
      ++small_cursor;
    }
    if (reverse_compensator) std::reverse(here.begin(), here.end());

    if (here.empty()) {
      traj.samples.push_back({t1, st.u, SampleFlag::regular});
      traj.bracket.push_back(std::move(bracket));
    } else {
      traj.samples.push_back({t1, st.u, SampleFlag::pre_small});
      traj.bracket.push_back(std::move(bracket));
      for (std::size_t e = 0; e < here.size(); ++e) {
        if (e > 0) {
          traj.samples.push_back({t1, st.u, SampleFlag::pre_small});
          traj.bracket.push_back(Eigen::MatrixXd::Zero(d, d));
        }
        if (!set.F.is_zero()) {
          const HermiteRep y_pre = translate(
              xi, std::span<const double>(st.u.data(), static_cast<std::size_t>(d)), quad_order);
          st.u += set.F.eval(y_pre, here[e]->x);
        }
        check_finite_state(st.u, t1);
        traj.samples.push_back({t1, st.u, SampleFlag::post_small});
        traj.bracket.push_back(Eigen::MatrixXd::Zero(d, d));
        if (st.u.norm() >= m) {
          st.stopped = true;
          st.theta = t1;
          traj.samples.back().flag = SampleFlag::stopped;
          return;
        }
      }
    }
    if (st.u.norm() >= m) {
      st.stopped = true;
      st.theta = t1;
      traj.samples.back().flag = SampleFlag::stopped;
      return;
    }
  }
}

std::size_t grid_position(const NoisePath& noise, double t) {
  const auto it = std::lower_bound(noise.times.begin(), noise.times.end(), t);
  if (it == noise.times.end() || *it != t) throw_invalid("time not on the noise grid");
  return static_cast<std::size_t>(std::distance(noise.times.begin(), it));
}

Trajectory solve_window_driver(const CoefficientSet& set, const HermiteRep& xi,
                               const Eigen::VectorXd& start, const LevyModel& model,
                               std::shared_ptr<const NoisePath> noise, double t_start, double t_end,
                               double m, int quad_order, bool with_large_jumps,
                               bool reverse_compensator) {
  if (static_cast<int>(start.size()) != noise->dim) throw_invalid("solve: dimension mismatch");
  if (xi.dim() != noise->dim) throw_invalid("solve: initial condition dimension mismatch");
  if (!(m > start.norm())) throw_invalid("solve: explosion threshold must exceed |initial state|");

  Trajectory traj;
  traj.noise = noise;
  traj.explosion_threshold = m;
  EngineState st{start, false, std::numeric_limits<double>::infinity()};

  const std::size_t seg_begin = grid_position(*noise, t_start);
  const std::size_t seg_end = grid_position(*noise, t_end);
  traj.samples.push_back({t_start, st.u, SampleFlag::regular});

  if (!with_large_jumps) {
    advance_window(traj, st, set, xi, model, *noise, seg_begin, seg_end, m, quad_order,
                   reverse_compensator);
  } else {
    std::size_t window_start = seg_begin;
    for (const JumpEvent& arrival : noise->large_jumps) {
      if (st.stopped) break;
      if (arrival.t <= noise->times[seg_begin] || arrival.t > noise->times[seg_end]) continue;
      const std::size_t arrival_pos = grid_position(*noise, arrival.t);
      advance_window(traj, st, set, xi, model, *noise, window_start, arrival_pos, m, quad_order,
                     reverse_compensator);
      window_start = arrival_pos;
      if (st.stopped) break;
      // Apply Gbar at the arrival; the last emitted sample is the left limit.
      traj.samples.push_back({arrival.t, st.u, SampleFlag::pre_large});
      traj.bracket.push_back(Eigen::MatrixXd::Zero(noise->dim, noise->dim));
      st.u = apply_large_jump(st.u, arrival.x, set, xi, quad_order);
      check_finite_state(st.u, arrival.t);
      traj.samples.push_back({arrival.t, st.u, SampleFlag::post_large});
      traj.bracket.push_back(Eigen::MatrixXd::Zero(noise->dim, noise->dim));
      if (st.u.norm() >= m) {
        st.stopped = true;
        st.theta = arrival.t;
        traj.samples.back().flag = SampleFlag::stopped;
      }
    }
    if (!st.stopped) {
      advance_window(traj, st, set, xi, model, *noise, window_start, seg_end, m, quad_order,
                     reverse_compensator);
    }
  }

  traj.stopped = st.stopped;
  traj.theta_m = st.theta;
  return traj;
}

}  // namespace

Eigen::VectorXd euler_step(const Eigen::VectorXd& u, double dt, const Eigen::VectorXd& dB,
                           std::span<const JumpEvent> small_events, const CoefficientSet& set,
                           const HermiteRep& xi, const JumpMeasure& nu_small, int quad_order) {
  if (!u.allFinite() || !dB.allFinite() || !std::isfinite(dt)) {
    throw_invalid("euler_step: inputs must be finite");
  }
  const BarValues bar = eval_bar(u, xi, set, quad_order);
  const Eigen::VectorXd comp = detail::small_compensator(bar.translated, set, nu_small, false);
  Eigen::VectorXd out = u + detail::continuous_increment(bar.sigma, bar.b, comp, dt, dB);
  for (const JumpEvent& e : small_events) {
    if (!set.F.is_zero()) out += set.F.eval(bar.translated, e.x);
  }
  check_finite_state(out, dt);
  return out;
}

Trajectory solve_sde(const CoefficientSet& set, const HermiteRep& xi, const Eigen::VectorXd& kappa,
                     const LevyModel& model, std::shared_ptr<const NoisePath> noise, double dt,
                     double m, int quad_order) {
  if (dt != noise->dt) throw_invalid("solve_sde: dt must match the noise grid");
  const double t_end = noise->times.back();
  return solve_window_driver(set, xi, kappa, model, std::move(noise), 0.0, t_end, m, quad_order,
                             true, false);
}

Trajectory solve_reduced(const CoefficientSet& set, const HermiteRep& xi, const Eigen::VectorXd& u0,
                         const LevyModel& model, std::shared_ptr<const NoisePath> noise,
                         double t_start, double t_end, double m, int quad_order) {
  return solve_window_driver(set, xi, u0, model, std::move(noise), t_start, t_end, m, quad_order,
                             false, false);
}

Eigen::VectorXd apply_large_jump(const Eigen::VectorXd& u_pre, const Eigen::VectorXd& mark,
                                 const CoefficientSet& set, const HermiteRep& xi, int quad_order) {
  if (set.G.is_zero()) return u_pre;
  const HermiteRep y_pre = translate(
      xi, std::span<const double>(u_pre.data(), static_cast<std::size_t>(u_pre.size())), quad_order);
  return u_pre + set.G.eval(y_pre, mark);
}

NoisePath refine_half_dt(const NoisePath& path) {
  NoisePath out;
  out.dim = path.dim;
  out.T = path.T;
  out.dt = path.dt / 2.0;
  out.seed = path.seed;
  out.small_jumps = path.small_jumps;
  out.large_jumps = path.large_jumps;
  out.times.push_back(path.times.front());
  out.uniform_index.push_back(0);
  for (std::size_t k = 0; k + 1 < path.times.size(); ++k) {
    const double mid = 0.5 * (path.times[k] + path.times[k + 1]);
    const Eigen::VectorXd half = 0.5 * path.brownian[k];
    if (mid > path.times[k] && mid < path.times[k + 1]) {
      out.times.push_back(mid);
      out.uniform_index.push_back(-1);
      out.brownian.push_back(half);
      out.times.push_back(path.times[k + 1]);
      out.uniform_index.push_back(path.uniform_index[k + 1]);
      out.brownian.push_back(path.brownian[k] - half);
    } else {
      out.times.push_back(path.times[k + 1]);
      out.uniform_index.push_back(path.uniform_index[k + 1]);
      out.brownian.push_back(path.brownian[k]);
    }
  }
  return out;
}

double pathwise_uniqueness_probe(const CoefficientSet& set, const HermiteRep& xi,
                                 const Eigen::VectorXd& kappa, const LevyModel& model,
                                 std::shared_ptr<const NoisePath> noise, double dt, double m,
                                 int quad_order, ProbePerturbation perturbation) {
  const Trajectory base = solve_sde(set, xi, kappa, model, noise, dt, m, quad_order);

  Trajectory other;
  switch (perturbation) {
    case ProbePerturbation::identical:
      other = solve_sde(set, xi, kappa, model, noise, dt, m, quad_order);
      break;
    case ProbePerturbation::reverse_small_sums:
      other = solve_window_driver(set, xi, kappa, model, noise, 0.0, noise->times.back(), m,
                                  quad_order, true, true);
      break;
    case ProbePerturbation::half_dt: {
      auto refined = std::make_shared<const NoisePath>(refine_half_dt(*noise));
      other = solve_sde(set, xi, kappa, model, refined, refined->dt, m, quad_order);
      break;
    }
  }

  // Sup-norm discrepancy over common grid times (post states).
  double sup = 0.0;
  std::size_t j = 0;
  for (std::size_t i = 0; i < base.samples.size(); ++i) {
    const TrajectorySample& a = base.samples[i];
    while (j < other.samples.size() && other.samples[j].t < a.t) ++j;
    std::size_t jj = j;
    const TrajectorySample* match = nullptr;
    while (jj < other.samples.size() && other.samples[jj].t == a.t) {
      match = &other.samples[jj];
      ++jj;
    }
    // Compare the final (post) state at each common time.
    if (match != nullptr && (i + 1 == base.samples.size() || base.samples[i + 1].t != a.t)) {
      sup = std::max(sup, (a.u - match->u).lpNorm<Eigen::Infinity>());
    }
  }
  return sup;
}

void write_trajectory_csv(const Trajectory& traj, std::ostream& os) {
  const int d = traj.dim();
  os << "t";
  for (int i = 1; i <= d; ++i) os << ",U_" << i;
  os << ",flag\n";
  char buf[64];
  for (const TrajectorySample& s : traj.samples) {
    std::snprintf(buf, sizeof(buf), "%.17g", s.t);
    os << buf;
    for (Eigen::Index i = 0; i < s.u.size(); ++i) {
      std::snprintf(buf, sizeof(buf), ",%.17g", s.u[i]);
      os << buf;
    }
    os << "," << sample_flag_name(s.flag) << "\n";
  }
}

}  // namespace translev
