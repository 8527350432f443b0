#include "translev/spde_engine.hpp"

#include <algorithm>
#include <cmath>

#include "translev/coeff_operator.hpp"
#include "translev/errors.hpp"
#include "translev/sde_internal.hpp"

namespace translev {

double ResidualSeries::max_abs() const {
  double m = 0.0;
  for (double v : values) m = std::max(m, std::abs(v));
  return m;
}

SpdePath translate_solution(std::shared_ptr<const Trajectory> traj, const HermiteRep& xi,
                            int quad_order) {
  if (!traj) throw_invalid("translate_solution: null trajectory");
  SpdePath path;
  path.source = traj;
  path.stopped = traj->stopped;
  path.theta_m = traj->theta_m;
  path.samples.reserve(traj->samples.size());
  const double p = xi.p_tag();
  for (const TrajectorySample& s : traj->samples) {
    if (s.flag == SampleFlag::stopped) break;  // Y is the off-state flag from theta_m on
    HermiteRep y = translate(
        xi, std::span<const double>(s.u.data(), static_cast<std::size_t>(s.u.size())), quad_order);
    SpdeSample out{s.t, y, s.flag, 0.0, 0.0};
    out.tail = tail_mass(y, p);
    out.norm_sq = inner_p(y, y, p);
    path.samples.push_back(std::move(out));
  }
  return path;
}

namespace {

// Classify consecutive sample transitions; event transitions share a time.
enum class Transition { continuous, small_jump, large_jump };

Transition classify(const SpdeSample& a, const SpdeSample& b) {
  if (b.t > a.t) return Transition::continuous;
  if (b.flag == SampleFlag::post_small) return Transition::small_jump;
  if (b.flag == SampleFlag::post_large) return Transition::large_jump;
  // stopped duplicates are filtered earlier; equal-time pre markers carry
  // the same state and are treated as no-ops.
  return Transition::small_jump;
}

Transition classify_traj(const TrajectorySample& a, const TrajectorySample& b) {
  if (b.t > a.t) return Transition::continuous;
  if (b.flag == SampleFlag::post_large) return Transition::large_jump;
  return Transition::small_jump;
}

}  // namespace

std::vector<Eigen::VectorXd> reconstruct_Z(const SpdePath& path, const CoefficientSet& set,
                                           const LevyModel& model, const NoisePath& noise) {
  if (path.samples.empty()) return {};
  const int d = noise.dim;
  const bool cont_active = [&] {
    for (const auto& row : set.sigma) {
      for (const HermiteRep& e : row) {
        if (!e.coeffs().isZero(0.0)) return true;
      }
    }
    for (const HermiteRep& e : set.b) {
      if (!e.coeffs().isZero(0.0)) return true;
    }
    return !set.F.is_zero() && !model.small.is_zero();
  }();

  std::vector<Eigen::VectorXd> z;
  z.reserve(path.samples.size());
  z.push_back(Eigen::VectorXd::Zero(d));

  std::size_t seg = 0;          // cursor into noise grid segments
  std::size_t small_cur = 0;    // cursor into small jump events
  std::size_t large_cur = 0;

  for (std::size_t i = 0; i + 1 < path.samples.size(); ++i) {
    const SpdeSample& a = path.samples[i];
    const SpdeSample& b = path.samples[i + 1];
    Eigen::VectorXd next = z.back();
    switch (classify(a, b)) {
      case Transition::continuous: {
        while (seg + 1 < noise.times.size() && noise.times[seg] != a.t) ++seg;
        if (seg + 1 >= noise.times.size() || noise.times[seg + 1] != b.t) {
          throw_invalid("reconstruct_Z: noise grid does not match the path");
        }
        if (cont_active) {
          const double seg_dt = noise.times[seg + 1] - noise.times[seg];
          Eigen::MatrixXd sig(d, d);
          Eigen::VectorXd bb(d);
          for (int r = 0; r < d; ++r) {
            for (int c = 0; c < d; ++c) {
              sig(r, c) =
                  duality(set.sigma[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)], a.y);
            }
            bb[r] = duality(set.b[static_cast<std::size_t>(r)], a.y);
          }
          const Eigen::VectorXd comp = detail::small_compensator(a.y, set, model.small, false);
          next += detail::continuous_increment(sig, bb, comp, seg_dt, noise.brownian[seg]);
        }
        ++seg;
        break;
      }
      case Transition::small_jump: {
        if (b.flag == SampleFlag::post_small) {
          while (small_cur < noise.small_jumps.size() && noise.small_jumps[small_cur].t < b.t) {
            ++small_cur;
          }
          if (small_cur >= noise.small_jumps.size() || noise.small_jumps[small_cur].t != b.t) {
            throw_invalid("reconstruct_Z: small jump event missing from the noise");
          }
          if (!set.F.is_zero()) next += set.F.eval(a.y, noise.small_jumps[small_cur].x);
          ++small_cur;
        }
        break;
      }
      case Transition::large_jump: {
        while (large_cur < noise.large_jumps.size() && noise.large_jumps[large_cur].t < b.t) {
          ++large_cur;
        }
        if (large_cur >= noise.large_jumps.size() || noise.large_jumps[large_cur].t != b.t) {
          throw_invalid("reconstruct_Z: large jump event missing from the noise");
        }
        if (!set.G.is_zero()) next += set.G.eval(a.y, noise.large_jumps[large_cur].x);
        ++large_cur;
        break;
      }
    }
    z.push_back(std::move(next));
  }
  return z;
}

std::vector<ResidualSeries> weak_residual(const SpdePath& path, const CoefficientSet& set,
                                          const LevyModel& model, const NoisePath& noise,
                                          std::span<const HermiteRep> phis, double p,
                                          int quad_order, double t_max) {
  if (path.samples.empty()) throw_invalid("weak_residual: empty path");
  if (path.stopped && t_max > path.theta_m) {
    throw_invalid("weak_residual: residuals are undefined from theta_m on");
  }
  const int headroom = path.samples.front().y.max_degree() - 2;
  for (const HermiteRep& phi : phis) {
    int deg = 0;
    for (std::size_t k = 0; k < phi.basis()->size(); ++k) {
      if (phi.coeffs()[static_cast<Eigen::Index>(k)] != 0.0) {
        deg = std::max(deg, phi.basis()->degree_of(k));
      }
    }
    if (deg > headroom) throw_invalid("weak_residual: test function exceeds degree headroom N-2");
  }
  (void)p;

  const int d = noise.dim;
  const HermiteRep& xi0 = path.samples.front().y;  // Y_0 = tau_{U_0} xi; xi itself when kappa = 0
  const bool sigma_active = [&] {
    for (const auto& row : set.sigma) {
      for (const HermiteRep& e : row) {
        if (!e.coeffs().isZero(0.0)) return true;
      }
    }
    return false;
  }();
  const bool drift_active = [&] {
    for (const HermiteRep& e : set.b) {
      if (!e.coeffs().isZero(0.0)) return true;
    }
    return false;
  }();
  const bool nu_active = !set.F.is_zero() && !model.small.is_zero();

  std::vector<ResidualSeries> out(phis.size());
  std::vector<double> acc(phis.size(), 0.0);
  std::vector<double> base(phis.size());
  for (std::size_t f = 0; f < phis.size(); ++f) base[f] = duality(xi0, phis[f]);

  auto emit = [&](const SpdeSample& s) {
    for (std::size_t f = 0; f < phis.size(); ++f) {
      out[f].times.push_back(s.t);
      out[f].values.push_back(duality(s.y, phis[f]) - base[f] - acc[f]);
    }
  };
  emit(path.samples.front());

  std::size_t seg = 0, small_cur = 0, large_cur = 0;
  for (std::size_t i = 0; i + 1 < path.samples.size(); ++i) {
    const SpdeSample& a = path.samples[i];
    const SpdeSample& b = path.samples[i + 1];
    if (b.t > t_max) break;
    switch (classify(a, b)) {
      case Transition::continuous: {
        while (seg + 1 < noise.times.size() && noise.times[seg] != a.t) ++seg;
        if (seg + 1 >= noise.times.size() || noise.times[seg + 1] != b.t) {
          throw_invalid("weak_residual: noise grid does not match the path");
        }
        const double seg_dt = noise.times[seg + 1] - noise.times[seg];
        // Generator pairing: Ltilde(Y) dt, noise-operator pairing A(Y) dB,
        // and the compensator of the small-jump event sum.
        HermiteRep gen = (sigma_active || drift_active)
                             ? continuous_generator(a.y, set.sigma, set.b)
                             : HermiteRep::zero(a.y.basis(), a.y.p_tag());
        Eigen::VectorXd comp_pairings = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(phis.size()));
        if (nu_active) {
          std::vector<HermiteRep> dY;
          dY.reserve(static_cast<std::size_t>(d));
          for (int ax = 0; ax < d; ++ax) dY.push_back(derivative_op(ax, a.y.basis()).apply(a.y));
          for (const WeightedMark& mark : model.small.integration_points()) {
            const Eigen::VectorXd fv = set.F.eval(a.y, mark.x);
            const HermiteRep ty = translate(
                a.y, std::span<const double>(fv.data(), static_cast<std::size_t>(fv.size())),
                quad_order);
            Eigen::VectorXd corr = ty.coeffs() - a.y.coeffs();
            for (std::size_t f = 0; f < phis.size(); ++f) {
              const double corr_pair = corr.dot(phis[f].coeffs());
              comp_pairings[static_cast<Eigen::Index>(f)] += mark.weight * corr_pair;
            }
            for (int ax = 0; ax < d; ++ax) corr += fv[ax] * dY[static_cast<std::size_t>(ax)].coeffs();
            gen.coeffs() += mark.weight * corr;
          }
        }
        std::vector<HermiteRep> a_ops;
        if (sigma_active) a_ops = diffusion_ops(a.y, set.sigma);
        for (std::size_t f = 0; f < phis.size(); ++f) {
          double inc = duality(gen, phis[f]) * seg_dt;
          if (sigma_active) {
            for (int j = 0; j < d; ++j) {
              inc += duality(a_ops[static_cast<std::size_t>(j)], phis[f]) * noise.brownian[seg][j];
            }
          }
          inc -= comp_pairings[static_cast<Eigen::Index>(f)] * seg_dt;
          acc[f] += inc;
        }
        ++seg;
        break;
      }
      case Transition::small_jump: {
        if (b.flag == SampleFlag::post_small) {
          while (small_cur < noise.small_jumps.size() && noise.small_jumps[small_cur].t < b.t) {
            ++small_cur;
          }
          if (small_cur >= noise.small_jumps.size() || noise.small_jumps[small_cur].t != b.t) {
            throw_invalid("weak_residual: small jump event missing from the noise");
          }
          if (!set.F.is_zero()) {
            const Eigen::VectorXd fv = set.F.eval(a.y, noise.small_jumps[small_cur].x);
            const HermiteRep ty = translate(
                a.y, std::span<const double>(fv.data(), static_cast<std::size_t>(fv.size())),
                quad_order);
            for (std::size_t f = 0; f < phis.size(); ++f) {
              acc[f] += duality(ty, phis[f]) - duality(a.y, phis[f]);
            }
          }
          ++small_cur;
        }
        break;
      }
      case Transition::large_jump: {
        while (large_cur < noise.large_jumps.size() && noise.large_jumps[large_cur].t < b.t) {
          ++large_cur;
        }
        if (large_cur >= noise.large_jumps.size() || noise.large_jumps[large_cur].t != b.t) {
          throw_invalid("weak_residual: large jump event missing from the noise");
        }
        if (!set.G.is_zero()) {
          const Eigen::VectorXd gv = set.G.eval(a.y, noise.large_jumps[large_cur].x);
          const HermiteRep ty = translate(
              a.y, std::span<const double>(gv.data(), static_cast<std::size_t>(gv.size())),
              quad_order);
          for (std::size_t f = 0; f < phis.size(); ++f) {
            acc[f] += duality(ty, phis[f]) - duality(a.y, phis[f]);
          }
        }
        ++large_cur;
        break;
      }
    }
    emit(b);
  }
  return out;
}

std::vector<ResidualSeries> ito_residual(const Trajectory& traj, const HermiteRep& xi,
                                         std::span<const HermiteRep> phis, double p,
                                         int quad_order) {
  if (traj.samples.empty()) throw_invalid("ito_residual: empty trajectory");
  (void)p;
  const int d = traj.dim();
  std::vector<CoeffOperator> deriv;
  deriv.reserve(static_cast<std::size_t>(d));
  for (int ax = 0; ax < d; ++ax) deriv.push_back(derivative_op(ax, xi.basis()));

  auto snapshot = [&](const Eigen::VectorXd& u) {
    return translate(xi, std::span<const double>(u.data(), static_cast<std::size_t>(u.size())),
                     quad_order);
  };

  std::vector<ResidualSeries> out(phis.size());
  std::vector<double> acc(phis.size(), 0.0);
  HermiteRep y0 = snapshot(traj.samples.front().u);
  std::vector<double> base(phis.size());
  for (std::size_t f = 0; f < phis.size(); ++f) base[f] = duality(y0, phis[f]);

  HermiteRep y_left = y0;
  auto emit = [&](double t, const HermiteRep& y) {
    for (std::size_t f = 0; f < phis.size(); ++f) {
      out[f].times.push_back(t);
      out[f].values.push_back(duality(y, phis[f]) - base[f] - acc[f]);
    }
  };
  emit(traj.samples.front().t, y0);

  for (std::size_t i = 0; i + 1 < traj.samples.size(); ++i) {
    const TrajectorySample& a = traj.samples[i];
    const TrajectorySample& b = traj.samples[i + 1];
    const Eigen::VectorXd dx = b.u - a.u;
    HermiteRep y_right = (dx.isZero(0.0)) ? y_left : snapshot(b.u);

    if (classify_traj(a, b) == Transition::continuous) {
      if (!dx.isZero(0.0)) {
        std::vector<HermiteRep> dY;
        dY.reserve(static_cast<std::size_t>(d));
        for (int ax = 0; ax < d; ++ax) dY.push_back(deriv[static_cast<std::size_t>(ax)].apply(y_left));
        const Eigen::MatrixXd& br = traj.bracket[i];
        const bool bracket_active = !br.isZero(0.0);
        for (std::size_t f = 0; f < phis.size(); ++f) {
          double inc = 0.0;
          for (int ax = 0; ax < d; ++ax) {
            if (dx[ax] != 0.0) inc -= duality(dY[static_cast<std::size_t>(ax)], phis[f]) * dx[ax];
          }
          if (bracket_active) {
            for (int r = 0; r < d; ++r) {
              for (int c = 0; c < d; ++c) {
                if (br(r, c) != 0.0) {
                  inc += 0.5 *
                         duality(deriv[static_cast<std::size_t>(r)].apply(
                                     dY[static_cast<std::size_t>(c)]),
                                 phis[f]) *
                         br(r, c);
                }
              }
            }
          }
          acc[f] += inc;
        }
      }
    } else {
      // Jump: the dX-integral contribution at the left limit plus the
      // correction term of the formula; their derivative parts cancel.
      std::vector<HermiteRep> dY;
      dY.reserve(static_cast<std::size_t>(d));
      for (int ax = 0; ax < d; ++ax) dY.push_back(deriv[static_cast<std::size_t>(ax)].apply(y_left));
      for (std::size_t f = 0; f < phis.size(); ++f) {
        double s = 0.0;
        for (int ax = 0; ax < d; ++ax) {
          if (dx[ax] != 0.0) s += duality(dY[static_cast<std::size_t>(ax)], phis[f]) * dx[ax];
        }
        const double corr = duality(y_right, phis[f]) - duality(y_left, phis[f]) + s;
        acc[f] += -s + corr;
      }
    }
    emit(b.t, y_right);
    y_left = y_right;
  }
  return out;
}

GapSeries uniqueness_gap(std::span<const SpdePath> a, std::span<const SpdePath> b, double p) {
  if (a.size() != b.size() || a.empty()) throw_invalid("uniqueness_gap: ensembles must pair up");
  const double q = -p - 1.0;
  GapSeries out;

  // Common post-state times of the first pair define the series grid.
  auto post_times = [](const SpdePath& path) {
    std::vector<double> t;
    for (std::size_t i = 0; i < path.samples.size(); ++i) {
      if (i + 1 == path.samples.size() || path.samples[i + 1].t != path.samples[i].t) {
        t.push_back(path.samples[i].t);
      }
    }
    return t;
  };
  const std::vector<double> ta = post_times(a[0]);
  const std::vector<double> tb = post_times(b[0]);
  std::set_intersection(ta.begin(), ta.end(), tb.begin(), tb.end(), std::back_inserter(out.times));
  if (out.times.size() < 2) throw_invalid("uniqueness_gap: grids share too few times");

  out.mean_sq_gap.assign(out.times.size(), 0.0);
  out.survivors.assign(out.times.size(), 0.0);

  std::size_t surviving_to_end = 0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const Eigen::ArrayXd w = weight_array(*a[k].samples.front().y.basis(), 2.0 * q);
    std::size_t ia = 0, ib = 0;
    bool full = true;
    for (std::size_t ti = 0; ti < out.times.size(); ++ti) {
      const double t = out.times[ti];
      auto advance = [&](const SpdePath& path, std::size_t& idx) -> const SpdeSample* {
        const SpdeSample* found = nullptr;
        while (idx < path.samples.size() && path.samples[idx].t <= t) {
          if (path.samples[idx].t == t) found = &path.samples[idx];
          ++idx;
        }
        return found;
      };
      std::size_t ia2 = ia, ib2 = ib;
      const SpdeSample* sa = advance(a[k], ia2);
      const SpdeSample* sb = advance(b[k], ib2);
      ia = ia2;
      ib = ib2;
      if (sa == nullptr || sb == nullptr) {
        full = false;
        break;
      }
      const Eigen::ArrayXd diff = sa->y.coeffs().array() - sb->y.coeffs().array();
      out.mean_sq_gap[ti] += (diff * diff * w).sum();
      out.survivors[ti] += 1.0;
    }
    if (full) ++surviving_to_end;
  }
  for (std::size_t ti = 0; ti < out.times.size(); ++ti) {
    if (out.survivors[ti] > 0.0) out.mean_sq_gap[ti] /= out.survivors[ti];
  }
  out.survival_fraction = static_cast<double>(surviving_to_end) / static_cast<double>(a.size());
  return out;
}

double jump_identity_max(const SpdePath& path, const CoefficientSet& set, const NoisePath& noise,
                         int quad_order) {
  double worst = 0.0;
  std::size_t large_cur = 0;
  for (std::size_t i = 0; i + 1 < path.samples.size(); ++i) {
    const SpdeSample& pre = path.samples[i];
    const SpdeSample& post = path.samples[i + 1];
    if (post.flag != SampleFlag::post_large || post.t != pre.t) continue;
    while (large_cur < noise.large_jumps.size() && noise.large_jumps[large_cur].t < post.t) {
      ++large_cur;
    }
    if (large_cur >= noise.large_jumps.size()) break;
    const Eigen::VectorXd gv = set.G.eval(pre.y, noise.large_jumps[large_cur].x);
    ++large_cur;
    const HermiteRep shifted = translate(
        pre.y, std::span<const double>(gv.data(), static_cast<std::size_t>(gv.size())), quad_order);
    worst = std::max(worst, (shifted.coeffs() - post.y.coeffs()).norm());
  }
  return worst;
}

}  // namespace translev
