#ifndef TRANSLEV_SPDE_ENGINE_HPP
#define TRANSLEV_SPDE_ENGINE_HPP

#include <limits>
#include <memory>
#include <span>
#include <vector>

#include "translev/sde_engine.hpp"

namespace translev {

struct SpdeSample {
  double t = 0.0;
  HermiteRep y;
  SampleFlag flag = SampleFlag::regular;
  double tail = 0.0;     // tail_mass of the snapshot at the rep's p tag
  double norm_sq = 0.0;  // matching squared norm, for relative gating
};

/// The translate solution Y_t = tau_{U_t} xi on the trajectory's sample
/// grid (pre and post states at jumps). Stopped times carry no snapshot.
struct SpdePath {
  std::vector<SpdeSample> samples;
  bool stopped = false;
  double theta_m = std::numeric_limits<double>::infinity();
  std::shared_ptr<const Trajectory> source;
};

SpdePath translate_solution(std::shared_ptr<const Trajectory> traj, const HermiteRep& xi,
                            int quad_order);

/// The finite-dimensional process recovered from a Y-path:
///   Z_t = int <b, Y_{s-}> ds + int <sigma, Y_{s-}> dB + small-jump part + large-jump part,
/// discretized with the same left-endpoint convention and the same
/// floating-point expressions as the SDE engine. One Z value per sample;
/// for paths produced by translate_solution(solve_sde(...)) with kappa = 0
/// the result equals U bitwise.
std::vector<Eigen::VectorXd> reconstruct_Z(const SpdePath& path, const CoefficientSet& set,
                                           const LevyModel& model, const NoisePath& noise);

struct ResidualSeries {
  std::vector<double> times;
  std::vector<double> values;
  double max_abs() const;
};

/// Weak-form residual of the SPDE against a fixed test function phi
/// (degree <= N-2), one cumulative value per sample time:
///   R_t(phi) = <Y_t - xi, phi> - sum A(Y)dB - sum Ltilde(Y) dt
///              - sum_small <(tau_F - Id)Y, phi> + compensator - sum_large <(tau_G - Id)Y, phi>.
/// For a stopped path, requesting t_max beyond theta_m is an error.
std::vector<ResidualSeries> weak_residual(
    const SpdePath& path, const CoefficientSet& set, const LevyModel& model,
    const NoisePath& noise, std::span<const HermiteRep> phis, double p, int quad_order,
    double t_max = std::numeric_limits<double>::infinity());

/// Ito-formula residual for a translated arbitrary driver X:
///   tau_{X_t}xi - tau_{X_0}xi + sum_i int <d_i tau_X xi, phi> dX^i
///   - 1/2 sum_ij int <d2_ij tau_X xi, phi> d[X^i,X^j]^c - jump corrections,
/// paired against each phi. Bracket increments come from the trajectory.
std::vector<ResidualSeries> ito_residual(const Trajectory& traj, const HermiteRep& xi,
                                         std::span<const HermiteRep> phis, double p,
                                         int quad_order);

struct GapSeries {
  std::vector<double> times;
  std::vector<double> mean_sq_gap;  // mean ||Y^A - Y^B||^2_{-p-1} over surviving pairs
  std::vector<double> survivors;    // surviving pair count per time
  double survival_fraction = 1.0;
};

/// Discrete E||Y^A - Y^B||^2_{-p-1} between two path ensembles driven by the
/// same noise, evaluated at common grid times (post states).
GapSeries uniqueness_gap(std::span<const SpdePath> a, std::span<const SpdePath> b, double p);

/// Max defect of the large-jump identity Y_{pi} = tau_{Gbar(U_{pi-},x)} Y_{pi-}
/// over the path, in the L^2 norm.
double jump_identity_max(const SpdePath& path, const CoefficientSet& set, const NoisePath& noise,
                         int quad_order);

}  // namespace translev

#endif
