#ifndef TRANSLEV_SDE_ENGINE_HPP
#define TRANSLEV_SDE_ENGINE_HPP

#include <Eigen/Dense>
#include <iosfwd>
#include <limits>
#include <memory>
#include <span>

#include "translev/coefficients.hpp"
#include "translev/levy_noise.hpp"

namespace translev {

enum class SampleFlag { regular, pre_small, post_small, pre_large, post_large, stopped };

const char* sample_flag_name(SampleFlag flag);

struct TrajectorySample {
  double t = 0.0;
  Eigen::VectorXd u;
  SampleFlag flag = SampleFlag::regular;
};

/// Pathwise numerical solution on the refined grid. The process is
/// right-continuous: at a jump time both the left limit (pre) and the
/// post-jump state are stored. `bracket` holds one predictable quadratic
/// covariation increment sigma_bar sigma_bar^T dt per consecutive sample
/// pair (zero across jumps).
struct Trajectory {
  std::vector<TrajectorySample> samples;
  std::vector<Eigen::MatrixXd> bracket;
  bool stopped = false;
  double theta_m = std::numeric_limits<double>::infinity();
  double explosion_threshold = 0.0;
  std::shared_ptr<const NoisePath> noise;

  int dim() const { return samples.empty() ? 0 : static_cast<int>(samples.front().u.size()); }
};

/// One Euler step with compensated small jumps, every coefficient frozen at
/// the step's left endpoint:
///   U' = U + bbar dt + sigbar dB + sum_events Fbar(U, x) - dt * int Fbar(U, x) nu(dx).
Eigen::VectorXd euler_step(const Eigen::VectorXd& u, double dt, const Eigen::VectorXd& dB,
                           std::span<const JumpEvent> small_events, const CoefficientSet& set,
                           const HermiteRep& xi, const JumpMeasure& nu_small, int quad_order);

/// Strong pathwise solve: Euler between grid points, small jumps applied at
/// their exact (grid-inserted) times with pre-jump left limits, large jumps
/// interlaced at their arrivals, stopping at the first grid time with
/// |U| >= m. Numerical blowup (non-finite state) throws; theta_m stopping
/// does not.
Trajectory solve_sde(const CoefficientSet& set, const HermiteRep& xi, const Eigen::VectorXd& kappa,
                     const LevyModel& model, std::shared_ptr<const NoisePath> noise, double dt,
                     double m, int quad_order);

/// Reduced equation (large jumps ignored) from state u0 at t_start through
/// the grid points of `noise` in (t_start, t_end]. solve_sde is exactly
/// this between consecutive large-jump arrivals, so interlacing by hand
/// reproduces it bitwise.
Trajectory solve_reduced(const CoefficientSet& set, const HermiteRep& xi, const Eigen::VectorXd& u0,
                         const LevyModel& model, std::shared_ptr<const NoisePath> noise,
                         double t_start, double t_end, double m, int quad_order);

/// The large-jump update U -> U + Gbar(U, x; xi).
Eigen::VectorXd apply_large_jump(const Eigen::VectorXd& u_pre, const Eigen::VectorXd& mark,
                                 const CoefficientSet& set, const HermiteRep& xi, int quad_order);

enum class ProbePerturbation { identical, reverse_small_sums, half_dt };

/// Stability probe: solve twice, the second run under a semantically
/// neutral perturbation, and report the sup-norm discrepancy over common
/// grid times.
double pathwise_uniqueness_probe(const CoefficientSet& set, const HermiteRep& xi,
                                 const Eigen::VectorXd& kappa, const LevyModel& model,
                                 std::shared_ptr<const NoisePath> noise, double dt, double m,
                                 int quad_order, ProbePerturbation perturbation);

/// Insert midpoints into every grid segment, splitting each Brownian
/// increment into two equal halves (deterministic refinement).
NoisePath refine_half_dt(const NoisePath& path);

/// CSV: header "t,U_1,...,U_d,flag", one row per sample.
void write_trajectory_csv(const Trajectory& traj, std::ostream& os);

}  // namespace translev

#endif
