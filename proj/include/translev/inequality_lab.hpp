#ifndef TRANSLEV_INEQUALITY_LAB_HPP
#define TRANSLEV_INEQUALITY_LAB_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "translev/hermite_rep.hpp"

namespace translev {

/// Outcome of one numerical certification run. Constants are fitted, never
/// asserted: `fitted_constant` is the extremal eigenvalue of the
/// corresponding quadratic form on the degree <= N-2 headroom block, and
/// `constants_by_level` tracks it across truncation levels.
struct InequalityReport {
  std::string id;
  int sample_count = 0;
  std::uint64_t seed = 0;
  double empirical_max_ratio = 0.0;      // signed max over random samples
  double empirical_max_abs_ratio = 0.0;  // for exact-zero cases
  double max_equality_residual = 0.0;    // for identity checks
  double fitted_constant = 0.0;
  std::vector<std::pair<int, double>> constants_by_level;
  double stability_spread = 0.0;  // (max-min)/max over levels
  bool inconclusive = false;      // tail threshold exceeded (not a failure)
  bool pass = false;
  double tolerance = 0.0;
  std::vector<double> sample_ratios;  // per-sample ratios, for CSV export
  nlohmann::json to_json() const;
  void write_sample_csv(std::ostream& os) const;
};

/// Constant-coefficient monotonicity: ratio
///   (2<phi, L phi>_p + ||A phi||^2_HS(p)) / ||phi||^2_p
/// over headroom samples, with sigma a d x r real matrix and b in R^d.
/// zero_tol > 0 additionally requires |ratio| <= zero_tol on every sample
/// (the integration-by-parts exact-zero case).
InequalityReport monotonicity_check(double p, const Eigen::MatrixXd& sigma,
                                    const Eigen::VectorXd& b, int samples, int max_degree,
                                    std::uint64_t seed, const std::vector<int>& stability_levels,
                                    double stability_tol = 0.10, double zero_tol = 0.0);

/// Special monotonicity identity and bound in <.,.>_{-p-1}:
///   sum alpha_i alpha_j [<d_i phi, d_j phi> + <phi, d2_ij phi>] = sum <T_i phi, d_j phi>,
/// residual <= equality_tol, with R fitted so the bilinear form is bounded
/// by R ||phi||^2 (sum |alpha_i|)^2.
InequalityReport spl_mono_check(double p, int dim, int samples, int max_degree, std::uint64_t seed,
                                const std::vector<int>& stability_levels,
                                double equality_tol = 1e-8, double stability_tol = 0.10);

/// First-order identity 2<phi, d_i phi>_{-p-1} = <T_i phi, phi>_{-p-1};
/// fitted constant is the empirical operator norm of T_i.
InequalityReport first_order_identity_check(double p, int dim, int samples, int max_degree,
                                            std::uint64_t seed,
                                            const std::vector<int>& stability_levels,
                                            double equality_tol = 1e-8,
                                            double stability_tol = 0.10);

/// Second-order Taylor identity for translations in <.,.>_{-p-1}:
///   ||tau_z psi||^2 - ||psi||^2 + 2 sum z_i <psi, d_i psi> =
///   int_0^1 (1-v) g(v) dv, with g from the translated derivative pairings,
/// by Gauss-Legendre quadrature in v; checks relative agreement.
InequalityReport taylor_jump_check(double p, const Eigen::VectorXd& z, const HermiteRep& psi,
                                   int quad_order, double rel_tol = 1e-6, int legendre_order = 24);

struct TranslationBoundReport {
  InequalityReport growth;     // operator-norm ratio growth exponent vs the degree bound
  InequalityReport lipschitz;  // fitted D(n) of the tau Lipschitz bound
  nlohmann::json to_json() const;
};

/// Translation bounds: (i) log-log growth exponent of
/// sup ||tau_x phi||_p / ||phi||_p over phi of degree <= N/2 for |x| in the
/// grid, compared against 2(floor|p|+1); (ii) Lipschitz constant D(n) of
/// ||tau_{x1}psi - tau_{x2}psi||_p <= D ||psi||_{p+1/2} |x1-x2| on |x| <= n.
TranslationBoundReport translation_bound_fit(double p, int max_degree,
                                             const std::vector<double>& x_grid, int quad_order,
                                             std::uint64_t seed, double radius = 2.0,
                                             double tail_threshold = 1e-6);

}  // namespace translev

#endif
