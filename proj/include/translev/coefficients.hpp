#ifndef TRANSLEV_COEFFICIENTS_HPP
#define TRANSLEV_COEFFICIENTS_HPP

#include <Eigen/Dense>
#include <memory>
#include <vector>

#include <json.hpp>

#include "translev/coeff_operator.hpp"
#include "translev/hermite_rep.hpp"
#include "translev/levy_noise.hpp"

namespace translev {

/// Scalar mark profile: the f1 / g1 factor of a separable jump coefficient.
struct ScalarProfile {
  enum class Kind { constant, abs_pow, inv_one_minus };
  Kind kind = Kind::constant;
  double c = 1.0;
  double k = 0.0;  // exponent for abs_pow: c |x|^k

  double operator()(const Eigen::VectorXd& x) const;
  /// max |f1| over a finite set of marks (the support of an atom measure or
  /// the quadrature points of a truncated density).
  double sup_over(const std::vector<WeightedMark>& marks) const;
};

/// Jump coefficient in the separable form h f1(x) (<gamma_1,y>,...,<gamma_d,y>)^t,
/// the built-in mark-identity family F(y,x) = x, or zero.
struct JumpCoefficient {
  enum class Kind { zero, separable, mark_identity };
  Kind kind = Kind::zero;
  double h = 1.0;
  ScalarProfile profile;
  std::vector<HermiteRep> gamma;

  bool is_zero() const { return kind == Kind::zero; }
  Eigen::VectorXd eval(const HermiteRep& y, const Eigen::VectorXd& x) const;
};

/// SDE/SPDE coefficient data: sigma (d x d) and b (d) as elements of S_p,
/// plus the small-jump coefficient F and large-jump coefficient G.
struct CoefficientSet {
  std::shared_ptr<const Basis> basis;
  double p = 1.0;
  std::vector<std::vector<HermiteRep>> sigma;
  std::vector<HermiteRep> b;
  JumpCoefficient F;
  JumpCoefficient G;

  static CoefficientSet all_zero(std::shared_ptr<const Basis> basis, double p);
  int dim() const { return basis->dim(); }
  /// beta of hypothesis (sigma b): sup over entries of ||sigma_ij||_p, ||b_i||_p.
  double beta() const;
  bool all_coeffs_zero() const;
};

/// F evaluated at a small mark; errors if |x| is outside (0, 1).
Eigen::VectorXd F_eval(const HermiteRep& y, const Eigen::VectorXd& x, const CoefficientSet& set);
/// G evaluated at a large mark; errors if |x| < 1.
Eigen::VectorXd G_eval(const HermiteRep& y, const Eigen::VectorXd& x, const CoefficientSet& set);

/// Barred coefficients: duality pairings against tau_z xi. eval_bar shares
/// the translated rep so engines translate once per step.
struct BarValues {
  Eigen::MatrixXd sigma;
  Eigen::VectorXd b;
  HermiteRep translated;
};
BarValues eval_bar(const Eigen::VectorXd& z, const HermiteRep& xi, const CoefficientSet& set,
                   int quad_order);
Eigen::MatrixXd bar_sigma(const Eigen::VectorXd& z, const HermiteRep& xi,
                          const CoefficientSet& set, int quad_order);
Eigen::VectorXd bar_b(const Eigen::VectorXd& z, const HermiteRep& xi, const CoefficientSet& set,
                      int quad_order);

/// Thresholds turning the coefficient finiteness hypotheses into flags.
struct HypothesisCeilings {
  double sup_cx = 1e2;
  double integral_cx2 = 1e4;
  double sup_f0 = 1e2;
  double integral_f0_sq = 1e4;
  double g_bound = 1e3;
};

/// Machine-checkable report for (sigma b), (F1)-(F3), (G1)-(G2), (loc-Lip).
/// Never throws on violations; they are flagged in the "violations" array.
nlohmann::json hypothesis_report(const CoefficientSet& set, const HermiteRep& xi,
                                 const LevyModel& model, const HypothesisCeilings& ceilings,
                                 int quad_order, std::uint64_t seed = 20240901);

}  // namespace translev

#endif
