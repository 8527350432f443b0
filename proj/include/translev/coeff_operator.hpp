#ifndef TRANSLEV_COEFF_OPERATOR_HPP
#define TRANSLEV_COEFF_OPERATOR_HPP

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <iosfwd>
#include <memory>
#include <span>
#include <vector>

#include "translev/hermite_rep.hpp"
#include "translev/weighted_mark.hpp"

namespace translev {

/// Sparse linear map on Hermite coefficient vectors over a shared truncated
/// basis: (O f)_m = sum_n M_{m,n} c_n. One matrix per operator acts on
/// distribution coefficients; the dual action on test functions is the
/// transpose.
class CoeffOperator {
 public:
  CoeffOperator(std::shared_ptr<const Basis> basis, Eigen::SparseMatrix<double> m);

  const std::shared_ptr<const Basis>& basis() const { return basis_; }
  const Eigen::SparseMatrix<double>& matrix() const { return matrix_; }

  HermiteRep apply(const HermiteRep& f) const;
  /// this after other: (this*other) f = this(other(f)).
  CoeffOperator compose(const CoeffOperator& other) const;
  CoeffOperator transpose() const;
  CoeffOperator scaled(double a) const;
  CoeffOperator plus(const CoeffOperator& other) const;

  static CoeffOperator identity(std::shared_ptr<const Basis> basis);

  /// Coordinate-format sparse text: one "row col value" line per entry,
  /// row-major, 17 significant digits.
  void write_coordinate_text(std::ostream& os) const;

 private:
  std::shared_ptr<const Basis> basis_;
  Eigen::SparseMatrix<double> matrix_;
};

/// Coefficient-space derivative along an axis, fixed by the duality
/// extension <d_i u, h_m> = -<u, d_i h_m> and the Hermite recurrence:
///   (d_i u)_m = sqrt((m_i+1)/2) c_{m+e_i} - sqrt(m_i/2) c_{m-e_i}.
/// Output at shell N+1 is dropped (couples shells |n| +/- 1 only).
CoeffOperator derivative_op(int axis, std::shared_ptr<const Basis> basis);

/// Adjoint in <.,.>_p: O*_p = W^{-2p} O^T W^{2p}, W = diag(2|n|+d).
CoeffOperator adjoint_in_p(const CoeffOperator& op, double p);

/// The defect operator T_i = d_i + d_i*_p between the derivative and minus
/// its adjoint (so d_i*_p = -d_i + T_i). Bounded uniformly in the
/// truncation level; its empirical norm is reported by the inequality lab.
CoeffOperator adjoint_defect_op(int axis, std::shared_ptr<const Basis> basis, double p);

/// Translation by x, factored into per-axis 1-d matrices
/// T^(k)_{mn}(x_k) = <tau_{x_k} h_n, h_m> computed by Gauss-Hermite
/// quadrature (exact at polynomial level for Q >= N+1). Application
/// contracts axis by axis over the full tensor grid; x = 0 axes are exact
/// identities.
class TranslationOp {
 public:
  TranslationOp(std::shared_ptr<const Basis> basis, std::span<const double> x, int quad_order);

  HermiteRep apply(const HermiteRep& f) const;
  Eigen::VectorXd apply_coeffs(const Eigen::VectorXd& c) const;
  /// Assembled dense matrix on the truncated simplex index set.
  Eigen::MatrixXd dense() const;
  const Eigen::MatrixXd& axis_matrix(int axis) const {
    ensure_axis_matrices();
    return *axis_matrices_[static_cast<std::size_t>(axis)];
  }

 private:
  void ensure_axis_matrices() const;

  std::shared_ptr<const Basis> basis_;
  int quad_order_;
  mutable std::vector<std::shared_ptr<const Eigen::MatrixXd>> axis_matrices_;
  std::vector<double> shift_;
};

/// One-shot translated rep: TranslationOp(basis, x, Q).apply(f). The 1-d
/// factor matrices are cached per (N, Q, x-component) behind the scenes.
HermiteRep translate(const HermiteRep& f, std::span<const double> x, int quad_order);

/// Assembled CoeffOperator form of tau_x (dense stored sparse); for
/// inspection, adjoint tests, and operator-norm fits.
CoeffOperator translation_matrix(std::span<const double> x, std::shared_ptr<const Basis> basis,
                                 int quad_order);

/// First-order noise operators of the SPDE: A_j rho = -sum_i <sigma_ij, rho> d_i rho.
std::vector<HermiteRep> diffusion_ops(const HermiteRep& rho,
                                      const std::vector<std::vector<HermiteRep>>& sigma);

/// Second-order generator of the continuous part:
///   L rho = 1/2 sum_ij (S S^t)_ij d2_ij rho - sum_i <b_i, rho> d_i rho,
/// with S_ij = <sigma_ij, rho>.
HermiteRep continuous_generator(const HermiteRep& rho,
                                const std::vector<std::vector<HermiteRep>>& sigma,
                                const std::vector<HermiteRep>& b);

/// Full generator including the small-jump correction,
///   Ltilde(rho) = L rho + sum_k w_k (tau_{F(rho,x_k)} - Id + sum_i F^i(rho,x_k) d_i) rho,
/// with the jump coefficient supplied as a callable and the measure as its
/// integration points.
HermiteRep levy_generator(
    const HermiteRep& rho, const std::vector<std::vector<HermiteRep>>& sigma,
    const std::vector<HermiteRep>& b,
    const std::function<Eigen::VectorXd(const HermiteRep&, const Eigen::VectorXd&)>& jump_coeff,
    std::span<const WeightedMark> nu_small, int quad_order);

}  // namespace translev

#endif
