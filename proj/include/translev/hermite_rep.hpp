#ifndef TRANSLEV_HERMITE_REP_HPP
#define TRANSLEV_HERMITE_REP_HPP

#include <Eigen/Dense>
#include <functional>
#include <iosfwd>
#include <memory>
#include <span>

#include "translev/hermite.hpp"
#include "translev/multi_index.hpp"

namespace translev {

/// Truncated Hermite-coefficient representation of an element of S_p or
/// S_{-p}: c_n = <f, h_n> over |n| <= N in graded-lex order. The index p is
/// a bookkeeping tag recording which space the object is meant to inhabit;
/// under truncation every weighted norm is finite regardless of the tag.
class HermiteRep {
 public:
  HermiteRep(std::shared_ptr<const Basis> basis, Eigen::VectorXd coeffs, double p_tag = 0.0);

  static HermiteRep zero(std::shared_ptr<const Basis> basis, double p_tag = 0.0);
  /// Unit coefficient at multi-index n (the basis function h_n).
  static HermiteRep basis_function(std::shared_ptr<const Basis> basis, const MultiIndex& n,
                                   double p_tag = 0.0);
  /// Truncated delta distribution at x0: c_n = h_n(x0).
  static HermiteRep delta_at(std::shared_ptr<const Basis> basis, std::span<const double> x0,
                             double p_tag = 0.0);

  const std::shared_ptr<const Basis>& basis() const { return basis_; }
  const Eigen::VectorXd& coeffs() const { return coeffs_; }
  Eigen::VectorXd& coeffs() { return coeffs_; }
  int dim() const { return basis_->dim(); }
  int max_degree() const { return basis_->max_degree(); }
  double p_tag() const { return p_tag_; }
  void set_p_tag(double p) { p_tag_ = p; }
  bool same_shape(const HermiteRep& other) const {
    return dim() == other.dim() && max_degree() == other.max_degree();
  }

 private:
  std::shared_ptr<const Basis> basis_;
  Eigen::VectorXd coeffs_;
  double p_tag_;
};

/// Diagonal weight vector (2|n|+d)^{2p} over the basis enumeration.
Eigen::ArrayXd weight_array(const Basis& basis, double two_p_exponent);

/// <f,g>_p = sum_n (2|n|+d)^{2p} c_n(f) c_n(g).
double inner_p(const HermiteRep& f, const HermiteRep& g, double p);

/// ||f||_p = sqrt(<f,f>_p).
double norm_p(const HermiteRep& f, double p);

/// Duality pairing sum_n u_n phi_n (extends the L^2 inner product).
double duality(const HermiteRep& u, const HermiteRep& phi);

/// Coefficients <f, h_n> by tensor Gauss-Hermite quadrature of order Q per
/// axis. Exact (to roundoff) whenever f h_n e^{|x|^2} is a polynomial of
/// degree <= 2Q-1 in each coordinate.
HermiteRep project(const std::function<double(std::span<const double>)>& f,
                   std::shared_ptr<const Basis> basis, int quad_order, double p_tag = 0.0);

/// Weighted mass of the top two degree shells {N-1, N}; the truncation
/// self-diagnostic gating accuracy claims.
double tail_mass(const HermiteRep& f, double p);

/// JSON object {d, N, p, coeffs:[...]} with coefficients in graded-lex order.
void write_rep_json(const HermiteRep& f, std::ostream& os);
HermiteRep read_rep_json(std::istream& is);

}  // namespace translev

#endif
