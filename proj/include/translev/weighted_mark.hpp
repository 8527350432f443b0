#ifndef TRANSLEV_WEIGHTED_MARK_HPP
#define TRANSLEV_WEIGHTED_MARK_HPP

#include <Eigen/Dense>

namespace translev {

/// A mark x with a weight: an atom (weight = rate) of a jump measure, or a
/// quadrature point of a density. nu-integrals are sums over these.
struct WeightedMark {
  Eigen::VectorXd x;
  double weight = 0.0;
};

}  // namespace translev

#endif
