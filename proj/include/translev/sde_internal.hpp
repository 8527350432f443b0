#ifndef TRANSLEV_SDE_INTERNAL_HPP
#define TRANSLEV_SDE_INTERNAL_HPP

#include <Eigen/Dense>

#include "translev/coefficients.hpp"

namespace translev::detail {

/// The continuous-part Euler increment bbar dt + sigbar dB - comp dt.
/// reconstruct_Z replays the same expression on the same operands, which is
/// what makes the SDE <-> SPDE correspondence check bitwise.
Eigen::VectorXd continuous_increment(const Eigen::MatrixXd& sig, const Eigen::VectorXd& bb,
                                     const Eigen::VectorXd& comp, double dt,
                                     const Eigen::VectorXd& dB);

/// Compensator drift int F(y,x) nu(dx) summed over the measure's
/// integration points in stored (or reversed) order.
Eigen::VectorXd small_compensator(const HermiteRep& y_left, const CoefficientSet& set,
                                  const JumpMeasure& nu_small, bool reverse);

}  // namespace translev::detail

#endif
