#ifndef SACR_TYPES_HPP
#define SACR_TYPES_HPP

#include <Eigen/Dense>
#include <limits>

namespace sacr {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

} // namespace sacr

#endif
