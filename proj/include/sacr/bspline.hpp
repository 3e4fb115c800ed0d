#ifndef SACR_BSPLINE_HPP
#define SACR_BSPLINE_HPP

#include <string>
#include <vector>

#include "sacr/errors.hpp"
#include "sacr/types.hpp"

namespace sacr {

/// Clamped knot vector: degree+1 copies of each boundary, inner knots
/// equispaced strictly between lo and hi.
inline std::vector<double> clamped_uniform_knots(int degree, Index inner_knots, double lo,
                                                 double hi) {
    if (degree < 0) throw InvalidArgument("degree must be nonnegative");
    if (!(hi > lo)) throw InvalidArgument("knot range must be nonempty");
    std::vector<double> knots;
    knots.reserve(static_cast<std::size_t>(2 * (degree + 1) + inner_knots));
    for (int r = 0; r <= degree; ++r) knots.push_back(lo);
    for (Index k = 1; k <= inner_knots; ++k)
        knots.push_back(lo + (hi - lo) * static_cast<double>(k) /
                                 static_cast<double>(inner_knots + 1));
    for (int r = 0; r <= degree; ++r) knots.push_back(hi);
    return knots;
}

/// B-spline basis values by the Cox-de Boor recursion; one row per t value,
/// one column per basis function (count = #knots - degree - 1). Throws
/// OutsideKnotRange for t outside [knots.front(), knots.back()].
inline Matrix bspline_basis(int degree, const std::vector<double>& knots, const Vector& t) {
    if (degree < 0) throw InvalidArgument("degree must be nonnegative");
    const Index nbasis = static_cast<Index>(knots.size()) - degree - 1;
    if (nbasis < 1) throw InvalidArgument("too few knots for the requested degree");
    for (std::size_t j = 1; j < knots.size(); ++j)
        if (knots[j] < knots[j - 1]) throw InvalidArgument("knots must be nondecreasing");

    Matrix basis = Matrix::Zero(t.size(), nbasis);
    std::vector<double> values(static_cast<std::size_t>(degree) + 1);
    std::vector<double> left(static_cast<std::size_t>(degree) + 1);
    std::vector<double> right(static_cast<std::size_t>(degree) + 1);

    for (Index row = 0; row < t.size(); ++row) {
        const double x = t(row);
        if (x < knots.front() || x > knots.back())
            throw OutsideKnotRange("t = " + std::to_string(x) + " outside [" +
                                   std::to_string(knots.front()) + ", " +
                                   std::to_string(knots.back()) + "]");
        // span: knots[span] <= x < knots[span+1]; the last nonempty
        // interval is treated as closed on the right
        Index span = -1;
        for (std::size_t j = 0; j + 1 < knots.size(); ++j) {
            if (knots[j] <= x && x < knots[j + 1]) {
                span = static_cast<Index>(j);
                break;
            }
        }
        if (span < 0) {
            for (std::size_t j = knots.size() - 1; j > 0; --j) {
                if (knots[j - 1] < knots[j]) {
                    span = static_cast<Index>(j - 1);
                    break;
                }
            }
        }
        if (span < degree || span > nbasis - 1)
            throw OutsideKnotRange("t = " + std::to_string(x) + " outside the basis support");

        values[0] = 1.0;
        for (int d = 1; d <= degree; ++d) {
            left[static_cast<std::size_t>(d)] = x - knots[static_cast<std::size_t>(span + 1 - d)];
            right[static_cast<std::size_t>(d)] = knots[static_cast<std::size_t>(span + d)] - x;
            double saved = 0.0;
            for (int r = 0; r < d; ++r) {
                const double denom = right[static_cast<std::size_t>(r + 1)] +
                                     left[static_cast<std::size_t>(d - r)];
                const double temp = denom > 0.0 ? values[static_cast<std::size_t>(r)] / denom : 0.0;
                values[static_cast<std::size_t>(r)] =
                    saved + right[static_cast<std::size_t>(r + 1)] * temp;
                saved = left[static_cast<std::size_t>(d - r)] * temp;
            }
            values[static_cast<std::size_t>(d)] = saved;
        }
        for (int r = 0; r <= degree; ++r)
            basis(row, span - degree + r) = values[static_cast<std::size_t>(r)];
    }
    return basis;
}

} // namespace sacr

#endif
