#ifndef SACR_RIDGE_HPP
#define SACR_RIDGE_HPP

#include "sacr/fit.hpp"
#include "sacr/linalg.hpp"

namespace sacr {

// The closed-form L2 family. All three expect a centered response (the
// intercept is handled by centering upstream) and solve literal normal
// equations on the inputs as given.

inline LinearFit fit_ridge(const Matrix& a, const Vector& y, double lambda) {
    if (!(lambda > 0.0)) throw InvalidArgument("ridge lambda must be positive");
    Matrix gram = a.transpose() * a;
    gram = 0.5 * (gram + gram.transpose());
    gram.diagonal().array() += lambda;
    LinearFit fit;
    fit.beta = cholesky_solve(gram, Vector(a.transpose() * y));
    fit.intercept = y.mean();
    fit.penalty_tag = "ridge";
    fit.hyperparams = {{"lambda", lambda}};
    return fit;
}

/// Ridge shrinking toward a caller-supplied center c instead of zero:
/// beta = (A^T A + lambda I)^{-1} (A^T y + lambda c).
inline LinearFit fit_centered_ridge(const Matrix& a, const Vector& y, double lambda,
                                    const Vector& center) {
    if (!(lambda > 0.0)) throw InvalidArgument("ridge lambda must be positive");
    if (center.size() != a.cols()) throw DimensionMismatch("center length must match columns");
    if (!center.allFinite()) throw InvalidArgument("center must be finite");
    Matrix gram = a.transpose() * a;
    gram = 0.5 * (gram + gram.transpose());
    gram.diagonal().array() += lambda;
    LinearFit fit;
    fit.beta = cholesky_solve(gram, Vector(a.transpose() * y + lambda * center));
    fit.intercept = y.mean();
    fit.penalty_tag = "centered-ridge";
    fit.hyperparams = {{"lambda", lambda}};
    return fit;
}

/// Second-difference roughness penalty. L has a two-dimensional affine
/// nullspace, so a 1e-10 ridge guard keeps the system positive definite.
inline LinearFit fit_roughness(const Matrix& a, const Vector& y, double lambda) {
    if (!(lambda > 0.0)) throw InvalidArgument("roughness lambda must be positive");
    const Index p = a.cols();
    Matrix gram = a.transpose() * a + lambda * second_difference_gram(p);
    gram = 0.5 * (gram + gram.transpose());
    gram.diagonal().array() += 1e-10;
    LinearFit fit;
    fit.beta = cholesky_solve(gram, Vector(a.transpose() * y));
    fit.intercept = y.mean();
    fit.penalty_tag = "roughness";
    fit.hyperparams = {{"lambda", lambda}};
    return fit;
}

} // namespace sacr

#endif
