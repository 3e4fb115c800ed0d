#ifndef SACR_TWO_STAGE_HPP
#define SACR_TWO_STAGE_HPP

#include <vector>

#include "sacr/fit.hpp"
#include "sacr/linalg.hpp"
#include "sacr/qp.hpp"

namespace sacr {

/// Non-negative garrote: shrinkage factors c >= 0 minimizing
/// ||y - A diag(initial) c||^2 + lambda sum_j c_j, solved as a QP;
/// fitted coefficients are c_j * initial_j.
inline LinearFit fit_nng(const Matrix& a, const Vector& y, double lambda, const Vector& initial) {
    if (lambda < 0.0) throw InvalidArgument("nng lambda must be nonnegative");
    if (initial.size() != a.cols()) throw DimensionMismatch("initial length must match columns");
    if (!initial.allFinite()) throw InvalidArgument("initial estimate must be finite");
    const Index p = a.cols();
    Matrix scaled = a * initial.asDiagonal();
    QpProblem qp;
    qp.Q = 2.0 * (scaled.transpose() * scaled);
    qp.Q = 0.5 * (qp.Q + qp.Q.transpose());
    qp.q = Vector::Constant(p, lambda) - 2.0 * (scaled.transpose() * y);
    qp.Aeq.resize(0, p);
    qp.beq.resize(0);
    qp.lower = Vector::Zero(p);
    QpSolution sol = solve_qp(qp, 1e-8, 200);
    if (sol.status != QpStatus::converged)
        throw SolverError("nng QP did not converge at lambda=" + std::to_string(lambda));
    LinearFit fit;
    fit.beta = sol.z.cwiseProduct(initial);
    fit.intercept = y.mean();
    fit.penalty_tag = "nng";
    fit.hyperparams = {{"lambda", lambda}};
    return fit;
}

/// Iteratively reweighted ridge with coefficient-dependent penalties
/// lambda / beta_j^2, iterated to its fixed point. Coordinates whose
/// magnitude falls below 1e-8 are frozen at exactly zero afterwards.
inline LinearFit fit_bar(const Matrix& a, const Vector& y, double lambda, const Vector& initial) {
    if (!(lambda > 0.0)) throw InvalidArgument("bar lambda must be positive");
    if (initial.size() != a.cols()) throw DimensionMismatch("initial length must match columns");
    if (!initial.allFinite()) throw InvalidArgument("initial estimate must be finite");
    const Index p = a.cols();
    Vector beta = initial;
    std::vector<char> frozen(static_cast<std::size_t>(p), 0);
    bool converged = false;
    const int max_iter = 100;
    for (int iter = 0; iter < max_iter; ++iter) {
        std::vector<Index> free;
        for (Index j = 0; j < p; ++j)
            if (!frozen[static_cast<std::size_t>(j)]) free.push_back(j);
        Vector next = Vector::Zero(p);
        if (!free.empty()) {
            Matrix sub(a.rows(), static_cast<Index>(free.size()));
            for (Index k = 0; k < sub.cols(); ++k)
                sub.col(k) = a.col(free[static_cast<std::size_t>(k)]);
            Matrix gram = sub.transpose() * sub;
            gram = 0.5 * (gram + gram.transpose());
            for (Index k = 0; k < sub.cols(); ++k) {
                const double b = beta(free[static_cast<std::size_t>(k)]);
                gram(k, k) += lambda / std::max(b * b, 1e-12);
            }
            Vector coef = cholesky_solve(gram, Vector(sub.transpose() * y));
            for (Index k = 0; k < sub.cols(); ++k)
                next(free[static_cast<std::size_t>(k)]) = coef(k);
        }
        for (Index j = 0; j < p; ++j) {
            if (std::abs(next(j)) < 1e-8) {
                next(j) = 0.0;
                frozen[static_cast<std::size_t>(j)] = 1;
            }
        }
        const double change = (next - beta).cwiseAbs().maxCoeff();
        beta = next;
        if (change < 1e-8) {
            converged = true;
            break;
        }
    }
    LinearFit fit;
    fit.beta = beta;
    fit.intercept = y.mean();
    fit.penalty_tag = "bar";
    fit.hyperparams = {{"lambda", lambda}};
    if (!converged) {
        fit.flagged = true;
        fit.flag_reason = "fixed-point iteration did not converge";
    }
    return fit;
}

} // namespace sacr

#endif
