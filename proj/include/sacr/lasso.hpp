#ifndef SACR_LASSO_HPP
#define SACR_LASSO_HPP

#include <vector>

#include "sacr/fit.hpp"

namespace sacr {

namespace detail {

struct CdResult {
    Vector beta;
    bool hit_sweep_cap = false;
};

// Cyclic coordinate descent for  sum_i (y_i - a_i^T b)^2 + lambda sum_j |b_j|.
// Stationarity: |2 A_j^T r| <= lambda at zero coordinates,
// 2 A_j^T (r + A_j b_j) - 2 ||A_j||^2 b_j = lambda sign(b_j) elsewhere.
inline CdResult lasso_cd(const Matrix& a, const Vector& y, double lambda,
                         double tol = 1e-8, long max_sweeps = 100000) {
    const Index p = a.cols();
    Vector beta = Vector::Zero(p);
    Vector r = y;
    Vector norms2(p);
    for (Index j = 0; j < p; ++j) norms2(j) = a.col(j).squaredNorm();
    CdResult out;
    long sweep = 0;
    for (; sweep < max_sweeps; ++sweep) {
        double max_change = 0.0;
        for (Index j = 0; j < p; ++j) {
            if (norms2(j) <= 0.0) continue; // all-zero column stays at 0
            const double rho = 2.0 * a.col(j).dot(r) + 2.0 * norms2(j) * beta(j);
            double bj = 0.0;
            if (rho > lambda)
                bj = (rho - lambda) / (2.0 * norms2(j));
            else if (rho < -lambda)
                bj = (rho + lambda) / (2.0 * norms2(j));
            const double change = bj - beta(j);
            if (change != 0.0) {
                r -= a.col(j) * change;
                beta(j) = bj;
            }
            max_change = std::max(max_change, std::abs(change));
        }
        if (max_change < tol) break;
    }
    out.beta = std::move(beta);
    out.hit_sweep_cap = (sweep >= max_sweeps);
    return out;
}

} // namespace detail

inline LinearFit fit_lasso(const Matrix& a, const Vector& y, double lambda) {
    if (lambda < 0.0) throw InvalidArgument("lasso lambda must be nonnegative");
    auto cd = detail::lasso_cd(a, y, lambda);
    LinearFit fit;
    fit.beta = std::move(cd.beta);
    fit.intercept = y.mean();
    fit.penalty_tag = "lasso";
    fit.hyperparams = {{"lambda", lambda}};
    if (cd.hit_sweep_cap) {
        fit.flagged = true;
        fit.flag_reason = "coordinate descent sweep cap reached";
    }
    return fit;
}

/// Two-stage lasso: refit at phi_relax * lambda restricted to the active
/// set of the first stage; inactive coordinates stay exactly zero.
inline LinearFit fit_relaxed_lasso(const Matrix& a, const Vector& y, double lambda,
                                   double phi_relax) {
    if (lambda < 0.0) throw InvalidArgument("lasso lambda must be nonnegative");
    if (!(phi_relax > 0.0 && phi_relax <= 1.0))
        throw InvalidArgument("phi_relax must lie in (0, 1]");
    auto first = detail::lasso_cd(a, y, lambda);
    std::vector<Index> active;
    for (Index j = 0; j < a.cols(); ++j)
        if (first.beta(j) != 0.0) active.push_back(j);

    LinearFit fit;
    fit.intercept = y.mean();
    fit.penalty_tag = "relaxed-lasso";
    fit.hyperparams = {{"lambda", lambda}, {"phi_relax", phi_relax}};
    if (active.empty()) {
        fit.beta = Vector::Zero(a.cols());
        fit.flagged = true;
        fit.flag_reason = "empty active set";
        return fit;
    }
    Matrix sub(a.rows(), static_cast<Index>(active.size()));
    for (Index k = 0; k < sub.cols(); ++k) sub.col(k) = a.col(active[static_cast<std::size_t>(k)]);
    auto second = detail::lasso_cd(sub, y, phi_relax * lambda);
    fit.beta = Vector::Zero(a.cols());
    for (Index k = 0; k < sub.cols(); ++k)
        fit.beta(active[static_cast<std::size_t>(k)]) = second.beta(k);
    if (first.hit_sweep_cap || second.hit_sweep_cap) {
        fit.flagged = true;
        fit.flag_reason = "coordinate descent sweep cap reached";
    }
    return fit;
}

/// Adaptive lasso with weights 1/|initial_j|^gamma, implemented by column
/// rescaling around a plain lasso. Coordinates with |initial_j| < 1e-10
/// carry infinite weight and are excluded (returned as exactly zero).
inline LinearFit fit_adaptive_lasso(const Matrix& a, const Vector& y, double lambda, double gamma,
                                    const Vector& initial) {
    if (lambda < 0.0) throw InvalidArgument("lasso lambda must be nonnegative");
    if (!(gamma > 0.0)) throw InvalidArgument("gamma must be positive");
    if (initial.size() != a.cols()) throw DimensionMismatch("initial length must match columns");
    if (!initial.allFinite()) throw InvalidArgument("initial estimate must be finite");

    std::vector<Index> included;
    for (Index j = 0; j < a.cols(); ++j)
        if (std::abs(initial(j)) >= 1e-10) included.push_back(j);
    if (included.empty())
        throw AllWeightsInfinite("initial estimate is identically zero");

    Matrix scaled(a.rows(), static_cast<Index>(included.size()));
    Vector scale(static_cast<Index>(included.size()));
    for (Index k = 0; k < scaled.cols(); ++k) {
        const Index j = included[static_cast<std::size_t>(k)];
        scale(k) = std::pow(std::abs(initial(j)), gamma); // = 1 / w_j
        scaled.col(k) = a.col(j) * scale(k);
    }
    auto cd = detail::lasso_cd(scaled, y, lambda);
    LinearFit fit;
    fit.beta = Vector::Zero(a.cols());
    for (Index k = 0; k < scaled.cols(); ++k)
        fit.beta(included[static_cast<std::size_t>(k)]) = cd.beta(k) * scale(k);
    fit.intercept = y.mean();
    fit.penalty_tag = "adaptive-lasso";
    fit.hyperparams = {{"lambda", lambda}, {"gamma", gamma}};
    if (cd.hit_sweep_cap) {
        fit.flagged = true;
        fit.flag_reason = "coordinate descent sweep cap reached";
    }
    return fit;
}

} // namespace sacr

#endif
