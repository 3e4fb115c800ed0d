#ifndef SACR_LOGISTIC_HPP
#define SACR_LOGISTIC_HPP

#include <cmath>

#include "sacr/fit.hpp"
#include "sacr/linalg.hpp"

namespace sacr {

inline double log1pexp(double v) {
    if (v > 0.0) return v + std::log1p(std::exp(-v));
    return std::log1p(std::exp(v));
}

/// Negative binomial log-likelihood for labels in {0,1}:
/// sum_i log(1 + exp(eta_i)) - y_i eta_i.
inline double logistic_loss(const Vector& eta, const Vector& labels) {
    if (eta.size() != labels.size()) throw DimensionMismatch("eta and labels lengths differ");
    double acc = 0.0;
    for (Index i = 0; i < eta.size(); ++i) acc += log1pexp(eta(i)) - labels(i) * eta(i);
    return acc;
}

inline void require_both_classes(const Vector& labels) {
    bool has0 = false, has1 = false;
    for (Index i = 0; i < labels.size(); ++i) {
        if (labels(i) == 0.0)
            has0 = true;
        else if (labels(i) == 1.0)
            has1 = true;
        else
            throw InvalidArgument("labels must be 0 or 1");
    }
    if (!has0 || !has1) throw BothClassesRequired("need at least one sample of each class");
}

/// L2-penalized logistic regression (intercept unpenalized), by Newton
/// steps with step halving. Serves as the centerfunction provider for the
/// logistic SACR.
inline LinearFit fit_logistic_ridge(const Matrix& a, const Vector& labels, double lambda,
                                    int max_iter = 100) {
    if (!(lambda > 0.0)) throw InvalidArgument("logistic ridge lambda must be positive");
    require_both_classes(labels);
    const Index n = a.rows(), p = a.cols();
    Matrix g(n, p + 1);
    g.col(0).setOnes();
    g.rightCols(p) = a;

    Vector u = Vector::Zero(p + 1);
    auto objective = [&](const Vector& v) {
        return logistic_loss(g * v, labels) + lambda * v.tail(p).squaredNorm();
    };
    double f = objective(u);
    bool converged = false;
    for (int iter = 0; iter < max_iter; ++iter) {
        Vector eta = g * u;
        Vector prob(n), wgt(n);
        for (Index i = 0; i < n; ++i) {
            prob(i) = sigmoid(eta(i));
            wgt(i) = std::max(prob(i) * (1.0 - prob(i)), 1e-10);
        }
        Vector grad = g.transpose() * (prob - labels);
        grad.tail(p) += 2.0 * lambda * u.tail(p);
        Matrix hess = g.transpose() * wgt.asDiagonal() * g;
        hess = 0.5 * (hess + hess.transpose());
        hess.diagonal().tail(p).array() += 2.0 * lambda;
        Vector step = cholesky_solve(hess, grad);
        double alpha = 1.0;
        Vector u_new = u - step;
        double f_new = objective(u_new);
        while (f_new > f && alpha > 1e-10) {
            alpha *= 0.5;
            u_new = u - alpha * step;
            f_new = objective(u_new);
        }
        const double decrease = f - f_new;
        u = u_new;
        const bool done = std::abs(decrease) <= 1e-10 * (1.0 + std::abs(f_new)) ||
                          grad.cwiseAbs().maxCoeff() <= 1e-10 * (1.0 + std::abs(f_new));
        f = f_new;
        if (done) {
            converged = true;
            break;
        }
    }
    LinearFit fit;
    fit.intercept = u(0);
    fit.beta = u.tail(p);
    fit.penalty_tag = "logistic-ridge";
    fit.hyperparams = {{"lambda", lambda}};
    fit.logistic = true;
    if (!converged) {
        fit.flagged = true;
        fit.flag_reason = "newton iteration did not converge";
    }
    return fit;
}

} // namespace sacr

#endif
