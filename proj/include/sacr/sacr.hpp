#ifndef SACR_SACR_HPP
#define SACR_SACR_HPP

#include <cmath>
#include <string>

#include "sacr/fit.hpp"
#include "sacr/linalg.hpp"
#include "sacr/logistic.hpp"
#include "sacr/qp.hpp"
#include "sacr/ridge.hpp"

namespace sacr {

// Tikhonov shift on the weight block; keeps w identified where the
// centerfunction has zero stretches.
inline constexpr double kSacrWeightShift = 1e-10;

namespace detail {

// The two SACR penalty terms over z = (beta0, beta, w):
//   lambda*phi*dt * ||beta - C w||^2  +  lambda*(1-phi)*dt * ||L C w||^2
//   + shift * ||w||^2
// with C = diag(center) and L the second-difference operator.
struct SacrPenalty {
    double lambda, phi, dt;
    Vector center;
    Matrix smooth_gram; // C L^T L C

    SacrPenalty(double lambda_, double phi_, double dt_, Vector center_)
        : lambda(lambda_), phi(phi_), dt(dt_), center(std::move(center_)) {
        const Index p = center.size();
        smooth_gram = second_difference_gram(p);
        for (Index i = 0; i < p; ++i)
            for (Index j = 0; j < p; ++j) smooth_gram(i, j) *= center(i) * center(j);
    }

    double value(const Vector& beta, const Vector& w) const {
        const Vector gap = beta - center.cwiseProduct(w);
        const Vector rough = second_difference_apply(center.cwiseProduct(w));
        return lambda * phi * dt * gap.squaredNorm() +
               lambda * (1.0 - phi) * dt * rough.squaredNorm() +
               kSacrWeightShift * w.squaredNorm();
    }

    Vector grad_beta(const Vector& beta, const Vector& w) const {
        return 2.0 * lambda * phi * dt * (beta - center.cwiseProduct(w));
    }

    Vector grad_w(const Vector& beta, const Vector& w) const {
        Vector g = -2.0 * lambda * phi * dt *
                   center.cwiseProduct(beta - center.cwiseProduct(w));
        g += 2.0 * lambda * (1.0 - phi) * dt * (smooth_gram * w);
        g += 2.0 * kSacrWeightShift * w;
        return g;
    }

    // Adds the penalty's contribution to H where the objective is
    // z^T H z (so the QP gets Q = 2 H).
    void add_to(Matrix& h) const {
        const Index p = center.size();
        const double c1 = lambda * phi * dt;
        h.block(1, 1, p, p).diagonal().array() += c1;
        for (Index j = 0; j < p; ++j) {
            h(1 + j, 1 + p + j) -= c1 * center(j);
            h(1 + p + j, 1 + j) -= c1 * center(j);
            h(1 + p + j, 1 + p + j) += c1 * center(j) * center(j) + kSacrWeightShift;
        }
        h.block(1 + p, 1 + p, p, p) += lambda * (1.0 - phi) * dt * smooth_gram;
    }
};

inline void check_sacr_args(double lambda, double phi, const Vector& center, Index p) {
    if (!(lambda > 0.0)) throw InvalidArgument("sacr lambda must be positive");
    if (!(phi > 0.0 && phi <= 1.0)) throw InvalidArgument("sacr phi must lie in (0, 1]");
    if (center.size() != p) throw DimensionMismatch("center length must match columns");
    if (!center.allFinite()) throw InvalidArgument("center must be finite");
}

// Constraint shell shared by the regression and logistic variants:
// dt * sum(w) = 1 (discrete unit-mean weight) and w >= 0.
inline void add_sacr_constraints(QpProblem& qp, Index p, double dt) {
    const Index n = 1 + 2 * p;
    qp.Aeq = Matrix::Zero(1, n);
    qp.Aeq.block(0, 1 + p, 1, p).setConstant(dt);
    qp.beq = Vector::Constant(1, 1.0);
    qp.lower = Vector::Constant(n, -kInf);
    qp.lower.tail(p).setZero();
}

} // namespace detail

/// QP over z = (beta0, beta, w) for the jointly convex problem
///   min ||y - beta0 1 - A beta||^2
///       + lambda*phi*dt*||beta - diag(center) w||^2
///       + lambda*(1-phi)*dt*||L diag(center) w||^2 + 1e-10 ||w||^2
///   s.t. dt * sum(w) = 1,  w >= 0.
/// dt is the grid spacing 1/p recovered from the design width.
inline QpProblem assemble_sacr_qp(const Matrix& a, const Vector& y, double lambda, double phi,
                                  const Vector& center) {
    const Index p = a.cols();
    detail::check_sacr_args(lambda, phi, center, p);
    const double dt = 1.0 / static_cast<double>(p);
    const Index n = 1 + 2 * p;

    Matrix g(a.rows(), 1 + p);
    g.col(0).setOnes();
    g.rightCols(p) = a;

    Matrix h = Matrix::Zero(n, n);
    h.topLeftCorner(1 + p, 1 + p) = g.transpose() * g;
    detail::SacrPenalty(lambda, phi, dt, center).add_to(h);

    QpProblem qp;
    qp.Q = h + h.transpose(); // 2 H, symmetrized
    qp.q = Vector::Zero(n);
    qp.q.head(1 + p) = -2.0 * (g.transpose() * y);
    detail::add_sacr_constraints(qp, p, dt);
    return qp;
}

namespace detail {

inline SacrFit extract_sacr_fit(const QpSolution& sol, const Vector& center, double lambda,
                                double phi, Index p) {
    SacrFit fit;
    fit.intercept = sol.z(0);
    fit.beta = sol.z.segment(1, p);
    fit.w = sol.z.tail(p);
    fit.center = center;
    fit.lambda = lambda;
    fit.phi = phi;
    fit.kkt = sol.kkt;
    fit.hyperparams = {{"lambda", lambda}, {"phi", phi}};
    return fit;
}

} // namespace detail

/// Fits the SACR estimator. When no center is supplied the ordinary ridge
/// solution at the same lambda is used as the initial centerfunction.
inline SacrFit fit_sacr(const Matrix& a, const Vector& y, double lambda, double phi,
                        const Vector& center) {
    QpProblem qp = assemble_sacr_qp(a, y, lambda, phi, center);
    QpSolution sol = solve_qp(qp, 1e-8, 200);
    if (sol.status != QpStatus::converged)
        throw SolverError("sacr QP did not converge (lambda=" + std::to_string(lambda) +
                          ", phi=" + std::to_string(phi) +
                          ", kkt max=" + std::to_string(sol.kkt.max()) + ")");
    SacrFit fit = detail::extract_sacr_fit(sol, center, lambda, phi, a.cols());
    fit.penalty_tag = "sacr";
    return fit;
}

inline SacrFit fit_sacr(const Matrix& a, const Vector& y, double lambda, double phi) {
    return fit_sacr(a, y, lambda, phi, fit_ridge(a, y, lambda).beta);
}

/// Penalized logistic objective over z = (beta0, beta, w); the quantity
/// the logistic SACR minimizes subject to the weight constraints.
inline double sacr_logistic_objective(const Matrix& a, const Vector& labels, double lambda,
                                      double phi, const Vector& center, const Vector& z) {
    const Index p = a.cols();
    detail::check_sacr_args(lambda, phi, center, p);
    const double dt = 1.0 / static_cast<double>(p);
    Vector eta = a * z.segment(1, p);
    eta.array() += z(0);
    detail::SacrPenalty pen(lambda, phi, dt, center);
    return logistic_loss(eta, labels) + pen.value(z.segment(1, p), z.tail(p));
}

/// Analytic gradient of sacr_logistic_objective.
inline Vector sacr_logistic_gradient(const Matrix& a, const Vector& labels, double lambda,
                                     double phi, const Vector& center, const Vector& z) {
    const Index p = a.cols();
    detail::check_sacr_args(lambda, phi, center, p);
    const double dt = 1.0 / static_cast<double>(p);
    Vector beta = z.segment(1, p), w = z.tail(p);
    Vector eta = a * beta;
    eta.array() += z(0);
    Vector prob(eta.size());
    for (Index i = 0; i < eta.size(); ++i) prob(i) = sigmoid(eta(i));
    Vector resid = prob - labels;
    detail::SacrPenalty pen(lambda, phi, dt, center);
    Vector grad(1 + 2 * p);
    grad(0) = resid.sum();
    grad.segment(1, p) = a.transpose() * resid + pen.grad_beta(beta, w);
    grad.tail(p) = pen.grad_w(beta, w);
    return grad;
}

/// Logistic SACR by outer IRLS: at each iteration the quadratic expansion
/// of the log-loss replaces the least-squares block and the QP is re-solved;
/// a backtracking step on the true penalized objective guards descent.
/// Stops when the relative decrease falls below 1e-8 or after max_iter
/// iterations (the last iterate is returned flagged).
inline SacrFit fit_sacr_logistic(const Matrix& a, const Vector& labels, double lambda, double phi,
                                 const Vector& center, int max_iter = 50) {
    const Index p = a.cols();
    detail::check_sacr_args(lambda, phi, center, p);
    require_both_classes(labels);
    const double dt = 1.0 / static_cast<double>(p);
    const Index n = 1 + 2 * p;
    const Index nsamp = a.rows();

    Matrix g(nsamp, 1 + p);
    g.col(0).setOnes();
    g.rightCols(p) = a;
    detail::SacrPenalty pen(lambda, phi, dt, center);

    auto objective = [&](const Vector& z) {
        Vector eta = g * z.head(1 + p);
        return logistic_loss(eta, labels) + pen.value(z.segment(1, p), z.tail(p));
    };

    // start: zero coefficients, uniform unit weights (feasible)
    Vector z = Vector::Zero(n);
    z.tail(p).setOnes();
    double f = objective(z);

    KktResiduals last_kkt;
    bool converged = false;
    for (int iter = 0; iter < max_iter; ++iter) {
        Vector eta = g * z.head(1 + p);
        Vector prob(nsamp), wgt(nsamp);
        for (Index i = 0; i < nsamp; ++i) {
            prob(i) = sigmoid(eta(i));
            wgt(i) = std::max(prob(i) * (1.0 - prob(i)), 1e-10);
        }
        // quadratic model of the loss at eta, in 0.5 z'Qz + q'z form
        Matrix h = Matrix::Zero(n, n);
        h.topLeftCorner(1 + p, 1 + p) = g.transpose() * wgt.asDiagonal() * g;
        QpProblem qp;
        qp.Q = Matrix::Zero(n, n);
        qp.Q.topLeftCorner(1 + p, 1 + p) = h.topLeftCorner(1 + p, 1 + p);
        Matrix hp = Matrix::Zero(n, n);
        pen.add_to(hp);
        qp.Q += 2.0 * hp;
        qp.Q = 0.5 * (qp.Q + qp.Q.transpose());
        qp.q = Vector::Zero(n);
        qp.q.head(1 + p) =
            g.transpose() * ((prob - labels) - wgt.cwiseProduct(eta));
        detail::add_sacr_constraints(qp, p, dt);

        QpSolution sol = solve_qp(qp, 1e-8, 200);
        if (sol.status != QpStatus::converged)
            throw SolverError("sacr logistic inner QP did not converge (lambda=" +
                              std::to_string(lambda) + ", phi=" + std::to_string(phi) + ")");
        last_kkt = sol.kkt;

        Vector direction = sol.z - z;
        double alpha = 1.0;
        Vector z_new = sol.z;
        double f_new = objective(z_new);
        while (f_new > f && alpha > 1e-8) {
            alpha *= 0.5;
            z_new = z + alpha * direction;
            f_new = objective(z_new);
        }
        if (f_new > f) break; // no descent direction left
        const bool done = (f - f_new) <= 1e-8 * (1.0 + std::abs(f_new));
        z = z_new;
        f = f_new;
        if (done) {
            converged = true;
            break;
        }
    }

    SacrFit fit;
    fit.intercept = z(0);
    fit.beta = z.segment(1, p);
    fit.w = z.tail(p);
    fit.center = center;
    fit.lambda = lambda;
    fit.phi = phi;
    fit.kkt = last_kkt;
    fit.penalty_tag = "sacr-logistic";
    fit.hyperparams = {{"lambda", lambda}, {"phi", phi}};
    fit.logistic = true;
    if (!converged) {
        fit.flagged = true;
        fit.flag_reason = "outer IRLS did not converge";
    }
    return fit;
}

inline SacrFit fit_sacr_logistic(const Matrix& a, const Vector& labels, double lambda,
                                 double phi) {
    return fit_sacr_logistic(a, labels, lambda, phi,
                             fit_logistic_ridge(a, labels, lambda).beta);
}

} // namespace sacr

#endif
