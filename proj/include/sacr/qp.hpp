#ifndef SACR_QP_HPP
#define SACR_QP_HPP

#include <algorithm>
#include <cmath>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "sacr/errors.hpp"
#include "sacr/linalg.hpp"
#include "sacr/types.hpp"

namespace sacr {

struct KktResiduals {
    double stationarity = 0.0;
    double primal = 0.0;
    double complementarity = 0.0;
    double max() const { return std::max({stationarity, primal, complementarity}); }
};

/// Dense convex QP
///   min 0.5 z^T Q z + q^T z   s.t.  Aeq z = beq,  z_i >= lower_i
/// Unbounded coordinates carry lower_i = -inf. Aeq may have zero rows.
struct QpProblem {
    Matrix Q;
    Vector q;
    Matrix Aeq;
    Vector beq;
    Vector lower;

    Index n() const { return q.size(); }
    Index m() const { return beq.size(); }

    /// Checks the structural invariants: dimensions, symmetry (1e-10
    /// relative), positive semidefiniteness (shifted Cholesky) and full
    /// row rank of Aeq. Throws InvalidProblem.
    void validate() const {
        const Index nn = n();
        if (Q.rows() != nn || Q.cols() != nn) throw InvalidProblem("Q must be n x n");
        if (lower.size() != nn) throw InvalidProblem("lower must have length n");
        if (m() > 0 && (Aeq.rows() != m() || Aeq.cols() != nn))
            throw InvalidProblem("Aeq must be m x n");
        if (!Q.allFinite() || !q.allFinite() || (m() > 0 && (!Aeq.allFinite() || !beq.allFinite())))
            throw InvalidProblem("non-finite problem data");
        for (Index i = 0; i < nn; ++i) {
            if (std::isnan(lower(i)) || lower(i) == kInf)
                throw InvalidProblem("lower bounds must be finite or -inf");
        }
        const double qscale = 1.0 + Q.cwiseAbs().maxCoeff();
        if ((Q - Q.transpose()).cwiseAbs().maxCoeff() > 1e-10 * qscale)
            throw InvalidProblem("Q is not symmetric");
        // PSD within -1e-8 smallest-eigenvalue tolerance
        Matrix shifted = 0.5 * (Q + Q.transpose());
        shifted.diagonal().array() += 1e-8 * qscale;
        try {
            CholeskyFactor chol(shifted);
        } catch (const NotPositiveDefinite&) {
            throw InvalidProblem("Q is not positive semidefinite");
        }
        if (m() > 0) {
            Matrix gram = Aeq * Aeq.transpose();
            const double gscale = 1.0 + gram.diagonal().maxCoeff();
            gram.diagonal().array() += 1e-12 * gscale;
            try {
                CholeskyFactor chol(gram);
                // a pivot collapsing to the regularization floor means a
                // numerically dependent row
                for (Index i = 0; i < gram.rows(); ++i) {
                    if (chol.matrix_l()(i, i) * chol.matrix_l()(i, i) < 1e-10 * gscale)
                        throw NotPositiveDefinite("dependent row");
                }
            } catch (const NotPositiveDefinite&) {
                throw InvalidProblem("Aeq is rank deficient");
            }
        }
    }
};

enum class QpStatus { converged, max_iterations };

struct QpSolution {
    Vector z;               // primal
    Vector y;               // equality multipliers
    Vector s;               // bound multipliers (0 on unbounded coordinates)
    int iterations = 0;
    QpStatus status = QpStatus::converged;
    KktResiduals kkt;
    std::vector<double> mu_trace; // complementarity measure per iteration
    bool polished = false;
};

/// Recomputes the KKT residuals from scratch; independent of the solver.
inline KktResiduals check_kkt(const QpProblem& p, const QpSolution& sol) {
    const Index n = p.n();
    if (sol.z.size() != n || sol.s.size() != n || sol.y.size() != p.m())
        throw DimensionMismatch("check_kkt: solution dimensions do not match the problem");
    for (Index i = 0; i < n; ++i) {
        if (sol.s(i) < 0.0) throw InvalidMultipliers("bound multiplier s must be nonnegative");
    }
    KktResiduals r;
    Vector stat = p.Q.selfadjointView<Eigen::Lower>() * sol.z + p.q - sol.s;
    if (p.m() > 0) stat -= p.Aeq.transpose() * sol.y;
    r.stationarity = stat.cwiseAbs().maxCoeff();
    double primal = 0.0;
    if (p.m() > 0) primal = (p.Aeq * sol.z - p.beq).cwiseAbs().maxCoeff();
    double comp = 0.0;
    for (Index i = 0; i < n; ++i) {
        if (p.lower(i) == -kInf) continue;
        primal = std::max(primal, p.lower(i) - sol.z(i));
        comp = std::max(comp, std::abs(sol.s(i) * (sol.z(i) - p.lower(i))));
    }
    r.primal = primal;
    r.complementarity = comp;
    return r;
}

namespace detail {

// Factor of the reduced system M = Q + diag(d); retried with a small
// diagonal shift when the factorization fails near the boundary.
struct ReducedFactor {
    Matrix m;
    std::unique_ptr<CholeskyFactor> chol;

    void factor(const Matrix& mat) {
        m = mat;
        try {
            chol = std::make_unique<CholeskyFactor>(m);
        } catch (const NotPositiveDefinite&) {
            Matrix reg = m;
            reg.diagonal().array() += 1e-12 * (1.0 + m.diagonal().maxCoeff());
            chol = std::make_unique<CholeskyFactor>(reg);
        }
    }

    Vector solve(const Vector& b, int refine_rounds = 1) const {
        Vector x = chol->solve(b);
        for (int r = 0; r < refine_rounds; ++r) {
            Vector resid = b - m.selfadjointView<Eigen::Lower>() * x;
            x += chol->solve(resid);
        }
        return x;
    }
};

// Solves the equality-constrained KKT system
//   [Q  Aeq^T] [ z]   [-q ]
//   [Aeq  0  ] [-y] = [beq]
// by elimination through a (possibly regularized) Cholesky of Q, with
// refinement rounds on the full KKT residual.
inline void equality_kkt_solve(const Matrix& q_mat, const Vector& q_vec, const Matrix& aeq,
                               const Vector& beq, Vector& z, Vector& y, int refine_rounds = 3) {
    const Index n = q_vec.size();
    const Index m = beq.size();
    ReducedFactor f;
    f.factor(q_mat);
    std::unique_ptr<CholeskyFactor> schur_chol;
    Matrix minv_at;
    if (m > 0) {
        minv_at.resize(n, m);
        for (Index j = 0; j < m; ++j) minv_at.col(j) = f.solve(aeq.row(j).transpose(), 1);
        Matrix schur = aeq * minv_at;
        schur = 0.5 * (schur + schur.transpose());
        try {
            schur_chol = std::make_unique<CholeskyFactor>(schur);
        } catch (const NotPositiveDefinite&) {
            schur.diagonal().array() += 1e-12 * (1.0 + schur.diagonal().maxCoeff());
            schur_chol = std::make_unique<CholeskyFactor>(schur);
        }
    }
    z = Vector::Zero(n);
    y = Vector::Zero(m);
    Vector r1 = -q_vec;   // residual of  Q z - Aeq^T y + q = 0
    Vector r2 = beq;      // residual of  Aeq z - beq = 0
    for (int round = 0; round <= refine_rounds; ++round) {
        Vector dz, dy;
        if (m > 0) {
            Vector t = f.solve(r1, 1);
            dy = schur_chol->solve(r2 - aeq * t);
            dz = f.solve(r1 + aeq.transpose() * dy, 1);
        } else {
            dy.resize(0);
            dz = f.solve(r1, 1);
        }
        z += dz;
        if (m > 0) y += dy;
        r1 = -q_vec - q_mat.selfadjointView<Eigen::Lower>() * z;
        if (m > 0) r1 += aeq.transpose() * y;
        r2 = beq;
        if (m > 0) r2 -= aeq * z;
        const double res = std::max(r1.cwiseAbs().maxCoeff(), m > 0 ? r2.cwiseAbs().maxCoeff() : 0.0);
        if (res < 1e-14 * (1.0 + q_vec.cwiseAbs().maxCoeff())) break;
    }
}

} // namespace detail

/// Dense convex QP solver.
///
/// Mehrotra predictor-corrector primal-dual interior point method on the
/// bound slack pairs (x, s) with x = z - lower, using the normal-equations
/// form: the bound multipliers are eliminated, M = Q + diag(s/x) is
/// factored by Cholesky and the equality block is handled through its
/// Schur complement. Fraction-to-boundary 0.995. After the interior loop
/// the active set is fixed and the solution is polished by one exact
/// equality-constrained solve, which is accepted only when it improves
/// the recomputed KKT residuals.
///
/// Termination: all three (absolute, max-norm) KKT residuals at or below
/// tol. On hitting max_iter the best iterate is returned with
/// status = max_iterations instead of throwing.
inline QpSolution solve_qp(const QpProblem& p, double tol = 1e-8, int max_iter = 200) {
    if (!(tol > 0)) throw InvalidArgument("solve_qp tolerance must be positive");
    p.validate();
    const Index n = p.n();
    const Index m = p.m();

    std::vector<Index> bounded;
    for (Index i = 0; i < n; ++i)
        if (p.lower(i) != -kInf) bounded.push_back(i);
    const Index nb = static_cast<Index>(bounded.size());

    // Phase 0: certify the equality system is solvable at the least-squares
    // point before iterating.
    if (m > 0) {
        Matrix gram = p.Aeq * p.Aeq.transpose();
        gram.diagonal().array() += 1e-12 * (1.0 + gram.diagonal().maxCoeff());
        CholeskyFactor chol(gram);
        Vector w = chol.solve(p.beq);
        Vector z_ls = p.Aeq.transpose() * w;
        const double ls_resid = (p.Aeq * z_ls - p.beq).cwiseAbs().maxCoeff();
        if (ls_resid > 1e-6 * (1.0 + p.beq.cwiseAbs().maxCoeff()))
            throw Infeasible("equality system inconsistent, residual " + std::to_string(ls_resid));
    }

    QpSolution sol;

    if (nb == 0) {
        // No bounds: one exact KKT solve.
        Vector z, y;
        detail::equality_kkt_solve(p.Q, p.q, p.Aeq, p.beq, z, y);
        sol.z = z;
        sol.y = y;
        sol.s = Vector::Zero(n);
        sol.iterations = 1;
        sol.kkt = check_kkt(p, sol);
        sol.status = sol.kkt.max() <= tol ? QpStatus::converged : QpStatus::max_iterations;
        return sol;
    }

    auto gather = [&](const Vector& v) {
        Vector out(nb);
        for (Index k = 0; k < nb; ++k) out(k) = v(bounded[k]);
        return out;
    };
    auto scatter_add = [&](Vector& v, const Vector& vb, double coef = 1.0) {
        for (Index k = 0; k < nb; ++k) v(bounded[k]) += coef * vb(k);
    };

    // Starting point: z = max(lower + 1, 1) on bounded coordinates, zero on
    // free ones; s = 1; y = 0.
    Vector z = Vector::Zero(n);
    for (Index k = 0; k < nb; ++k) z(bounded[k]) = std::max(p.lower(bounded[k]) + 1.0, 1.0);
    Vector y = Vector::Zero(m);
    Vector s = Vector::Ones(nb);
    Vector lb = gather(p.lower);
    Vector x = gather(z) - lb;

    auto full_s = [&]() {
        Vector sf = Vector::Zero(n);
        scatter_add(sf, s);
        return sf;
    };
    auto residuals = [&](KktResiduals& r) {
        Vector stat = p.Q.selfadjointView<Eigen::Lower>() * z + p.q - full_s();
        if (m > 0) stat -= p.Aeq.transpose() * y;
        r.stationarity = stat.cwiseAbs().maxCoeff();
        r.primal = m > 0 ? (p.Aeq * z - p.beq).cwiseAbs().maxCoeff() : 0.0;
        r.complementarity = (x.array() * s.array()).abs().maxCoeff();
        return stat;
    };

    detail::ReducedFactor factor;
    Matrix minv_at;                            // M^{-1} Aeq^T, refreshed per iteration
    std::unique_ptr<CholeskyFactor> schur_chol;

    // One Newton solve for the current factorization. Solves
    //   Q dz - Aeq^T dy - E^T ds = -rd
    //   Aeq dz                   = -rp
    //   X ds + S dx               = -rc      (dx = dz on bounded coords)
    // with one refinement round against the full 3-block residual.
    auto newton_solve = [&](const Vector& rd, const Vector& rp, const Vector& rc, Vector& dz,
                            Vector& dy, Vector& ds) {
        auto solve_once = [&](const Vector& rd_, const Vector& rp_, const Vector& rc_, Vector& dz_,
                              Vector& dy_, Vector& ds_) {
            Vector rhs1 = -rd_;
            scatter_add(rhs1, (rc_.array() / x.array()).matrix(), -1.0);
            if (m > 0) {
                Vector t = factor.solve(rhs1, 1);
                dy_ = schur_chol->solve(-rp_ - p.Aeq * t);
                dz_ = factor.solve(rhs1 + p.Aeq.transpose() * dy_, 1);
            } else {
                dy_.resize(0);
                dz_ = factor.solve(rhs1, 1);
            }
            Vector dzb = gather(dz_);
            ds_ = -((rc_.array() + s.array() * dzb.array()) / x.array()).matrix();
        };
        solve_once(rd, rp, rc, dz, dy, ds);
        // refinement against the full system
        Vector res_d = p.Q.selfadjointView<Eigen::Lower>() * dz + rd;
        scatter_add(res_d, ds, -1.0);
        if (m > 0) res_d -= p.Aeq.transpose() * dy;
        Vector res_p = m > 0 ? Vector(p.Aeq * dz + rp) : Vector();
        Vector res_c = (x.array() * ds.array() + s.array() * gather(dz).array() + rc.array()).matrix();
        Vector cz, cy, cs;
        solve_once(res_d, res_p, res_c, cz, cy, cs);
        dz += cz;
        if (m > 0) dy += cy;
        ds += cs;
    };

    auto max_step = [](const Vector& v, const Vector& dv) {
        double a = kInf;
        for (Index i = 0; i < v.size(); ++i)
            if (dv(i) < 0.0) a = std::min(a, -v(i) / dv(i));
        return a;
    };

    const double ftb = 0.995; // fraction-to-boundary
    KktResiduals best_kkt;
    Vector best_z = z, best_y = y, best_s = full_s();
    residuals(best_kkt);

    int iter = 0;
    for (; iter < max_iter; ++iter) {
        KktResiduals r;
        Vector stat = residuals(r);
        const double mu = x.dot(s) / static_cast<double>(nb);
        sol.mu_trace.push_back(r.complementarity);
        if (r.max() <= best_kkt.max()) {
            best_kkt = r;
            best_z = z;
            best_y = y;
            best_s = full_s();
        }
        if (r.stationarity <= tol && r.primal <= tol && r.complementarity <= tol) break;

        Matrix mmat = p.Q;
        for (Index k = 0; k < nb; ++k) mmat(bounded[k], bounded[k]) += s(k) / x(k);
        factor.factor(mmat);
        if (m > 0) {
            minv_at.resize(n, m);
            for (Index j = 0; j < m; ++j) minv_at.col(j) = factor.solve(p.Aeq.row(j).transpose(), 1);
            Matrix schur = p.Aeq * minv_at;
            schur = 0.5 * (schur + schur.transpose());
            try {
                schur_chol = std::make_unique<CholeskyFactor>(schur);
            } catch (const NotPositiveDefinite&) {
                schur.diagonal().array() += 1e-12 * (1.0 + schur.diagonal().maxCoeff());
                schur_chol = std::make_unique<CholeskyFactor>(schur);
            }
        }

        Vector rd = stat;
        Vector rp = m > 0 ? Vector(p.Aeq * z - p.beq) : Vector();

        // predictor (affine scaling) direction
        Vector rc_aff = (x.array() * s.array()).matrix();
        Vector dz_aff, dy_aff, ds_aff;
        newton_solve(rd, rp, rc_aff, dz_aff, dy_aff, ds_aff);
        Vector dx_aff = gather(dz_aff);
        const double ap_aff = std::min(1.0, max_step(x, dx_aff));
        const double ad_aff = std::min(1.0, max_step(s, ds_aff));
        const double mu_aff =
            (x + ap_aff * dx_aff).dot(s + ad_aff * ds_aff) / static_cast<double>(nb);
        double sigma = std::pow(std::max(mu_aff, 0.0) / std::max(mu, 1e-300), 3.0);
        sigma = std::clamp(sigma, 0.0, 1.0);

        // corrector direction
        Vector rc = (x.array() * s.array() + dx_aff.array() * ds_aff.array() - sigma * mu).matrix();
        Vector dz, dy, ds;
        newton_solve(rd, rp, rc, dz, dy, ds);
        Vector dx = gather(dz);

        double ap = std::min(1.0, ftb * max_step(x, dx));
        double ad = std::min(1.0, ftb * max_step(s, ds));

        // keep the complementarity measure from increasing; back off the
        // step a few times if needed
        for (int back = 0; back < 8; ++back) {
            const double mu_new = (x + ap * dx).dot(s + ad * ds) / static_cast<double>(nb);
            if (mu_new <= mu * (1.0 + 1e-12) || (ap < 1e-8 && ad < 1e-8)) break;
            ap *= 0.5;
            ad *= 0.5;
        }

        z += ap * dz;
        if (m > 0) y += ad * dy;
        s += ad * ds;
        x = gather(z) - lb;
    }

    sol.z = best_z;
    sol.y = best_y;
    sol.s = best_s;
    sol.iterations = iter;
    sol.kkt = best_kkt;
    {
        KktResiduals r;
        Vector stat = residuals(r);
        (void)stat;
        if (r.max() <= best_kkt.max()) {
            sol.z = z;
            sol.y = y;
            sol.s = full_s();
            sol.kkt = r;
        }
    }

    // Polish: fix the active set indicated by the interior iterate and
    // solve the resulting equality-constrained QP exactly.
    {
        Vector xs = gather(sol.z) - lb;
        Vector sb = gather(sol.s);
        std::vector<Index> active, freev;
        std::vector<char> is_active(static_cast<std::size_t>(n), 0);
        for (Index k = 0; k < nb; ++k) {
            if (xs(k) <= sb(k)) is_active[static_cast<std::size_t>(bounded[k])] = 1;
        }
        for (Index i = 0; i < n; ++i)
            (is_active[static_cast<std::size_t>(i)] ? active : freev).push_back(i);
        const Index nf = static_cast<Index>(freev.size());
        if (nf > 0) {
            Matrix qff(nf, nf);
            for (Index a = 0; a < nf; ++a)
                for (Index b = 0; b < nf; ++b) qff(a, b) = p.Q(freev[a], freev[b]);
            Vector qf(nf);
            for (Index a = 0; a < nf; ++a) {
                double v = p.q(freev[a]);
                for (Index idx : active) v += p.Q(freev[a], idx) * p.lower(idx);
                qf(a) = v;
            }
            Matrix aeqf(m, nf);
            Vector beqf = p.beq;
            for (Index j = 0; j < m; ++j) {
                for (Index a = 0; a < nf; ++a) aeqf(j, a) = p.Aeq(j, freev[a]);
                for (Index idx : active) beqf(j) -= p.Aeq(j, idx) * p.lower(idx);
            }
            try {
                Vector zf, yp;
                detail::equality_kkt_solve(qff, qf, aeqf, beqf, zf, yp);
                QpSolution cand;
                cand.z = Vector::Zero(n);
                for (Index a = 0; a < nf; ++a) cand.z(freev[a]) = zf(a);
                for (Index idx : active) cand.z(idx) = p.lower(idx);
                cand.y = yp;
                Vector grad = p.Q.selfadjointView<Eigen::Lower>() * cand.z + p.q;
                if (m > 0) grad -= p.Aeq.transpose() * cand.y;
                cand.s = Vector::Zero(n);
                bool ok = true;
                for (Index idx : active) {
                    if (grad(idx) < -1e-9) { ok = false; break; }
                    cand.s(idx) = std::max(grad(idx), 0.0);
                }
                if (ok) {
                    for (Index k = 0; k < nb && ok; ++k)
                        if (cand.z(bounded[k]) < p.lower(bounded[k]) - 1e-10) ok = false;
                }
                if (ok) {
                    KktResiduals rc = check_kkt(p, cand);
                    if (rc.max() <= std::max(sol.kkt.max(), tol)) {
                        cand.iterations = sol.iterations;
                        cand.mu_trace = sol.mu_trace;
                        cand.kkt = rc;
                        cand.polished = true;
                        sol = std::move(cand);
                    }
                }
            } catch (const NotPositiveDefinite&) {
                // keep the interior iterate
            }
        }
    }

    sol.status = (sol.kkt.stationarity <= tol && sol.kkt.primal <= tol &&
                  sol.kkt.complementarity <= tol)
                     ? QpStatus::converged
                     : QpStatus::max_iterations;
    return sol;
}

/// Plain-text dump of a problem (debugging aid; format not stable across
/// versions). Dimensions header, then whitespace-separated rows of
/// Q, q, Aeq, beq, lower; -inf spelled "-inf".
inline void dump_qp(const QpProblem& p, std::ostream& os) {
    os << "qp 1\n" << p.n() << " " << p.m() << "\n";
    os.precision(17);
    auto put_matrix = [&os](const Matrix& mat) {
        for (Index i = 0; i < mat.rows(); ++i) {
            for (Index j = 0; j < mat.cols(); ++j) os << (j ? " " : "") << mat(i, j);
            os << "\n";
        }
    };
    auto put_vector = [&os](const Vector& v) {
        for (Index i = 0; i < v.size(); ++i) {
            if (i) os << " ";
            if (v(i) == -kInf)
                os << "-inf";
            else
                os << v(i);
        }
        os << "\n";
    };
    put_matrix(p.Q);
    put_vector(p.q);
    if (p.m() > 0) put_matrix(p.Aeq);
    put_vector(p.beq);
    put_vector(p.lower);
}

inline QpProblem load_qp(std::istream& is) {
    std::string magic;
    int version = 0;
    if (!(is >> magic >> version) || magic != "qp" || version != 1)
        throw ParseError("not a qp dump");
    Index n = 0, m = 0;
    if (!(is >> n >> m) || n < 0 || m < 0) throw ParseError("bad qp dimensions");
    QpProblem p;
    p.Q.resize(n, n);
    p.q.resize(n);
    p.Aeq.resize(m, n);
    p.beq.resize(m);
    p.lower.resize(n);
    auto get = [&is]() {
        std::string tok;
        if (!(is >> tok)) throw ParseError("truncated qp dump");
        if (tok == "-inf") return -kInf;
        try {
            return std::stod(tok);
        } catch (const std::exception&) {
            throw ParseError("bad number '" + tok + "' in qp dump");
        }
    };
    for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < n; ++j) p.Q(i, j) = get();
    for (Index i = 0; i < n; ++i) p.q(i) = get();
    for (Index i = 0; i < m; ++i)
        for (Index j = 0; j < n; ++j) p.Aeq(i, j) = get();
    for (Index i = 0; i < m; ++i) p.beq(i) = get();
    for (Index i = 0; i < n; ++i) p.lower(i) = get();
    return p;
}

} // namespace sacr

#endif
