#ifndef SACR_LINALG_HPP
#define SACR_LINALG_HPP

#include <cmath>
#include <string>

#include "sacr/errors.hpp"
#include "sacr/types.hpp"

namespace sacr {

/// Lower-triangular Cholesky factor of a symmetric PSD matrix.
class CholeskyFactor {
public:
    /// Factors A = L L^T. Throws NotPositiveDefinite when a pivot falls
    /// below 1e-14 times the largest diagonal entry of A.
    explicit CholeskyFactor(const Matrix& a) : l_(a.rows(), a.cols()) {
        const Index n = a.rows();
        if (a.cols() != n) throw DimensionMismatch("cholesky needs a square matrix");
        const double max_diag = n > 0 ? a.diagonal().maxCoeff() : 0.0;
        const double pivot_floor = 1e-14 * std::max(max_diag, 1e-300);
        l_.setZero();
        for (Index j = 0; j < n; ++j) {
            double d = a(j, j) - l_.row(j).head(j).squaredNorm();
            if (!(d >= pivot_floor)) {
                throw NotPositiveDefinite("pivot " + std::to_string(d) + " at column " +
                                          std::to_string(j));
            }
            l_(j, j) = std::sqrt(d);
            const Index r = n - j - 1;
            if (r > 0) {
                l_.col(j).tail(r) =
                    (a.col(j).tail(r) - l_.bottomLeftCorner(r, j) * l_.row(j).head(j).transpose()) /
                    l_(j, j);
            }
        }
    }

    void solve_in_place(Matrix& b) const {
        l_.triangularView<Eigen::Lower>().solveInPlace(b);
        l_.transpose().triangularView<Eigen::Upper>().solveInPlace(b);
    }

    template <typename Derived>
    typename Derived::PlainObject solve(const Eigen::MatrixBase<Derived>& b) const {
        typename Derived::PlainObject x = b;
        l_.triangularView<Eigen::Lower>().solveInPlace(x);
        l_.transpose().triangularView<Eigen::Upper>().solveInPlace(x);
        return x;
    }

    const Matrix& matrix_l() const { return l_; }

private:
    Matrix l_;
};

namespace detail {

inline void check_symmetric(const Matrix& a, double rel_tol) {
    const double scale = 1.0 + a.cwiseAbs().maxCoeff();
    const double asym = (a - a.transpose()).cwiseAbs().maxCoeff();
    if (asym > rel_tol * scale) {
        throw InvalidArgument("matrix is not symmetric (asymmetry " + std::to_string(asym) + ")");
    }
}

} // namespace detail

/// Solves A X = B for symmetric PSD A, with iterative refinement so that
/// the residual satisfies ||A X - B||_inf <= 1e-8 (1 + ||B||_inf) whenever
/// the factorization is well behaved.
inline Matrix cholesky_solve(const Matrix& a, const Matrix& b) {
    if (a.rows() != b.rows()) throw DimensionMismatch("cholesky_solve: A and B row counts differ");
    detail::check_symmetric(a, 1e-12);
    CholeskyFactor chol(a);
    Matrix x = chol.solve(b);
    const double target = 1e-8 * (1.0 + (b.size() > 0 ? b.cwiseAbs().maxCoeff() : 0.0));
    for (int round = 0; round < 3; ++round) {
        Matrix resid = b - a.selfadjointView<Eigen::Lower>() * x;
        if (resid.size() == 0 || resid.cwiseAbs().maxCoeff() <= target) break;
        x += chol.solve(resid);
    }
    return x;
}

inline Vector cholesky_solve(const Matrix& a, const Vector& b) {
    Matrix x = cholesky_solve(a, Matrix(b));
    return x.col(0);
}

/// (p-2) x p second-difference matrix; row i holds [1, -2, 1] starting at
/// column i. No boundary rows and no 1/dt^2 scaling: the absolute scale is
/// absorbed by the cross-validated penalty weight.
inline Matrix second_difference_operator(Index p) {
    if (p < 3) throw GridTooShort("second differences need at least 3 grid points, got " +
                                  std::to_string(p));
    Matrix l = Matrix::Zero(p - 2, p);
    for (Index i = 0; i + 2 < p; ++i) {
        l(i, i) = 1.0;
        l(i, i + 1) = -2.0;
        l(i, i + 2) = 1.0;
    }
    return l;
}

/// L^T L for the second-difference operator, assembled directly from the
/// stencil (pentadiagonal) instead of forming the dense product.
inline Matrix second_difference_gram(Index p) {
    if (p < 3) throw GridTooShort("second differences need at least 3 grid points, got " +
                                  std::to_string(p));
    Matrix g = Matrix::Zero(p, p);
    for (Index i = 0; i + 2 < p; ++i) {
        const double row[3] = {1.0, -2.0, 1.0};
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b) g(i + a, i + b) += row[a] * row[b];
    }
    return g;
}

/// L v without forming L.
inline Vector second_difference_apply(const Vector& v) {
    const Index p = v.size();
    if (p < 3) throw GridTooShort("second differences need at least 3 grid points, got " +
                                  std::to_string(p));
    Vector out(p - 2);
    for (Index i = 0; i + 2 < p; ++i) out(i) = v(i) - 2.0 * v(i + 1) + v(i + 2);
    return out;
}

} // namespace sacr

#endif
