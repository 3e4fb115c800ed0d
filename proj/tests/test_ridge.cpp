#include <catch2/catch_amalgamated.hpp>

#include "oracles.hpp"
#include "sacr/ridge.hpp"
#include "sacr/rng.hpp"

using namespace sacr;

namespace {

QpProblem ridge_twin(const Matrix& a, const Vector& y, double lambda, const Vector* center,
                     const Matrix* roughness_gram) {
    QpProblem qp;
    Matrix h = a.transpose() * a;
    if (roughness_gram) {
        h += lambda * (*roughness_gram);
        h.diagonal().array() += 1e-10;
    } else {
        h.diagonal().array() += lambda;
    }
    qp.Q = h + h.transpose();
    qp.q = -2.0 * (a.transpose() * y);
    if (center) qp.q -= 2.0 * lambda * (*center);
    qp.Aeq.resize(0, a.cols());
    qp.beq.resize(0);
    qp.lower = Vector::Constant(a.cols(), -kInf);
    return qp;
}

} // namespace

TEST_CASE("fit_ridge: orthonormal design halves the projections at lambda 1") {
    Rng rng(101);
    Matrix a = oracles::random_orthonormal(rng, 12, 5);
    Vector y = oracles::random_vector(rng, 12);
    LinearFit fit = fit_ridge(a, y, 1.0);
    Vector expected = (a.transpose() * y) / 2.0;
    REQUIRE((fit.beta - expected).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("fit_ridge shrinks to zero as lambda grows") {
    Rng rng(102);
    Matrix a = oracles::random_matrix(rng, 10, 6);
    Vector y = oracles::random_vector(rng, 10);
    LinearFit fit = fit_ridge(a, y, 1e12);
    REQUIRE(fit.beta.cwiseAbs().maxCoeff() <= 1e-6 * (a.transpose() * y).cwiseAbs().maxCoeff());
}

TEST_CASE("closed forms match their QP twins") {
    Rng rng(103);
    for (int rep = 0; rep < 5; ++rep) {
        const Index n = 10 + static_cast<Index>(rng.uniform_int(40));
        const Index p = 3 + static_cast<Index>(rng.uniform_int(27));
        Matrix a = oracles::random_matrix(rng, n, p);
        Vector y = oracles::random_vector(rng, n);
        Vector c = oracles::random_vector(rng, p);
        Matrix gram = second_difference_gram(p);
        for (double lambda : {0.1, 1.0, 10.0}) {
            Vector ridge = fit_ridge(a, y, lambda).beta;
            Vector qp_ridge = solve_qp(ridge_twin(a, y, lambda, nullptr, nullptr)).z;
            REQUIRE((ridge - qp_ridge).cwiseAbs().maxCoeff() <=
                    1e-6 * (1.0 + ridge.cwiseAbs().maxCoeff()));

            Vector centered = fit_centered_ridge(a, y, lambda, c).beta;
            Vector qp_centered = solve_qp(ridge_twin(a, y, lambda, &c, nullptr)).z;
            REQUIRE((centered - qp_centered).cwiseAbs().maxCoeff() <=
                    1e-6 * (1.0 + centered.cwiseAbs().maxCoeff()));

            Vector rough = fit_roughness(a, y, lambda).beta;
            Vector qp_rough = solve_qp(ridge_twin(a, y, lambda, nullptr, &gram)).z;
            REQUIRE((rough - qp_rough).cwiseAbs().maxCoeff() <=
                    1e-6 * (1.0 + rough.cwiseAbs().maxCoeff()));
        }
    }
}

TEST_CASE("fit_centered_ridge with zero center is plain ridge") {
    Rng rng(104);
    Matrix a = oracles::random_matrix(rng, 15, 7);
    Vector y = oracles::random_vector(rng, 15);
    Vector zero = Vector::Zero(7);
    Vector b1 = fit_ridge(a, y, 2.5).beta;
    Vector b2 = fit_centered_ridge(a, y, 2.5, zero).beta;
    REQUIRE((b1 - b2).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("fit_centered_ridge fixed point on the identity design") {
    Matrix a = Matrix::Identity(2, 2);
    Vector y(2);
    y << 2.0, 4.0;
    Vector c(2);
    c << 2.0, 4.0;
    LinearFit fit = fit_centered_ridge(a, y, 1.0, c);
    REQUIRE(fit.beta(0) == Catch::Approx(2.0).margin(1e-12));
    REQUIRE(fit.beta(1) == Catch::Approx(4.0).margin(1e-12));
}

TEST_CASE("fit_centered_ridge shrinks to the center as lambda grows") {
    Rng rng(105);
    Matrix a = oracles::random_matrix(rng, 12, 6);
    Vector y = oracles::random_vector(rng, 12);
    Vector c = oracles::random_vector(rng, 6);
    LinearFit fit = fit_centered_ridge(a, y, 1e10, c);
    const double rel = (fit.beta - c).cwiseAbs().maxCoeff() / (1.0 + c.cwiseAbs().maxCoeff());
    REQUIRE(rel <= 1e-4);
}

TEST_CASE("centered ridge is unbiased when the center is the truth") {
    // fixed design, 500 noise replicates; per-coordinate bias within 3
    // empirical standard errors
    Rng rng(106);
    const Index n = 30, p = 10;
    Matrix a = oracles::random_matrix(rng, n, p);
    Vector beta_true = oracles::random_vector(rng, p);
    Vector signal = a * beta_true;
    const int reps = 500;
    Matrix estimates(reps, p);
    for (int r = 0; r < reps; ++r) {
        Vector y = signal;
        for (Index i = 0; i < n; ++i) y(i) += rng.normal();
        estimates.row(r) = fit_centered_ridge(a, y, 10.0, beta_true).beta.transpose();
    }
    for (Index j = 0; j < p; ++j) {
        const double mean = estimates.col(j).mean();
        const double sd =
            std::sqrt((estimates.col(j).array() - mean).square().sum() / (reps - 1.0));
        const double se = sd / std::sqrt(static_cast<double>(reps));
        REQUIRE(std::abs(mean - beta_true(j)) <= 3.0 * se);
    }
}

TEST_CASE("fit_roughness leaves affine coefficients unpenalized") {
    Rng rng(107);
    const Index n = 40, p = 12;
    Matrix a = oracles::random_matrix(rng, n, p);
    Vector grid(p);
    for (Index j = 0; j < p; ++j) grid(j) = static_cast<double>(j + 1) / p;
    Vector beta_true = 2.0 * Vector::Ones(p) - 3.0 * grid; // affine in t
    Vector y = a * beta_true;
    LinearFit fit = fit_roughness(a, y, 1e6);
    REQUIRE((fit.beta - beta_true).cwiseAbs().maxCoeff() <= 1e-6);
    REQUIRE(second_difference_apply(fit.beta).cwiseAbs().maxCoeff() <= 1e-6);
}

TEST_CASE("fit_roughness tends to the best affine fit as lambda grows") {
    Rng rng(108);
    const Index n = 50, p = 10;
    Matrix a = oracles::random_matrix(rng, n, p);
    Vector y = oracles::random_vector(rng, n);
    Vector grid(p);
    for (Index j = 0; j < p; ++j) grid(j) = static_cast<double>(j + 1) / p;
    LinearFit fit = fit_roughness(a, y, 1e12);
    Vector affine = oracles::best_affine_fit(a, y, grid);
    REQUIRE((fit.beta - affine).cwiseAbs().maxCoeff() <=
            1e-4 * (1.0 + affine.cwiseAbs().maxCoeff()));
}

TEST_CASE("fit_roughness approaches regularized least squares as lambda vanishes") {
    Rng rng(109);
    const Index n = 30, p = 8;
    Matrix a = oracles::random_matrix(rng, n, p);
    Vector y = oracles::random_vector(rng, n);
    LinearFit fit = fit_roughness(a, y, 1e-12);
    Matrix gram = a.transpose() * a;
    gram.diagonal().array() += 1e-10;
    Vector ls = oracles::gaussian_solve(gram, a.transpose() * y);
    REQUIRE((fit.beta - ls).cwiseAbs().maxCoeff() <= 1e-8);
}

TEST_CASE("ridge family rejects nonpositive lambda and bad centers") {
    Matrix a = Matrix::Identity(3, 3);
    Vector y = Vector::Ones(3);
    REQUIRE_THROWS_AS(fit_ridge(a, y, 0.0), InvalidArgument);
    REQUIRE_THROWS_AS(fit_roughness(a, y, -1.0), InvalidArgument);
    REQUIRE_THROWS_AS(fit_centered_ridge(a, y, 1.0, Vector::Zero(2)), DimensionMismatch);
}
