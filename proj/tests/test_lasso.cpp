#include <catch2/catch_amalgamated.hpp>

#include "oracles.hpp"
#include "sacr/lasso.hpp"
#include "sacr/rng.hpp"

using namespace sacr;

namespace {

double soft_threshold(double v, double t) {
    if (v > t) return v - t;
    if (v < -t) return v + t;
    return 0.0;
}

void check_lasso_stationarity(const Matrix& a, const Vector& y, double lambda, const Vector& beta,
                              double tol = 1e-6) {
    Vector r = y - a * beta;
    for (Index j = 0; j < a.cols(); ++j) {
        const double corr = 2.0 * a.col(j).dot(r);
        if (beta(j) == 0.0) {
            REQUIRE(std::abs(corr) <= lambda + tol);
        } else {
            REQUIRE(std::abs(corr - lambda * (beta(j) > 0 ? 1.0 : -1.0)) <= tol);
        }
    }
}

} // namespace

TEST_CASE("fit_lasso soft-thresholds under an orthonormal design") {
    Rng rng(201);
    Matrix a = oracles::random_orthonormal(rng, 20, 6);
    Vector y = oracles::random_vector(rng, 20);
    const double lambda = 0.8;
    LinearFit fit = fit_lasso(a, y, lambda);
    Vector proj = a.transpose() * y;
    for (Index j = 0; j < 6; ++j) {
        REQUIRE(fit.beta(j) == Catch::Approx(soft_threshold(proj(j), lambda / 2.0)).margin(1e-8));
    }
}

TEST_CASE("fit_lasso is identically zero above the sparsity threshold") {
    Rng rng(202);
    Matrix a = oracles::random_matrix(rng, 15, 8);
    Vector y = oracles::random_vector(rng, 15);
    const double lambda = 2.0 * (a.transpose() * y).cwiseAbs().maxCoeff() * 1.0000001;
    LinearFit fit = fit_lasso(a, y, lambda);
    REQUIRE(fit.beta.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("fit_lasso at lambda 0 reaches the least-squares solution") {
    Rng rng(203);
    const Index n = 25, p = 6;
    Matrix a = oracles::random_matrix(rng, n, p);
    Vector y = oracles::random_vector(rng, n);
    LinearFit fit = fit_lasso(a, y, 0.0);
    Vector ols = oracles::gaussian_solve(a.transpose() * a, a.transpose() * y);
    REQUIRE((fit.beta - ols).cwiseAbs().maxCoeff() <= 1e-6);
}

TEST_CASE("fit_lasso satisfies the subgradient stationarity conditions") {
    Rng rng(204);
    for (int rep = 0; rep < 5; ++rep) {
        const Index n = 20, p = 10;
        Matrix a = oracles::random_matrix(rng, n, p);
        Vector y = oracles::random_vector(rng, n);
        const double lambda = 0.5 + 2.0 * rng.uniform();
        LinearFit fit = fit_lasso(a, y, lambda);
        check_lasso_stationarity(a, y, lambda, fit.beta);
    }
}

TEST_CASE("fit_lasso skips all-zero columns") {
    Rng rng(205);
    Matrix a = oracles::random_matrix(rng, 10, 4);
    a.col(2).setZero();
    Vector y = oracles::random_vector(rng, 10);
    LinearFit fit = fit_lasso(a, y, 0.3);
    REQUIRE(fit.beta(2) == 0.0);
}

TEST_CASE("fit_adaptive_lasso excludes coordinates with zero initials") {
    Rng rng(206);
    Matrix a = oracles::random_matrix(rng, 20, 5);
    Vector y = oracles::random_vector(rng, 20);
    Vector initial = oracles::random_vector(rng, 5);
    initial(3) = 0.0;
    LinearFit fit = fit_adaptive_lasso(a, y, 0.5, 1.0, initial);
    REQUIRE(fit.beta(3) == 0.0);
}

TEST_CASE("fit_adaptive_lasso with uniform weights matches a rescaled plain lasso") {
    Rng rng(207);
    Matrix a = oracles::random_matrix(rng, 20, 6);
    Vector y = oracles::random_vector(rng, 20);
    const double c = 2.0, gamma = 1.0, lambda = 0.7;
    Vector initial = Vector::Constant(6, c);
    LinearFit adaptive = fit_adaptive_lasso(a, y, lambda, gamma, initial);
    // uniform weight 1/c: same problem as a plain lasso at lambda / c
    LinearFit plain = fit_lasso(a, y, lambda / c);
    REQUIRE((adaptive.beta - plain.beta).cwiseAbs().maxCoeff() <= 1e-8);
}

TEST_CASE("fit_adaptive_lasso matches the weighted coordinate-descent oracle") {
    Rng rng(208);
    const Index n = 18, p = 6;
    Matrix a = oracles::random_matrix(rng, n, p);
    Vector y = oracles::random_vector(rng, n);
    Vector initial = oracles::random_vector(rng, p);
    const double lambda = 0.6, gamma = 1.3;
    LinearFit fit = fit_adaptive_lasso(a, y, lambda, gamma, initial);
    Vector weights(p);
    for (Index j = 0; j < p; ++j) weights(j) = 1.0 / std::pow(std::abs(initial(j)), gamma);
    Vector ref = oracles::weighted_lasso_cd(a, y, lambda, weights);
    REQUIRE((fit.beta - ref).cwiseAbs().maxCoeff() <= 1e-7);
}

TEST_CASE("fit_adaptive_lasso rejects an identically zero initial") {
    Matrix a = Matrix::Identity(4, 4);
    Vector y = Vector::Ones(4);
    REQUIRE_THROWS_AS(fit_adaptive_lasso(a, y, 1.0, 1.0, Vector::Zero(4)), AllWeightsInfinite);
}

TEST_CASE("fit_relaxed_lasso with phi 1 is the plain lasso") {
    Rng rng(209);
    Matrix a = oracles::random_matrix(rng, 20, 8);
    Vector y = oracles::random_vector(rng, 20);
    LinearFit relaxed = fit_relaxed_lasso(a, y, 1.2, 1.0);
    LinearFit plain = fit_lasso(a, y, 1.2);
    REQUIRE((relaxed.beta - plain.beta).cwiseAbs().maxCoeff() <= 1e-10);
}

TEST_CASE("fit_relaxed_lasso tends to restricted least squares as phi vanishes") {
    Rng rng(210);
    const Index n = 40, p = 10;
    Matrix a = oracles::random_matrix(rng, n, p);
    Vector beta_true = Vector::Zero(p);
    beta_true(1) = 2.0;
    beta_true(6) = -1.5;
    Vector y = a * beta_true;
    for (Index i = 0; i < n; ++i) y(i) += 0.1 * rng.normal();
    const double lambda = 8.0;
    LinearFit relaxed = fit_relaxed_lasso(a, y, lambda, 1e-8);
    LinearFit plain = fit_lasso(a, y, lambda);
    std::vector<Index> active;
    for (Index j = 0; j < p; ++j)
        if (plain.beta(j) != 0.0) active.push_back(j);
    REQUIRE_FALSE(active.empty());
    Vector restricted = oracles::restricted_least_squares(a, y, active);
    REQUIRE((relaxed.beta - restricted).cwiseAbs().maxCoeff() <= 1e-4);
}

TEST_CASE("fit_relaxed_lasso flags an empty active set") {
    Rng rng(211);
    Matrix a = oracles::random_matrix(rng, 12, 5);
    Vector y = oracles::random_vector(rng, 12);
    const double lambda = 10.0 * (a.transpose() * y).cwiseAbs().maxCoeff();
    LinearFit fit = fit_relaxed_lasso(a, y, lambda, 0.5);
    REQUIRE(fit.flagged);
    REQUIRE(fit.beta.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("lasso family rejects invalid hyperparameters") {
    Matrix a = Matrix::Identity(3, 3);
    Vector y = Vector::Ones(3);
    REQUIRE_THROWS_AS(fit_lasso(a, y, -1.0), InvalidArgument);
    REQUIRE_THROWS_AS(fit_relaxed_lasso(a, y, 1.0, 0.0), InvalidArgument);
    REQUIRE_THROWS_AS(fit_adaptive_lasso(a, y, 1.0, 0.0, Vector::Ones(3)), InvalidArgument);
}
