#include <catch2/catch_amalgamated.hpp>

#include "oracles.hpp"
#include "sacr/ridge.hpp"
#include "sacr/rng.hpp"
#include "sacr/two_stage.hpp"

using namespace sacr;

TEST_CASE("fit_nng at lambda 0 keeps an exact initial untouched") {
    Rng rng(301);
    const Index n = 30, p = 5;
    Matrix a = oracles::random_matrix(rng, n, p);
    Vector y = oracles::random_vector(rng, n);
    Vector ols = oracles::gaussian_solve(a.transpose() * a, a.transpose() * y);
    LinearFit fit = fit_nng(a, y, 0.0, ols);
    REQUIRE((fit.beta - ols).cwiseAbs().maxCoeff() <= 1e-6 * (1.0 + ols.cwiseAbs().maxCoeff()));
}

TEST_CASE("fit_nng shrinks every factor to zero above the KKT threshold") {
    Rng rng(302);
    const Index n = 20, p = 6;
    Matrix a = oracles::random_matrix(rng, n, p);
    Vector y = oracles::random_vector(rng, n);
    Vector initial = oracles::random_vector(rng, p);
    Matrix scaled = a * initial.asDiagonal();
    // c = 0 is optimal as soon as the objective gradient lambda - 2 At y is
    // nonnegative coordinatewise
    const double lambda = 2.0 * (scaled.transpose() * y).maxCoeff() * 1.001 + 1e-6;
    LinearFit fit = fit_nng(a, y, lambda, initial);
    REQUIRE(fit.beta.cwiseAbs().maxCoeff() <= 1e-7);
}

TEST_CASE("fit_nng factors are nonnegative and satisfy stationarity") {
    Rng rng(303);
    const Index n = 25, p = 8;
    Matrix a = oracles::random_matrix(rng, n, p);
    Vector beta_true = oracles::random_vector(rng, p);
    Vector y = a * beta_true;
    for (Index i = 0; i < n; ++i) y(i) += 0.2 * rng.normal();
    Vector initial = fit_ridge(a, y, 0.5).beta;
    const double lambda = 1.0;
    LinearFit fit = fit_nng(a, y, lambda, initial);
    Matrix scaled = a * initial.asDiagonal();
    Vector c(p);
    for (Index j = 0; j < p; ++j)
        c(j) = std::abs(initial(j)) > 0 ? fit.beta(j) / initial(j) : 0.0;
    REQUIRE(c.minCoeff() >= -1e-10);
    Vector grad = 2.0 * scaled.transpose() * (scaled * c - y);
    grad.array() += lambda;
    for (Index j = 0; j < p; ++j) {
        if (c(j) > 1e-8) {
            REQUIRE(std::abs(grad(j)) <= 1e-6); // stationarity on the active part
        } else {
            REQUIRE(grad(j) >= -1e-6); // complementarity at the bound
        }
    }
}

TEST_CASE("fit_bar converges to the scalar fixed points on orthonormal designs") {
    Rng rng(304);
    const Index n = 30, p = 6;
    Matrix a = oracles::random_orthonormal(rng, n, p);
    Vector y = oracles::random_vector(rng, n);
    Vector b_ols = a.transpose() * y;
    const double lambda = 0.05;
    Vector initial = fit_ridge(a, y, lambda).beta;
    LinearFit fit = fit_bar(a, y, lambda, initial);
    for (Index j = 0; j < p; ++j) {
        const double ref = oracles::bar_scalar_fixed_point(b_ols(j), lambda);
        if (std::abs(b_ols(j)) < 2.0 * std::sqrt(lambda)) {
            REQUIRE(fit.beta(j) == 0.0);
        } else {
            REQUIRE(fit.beta(j) == Catch::Approx(ref).margin(1e-6));
        }
    }
}

TEST_CASE("fit_bar reaches zero exactly for weak coordinates") {
    // single-coordinate design where |b_ols| < 2 sqrt(lambda)
    Matrix a = Matrix::Identity(4, 4);
    Vector y(4);
    y << 0.1, -0.05, 0.2, 0.0;
    const double lambda = 0.25; // 2 sqrt(lambda) = 1 > all |y_i|
    LinearFit fit = fit_bar(a, y, lambda, y);
    REQUIRE(fit.beta.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("fit_bar approaches least squares as lambda vanishes") {
    Rng rng(305);
    const Index n = 30, p = 5;
    Matrix a = oracles::random_matrix(rng, n, p);
    Vector y = oracles::random_vector(rng, n);
    Vector ols = oracles::gaussian_solve(a.transpose() * a, a.transpose() * y);
    LinearFit fit = fit_bar(a, y, 1e-10, ols);
    REQUIRE((fit.beta - ols).cwiseAbs().maxCoeff() <= 1e-6);
}

TEST_CASE("fit_bar is insensitive to a reasonable initial on well-conditioned data") {
    Rng rng(306);
    const Index n = 50, p = 6;
    Matrix a = oracles::random_matrix(rng, n, p);
    Vector beta_true = Vector::Zero(p);
    beta_true(0) = 3.0;
    beta_true(3) = -2.0;
    Vector y = a * beta_true;
    for (Index i = 0; i < n; ++i) y(i) += 0.1 * rng.normal();
    const double lambda = 0.5;
    LinearFit from_ridge = fit_bar(a, y, lambda, fit_ridge(a, y, lambda).beta);
    LinearFit from_heavier = fit_bar(a, y, lambda, fit_ridge(a, y, 10.0 * lambda).beta);
    REQUIRE((from_ridge.beta - from_heavier.beta).cwiseAbs().maxCoeff() <= 1e-4);
}

TEST_CASE("two-stage estimators validate their inputs") {
    Matrix a = Matrix::Identity(3, 3);
    Vector y = Vector::Ones(3);
    REQUIRE_THROWS_AS(fit_nng(a, y, -1.0, y), InvalidArgument);
    REQUIRE_THROWS_AS(fit_bar(a, y, 0.0, y), InvalidArgument);
    REQUIRE_THROWS_AS(fit_bar(a, y, 1.0, Vector::Ones(2)), DimensionMismatch);
}
