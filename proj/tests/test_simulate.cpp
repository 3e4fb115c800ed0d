#include <catch2/catch_amalgamated.hpp>

#include "sacr/simulate.hpp"

using namespace sacr;

TEST_CASE("simulate produces the configured shape") {
    SimulationConfig config;
    config.seed = 2024;
    FunctionalDataset ds = simulate(config, default_true_beta(config.grid_size));
    REQUIRE(ds.n() == 50);
    REQUIRE(ds.p() == 150);
    REQUIRE(ds.delta == Catch::Approx(1.0 / 150.0));
    ds.validate();
}

TEST_CASE("zero noise and zero coefficient give identically zero responses") {
    SimulationConfig config;
    config.noise_sd = 0.0;
    config.seed = 5;
    FunctionalDataset ds = simulate(config, Vector::Zero(config.grid_size));
    REQUIRE(ds.response.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("zero noise makes responses exactly the discretized integrals") {
    SimulationConfig config;
    config.noise_sd = 0.0;
    config.seed = 9;
    Vector beta = default_true_beta(config.grid_size);
    FunctionalDataset ds = simulate(config, beta);
    Vector integrals = design_matrix(ds) * beta;
    REQUIRE((ds.response - integrals).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("same seed gives bit-identical datasets") {
    for (auto cov : {CoefficientCovariance::independent, CoefficientCovariance::correlated}) {
        SimulationConfig config;
        config.covariance = cov;
        config.inner_knots = cov == CoefficientCovariance::correlated ? 50 : 35;
        config.seed = 77;
        Vector beta = default_true_beta(config.grid_size);
        FunctionalDataset a = simulate(config, beta);
        FunctionalDataset b = simulate(config, beta);
        REQUIRE((a.curves - b.curves).cwiseAbs().maxCoeff() == 0.0);
        REQUIRE((a.response - b.response).cwiseAbs().maxCoeff() == 0.0);
        config.seed = 78;
        FunctionalDataset c = simulate(config, beta);
        REQUIRE((a.curves - c.curves).cwiseAbs().maxCoeff() > 0.0);
    }
}

TEST_CASE("correlated coefficients produce visibly smoother curves") {
    SimulationConfig ind;
    ind.seed = 3;
    SimulationConfig dep = ind;
    dep.covariance = CoefficientCovariance::correlated;
    dep.inner_knots = 50;
    Vector beta = Vector::Zero(ind.grid_size);
    FunctionalDataset a = simulate(ind, beta);
    FunctionalDataset b = simulate(dep, beta);
    // mean squared first difference along the grid, averaged over curves
    auto roughness = [](const FunctionalDataset& ds) {
        double acc = 0.0;
        for (Index i = 0; i < ds.n(); ++i)
            for (Index j = 1; j < ds.p(); ++j) {
                const double d = ds.curves(i, j) - ds.curves(i, j - 1);
                acc += d * d;
            }
        return acc / static_cast<double>(ds.n());
    };
    REQUIRE(roughness(b) < roughness(a));
}

TEST_CASE("default_true_beta is sparse with two smooth bumps") {
    Vector beta = default_true_beta(150);
    Vector grid = make_grid(150);
    for (Index j = 0; j < 150; ++j) {
        const double t = grid(j);
        if (t < 0.1 || (t > 0.3 && t < 0.55) || t > 0.8) {
            REQUIRE(beta(j) == 0.0);
        }
    }
    REQUIRE(beta.maxCoeff() > 0.0);
    REQUIRE(beta.minCoeff() < 0.0);
}

TEST_CASE("config validation") {
    SimulationConfig config;
    config.inner_knots = 3;
    REQUIRE_THROWS_AS(config.validate(), InvalidArgument);
    config = SimulationConfig{};
    config.noise_sd = -1.0;
    REQUIRE_THROWS_AS(config.validate(), InvalidArgument);
    config = SimulationConfig{};
    config.grid_size = 2;
    REQUIRE_THROWS_AS(config.validate(), InvalidArgument);
}
