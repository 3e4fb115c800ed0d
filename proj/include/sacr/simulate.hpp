#ifndef SACR_SIMULATE_HPP
#define SACR_SIMULATE_HPP

#include <cmath>
#include <cstdint>

#include "sacr/bspline.hpp"
#include "sacr/dataset.hpp"
#include "sacr/linalg.hpp"
#include "sacr/rng.hpp"

namespace sacr {

enum class CoefficientCovariance { independent, correlated };

struct SimulationConfig {
    Index n_samples = 50;
    Index grid_size = 150;
    Index inner_knots = 35;   // 50 for the correlated configuration
    double knot_min = -0.5;
    double knot_max = 1.5;
    CoefficientCovariance covariance = CoefficientCovariance::independent;
    double correlation = 0.9; // AR(1)-style rho, correlated mode only
    double noise_sd = 1.0;
    std::uint64_t seed = 0;

    void validate() const {
        if (n_samples < 1) throw InvalidArgument("n_samples must be positive");
        if (grid_size < 3) throw InvalidArgument("grid_size must be at least 3");
        if (inner_knots < 4) throw InvalidArgument("inner_knots must be at least 4");
        if (!(knot_max > knot_min)) throw InvalidArgument("empty knot range");
        if (noise_sd < 0.0) throw InvalidArgument("noise_sd must be nonnegative");
        if (covariance == CoefficientCovariance::correlated &&
            !(correlation > -1.0 && correlation < 1.0))
            throw InvalidArgument("correlation must lie in (-1, 1)");
    }
};

/// Stand-in coefficient function: two raised-cosine bumps on [0.1, 0.3]
/// and [0.55, 0.8], zero elsewhere. Smooth and sparse.
inline Vector default_true_beta(Index grid_size) {
    const Vector grid = make_grid(grid_size);
    auto bump = [](double t, double lo, double hi) {
        if (t < lo || t > hi) return 0.0;
        return 0.5 * (1.0 - std::cos(2.0 * M_PI * (t - lo) / (hi - lo)));
    };
    Vector beta(grid_size);
    for (Index j = 0; j < grid_size; ++j)
        beta(j) = 3.0 * bump(grid(j), 0.1, 0.3) - 2.0 * bump(grid(j), 0.55, 0.8);
    return beta;
}

/// Draws N curves from the cubic B-spline model: spline coefficients are
/// multivariate normal (identity covariance, or rho^|i-j|), curves are the
/// basis expansion on the grid, responses are the discretized model
/// integral plus Gaussian noise. Fully determined by config.seed.
inline FunctionalDataset simulate(const SimulationConfig& config, const Vector& true_beta) {
    config.validate();
    if (true_beta.size() != config.grid_size)
        throw DimensionMismatch("true_beta must live on the simulation grid");
    const int degree = 3;
    const auto knots =
        clamped_uniform_knots(degree, config.inner_knots, config.knot_min, config.knot_max);
    const Index n_basis = static_cast<Index>(knots.size()) - degree - 1; // inner_knots + 4
    const Vector grid = make_grid(config.grid_size);
    const Matrix basis = bspline_basis(degree, knots, grid); // p x K

    Rng rng(config.seed);
    Matrix xi(config.n_samples, n_basis);
    for (Index i = 0; i < config.n_samples; ++i)
        for (Index j = 0; j < n_basis; ++j) xi(i, j) = rng.normal();
    if (config.covariance == CoefficientCovariance::correlated) {
        Matrix sigma(n_basis, n_basis);
        for (Index i = 0; i < n_basis; ++i)
            for (Index j = 0; j < n_basis; ++j)
                sigma(i, j) = std::pow(config.correlation, std::abs(double(i - j)));
        CholeskyFactor chol(sigma);
        xi = xi * chol.matrix_l().transpose(); // rows ~ N(0, sigma)
    }

    FunctionalDataset ds;
    ds.grid = grid;
    ds.delta = 1.0 / static_cast<double>(config.grid_size);
    ds.curves = xi * basis.transpose();
    ds.response = design_matrix(ds) * true_beta;
    for (Index i = 0; i < config.n_samples; ++i) ds.response(i) += config.noise_sd * rng.normal();
    ds.validate();
    return ds;
}

} // namespace sacr

#endif
