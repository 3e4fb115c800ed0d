#ifndef SACR_MODEL_SELECTION_HPP
#define SACR_MODEL_SELECTION_HPP

#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "sacr/parallel.hpp"
#include "sacr/pipeline.hpp"

namespace sacr {

/// Hyperparameter search space. The defaults are 20 log-spaced lambdas in
/// [1e-4, 1e4] and decile phi values; secondary parameters apply per
/// estimator (gamma for the adaptive lasso, phi_relax for the relaxed
/// lasso).
struct HyperGrid {
    std::vector<double> lambdas;
    std::vector<double> phis;
    std::vector<double> gammas = {1.0};
    std::vector<double> phi_relaxes;

    static HyperGrid defaults() {
        HyperGrid g;
        for (int i = 0; i < 20; ++i)
            g.lambdas.push_back(std::pow(10.0, -4.0 + 8.0 * static_cast<double>(i) / 19.0));
        for (int i = 1; i <= 10; ++i) g.phis.push_back(static_cast<double>(i) / 10.0);
        g.phi_relaxes = g.phis;
        return g;
    }

    void validate() const {
        if (lambdas.empty()) throw InvalidArgument("lambda grid is empty");
        for (double l : lambdas)
            if (!(l > 0.0)) throw InvalidArgument("lambda grid values must be positive");
        for (double f : phis)
            if (!(f > 0.0 && f <= 1.0)) throw InvalidArgument("phi grid values must lie in (0,1]");
        for (double g : gammas)
            if (!(g > 0.0)) throw InvalidArgument("gamma grid values must be positive");
        for (double f : phi_relaxes)
            if (!(f > 0.0 && f <= 1.0))
                throw InvalidArgument("phi_relax grid values must lie in (0,1]");
    }

    /// Cartesian grid for one estimator: lambda always, plus its secondary
    /// parameter when it has one.
    std::vector<std::map<std::string, double>> points_for(const std::string& tag) const {
        validate();
        std::vector<std::map<std::string, double>> points;
        auto secondary = [&](const char* name, const std::vector<double>& values) {
            if (values.empty()) throw InvalidArgument(std::string(name) + " grid is empty");
            for (double l : lambdas)
                for (double v : values) points.push_back({{"lambda", l}, {std::string(name), v}});
        };
        if (tag == "sacr" || tag == "sacr-logistic")
            secondary("phi", phis);
        else if (tag == "adaptive-lasso")
            secondary("gamma", gammas);
        else if (tag == "relaxed-lasso")
            secondary("phi_relax", phi_relaxes);
        else if (tag == "mean")
            points.push_back({});
        else
            for (double l : lambdas) points.push_back({{"lambda", l}});
        return points;
    }
};

struct CvPointResult {
    std::map<std::string, double> params;
    double mean = std::numeric_limits<double>::quiet_NaN();
    double sd = std::numeric_limits<double>::quiet_NaN();
    bool failed = false;
    std::string error;
};

struct OuterFoldResult {
    int repeat = 0;
    int fold = 0;
    std::map<std::string, double> selected;
    double metric = std::numeric_limits<double>::quiet_NaN();
};

/// Fold scores per hyperparameter point, the selected point, and (for the
/// nested protocol) per-outer-fold test metrics with their summary.
struct CvReport {
    std::string estimator;
    std::string metric_name; // "mse" or "accuracy"
    std::string protocol;
    std::vector<CvPointResult> inner_points;
    std::map<std::string, double> selected;
    std::vector<OuterFoldResult> outer;
    double overall_mean = std::numeric_limits<double>::quiet_NaN();
    double overall_sd = std::numeric_limits<double>::quiet_NaN();
};

namespace detail {

inline double secondary_value(const std::map<std::string, double>& params) {
    for (const char* name : {"phi", "gamma", "phi_relax"}) {
        auto it = params.find(name);
        if (it != params.end()) return it->second;
    }
    return 0.0;
}

inline double lambda_value(const std::map<std::string, double>& params) {
    auto it = params.find("lambda");
    return it == params.end() ? 0.0 : it->second;
}

// Lower loss wins; exact ties break toward larger lambda, then larger
// secondary parameter (more regularization). Value-based, so the outcome
// does not depend on grid ordering.
inline bool point_beats(double loss_a, const std::map<std::string, double>& a, double loss_b,
                        const std::map<std::string, double>& b) {
    if (loss_a != loss_b) return loss_a < loss_b;
    const double la = lambda_value(a), lb = lambda_value(b);
    if (la != lb) return la > lb;
    return secondary_value(a) > secondary_value(b);
}

inline double sample_sd(const std::vector<double>& values, double mean) {
    if (values.size() < 2) return 0.0;
    double acc = 0.0;
    for (double v : values) acc += (v - mean) * (v - mean);
    return std::sqrt(acc / static_cast<double>(values.size() - 1));
}

} // namespace detail

/// Inner k-fold grid search. Fold splits, standardization and initial
/// estimators (the SACR ridge center included) are all computed inside
/// each training fold, so no validation data leaks into the fit. Points
/// failing on any fold are excluded and reported.
inline CvReport grid_search(const EstimatorSpec& spec, const FunctionalDataset& dataset,
                            const HyperGrid& grid, int k_inner, std::uint64_t seed,
                            bool stratify = true) {
    const auto points = grid.points_for(spec.tag);
    const Index n = dataset.n();
    const auto folds =
        kfold_split(n, k_inner, derive_seed(seed, 0x5eed0),
                    spec.classification && stratify ? std::optional<Vector>(dataset.response)
                                                    : std::nullopt);

    std::vector<FunctionalDataset> trains, vals;
    for (const auto& fold : folds) {
        trains.push_back(subset(dataset, complement_indices(n, fold)));
        vals.push_back(subset(dataset, fold));
    }

    CvReport report;
    report.estimator = spec.tag;
    report.metric_name = spec.classification ? "accuracy" : "mse";
    report.inner_points.resize(points.size());

    parallel_for(static_cast<Index>(points.size()), [&](Index pi) {
        CvPointResult& result = report.inner_points[static_cast<std::size_t>(pi)];
        result.params = points[static_cast<std::size_t>(pi)];
        EstimatorSpec point_spec = spec;
        for (const auto& [k, v] : result.params) point_spec.params[k] = v;
        std::vector<double> scores;
        try {
            for (std::size_t f = 0; f < folds.size(); ++f) {
                auto fit = fit_dataset(point_spec, trains[f], derive_seed(seed, 0xf17, f));
                scores.push_back(evaluate_fit(*fit, vals[f], spec.classification));
            }
        } catch (const Error& e) {
            result.failed = true;
            result.error = e.what();
            return;
        }
        double mean = 0.0;
        for (double s : scores) mean += s;
        mean /= static_cast<double>(scores.size());
        result.mean = mean;
        result.sd = detail::sample_sd(scores, mean);
    });

    bool have_best = false;
    double best_loss = kInf;
    for (const auto& result : report.inner_points) {
        if (result.failed) continue;
        const double loss =
            spec.classification ? 100.0 - result.mean : result.mean;
        if (!have_best || detail::point_beats(loss, result.params, best_loss, report.selected)) {
            have_best = true;
            best_loss = loss;
            report.selected = result.params;
        }
    }
    if (!have_best) throw SolverError("grid search: every hyperparameter point failed");
    return report;
}

/// Nested evaluation: repeats x k_outer folds; each outer training set
/// runs its own inner grid search, is refit at the selected point and
/// scored on the held-out fold. The summary is the mean and sample sd of
/// the outer-fold metrics across all repeats.
inline CvReport nested_evaluate(const EstimatorSpec& spec, const FunctionalDataset& dataset,
                                const HyperGrid& grid, int k_outer = 5, int k_inner = 3,
                                int repeats = 1, std::uint64_t seed = 0, bool stratify = true) {
    if (repeats < 1) throw InvalidArgument("repeats must be at least 1");
    const Index n = dataset.n();
    CvReport report;
    report.estimator = spec.tag;
    report.metric_name = spec.classification ? "accuracy" : "mse";
    report.protocol = std::to_string(repeats) + " random repetition" + (repeats == 1 ? "" : "s") +
                      " of " + std::to_string(k_outer) + "-fold cross-validation, with " +
                      std::to_string(k_inner) + "-fold cross-validation for grid search";

    std::vector<double> metrics;
    for (int rep = 0; rep < repeats; ++rep) {
        const auto folds =
            kfold_split(n, k_outer, derive_seed(seed, 0x0c7e4, static_cast<std::uint64_t>(rep)),
                        spec.classification && stratify ? std::optional<Vector>(dataset.response)
                                                        : std::nullopt);
        for (int f = 0; f < k_outer; ++f) {
            const auto& test_idx = folds[static_cast<std::size_t>(f)];
            FunctionalDataset train = subset(dataset, complement_indices(n, test_idx));
            FunctionalDataset test = subset(dataset, test_idx);
            const std::uint64_t fold_seed =
                derive_seed(seed, 0x9e57, static_cast<std::uint64_t>(rep * 1000 + f));
            CvReport inner = grid_search(spec, train, grid, k_inner, fold_seed, stratify);
            if (rep == 0 && f == 0) report.inner_points = inner.inner_points;

            EstimatorSpec refit_spec = spec;
            for (const auto& [k, v] : inner.selected) refit_spec.params[k] = v;
            auto fit = fit_dataset(refit_spec, train, derive_seed(fold_seed, 0xbe57));
            OuterFoldResult outer;
            outer.repeat = rep;
            outer.fold = f;
            outer.selected = inner.selected;
            outer.metric = evaluate_fit(*fit, test, spec.classification);
            metrics.push_back(outer.metric);
            report.outer.push_back(std::move(outer));
        }
    }
    double mean = 0.0;
    for (double m : metrics) mean += m;
    mean /= static_cast<double>(metrics.size());
    report.overall_mean = mean;
    report.overall_sd = detail::sample_sd(metrics, mean);
    if (!report.outer.empty()) report.selected = report.outer.front().selected;
    return report;
}

} // namespace sacr

#endif
