#ifndef SACR_PIPELINE_HPP
#define SACR_PIPELINE_HPP

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "sacr/dataset.hpp"
#include "sacr/folds.hpp"
#include "sacr/lasso.hpp"
#include "sacr/sacr.hpp"
#include "sacr/two_stage.hpp"

namespace sacr {

/// An estimator choice plus its hyperparameter point. The center override
/// (standardized scale) feeds centered-ridge and, when present, SACR in
/// place of the per-dataset ridge centerfunction.
struct EstimatorSpec {
    std::string tag;
    std::map<std::string, double> params;
    bool classification = false;
    std::optional<Vector> center;

    double param(const std::string& name, double fallback) const {
        auto it = params.find(name);
        return it == params.end() ? fallback : it->second;
    }
    double required(const std::string& name) const {
        auto it = params.find(name);
        if (it == params.end())
            throw InvalidArgument("estimator '" + tag + "' needs parameter '" + name + "'");
        return it->second;
    }
};

inline const std::vector<std::string>& known_estimators() {
    static const std::vector<std::string> tags = {
        "ridge",        "centered-ridge", "roughness", "sacr", "sacr-logistic",
        "lasso",        "adaptive-lasso", "relaxed-lasso", "nng", "bar"};
    return tags;
}

inline bool is_known_estimator(const std::string& tag) {
    for (const auto& t : known_estimators())
        if (t == tag) return true;
    return false;
}

inline bool is_logistic_tag(const std::string& tag) { return tag == "sacr-logistic"; }

namespace detail {

// Ridge initial at a cross-validated lambda (3-fold over the default
// log-spaced grid); the standing initial estimator for the adaptive lasso
// and the garrote.
inline Vector ridge_cv_initial(const Matrix& a, const Vector& y, std::uint64_t seed) {
    const Index n = a.rows();
    std::vector<double> lambdas;
    for (int i = 0; i < 20; ++i)
        lambdas.push_back(std::pow(10.0, -4.0 + 8.0 * static_cast<double>(i) / 19.0));
    const int k = n >= 3 ? 3 : 2;
    auto folds = kfold_split(n, k, derive_seed(seed, 0x1d9e));
    double best_score = kInf;
    double best_lambda = lambdas.back();
    for (double lambda : lambdas) {
        double score = 0.0;
        for (const auto& fold : folds) {
            auto train_idx = complement_indices(n, fold);
            Matrix at(static_cast<Index>(train_idx.size()), a.cols());
            Vector yt(static_cast<Index>(train_idx.size()));
            for (Index i = 0; i < at.rows(); ++i) {
                at.row(i) = a.row(train_idx[static_cast<std::size_t>(i)]);
                yt(i) = y(train_idx[static_cast<std::size_t>(i)]);
            }
            Vector beta = fit_ridge(at, yt, lambda).beta;
            for (Index idx : fold) {
                const double r = y(idx) - a.row(idx).dot(beta);
                score += r * r;
            }
        }
        if (score < best_score || (score == best_score && lambda > best_lambda)) {
            best_score = score;
            best_lambda = lambda;
        }
    }
    return fit_ridge(a, y, best_lambda).beta;
}

} // namespace detail

/// Standardizes the training data, fits the requested estimator on the
/// design matrix, and attaches the standardization so the returned fit
/// predicts on raw curves. `seed` drives internal fold splits (initial
/// estimators selected by cross-validation).
inline std::unique_ptr<LinearFit> fit_dataset(const EstimatorSpec& spec,
                                              const FunctionalDataset& train,
                                              std::uint64_t seed = 0) {
    const bool logistic = is_logistic_tag(spec.tag);
    auto [std_ds, params] = standardize(train, /*center_response=*/!logistic);
    Matrix a = design_matrix(std_ds);
    const Vector& y = std_ds.response;
    if (spec.center && spec.center->size() != a.cols())
        throw GridMismatch("center override has " + std::to_string(spec.center->size()) +
                           " entries, design has " + std::to_string(a.cols()) + " columns");

    std::unique_ptr<LinearFit> fit;
    const std::string& tag = spec.tag;
    if (tag == "ridge") {
        fit = std::make_unique<LinearFit>(fit_ridge(a, y, spec.required("lambda")));
    } else if (tag == "centered-ridge") {
        Vector center = spec.center ? *spec.center : Vector::Zero(a.cols());
        fit = std::make_unique<LinearFit>(
            fit_centered_ridge(a, y, spec.required("lambda"), center));
    } else if (tag == "roughness") {
        fit = std::make_unique<LinearFit>(fit_roughness(a, y, spec.required("lambda")));
    } else if (tag == "lasso") {
        fit = std::make_unique<LinearFit>(fit_lasso(a, y, spec.required("lambda")));
    } else if (tag == "adaptive-lasso") {
        Vector initial = detail::ridge_cv_initial(a, y, seed);
        fit = std::make_unique<LinearFit>(fit_adaptive_lasso(
            a, y, spec.required("lambda"), spec.param("gamma", 1.0), initial));
    } else if (tag == "relaxed-lasso") {
        fit = std::make_unique<LinearFit>(
            fit_relaxed_lasso(a, y, spec.required("lambda"), spec.param("phi_relax", 1.0)));
    } else if (tag == "nng") {
        Vector initial = detail::ridge_cv_initial(a, y, seed);
        fit = std::make_unique<LinearFit>(fit_nng(a, y, spec.required("lambda"), initial));
    } else if (tag == "bar") {
        const double lambda = spec.required("lambda");
        Vector initial = fit_ridge(a, y, lambda).beta;
        fit = std::make_unique<LinearFit>(fit_bar(a, y, lambda, initial));
    } else if (tag == "sacr") {
        const double lambda = spec.required("lambda");
        const double phi = spec.param("phi", 1.0);
        SacrFit sf = spec.center ? fit_sacr(a, y, lambda, phi, *spec.center)
                                 : fit_sacr(a, y, lambda, phi);
        fit = std::make_unique<SacrFit>(std::move(sf));
    } else if (tag == "sacr-logistic") {
        const double lambda = spec.required("lambda");
        const double phi = spec.param("phi", 1.0);
        SacrFit sf = spec.center ? fit_sacr_logistic(a, y, lambda, phi, *spec.center)
                                 : fit_sacr_logistic(a, y, lambda, phi);
        fit = std::make_unique<SacrFit>(std::move(sf));
    } else if (tag == "mean") {
        // null model baseline: constant prediction at the training mean
        fit = std::make_unique<LinearFit>();
        fit->beta = Vector::Zero(a.cols());
        fit->intercept = y.mean();
        fit->penalty_tag = "mean";
    } else {
        throw InvalidArgument("unknown estimator '" + tag + "'");
    }
    fit->standardized = true;
    fit->standardization = std::move(params);
    return fit;
}

/// Held-out metric for a fitted model: mse for regression, accuracy (%)
/// for classification (regression fits on labels are thresholded at 0.5).
inline double evaluate_fit(const LinearFit& fit, const FunctionalDataset& test,
                           bool classification) {
    if (classification) return metric_accuracy(predict_labels(fit, test), test.response);
    return metric_mse(predict(fit, test), test.response);
}

} // namespace sacr

#endif
