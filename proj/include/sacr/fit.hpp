#ifndef SACR_FIT_HPP
#define SACR_FIT_HPP

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sacr/dataset.hpp"
#include "sacr/errors.hpp"
#include "sacr/qp.hpp"
#include "sacr/types.hpp"

namespace sacr {

/// Fitted linear model: intercept plus coefficient-function values on the
/// grid, tagged with the penalty that produced it.
struct LinearFit {
    double intercept = 0.0;
    Vector beta;
    std::string penalty_tag;
    std::map<std::string, double> hyperparams;
    bool logistic = false;
    bool standardized = false; // fitted on standardized inputs
    std::optional<StandardizationParams> standardization;
    bool flagged = false;
    std::string flag_reason;

    virtual ~LinearFit() = default;
};

/// SACR fit: the coefficient function plus the jointly estimated weight
/// function, the initial centerfunction and the certified QP residuals.
struct SacrFit : LinearFit {
    Vector w;
    Vector center;
    double lambda = 0.0;
    double phi = 1.0;
    KktResiduals kkt;
};

inline double sigmoid(double v) {
    if (v >= 0.0) return 1.0 / (1.0 + std::exp(-v));
    const double e = std::exp(v);
    return e / (1.0 + e);
}

/// Predictions on a dataset. Standardization recorded at fit time is
/// applied to the curves first; regression fits add the stored response
/// mean back, logistic fits return probabilities.
inline Vector predict(const LinearFit& fit, const FunctionalDataset& ds) {
    if (fit.beta.size() != ds.p())
        throw GridMismatch("fit has " + std::to_string(fit.beta.size()) +
                           " grid points, dataset has " + std::to_string(ds.p()));
    if (fit.standardized && !fit.standardization)
        throw MissingStandardization("fit was trained on standardized data but carries no "
                                     "standardization parameters");
    Matrix curves = fit.standardization ? apply_standardization(*fit.standardization, ds.curves)
                                        : ds.curves;
    Vector lin = (curves * fit.beta) * ds.delta;
    lin.array() += fit.intercept;
    if (fit.logistic) {
        for (Index i = 0; i < lin.size(); ++i) lin(i) = sigmoid(lin(i));
        return lin;
    }
    if (fit.standardization && fit.standardization->response_mean)
        lin.array() += *fit.standardization->response_mean;
    return lin;
}

/// Hard labels by thresholding at 0.5 (probabilities for logistic fits,
/// raw predictions otherwise).
inline std::vector<int> predict_labels(const LinearFit& fit, const FunctionalDataset& ds) {
    Vector values = predict(fit, ds);
    std::vector<int> labels(static_cast<std::size_t>(values.size()));
    for (Index i = 0; i < values.size(); ++i)
        labels[static_cast<std::size_t>(i)] = values(i) >= 0.5 ? 1 : 0;
    return labels;
}

} // namespace sacr

#endif
