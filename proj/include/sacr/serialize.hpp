#ifndef SACR_SERIALIZE_HPP
#define SACR_SERIALIZE_HPP

#include <cstdio>
#include <fstream>
#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "sacr/dataset.hpp"
#include "sacr/fit.hpp"
#include "sacr/model_selection.hpp"

namespace sacr {

using Json = nlohmann::json;

/// Shortest text that parses back to the same double ("%.17g").
inline std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

namespace detail {

inline std::vector<double> to_std(const Vector& v) {
    return std::vector<double>(v.data(), v.data() + v.size());
}

inline Vector from_std(const std::vector<double>& v) {
    Vector out(static_cast<Index>(v.size()));
    for (Index i = 0; i < out.size(); ++i) out(i) = v[static_cast<std::size_t>(i)];
    return out;
}

} // namespace detail

inline Json fit_to_json(const LinearFit& fit) {
    Json j;
    j["estimator"] = fit.penalty_tag;
    j["hyperparameters"] = fit.hyperparams;
    j["intercept"] = fit.intercept;
    j["beta"] = detail::to_std(fit.beta);
    j["logistic"] = fit.logistic;
    j["standardized"] = fit.standardized;
    if (fit.standardization) {
        const auto& s = *fit.standardization;
        Json js;
        js["means"] = detail::to_std(s.means);
        js["scales"] = detail::to_std(s.scales);
        if (s.response_mean) js["response_mean"] = *s.response_mean;
        js["constant_columns"] = s.constant_columns;
        j["standardization"] = std::move(js);
    }
    if (fit.flagged) j["flag"] = fit.flag_reason;
    if (const auto* sacr_fit = dynamic_cast<const SacrFit*>(&fit)) {
        j["w"] = detail::to_std(sacr_fit->w);
        j["center"] = detail::to_std(sacr_fit->center);
        j["lambda"] = sacr_fit->lambda;
        j["phi"] = sacr_fit->phi;
        j["kkt"] = {{"stationarity", sacr_fit->kkt.stationarity},
                    {"primal", sacr_fit->kkt.primal},
                    {"complementarity", sacr_fit->kkt.complementarity}};
    }
    return j;
}

inline std::unique_ptr<LinearFit> fit_from_json(const Json& j) {
    std::unique_ptr<LinearFit> fit;
    if (j.contains("w")) {
        auto sf = std::make_unique<SacrFit>();
        sf->w = detail::from_std(j.at("w").get<std::vector<double>>());
        sf->center = detail::from_std(j.at("center").get<std::vector<double>>());
        sf->lambda = j.at("lambda").get<double>();
        sf->phi = j.at("phi").get<double>();
        if (j.contains("kkt")) {
            sf->kkt.stationarity = j["kkt"].at("stationarity").get<double>();
            sf->kkt.primal = j["kkt"].at("primal").get<double>();
            sf->kkt.complementarity = j["kkt"].at("complementarity").get<double>();
        }
        fit = std::move(sf);
    } else {
        fit = std::make_unique<LinearFit>();
    }
    fit->penalty_tag = j.at("estimator").get<std::string>();
    if (j.contains("hyperparameters"))
        fit->hyperparams = j["hyperparameters"].get<std::map<std::string, double>>();
    fit->intercept = j.at("intercept").get<double>();
    fit->beta = detail::from_std(j.at("beta").get<std::vector<double>>());
    fit->logistic = j.value("logistic", false);
    fit->standardized = j.value("standardized", false);
    if (j.contains("standardization")) {
        StandardizationParams s;
        const Json& js = j["standardization"];
        s.means = detail::from_std(js.at("means").get<std::vector<double>>());
        s.scales = detail::from_std(js.at("scales").get<std::vector<double>>());
        if (js.contains("response_mean")) s.response_mean = js["response_mean"].get<double>();
        if (js.contains("constant_columns"))
            s.constant_columns = js["constant_columns"].get<std::vector<Index>>();
        fit->standardization = std::move(s);
    }
    if (j.contains("flag")) {
        fit->flagged = true;
        fit->flag_reason = j["flag"].get<std::string>();
    }
    return fit;
}

inline void save_fit(const LinearFit& fit, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write '" + path + "'");
    out << fit_to_json(fit).dump(2) << "\n";
}

inline std::unique_ptr<LinearFit> load_fit(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path + "'");
    Json j;
    try {
        in >> j;
        return fit_from_json(j);
    } catch (const Json::exception& e) {
        throw ParseError("bad fit file '" + path + "': " + e.what());
    }
}

inline Json cv_report_to_json(const CvReport& report) {
    Json j;
    j["estimator"] = report.estimator;
    j["metric"] = report.metric_name;
    if (!report.protocol.empty()) j["protocol"] = report.protocol;
    j["selected"] = report.selected;
    Json inner = Json::array();
    for (const auto& point : report.inner_points) {
        Json jp;
        jp["params"] = point.params;
        if (point.failed) {
            jp["failed"] = true;
            jp["error"] = point.error;
        } else {
            jp["mean"] = point.mean;
            jp["sd"] = point.sd;
        }
        inner.push_back(std::move(jp));
    }
    j["inner"] = std::move(inner);
    if (!report.outer.empty()) {
        Json outer = Json::array();
        for (const auto& of : report.outer) {
            outer.push_back({{"repeat", of.repeat},
                             {"fold", of.fold},
                             {"selected", of.selected},
                             {"metric", of.metric}});
        }
        j["outer"] = std::move(outer);
        j["summary"] = {{"mean", report.overall_mean}, {"sd", report.overall_sd}};
    }
    return j;
}

namespace detail {

inline std::string mean_sd_cell(double mean, double sd) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.4g \302\261 %.3g", mean, sd); // UTF-8 plus-minus
    return buf;
}

} // namespace detail

/// One "estimator   mean ± sd" row per report.
inline std::string comparison_table(const std::vector<CvReport>& reports) {
    std::size_t width = 9; // "estimator"
    for (const auto& r : reports) width = std::max(width, r.estimator.size());
    std::string metric = reports.empty() ? "metric" : reports.front().metric_name;
    std::string out;
    out += "estimator";
    out.append(width - 9 + 2, ' ');
    out += metric + "\n";
    out.append(width, '-');
    out += "  ";
    out.append(16, '-');
    out += "\n";
    for (const auto& r : reports) {
        out += r.estimator;
        out.append(width - r.estimator.size() + 2, ' ');
        out += detail::mean_sd_cell(r.overall_mean, r.overall_sd) + "\n";
    }
    return out;
}

inline std::string cv_report_table(const CvReport& report) {
    std::string out = comparison_table({report});
    if (!report.protocol.empty()) out += "protocol: " + report.protocol + "\n";
    if (!report.selected.empty()) {
        out += "selected:";
        for (const auto& [k, v] : report.selected) out += " " + k + "=" + format_double(v);
        out += "\n";
    }
    return out;
}

// ---- CSV writers (deterministic "%.17g" formatting) ----

inline void write_dataset_csv(const FunctionalDataset& ds, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write '" + path + "'");
    for (Index j = 0; j < ds.p(); ++j) out << "t" << (j + 1) << ",";
    out << "response\n";
    for (Index i = 0; i < ds.n(); ++i) {
        for (Index j = 0; j < ds.p(); ++j) out << format_double(ds.curves(i, j)) << ",";
        out << format_double(ds.response(i)) << "\n";
    }
}

/// Column CSV: header names, then one row per grid point.
inline void write_columns_csv(const std::string& path, const std::vector<std::string>& names,
                              const std::vector<const Vector*>& columns) {
    if (names.size() != columns.size())
        throw DimensionMismatch("names and columns count differ");
    std::ofstream out(path);
    if (!out) throw IoError("cannot write '" + path + "'");
    for (std::size_t c = 0; c < names.size(); ++c) out << (c ? "," : "") << names[c];
    out << "\n";
    const Index rows = columns.empty() ? 0 : columns.front()->size();
    for (const auto* col : columns)
        if (col->size() != rows) throw DimensionMismatch("column lengths differ");
    for (Index i = 0; i < rows; ++i) {
        for (std::size_t c = 0; c < columns.size(); ++c)
            out << (c ? "," : "") << format_double((*columns[c])(i));
        out << "\n";
    }
}

} // namespace sacr

#endif
