// sacr: penalized scalar-on-function regression from the command line.
// Subcommands: simulate, fit, evaluate, predict. Exit codes: 0 success,
// 2 usage error, 3 data error, 4 numerical failure.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sacr/cli_support.hpp"
#include "sacr/model_selection.hpp"
#include "sacr/serialize.hpp"
#include "sacr/simulate.hpp"

namespace {

using namespace sacr;

std::filesystem::path out_path(const std::string& dir, const std::string& name) {
    return std::filesystem::path(dir) / name;
}

void write_run_config(CLI::App* sub, const std::string& out_dir) {
    ensure_directory(out_dir);
    std::ofstream out(out_path(out_dir, "run_config.txt"));
    out << "command=" << sub->get_name() << "\n" << sub->config_to_str(true, false);
}

const CLI::Validator unit_interval_open(
    [](std::string& s) -> std::string {
        try {
            const double v = std::stod(s);
            if (v > 0.0 && v <= 1.0) return {};
        } catch (const std::exception&) {
        }
        return "value must lie in (0, 1]";
    },
    "(0,1]");

struct IngestOptions {
    std::string data;
    std::string response_col;
    bool no_header = false;
    bool classification = false;

    FunctionalDataset load() const {
        CsvOptions opts;
        opts.has_header = !no_header;
        opts.response_column = response_col;
        opts.label_mode = classification;
        return load_csv(data, opts);
    }
};

void add_ingest_options(CLI::App* sub, IngestOptions& opts, bool require_data = true) {
    auto* data = sub->add_option("--data", opts.data, "input CSV (curves + response column)");
    if (require_data) data->required();
    sub->add_option("--response-col", opts.response_col,
                    "response column name or 0-based index (default: last column)");
    sub->add_flag("--no-header", opts.no_header, "the CSV has no header row");
    sub->add_flag("--classification", opts.classification,
                  "binary response: map the two values to {0,1} and report accuracy");
}

struct GridOptions {
    std::string lambda_spec, phi_spec, gamma_spec, phi_relax_spec;

    HyperGrid build() const {
        HyperGrid grid = HyperGrid::defaults();
        if (!lambda_spec.empty()) grid.lambdas = parse_grid_spec(lambda_spec);
        if (!phi_spec.empty()) grid.phis = parse_grid_spec(phi_spec);
        if (!gamma_spec.empty()) grid.gammas = parse_grid_spec(gamma_spec);
        if (!phi_relax_spec.empty()) grid.phi_relaxes = parse_grid_spec(phi_relax_spec);
        grid.validate();
        return grid;
    }
};

void add_grid_options(CLI::App* sub, GridOptions& opts) {
    const char* format = " (\"v1,v2,...\", \"logspace:lo:hi:n\" or \"linspace:lo:hi:n\")";
    sub->add_option("--lambda-grid", opts.lambda_spec,
                    std::string("lambda search grid") + format);
    sub->add_option("--phi-grid", opts.phi_spec, std::string("phi search grid") + format);
    sub->add_option("--gamma-grid", opts.gamma_spec, std::string("gamma search grid") + format);
    sub->add_option("--phi-relax-grid", opts.phi_relax_spec,
                    std::string("phi_relax search grid") + format);
}

void write_fit_outputs(const LinearFit& fit, const Vector& grid, const std::string& out_dir) {
    save_fit(fit, out_path(out_dir, "fit.json").string());
    write_columns_csv(out_path(out_dir, "coefficients.csv").string(), {"t", "beta"},
                      {&grid, &fit.beta});
    if (const auto* sf = dynamic_cast<const SacrFit*>(&fit)) {
        write_columns_csv(out_path(out_dir, "sacr_components.csv").string(),
                          {"t", "beta", "w", "center"},
                          {&grid, &sf->beta, &sf->w, &sf->center});
    }
}

// ---- simulate ----

struct SimulateArgs {
    SimulationConfig config;
    bool correlated = false;
    std::string beta_file;
    std::string out_dir = ".";
};

void run_simulate(const SimulateArgs& args) {
    SimulationConfig config = args.config;
    config.covariance =
        args.correlated ? CoefficientCovariance::correlated : CoefficientCovariance::independent;
    Vector beta = args.beta_file.empty() ? default_true_beta(config.grid_size)
                                         : load_coefficient_file(args.beta_file);
    if (beta.size() != config.grid_size)
        throw GridMismatch("true beta has " + std::to_string(beta.size()) +
                           " values, grid has " + std::to_string(config.grid_size));
    FunctionalDataset ds = simulate(config, beta);
    ensure_directory(args.out_dir);
    write_dataset_csv(ds, out_path(args.out_dir, "simulated.csv").string());
    write_columns_csv(out_path(args.out_dir, "true_beta.csv").string(), {"t", "beta"},
                      {&ds.grid, &beta});
    std::cout << "simulated " << ds.n() << " curves on " << ds.p() << " grid points -> "
              << args.out_dir << "\n";
}

// ---- fit ----

struct FitArgs {
    IngestOptions ingest;
    std::string estimator;
    std::optional<double> lambda, phi, gamma, phi_relax;
    std::string center_file;
    bool cv = false;
    int k_inner = 3;
    GridOptions grid;
    std::uint64_t seed = 0;
    std::string out_dir = ".";
    bool stratify = true;
};

void run_fit(const FitArgs& args) {
    FunctionalDataset ds = args.ingest.load();
    EstimatorSpec spec;
    spec.tag = args.estimator;
    spec.classification = args.ingest.classification;
    if (args.lambda) spec.params["lambda"] = *args.lambda;
    if (args.phi) spec.params["phi"] = *args.phi;
    if (args.gamma) spec.params["gamma"] = *args.gamma;
    if (args.phi_relax) spec.params["phi_relax"] = *args.phi_relax;
    if (!args.center_file.empty()) spec.center = load_coefficient_file(args.center_file);

    ensure_directory(args.out_dir);
    if (args.cv) {
        CvReport report = grid_search(spec, ds, args.grid.build(), args.k_inner, args.seed,
                                      args.stratify);
        for (const auto& [k, v] : report.selected) spec.params[k] = v;
        std::ofstream gs(out_path(args.out_dir, "grid_search.json"));
        gs << cv_report_to_json(report).dump(2) << "\n";
        std::cout << "selected:";
        for (const auto& [k, v] : report.selected) std::cout << " " << k << "=" << format_double(v);
        std::cout << "\n";
    }
    auto fit = fit_dataset(spec, ds, args.seed);
    write_fit_outputs(*fit, ds.grid, args.out_dir);
    std::cout << "fit " << fit->penalty_tag;
    for (const auto& [k, v] : fit->hyperparams) std::cout << " " << k << "=" << format_double(v);
    if (fit->flagged) std::cout << " [flagged: " << fit->flag_reason << "]";
    std::cout << " -> " << args.out_dir << "\n";
}

// ---- evaluate ----

struct EvaluateArgs {
    IngestOptions ingest;
    std::vector<std::string> estimators;
    int k_outer = 5;
    int k_inner = 3;
    int repeats = 1;
    GridOptions grid;
    std::uint64_t seed = 0;
    std::string out_dir = ".";
    bool stratify = true;
};

void run_evaluate(const EvaluateArgs& args) {
    FunctionalDataset ds = args.ingest.load();
    HyperGrid grid = args.grid.build();
    ensure_directory(args.out_dir);
    std::vector<CvReport> reports;
    std::vector<std::string> failures;
    bool printed_protocol = false;
    for (const auto& tag : args.estimators) {
        EstimatorSpec spec;
        spec.tag = tag;
        spec.classification = args.ingest.classification;
        try {
            CvReport report = nested_evaluate(spec, ds, grid, args.k_outer, args.k_inner,
                                              args.repeats, args.seed, args.stratify);
            if (!printed_protocol) {
                std::cout << "protocol: " << report.protocol << "\n";
                printed_protocol = true;
            }
            std::ofstream js(out_path(args.out_dir, "cv_" + tag + ".json"));
            js << cv_report_to_json(report).dump(2) << "\n";
            std::ofstream txt(out_path(args.out_dir, "cv_" + tag + ".txt"));
            txt << cv_report_table(report);
            std::cout << tag << ": " << format_double(report.overall_mean) << " +/- "
                      << format_double(report.overall_sd) << " (" << report.metric_name << ")\n";
            reports.push_back(std::move(report));
        } catch (const Error& e) {
            failures.push_back(tag + ": " + e.what());
            std::cerr << "estimator " << tag << " failed: " << e.what() << "\n";
        }
    }
    std::string table = comparison_table(reports);
    for (const auto& f : failures) table += "failed  " + f + "\n";
    std::ofstream cmp(out_path(args.out_dir, "comparison.txt"));
    cmp << table;
    Json combined = Json::array();
    for (const auto& r : reports) combined.push_back(cv_report_to_json(r));
    std::ofstream cmpj(out_path(args.out_dir, "comparison.json"));
    cmpj << combined.dump(2) << "\n";
    std::cout << table;
    if (reports.empty()) throw SolverError("every estimator failed");
}

// ---- predict ----

struct PredictArgs {
    std::string fit_file;
    IngestOptions ingest;
    std::string out_dir = ".";
};

void run_predict(const PredictArgs& args) {
    auto fit = load_fit(args.fit_file);
    FunctionalDataset ds = args.ingest.response_col.empty() && !args.ingest.classification
                               ? load_curves_csv(args.ingest.data, !args.ingest.no_header)
                               : args.ingest.load();
    Vector values = predict(*fit, ds);
    ensure_directory(args.out_dir);
    if (fit->logistic) {
        Vector labels(values.size());
        for (Index i = 0; i < values.size(); ++i) labels(i) = values(i) >= 0.5 ? 1.0 : 0.0;
        write_columns_csv(out_path(args.out_dir, "predictions.csv").string(),
                          {"probability", "label"}, {&values, &labels});
    } else {
        write_columns_csv(out_path(args.out_dir, "predictions.csv").string(), {"prediction"},
                          {&values});
    }
    std::cout << "predicted " << values.size() << " rows -> " << args.out_dir << "\n";
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"penalized scalar-on-function regression toolkit"};
    app.require_subcommand(1);

    SimulateArgs sim;
    auto* sub_sim = app.add_subcommand("simulate", "draw a B-spline simulation dataset");
    sub_sim->add_option("--n", sim.config.n_samples, "number of curves")->capture_default_str();
    sub_sim->add_option("--grid-size", sim.config.grid_size, "grid length p")
        ->capture_default_str();
    sub_sim->add_option("--inner-knots", sim.config.inner_knots, "inner spline knots")
        ->capture_default_str();
    sub_sim->add_flag("--correlated", sim.correlated,
                      "draw correlated spline coefficients (rho^|i-j| covariance)");
    sub_sim->add_option("--rho", sim.config.correlation, "correlation parameter")
        ->capture_default_str();
    sub_sim->add_option("--noise-sd", sim.config.noise_sd, "response noise sd")
        ->check(CLI::NonNegativeNumber)
        ->capture_default_str();
    sub_sim->add_option("--knot-min", sim.config.knot_min, "left knot boundary")
        ->capture_default_str();
    sub_sim->add_option("--knot-max", sim.config.knot_max, "right knot boundary")
        ->capture_default_str();
    sub_sim->add_option("--beta-file", sim.beta_file,
                        "true coefficient function (one value per grid point)");
    sub_sim->add_option("--seed", sim.config.seed, "RNG seed")->capture_default_str();
    sub_sim->add_option("--out-dir", sim.out_dir, "output directory")->capture_default_str();
    sub_sim->set_config("--config");
    sub_sim->callback([&]() {
        run_simulate(sim);
        write_run_config(sub_sim, sim.out_dir);
    });

    FitArgs fit;
    auto* sub_fit = app.add_subcommand("fit", "fit one estimator");
    add_ingest_options(sub_fit, fit.ingest);
    sub_fit->add_option("--estimator", fit.estimator, "estimator name")
        ->required()
        ->check(CLI::IsMember(known_estimators()));
    sub_fit->add_option("--lambda", fit.lambda, "penalty strength")
        ->check(CLI::NonNegativeNumber);
    sub_fit->add_option("--phi", fit.phi, "sacr balance parameter")->check(unit_interval_open);
    sub_fit->add_option("--gamma", fit.gamma, "adaptive-lasso weight exponent")
        ->check(CLI::PositiveNumber);
    sub_fit->add_option("--phi-relax", fit.phi_relax, "relaxed-lasso relaxation")
        ->check(unit_interval_open);
    sub_fit->add_option("--center-file", fit.center_file,
                        "penalty center for centered-ridge / sacr (standardized scale)");
    sub_fit->add_flag("--cv", fit.cv, "select hyperparameters by inner cross-validation");
    sub_fit->add_option("--k-inner", fit.k_inner, "inner folds for --cv")->capture_default_str();
    add_grid_options(sub_fit, fit.grid);
    sub_fit->add_flag("--stratify,!--no-stratify", fit.stratify,
                      "stratify CV folds by class (classification only)");
    sub_fit->add_option("--seed", fit.seed, "RNG seed")->capture_default_str();
    sub_fit->add_option("--out-dir", fit.out_dir, "output directory")->capture_default_str();
    sub_fit->set_config("--config");
    sub_fit->callback([&]() {
        run_fit(fit);
        write_run_config(sub_fit, fit.out_dir);
    });

    EvaluateArgs eval;
    auto* sub_eval = app.add_subcommand("evaluate", "nested cross-validation comparison");
    add_ingest_options(sub_eval, eval.ingest);
    sub_eval
        ->add_option("--estimators", eval.estimators,
                     "comma-separated estimator list")
        ->required()
        ->delimiter(',')
        ->check(CLI::IsMember(known_estimators()));
    sub_eval->add_option("--k-outer", eval.k_outer, "outer folds")->capture_default_str();
    sub_eval->add_option("--k-inner", eval.k_inner, "inner folds for grid search")
        ->capture_default_str();
    sub_eval->add_option("--repeats", eval.repeats, "random repetitions of the outer split")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    add_grid_options(sub_eval, eval.grid);
    sub_eval->add_flag("--stratify,!--no-stratify", eval.stratify,
                       "stratify CV folds by class (classification only)");
    sub_eval->add_option("--seed", eval.seed, "RNG seed")->capture_default_str();
    sub_eval->add_option("--out-dir", eval.out_dir, "output directory")->capture_default_str();
    sub_eval->set_config("--config");
    sub_eval->callback([&]() {
        run_evaluate(eval);
        write_run_config(sub_eval, eval.out_dir);
    });

    PredictArgs pred;
    auto* sub_pred = app.add_subcommand("predict", "apply a stored fit to new curves");
    sub_pred->add_option("--fit", pred.fit_file, "fit JSON produced by the fit command")
        ->required();
    add_ingest_options(sub_pred, pred.ingest);
    sub_pred->add_option("--out-dir", pred.out_dir, "output directory")->capture_default_str();
    sub_pred->set_config("--config");
    sub_pred->callback([&]() {
        run_predict(pred);
        write_run_config(sub_pred, pred.out_dir);
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const sacr::Error& e) {
        std::cerr << e.what() << "\n";
        return e.exit_code();
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    }
    return 0;
}
