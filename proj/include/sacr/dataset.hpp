#ifndef SACR_DATASET_HPP
#define SACR_DATASET_HPP

#include <algorithm>
#include <charconv>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "sacr/errors.hpp"
#include "sacr/types.hpp"

namespace sacr {

/// N curves evaluated on a shared equispaced grid over (0, 1], plus a
/// response per curve (real valued, or {0,1} labels).
struct FunctionalDataset {
    Vector grid;    // t_j = j / p
    Matrix curves;  // N x p
    Vector response;
    double delta = 0.0; // grid spacing, 1/p
    std::vector<Index> dropped_rows; // 1-based data rows dropped at ingestion

    Index n() const { return curves.rows(); }
    Index p() const { return curves.cols(); }

    void validate() const {
        if (curves.rows() != response.size())
            throw DimensionMismatch("curves rows and response length differ");
        if (grid.size() != curves.cols()) throw DimensionMismatch("grid and curve width differ");
        if (!curves.allFinite() || !response.allFinite())
            throw InvalidArgument("dataset contains non-finite values");
        for (Index j = 1; j < grid.size(); ++j) {
            if (!(grid(j) > grid(j - 1))) throw InvalidArgument("grid is not strictly increasing");
            if (std::abs((grid(j) - grid(j - 1)) - delta) > 1e-12)
                throw InvalidArgument("grid is not equispaced");
        }
    }
};

inline Vector make_grid(Index p) {
    Vector g(p);
    for (Index j = 0; j < p; ++j) g(j) = static_cast<double>(j + 1) / static_cast<double>(p);
    return g;
}

inline FunctionalDataset make_dataset(Matrix curves, Vector response) {
    FunctionalDataset ds;
    ds.grid = make_grid(curves.cols());
    ds.delta = 1.0 / static_cast<double>(curves.cols());
    ds.curves = std::move(curves);
    ds.response = std::move(response);
    ds.validate();
    return ds;
}

/// Row subset (CV folds); grid and spacing are shared.
inline FunctionalDataset subset(const FunctionalDataset& ds, const std::vector<Index>& rows) {
    FunctionalDataset out;
    out.grid = ds.grid;
    out.delta = ds.delta;
    out.curves.resize(static_cast<Index>(rows.size()), ds.p());
    out.response.resize(static_cast<Index>(rows.size()));
    for (Index i = 0; i < static_cast<Index>(rows.size()); ++i) {
        out.curves.row(i) = ds.curves.row(rows[static_cast<std::size_t>(i)]);
        out.response(i) = ds.response(rows[static_cast<std::size_t>(i)]);
    }
    return out;
}

struct StandardizationParams {
    Vector means;
    Vector scales;
    std::optional<double> response_mean; // regression only
    std::vector<Index> constant_columns; // scale forced to 1
};

/// Column-wise centering and scaling to unit sample standard deviation.
/// Constant columns are centered, given scale 1 and flagged. The response
/// is centered only when center_response is set (regression).
inline std::pair<FunctionalDataset, StandardizationParams>
standardize(const FunctionalDataset& ds, bool center_response = true) {
    const Index n = ds.n(), p = ds.p();
    if (n < 2) throw InvalidArgument("standardize needs at least 2 rows");
    StandardizationParams params;
    params.means = ds.curves.colwise().mean();
    params.scales.resize(p);
    for (Index j = 0; j < p; ++j) {
        const double ss = (ds.curves.col(j).array() - params.means(j)).square().sum();
        const double sd = std::sqrt(ss / static_cast<double>(n - 1));
        if (sd <= 1e-14 * (1.0 + std::abs(params.means(j)))) {
            params.scales(j) = 1.0;
            params.constant_columns.push_back(j);
        } else {
            params.scales(j) = sd;
        }
    }
    FunctionalDataset out;
    out.grid = ds.grid;
    out.delta = ds.delta;
    out.curves = (ds.curves.rowwise() - params.means.transpose()).array().rowwise() /
                 params.scales.transpose().array();
    if (center_response) {
        params.response_mean = ds.response.mean();
        out.response = ds.response.array() - *params.response_mean;
    } else {
        out.response = ds.response;
    }
    return {std::move(out), std::move(params)};
}

inline Matrix apply_standardization(const StandardizationParams& params, const Matrix& curves) {
    if (curves.cols() != params.means.size())
        throw GridMismatch("curves have " + std::to_string(curves.cols()) +
                           " columns, standardization expects " +
                           std::to_string(params.means.size()));
    return (curves.rowwise() - params.means.transpose()).array().rowwise() /
           params.scales.transpose().array();
}

/// Design matrix of the discretized integral: A_ij = x_i(t_j) * dt, so that
/// A * beta is the right-Riemann approximation of the model integral.
inline Matrix design_matrix(const FunctionalDataset& ds) { return ds.curves * ds.delta; }

struct CsvOptions {
    bool has_header = true;
    std::string response_column; // name, or 0-based index; empty = last column
    bool label_mode = false;     // map the two distinct values to {0,1} in sorted order
};

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            fields.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur.push_back(c);
        }
    }
    fields.push_back(cur);
    for (auto& f : fields) {
        const auto b = f.find_first_not_of(" \t");
        const auto e = f.find_last_not_of(" \t");
        f = (b == std::string::npos) ? std::string() : f.substr(b, e - b + 1);
    }
    return fields;
}

inline bool parse_double(const std::string& tok, double& out) {
    const char* begin = tok.data();
    const char* end = begin + tok.size();
    auto [ptr, ec] = std::from_chars(begin, end, out);
    return ec == std::errc() && ptr == end;
}

} // namespace detail

/// Reads a numeric CSV: one response column, remaining columns are the
/// ordered grid evaluations. Rows with missing (empty) cells are dropped
/// and their 1-based indices recorded; malformed cells raise ParseError
/// with 1-based row/column.
inline FunctionalDataset load_csv(const std::string& path, const CsvOptions& opts = {}) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path + "'");
    std::string line;
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
    std::vector<Index> dropped;
    Index expected_cols = -1;
    Index data_row = 0; // 1-based, counts data rows only
    Index file_row = 0;
    bool first_content = true;
    while (std::getline(in, line)) {
        ++file_row;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        auto fields = detail::split_csv_line(line);
        if (first_content && opts.has_header) {
            header = fields;
            expected_cols = static_cast<Index>(fields.size());
            first_content = false;
            continue;
        }
        first_content = false;
        if (expected_cols < 0) expected_cols = static_cast<Index>(fields.size());
        ++data_row;
        if (static_cast<Index>(fields.size()) != expected_cols)
            throw RaggedRows("row " + std::to_string(data_row) + " has " +
                             std::to_string(fields.size()) + " fields, expected " +
                             std::to_string(expected_cols));
        std::vector<double> vals(fields.size());
        bool missing = false;
        for (std::size_t c = 0; c < fields.size(); ++c) {
            if (fields[c].empty()) {
                missing = true;
                continue;
            }
            if (!detail::parse_double(fields[c], vals[c]))
                throw ParseError("cannot parse '" + fields[c] + "' at row " +
                                 std::to_string(data_row) + ", column " + std::to_string(c + 1));
        }
        if (missing) {
            dropped.push_back(data_row);
            continue;
        }
        rows.push_back(std::move(vals));
    }
    if (rows.empty()) throw ParseError("no usable data rows in '" + path + "'");
    const Index cols = expected_cols;
    if (cols < 2) throw ParseError("need at least one curve column and a response column");

    // resolve the response column
    Index resp = cols - 1;
    if (!opts.response_column.empty()) {
        bool found = false;
        if (opts.has_header) {
            for (Index j = 0; j < cols; ++j) {
                if (header[static_cast<std::size_t>(j)] == opts.response_column) {
                    resp = j;
                    found = true;
                    break;
                }
            }
        }
        if (!found) {
            int idx = 0;
            const auto& s = opts.response_column;
            auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), idx);
            if (ec != std::errc() || ptr != s.data() + s.size() || idx < 0 || idx >= cols)
                throw ParseError("response column '" + s + "' not found");
            resp = idx;
        }
    }

    const Index n = static_cast<Index>(rows.size());
    const Index p = cols - 1;
    Matrix curves(n, p);
    Vector response(n);
    for (Index i = 0; i < n; ++i) {
        Index k = 0;
        for (Index j = 0; j < cols; ++j) {
            const double v = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
            if (j == resp)
                response(i) = v;
            else
                curves(i, k++) = v;
        }
    }
    if (opts.label_mode) {
        std::set<double> values(response.begin(), response.end());
        if (values.size() != 2) {
            std::ostringstream msg;
            msg << "label mode needs exactly 2 distinct response values, got " << values.size();
            throw NonBinaryLabels(msg.str());
        }
        const double low = *values.begin();
        for (Index i = 0; i < n; ++i) response(i) = (response(i) == low) ? 0.0 : 1.0;
    }
    FunctionalDataset ds = make_dataset(std::move(curves), std::move(response));
    ds.dropped_rows = std::move(dropped);
    return ds;
}

} // namespace sacr

#endif
