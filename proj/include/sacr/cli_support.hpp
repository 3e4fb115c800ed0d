#ifndef SACR_CLI_SUPPORT_HPP
#define SACR_CLI_SUPPORT_HPP

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "sacr/dataset.hpp"
#include "sacr/errors.hpp"

namespace sacr {

/// Grid specs accepted on the command line:
///   "0.1,1,10"            explicit values
///   "logspace:1e-4:1e4:20" log-spaced
///   "linspace:0.1:1:10"   linearly spaced
inline std::vector<double> parse_grid_spec(const std::string& spec) {
    auto bad = [&](const std::string& why) {
        throw InvalidArgument("grid spec '" + spec + "': " + why);
    };
    auto to_double = [&](const std::string& tok) {
        try {
            std::size_t used = 0;
            const double v = std::stod(tok, &used);
            if (used != tok.size()) bad("cannot parse '" + tok + "'");
            return v;
        } catch (const std::exception&) {
            bad("cannot parse '" + tok + "'");
            return 0.0;
        }
    };
    auto split = [](const std::string& s, char sep) {
        std::vector<std::string> parts;
        std::string cur;
        for (char c : s) {
            if (c == sep) {
                parts.push_back(cur);
                cur.clear();
            } else {
                cur.push_back(c);
            }
        }
        parts.push_back(cur);
        return parts;
    };
    const bool log_spaced = spec.rfind("logspace:", 0) == 0;
    const bool lin_spaced = spec.rfind("linspace:", 0) == 0;
    if (log_spaced || lin_spaced) {
        auto parts = split(spec.substr(9), ':');
        if (parts.size() != 3) bad("expected lo:hi:count");
        const double lo = to_double(parts[0]);
        const double hi = to_double(parts[1]);
        const int count = static_cast<int>(to_double(parts[2]));
        if (count < 1) bad("count must be at least 1");
        if (log_spaced && (lo <= 0.0 || hi <= 0.0)) bad("log spacing needs positive endpoints");
        std::vector<double> values;
        for (int i = 0; i < count; ++i) {
            const double t = count == 1 ? 0.0 : static_cast<double>(i) / (count - 1);
            values.push_back(log_spaced ? std::pow(10.0, std::log10(lo) + t * (std::log10(hi) - std::log10(lo)))
                                        : lo + t * (hi - lo));
        }
        return values;
    }
    std::vector<double> values;
    for (const auto& tok : split(spec, ','))
        if (!tok.empty()) values.push_back(to_double(tok));
    if (values.empty()) bad("no values");
    return values;
}

/// Coefficient file: one value per line; lines with commas contribute their
/// last field (so an exported "t,beta" CSV works directly). Non-numeric
/// header lines are skipped.
inline Vector load_coefficient_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path + "'");
    std::vector<double> values;
    std::string line;
    while (std::getline(in, line)) {
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        const auto comma = line.rfind(',');
        std::string tok = comma == std::string::npos ? line : line.substr(comma + 1);
        const auto b = tok.find_first_not_of(" \t\r");
        const auto e = tok.find_last_not_of(" \t\r");
        if (b == std::string::npos) continue;
        tok = tok.substr(b, e - b + 1);
        double v = 0.0;
        if (detail::parse_double(tok, v))
            values.push_back(v);
        else if (!values.empty())
            throw ParseError("bad value '" + tok + "' in '" + path + "'");
        // a non-numeric first line is treated as a header and skipped
    }
    if (values.empty()) throw ParseError("no numeric values in '" + path + "'");
    Vector out(static_cast<Index>(values.size()));
    for (Index i = 0; i < out.size(); ++i) out(i) = values[static_cast<std::size_t>(i)];
    return out;
}

/// Curves-only CSV (no response column); used by the predict command.
inline FunctionalDataset load_curves_csv(const std::string& path, bool has_header) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path + "'");
    std::string line;
    std::vector<std::vector<double>> rows;
    Index expected = -1;
    Index data_row = 0;
    bool first = true;
    while (std::getline(in, line)) {
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        auto fields = detail::split_csv_line(line);
        if (first && has_header) {
            expected = static_cast<Index>(fields.size());
            first = false;
            continue;
        }
        first = false;
        if (expected < 0) expected = static_cast<Index>(fields.size());
        ++data_row;
        if (static_cast<Index>(fields.size()) != expected)
            throw RaggedRows("row " + std::to_string(data_row) + " has " +
                             std::to_string(fields.size()) + " fields, expected " +
                             std::to_string(expected));
        std::vector<double> vals(fields.size());
        for (std::size_t c = 0; c < fields.size(); ++c) {
            if (!detail::parse_double(fields[c], vals[c]))
                throw ParseError("cannot parse '" + fields[c] + "' at row " +
                                 std::to_string(data_row) + ", column " + std::to_string(c + 1));
        }
        rows.push_back(std::move(vals));
    }
    if (rows.empty()) throw ParseError("no usable data rows in '" + path + "'");
    Matrix curves(static_cast<Index>(rows.size()), expected);
    for (Index i = 0; i < curves.rows(); ++i)
        for (Index j = 0; j < expected; ++j)
            curves(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    return make_dataset(std::move(curves), Vector::Zero(static_cast<Index>(rows.size())));
}

inline void ensure_directory(const std::string& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IoError("cannot create directory '" + dir + "': " + ec.message());
}

} // namespace sacr

#endif
