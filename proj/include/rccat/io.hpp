#pragma once

// CSV series in/out, JSON detection reports, and `key = value` config files.

#include "rccat/datagen.hpp"
#include "rccat/detector.hpp"
#include "rccat/errors.hpp"
#include "rccat/time_series.hpp"
#include "rccat/version.hpp"

#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace rccat {

namespace detail {

inline std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

inline std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (;;) {
        const auto comma = line.find(',', start);
        out.push_back(trim(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start)));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

inline std::optional<double> parse_double(std::string_view s) {
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    if (s.empty()) return std::nullopt;
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
    return v;
}

inline std::ofstream open_out(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    return out;
}

} // namespace detail

/// Shortest representation that parses back to the same double.
inline std::string format_double(double v) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

/// Columns `value` or `t,value` (either order when a header names them);
/// header row optional. Blank lines are skipped. Errors carry the 1-based line.
inline TimeSeries parse_csv(std::istream& in) {
    std::vector<double> values, times;
    std::optional<std::size_t> value_col, time_col;
    std::size_t columns = 0;
    std::size_t line_no = 0;
    bool seen_first = false;

    std::string line;
    while (std::getline(in, line)) {
        ++line_no;
        std::string_view view = line;
        if (line_no == 1 && view.starts_with("\xEF\xBB\xBF")) view.remove_prefix(3);
        if (detail::trim(view).empty()) continue;
        const auto fields = detail::split_fields(view);

        if (!seen_first) {
            seen_first = true;
            columns = fields.size();
            if (columns < 1 || columns > 2) throw ParseError("expected 1 or 2 columns, got " + std::to_string(columns), line_no);
            bool numeric = true;
            for (auto f : fields) numeric = numeric && detail::parse_double(f).has_value();
            if (!numeric) {
                for (std::size_t c = 0; c < columns; ++c) {
                    if (fields[c] == "value") value_col = c;
                    else if (fields[c] == "t") time_col = c;
                    else throw ParseError("unknown column '" + std::string(fields[c]) + "' (expected value or t)", line_no);
                }
                if (!value_col || (columns == 2 && !time_col)) throw ParseError("header must name a value column", line_no);
                continue;
            }
            value_col = columns - 1;
            if (columns == 2) time_col = 0;
        }

        if (fields.size() != columns)
            throw ParseError("expected " + std::to_string(columns) + " fields, got " + std::to_string(fields.size()), line_no);
        const auto v = detail::parse_double(fields[*value_col]);
        if (!v) throw ParseError("cannot parse '" + std::string(fields[*value_col]) + "' as a number", line_no);
        if (!std::isfinite(*v)) throw ParseError("non-finite value '" + std::string(fields[*value_col]) + "'", line_no);
        values.push_back(*v);
        if (time_col) {
            const auto t = detail::parse_double(fields[*time_col]);
            if (!t || !std::isfinite(*t)) throw ParseError("bad timestamp '" + std::string(fields[*time_col]) + "'", line_no);
            if (!times.empty() && !(*t > times.back())) throw ParseError("timestamps must strictly increase", line_no);
            times.push_back(*t);
        }
    }
    if (values.empty()) throw ParseError("no observations", 0);
    if (time_col) return TimeSeries(std::move(values), std::move(times));
    return TimeSeries(std::move(values));
}

inline TimeSeries load_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open " + path, 0);
    return parse_csv(in);
}

inline void write_csv(const TimeSeries& series, std::ostream& out) {
    const auto& ts = series.timestamps();
    out << (ts ? "t,value\n" : "value\n");
    for (std::size_t i = 0; i < series.size(); ++i) {
        if (ts) out << format_double((*ts)[i]) << ',';
        out << format_double(series.values()[i]) << '\n';
    }
}

inline void write_csv(const TimeSeries& series, const std::string& path) {
    auto out = detail::open_out(path);
    write_csv(series, out);
}

/// Tidy per-index trace for plotting: j,score,candidate,detected[,truth].
inline void write_trace_csv(const DetectionReport& report, std::ostream& out,
                            const std::vector<std::size_t>& truth = {}) {
    out << "j,score,candidate,detected" << (truth.empty() ? "" : ",truth") << '\n';
    auto contains = [](const std::vector<std::size_t>& v, std::size_t j) {
        return std::binary_search(v.begin(), v.end(), j);
    };
    std::vector<std::size_t> sorted_truth = truth;
    std::sort(sorted_truth.begin(), sorted_truth.end());
    for (std::size_t j = report.trace.first_index(); j <= report.trace.last_index() && !report.trace.scores.empty(); ++j) {
        out << j << ',' << format_double(report.trace.score(j)) << ',' << int(contains(report.candidates, j)) << ','
            << int(contains(report.change_points, j));
        if (!truth.empty()) out << ',' << int(contains(sorted_truth, j));
        out << '\n';
    }
}

using Json = nlohmann::ordered_json;

inline Json config_to_json(const DetectorConfig& cfg) {
    return Json{{"w", cfg.w}, {"b", cfg.b}, {"lambda", cfg.lambda}, {"alpha", cfg.alpha}};
}

inline Json estimator_to_json(const EstimatorConfig& cfg) {
    Json j{{"A", cfg.A}, {"M", cfg.M}, {"eta", cfg.eta}, {"delta", cfg.delta}, {"B", cfg.B}};
    j["V"] = cfg.V ? Json(*cfg.V) : Json(nullptr);
    return j;
}

/// `extra` is stored under "metadata" and ignored by report_from_json.
inline Json report_to_json(const DetectionReport& r, const Json& extra = Json::object()) {
    Json j;
    j["schema_version"] = kReportSchemaVersion;
    j["tool"] = "rccat";
    j["version"] = kVersion;
    j["method"] = r.method;
    j["n"] = r.trace.series_length();
    j["config"] = config_to_json(r.config_used);
    j["change_points"] = r.change_points;
    j["candidates"] = r.candidates;
    j["trace"] = Json{{"w", r.trace.w}, {"first_index", r.trace.first_index()}, {"scores", r.trace.scores}};
    if (!extra.empty()) j["metadata"] = extra;
    return j;
}

inline DetectionReport report_from_json(const Json& j) {
    try {
        if (j.at("schema_version").get<int>() != kReportSchemaVersion)
            throw ParseError("unsupported report schema_version " + j.at("schema_version").dump(), 0);
        DetectionReport r;
        r.method = j.at("method").get<std::string>();
        const Json& c = j.at("config");
        r.config_used = {c.at("w").get<std::size_t>(), c.at("b").get<double>(), c.at("lambda").get<double>(),
                         c.at("alpha").get<double>()};
        r.change_points = j.at("change_points").get<std::vector<std::size_t>>();
        r.candidates = j.at("candidates").get<std::vector<std::size_t>>();
        r.trace.w = j.at("trace").at("w").get<std::size_t>();
        r.trace.scores = j.at("trace").at("scores").get<std::vector<double>>();
        return r;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("malformed report: ") + e.what(), 0);
    }
}

inline void write_report(const DetectionReport& r, std::ostream& out, const Json& extra = Json::object()) {
    out << report_to_json(r, extra).dump(2) << '\n';
}

inline void write_report(const DetectionReport& r, const std::string& path, const Json& extra = Json::object()) {
    auto out = detail::open_out(path);
    write_report(r, out, extra);
}

inline DetectionReport read_report(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open " + path, 0);
    try {
        return report_from_json(Json::parse(in));
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("malformed report: ") + e.what(), 0);
    }
}

inline Json truth_to_json(const GroundTruth& gt, const std::vector<bool>& mask = {}) {
    Json j;
    j["schema_version"] = kReportSchemaVersion;
    j["n"] = gt.n;
    j["tau"] = gt.tau;
    j["segment_means"] = gt.segment_means;
    std::vector<std::size_t> corrupted;
    for (std::size_t i = 0; i < mask.size(); ++i)
        if (mask[i]) corrupted.push_back(i + 1);
    j["corrupted"] = corrupted;
    return j;
}

inline GroundTruth truth_from_json(const Json& j) {
    try {
        GroundTruth gt{j.at("n").get<std::size_t>(), j.at("tau").get<std::vector<std::size_t>>(),
                       j.at("segment_means").get<std::vector<double>>()};
        gt.validate();
        return gt;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("malformed truth file: ") + e.what(), 0);
    }
}

/// One `key = value` per line; `#` starts a comment; blank lines ignored.
inline std::vector<std::pair<std::string, std::string>> parse_config(std::istream& in) {
    std::vector<std::pair<std::string, std::string>> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string_view view = line;
        if (const auto hash = view.find('#'); hash != std::string_view::npos) view = view.substr(0, hash);
        view = detail::trim(view);
        if (view.empty()) continue;
        const auto eq = view.find('=');
        if (eq == std::string_view::npos) throw ParseError("expected key = value", line_no);
        const auto key = detail::trim(view.substr(0, eq));
        const auto value = detail::trim(view.substr(eq + 1));
        if (key.empty()) throw ParseError("empty key", line_no);
        out.emplace_back(std::string(key), std::string(value));
    }
    return out;
}

inline std::vector<std::pair<std::string, std::string>> load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open config file " + path, 0);
    return parse_config(in);
}

} // namespace rccat
