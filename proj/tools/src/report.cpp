#include "report.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

#include "kacm/digest.hpp"

namespace kacm::cli {

using nlohmann::json;

std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

bool Report::any_fail() const {
    for (const auto& r : rows)
        if (r.verdict == "fail") return true;
    return false;
}

namespace {

std::string cell(const std::optional<double>& v) { return v ? format_number(*v) : std::string(); }

// Task ids are free text; quote them when they would break the row.
std::string csv_text(const std::string& s) {
    if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out.push_back('"');
        out.push_back(c);
    }
    return out + "\"";
}

// JSON has no inf/nan; those become null next to a string spelling.
json number_or_null(const std::optional<double>& v) {
    if (!v || !std::isfinite(*v)) return nullptr;
    return *v;
}

}  // namespace

void Report::write_csv(std::ostream& os) const {
    os << "# kacm " << kToolVersion << "\n";
    os << "# schema " << kReportSchema << "\n";
    os << "# config-digest " << hex_digest(config_digest) << "\n";
    os << "# config " << config.dump() << "\n";
    for (std::size_t i = 0; i < std::size(kCsvColumns); ++i) os << (i ? "," : "") << kCsvColumns[i];
    os << "\n";
    for (const auto& r : rows) {
        os << csv_text(r.task_id) << "," << r.operation << "," << cell(r.engine_value) << "," << cell(r.engine_error)
           << "," << cell(r.mc_mean) << "," << cell(r.mc_std_error) << "," << cell(r.z_score) << "," << r.verdict
           << "," << format_number(r.wall_seconds) << "\n";
    }
}

void Report::write_json(std::ostream& os) const {
    json j;
    j["schema"] = kReportSchema;
    j["tool"] = "kacm";
    j["version"] = kToolVersion;
    j["config_digest"] = hex_digest(config_digest);
    j["config"] = config;
    j["rows"] = json::array();
    for (const auto& r : rows) {
        json row = {{"task_id", r.task_id},
                    {"operation", r.operation},
                    {"engine_value", number_or_null(r.engine_value)},
                    {"engine_error", number_or_null(r.engine_error)},
                    {"mc_mean", number_or_null(r.mc_mean)},
                    {"mc_std_error", number_or_null(r.mc_std_error)},
                    {"z_score", number_or_null(r.z_score)},
                    {"verdict", r.verdict},
                    {"wall_seconds", r.wall_seconds},
                    {"details", r.details},
                    {"warnings", r.warnings}};
        if (r.z_score && !std::isfinite(*r.z_score)) row["z_score_text"] = format_number(*r.z_score);
        if (!r.error.empty()) row["error"] = r.error;
        j["rows"].push_back(row);
    }
    os << j.dump(2) << "\n";
}

}  // namespace kacm::cli
