#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace kacm::cli {

inline constexpr const char* kReportSchema = "kacm-report/1";
inline constexpr const char* kToolVersion = "0.1.0";

/// Fixed CSV column order.
inline constexpr const char* kCsvColumns[] = {"task_id",      "operation", "engine_value", "engine_error",
                                               "mc_mean",      "mc_std_error", "z_score",  "verdict",
                                               "wall_seconds"};

struct Row {
    std::string task_id;
    std::string operation;
    std::optional<double> engine_value;
    std::optional<double> engine_error;
    std::optional<double> mc_mean;
    std::optional<double> mc_std_error;
    std::optional<double> z_score;
    std::string verdict = "n/a";  // pass | fail | n/a
    double wall_seconds = 0.0;
    std::string error;
    std::vector<std::string> warnings;
    nlohmann::json details = nlohmann::json::object();
};

struct Report {
    std::uint64_t config_digest = 0;
    nlohmann::json config;
    std::vector<Row> rows;

    bool any_fail() const;
    void write_csv(std::ostream& os) const;
    void write_json(std::ostream& os) const;
};

/// %.17g, with inf/-inf/nan spelled out.
std::string format_number(double v);

}  // namespace kacm::cli
