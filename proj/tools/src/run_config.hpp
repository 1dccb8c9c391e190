#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "kacm/kernels.hpp"
#include "kacm/measures.hpp"
#include "kacm/moments.hpp"
#include "kacm/montecarlo.hpp"
#include "kacm/terminal.hpp"

namespace kacm::cli {

inline constexpr const char* kRunSchema = "kacm-run/1";

/// A file could not be read or written.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class Operation { Moment, McCompare, KernelCheck, Kato, ExpBound };

const char* operation_name(Operation op);

struct KernelSpec {
    Family family = Family::Brownian;
    double drift = 0.0;
    double lower = 0.0;
    double upper = 0.0;

    TransitionKernel build() const;
};

struct TerminalSpec {
    std::string type = "one";  // one | constant | indicator
    double value = 1.0;
    double lower = 0.0;
    double upper = 0.0;
    double inside = 1.0;
    double outside = 0.0;
    double cemetery = 1.0;

    TerminalFunction build() const;
};

struct McBlock {
    std::uint64_t seed = 20240611;
    std::int64_t n_paths = 100000;
    double dt = 1e-4;
    double epsilon = 0.01;
    LocalTimeMethod local_time = LocalTimeMethod::EpsilonOccupation;
    KillDetection killing = KillDetection::GridCrossing;
    /// Absent: KACM_WORKERS, then 1. Results do not depend on it.
    std::optional<int> workers;
};

struct OutputBlock {
    std::string format = "csv";  // csv | json
    std::string path = "-";      // "-" is stdout
    int verbosity = 1;
};

struct Task {
    std::string id;
    Operation op = Operation::Moment;
    int line = 0;

    std::string kernel;
    std::vector<std::string> measures;
    OrderMode mode = OrderMode::IdenticalPower;
    double x = 0.0;
    double t = 1.0;
    std::optional<TerminalSpec> terminal;
    std::optional<std::pair<double, double>> killed_domain;

    // mc-compare
    std::string quantity = "moment";  // moment | potential
    std::vector<double> alphas;       // potential rates, or a custom kato ladder
    std::optional<LocalTimeMethod> local_time;
    std::optional<double> epsilon;
    std::optional<double> dt;

    // kernel-check
    double s = 0.5;
    std::vector<std::pair<double, double>> resolvent_pairs;
    double tolerance = 1e-6;
    double duality_tolerance = 1e-8;

    // kato
    int grid_points = 161;
    std::optional<bool> expect_kato;

    // exp-bound
    int series_cap = 12;
};

struct RunConfig {
    std::string source;
    std::map<std::string, KernelSpec> kernels;
    std::map<std::string, RevuzMeasure> measures;
    std::vector<Task> tasks;
    std::optional<McBlock> mc;
    OutputBlock output;

    /// Normalized form with every default spelled out; parsing it again
    /// yields the same configuration.
    nlohmann::json to_json() const;
    /// Hash of the normalized form without the output block.
    std::uint64_t digest() const;
};

/// Throws ConfigError("<source>:<line>: ...") on any schema or reference error.
RunConfig parse_run_config(std::string_view text, const std::string& source = "<config>");
/// Throws IoError when the file cannot be read.
RunConfig load_run_config(const std::string& path);

/// Configuration exercising every built-in kernel at the standard check points.
RunConfig builtin_kernel_check_config();

}  // namespace kacm::cli
