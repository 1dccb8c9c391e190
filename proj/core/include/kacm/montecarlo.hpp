#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "kacm/kernels.hpp"
#include "kacm/measures.hpp"
#include "kacm/moments.hpp"
#include "kacm/terminal.hpp"

namespace kacm {

enum class KillDetection { GridCrossing, BridgeCorrected };

const char* kill_detection_name(KillDetection k);
KillDetection parse_kill_detection(const std::string& name);

/// Exact Gaussian steps of the kernel's process on a uniform time grid.
struct PathScheme {
    TransitionKernel kernel = TransitionKernel::brownian();
    double dt = 1e-4;
    /// Grid crossing kills at the first grid time outside the domain;
    /// bridge-corrected weights each step by the Brownian-bridge
    /// probability of staying inside.
    KillDetection killing = KillDetection::GridCrossing;
    std::uint64_t seed = 20240611;
};

enum class LocalTimeMethod { EpsilonOccupation, Downcrossing, Bridge };

const char* local_time_method_name(LocalTimeMethod m);
LocalTimeMethod parse_local_time_method(const std::string& name);

/// Pathwise realization of the PCAF whose Revuz measure is `measure`:
/// occupation integrals of the densities plus weighted local times at the atoms.
struct PcafEstimator {
    RevuzMeasure measure;
    LocalTimeMethod method = LocalTimeMethod::EpsilonOccupation;
    double epsilon = 0.01;

    static PcafEstimator occupation(const AcDensity& f);
    static PcafEstimator local_time(double a, LocalTimeMethod method, double epsilon = 0.01);
    static PcafEstimator from_measure(const RevuzMeasure& mu, LocalTimeMethod method, double epsilon = 0.01);

    std::string describe() const;
};

struct McEstimate {
    double mean = 0.0;
    double std_error = 0.0;
    std::int64_t n_paths = 0;
    std::uint64_t config_digest = 0;
    std::uint64_t problem_digest = 0;
    /// |fine - coarse| where the coarse twin doubles the step and epsilon
    /// on the same paths.
    double bias_budget = 0.0;
    double coarse_mean = 0.0;
    double dt_used = 0.0;
    std::uint64_t seed = 0;
    std::vector<std::string> warnings;
};

struct McOptions {
    std::int64_t n_paths = 100000;
    int workers = 1;
    /// Optional debug dump of the first `dump_paths` paths:
    /// time,state,alive,A_1,...
    std::ostream* path_dump = nullptr;
    int dump_paths = 0;
};

/// A_i with power k_i in E_x[f(X_t) prod_i A_i(t)^{k_i}].
using McFactors = std::vector<std::pair<PcafEstimator, int>>;

McEstimate estimate_moment(const PathScheme& scheme, const McFactors& factors, double x, double t,
                           const std::optional<TerminalFunction>& terminal, const McOptions& options);

/// E_x[A_t^k] for one functional.
McEstimate estimate_moment(const PathScheme& scheme, const PcafEstimator& estimator, double x, double t, int k,
                           const McOptions& options);

/// E_x[int_0^T e^{-alpha s} w(X_s) dA_s] with T chosen so that e^{-alpha T} < 1e-6;
/// all rates share the same paths, run to the horizon of the smallest rate.
std::vector<McEstimate> estimate_discounted(const PathScheme& scheme, const PcafEstimator& estimator,
                                            const std::vector<double>& alphas, const AcDensity& weight, double x,
                                            const McOptions& options);
McEstimate estimate_discounted(const PathScheme& scheme, const PcafEstimator& estimator, double alpha,
                               const AcDensity& weight, double x, const McOptions& options);

/// max over paths of |A_{t+s} - A_t - A_s o theta_t| with the restarted
/// accumulator fed the same trajectory after time t.
double check_additivity(const PathScheme& scheme, const PcafEstimator& estimator, double x, double t, double s,
                        const McOptions& options);

struct CompareResult {
    double z = 0.0;
    double combined_error = 0.0;
    bool pass = false;
    const char* verdict() const { return pass ? "pass" : "fail"; }
};

/// z = (engine - mc) / sqrt(se^2 + engine_err^2 + bias^2); pass iff |z| <= 3.
/// Throws ConfigError when the problem digests differ.
CompareResult compare(const MomentResult& engine, const McEstimate& mc);
/// The same statistic without the digest guard, for quantities the engine
/// does not express as a MomentResult (potentials, survival).
CompareResult compare_values(double engine_value, double engine_error, const McEstimate& mc);

}  // namespace kacm
