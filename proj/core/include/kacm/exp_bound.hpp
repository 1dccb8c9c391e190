#pragma once

#include <vector>

#include "kacm/measures.hpp"
#include "kacm/moments.hpp"

namespace kacm {

struct ExpBoundRow {
    double t = 0.0;
    /// sum_{k <= K} M_k(x, t) / k!
    double series_value = 0.0;
    /// Geometric bound on the discarded terms.
    double tail_bound = 0.0;
    double ratio = 0.0;
    double bound = 0.0;
    bool below_bound = false;
    std::vector<double> terms;  // M_k / k!
};

struct ExpBoundReport {
    double alpha = 0.0;
    double sup_potential = 0.0;
    double s_alpha = 0.0;
    double t_alpha = 0.0;
    double c = 0.0;   // e^{s_alpha} sup U_alpha mu
    double c1 = 0.0;  // 1 / (1 - c)
    int series_cap = 0;
    std::vector<ExpBoundRow> rows;
};

/// c1^{1 + t / t_alpha} with t_alpha = s / alpha and c1 = 1 / (1 - e^s sup).
double exp_moment_bound(double sup_potential, double alpha, double s, double t);

/// Bounds sup_x E_x[exp(A_t)] from the Kato report and compares it with the
/// truncated moment series at x. Throws NumericError when no s gives c < 1
/// ("infeasible") or the series ratio reaches 1 ("nonconvergent").
ExpBoundReport exponential_bound(const KacEngine& engine, const TransitionKernel& kernel, const RevuzMeasure& mu,
                                 const KatoReport& report, double x, const std::vector<double>& t_values,
                                 int series_cap = 12);

}  // namespace kacm
