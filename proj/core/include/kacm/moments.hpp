#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <vector>

#include "kacm/kernels.hpp"
#include "kacm/measures.hpp"
#include "kacm/quadrature_spec.hpp"
#include "kacm/terminal.hpp"

namespace kacm {

enum class OrderMode { Ordered, PermutationSum, IdenticalPower };

const char* order_mode_name(OrderMode m);
OrderMode parse_order_mode(const std::string& name);

struct MomentRequest {
    TransitionKernel kernel = TransitionKernel::brownian();
    std::vector<RevuzMeasure> measures;
    /// Absent means f == 1 including the cemetery.
    std::optional<TerminalFunction> terminal;
    double x = 0.0;
    double t = 1.0;
    OrderMode mode = OrderMode::IdenticalPower;

    TerminalFunction terminal_or_one() const { return terminal.value_or(TerminalFunction::one()); }
};

struct ProfileNode {
    int level = 0;
    double state = 0.0;
    double remaining_time = 0.0;
    double value = 0.0;
};

struct MomentResult {
    double value = 0.0;
    /// A-posteriori bound assembled from Kronrod/Gauss panel differences,
    /// Chebyshev tails and their propagation through the recursion.
    double error_estimate = 0.0;
    /// log(value); finite even when value itself overflows.
    double log_value = 0.0;
    std::uint64_t problem_digest = 0;
    std::vector<ProfileNode> grid_profile;

    void write_profile_csv(std::ostream& os) const;
};

/// Evaluates the Kac moment recursion
///   G_0(y, s) = E_y[f(X_s)],  G_j(y, s) = int_0^s int p_u(y, z) G_{j-1}(z, s - u) mu(dz) du
/// with intermediate G_j tabulated on (state x sqrt-time) grids.
class KacEngine {
public:
    explicit KacEngine(QuadratureSpec spec = {}, bool keep_profile = false);

    const QuadratureSpec& spec() const { return spec_; }

    /// E_y[f(X_s)] = int p_s(y, z) f(z) dz + p_s(y, Delta) f(Delta).
    double terminal_expectation(const ExtendedKernel& kernel, const TerminalFunction& f, double s,
                                double y) const;

    /// int_0^t int p_s(x, y) g(y, t - s) mu(dy) ds for a caller-supplied g.
    double kac_step(const TransitionKernel& kernel, const RevuzMeasure& mu,
                    const std::function<double(double, double)>& g, double x, double t) const;

    /// E_x[A_t^k]; every request measure must be the same mu, k = measures.size().
    MomentResult kth_moment(const MomentRequest& request) const;
    MomentResult kth_moment(const TransitionKernel& kernel, const RevuzMeasure& mu, int k, double x,
                            double t) const;

    /// E_x[int_0^t dA1_{t1} int_{t1}^t dA2_{t2} ... f(X_t)].
    MomentResult ordered_product_moment(const MomentRequest& request) const;

    /// Sum over all orderings: E_x[f(X_t) prod_i A_i(t)].
    MomentResult permutation_sum_moment(const MomentRequest& request) const;

    /// E_x[A_t B_t].
    MomentResult mixed_second_moment(const TransitionKernel& kernel, const RevuzMeasure& mu_a,
                                     const RevuzMeasure& mu_b, double x, double t) const;

    /// E_x[f(X_t) A_t].
    MomentResult first_moment_with_terminal(const TransitionKernel& kernel, const RevuzMeasure& mu,
                                            const TerminalFunction& f, double x, double t) const;

    /// E_x[A_t^j] for j = 0..k from one recursion.
    std::vector<MomentResult> moment_sequence(const TransitionKernel& kernel, const RevuzMeasure& mu,
                                              int k, double x, double t) const;

    /// Dispatches on request.mode.
    MomentResult evaluate(const MomentRequest& request) const;

    /// The same operation for the part process on D = (a, b): brownian base
    /// kernel killed on leaving D, measures restricted to D, terminal's exterior
    /// constant routed to the cemetery. Moments of A_{t ^ tau_D}.
    MomentResult killed_variant(const MomentRequest& request, double a, double b) const;

private:
    QuadratureSpec spec_;
    bool keep_profile_;
};

/// Moment of a PCAF with a spatial weight inside the time integral:
/// E_x[int_0^t w(X_s) dA_s], evaluated as the first moment of the
/// measure w * mu (w must be a constant or an indicator-type density factor).
RevuzMeasure weighted_measure(const RevuzMeasure& mu, const AcDensity& weight);

}  // namespace kacm
