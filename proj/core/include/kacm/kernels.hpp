#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "kacm/quadrature_spec.hpp"
#include "kacm/state_space.hpp"

namespace kacm {

enum class Family { Brownian, BrownianDrift, ReflectedBrownian, KilledBrownian };

std::string family_name(Family f);
Family parse_family(const std::string& name);

/// Transition density p_t(x, y) of a one-dimensional diffusion with respect
/// to Lebesgue measure on its state space. Immutable after construction.
class TransitionKernel {
public:
    static TransitionKernel brownian();
    static TransitionKernel brownian_drift(double drift);
    /// Brownian motion reflected at `lower`, living on [lower, inf).
    static TransitionKernel reflected_brownian(double lower = 0.0);
    /// Brownian motion killed on leaving (lower, upper).
    static TransitionKernel killed_brownian(double lower, double upper, double image_tail_tol = 1e-14);

    Family family() const { return family_; }
    const StateSpace& space() const { return space_; }
    double drift() const { return drift_; }
    bool conservative() const { return family_ != Family::KilledBrownian; }
    bool symmetric() const { return family_ != Family::BrownianDrift || drift_ == 0.0; }
    std::string name() const;

    /// p_t(x, y); throws ArgumentError for t <= 0 and DomainError off the space.
    double eval(double t, double x, double y) const;
    /// Unchecked p_t(x, y) for hot loops; zero outside the space.
    double density(double t, double x, double y) const;

    /// Closed-form mass P_x(X_t in S): 1 for conservative families, the
    /// integrated image series for killed-brownian.
    double survival(double t, double x) const;

    /// Number of image pairs kept on each side for killed-brownian at time t.
    int image_count(double t) const;

    /// Rate kappa with r_alpha(x, y) <= C exp(-kappa |x - y|); used for
    /// truncating integrals of potentials on unbounded spaces.
    double potential_decay_rate(double alpha) const;

    /// Whether potential_density has a closed form for this family.
    bool has_closed_form_potential() const { return family_ != Family::KilledBrownian; }

    /// The kernel with p_hat_t(x, y) = p_t(y, x) when it is again a built-in.
    TransitionKernel dual() const;

    bool operator==(const TransitionKernel& o) const;

private:
    TransitionKernel(Family f, StateSpace space, double drift, double image_tol);

    Family family_;
    StateSpace space_;
    double drift_ = 0.0;
    double image_tail_tol_ = 1e-14;
};

/// Kernel extended to the cemetery point: p_t(x, Delta) = 1 - int p_t(x, y) dy.
class ExtendedKernel {
public:
    explicit ExtendedKernel(TransitionKernel base) : base_(std::move(base)) {}

    const TransitionKernel& base() const { return base_; }
    double cemetery_mass(double t, double x) const;

private:
    TransitionKernel base_;
};

/// Value of the extended kernel's total mass, computed by spatial
/// quadrature (closed form for conservative kernels). Throws NumericError
/// when the quadrature fails to converge.
double survival_mass(const ExtendedKernel& kernel, double t, double x,
                     const QuadratureSpec& spec = {});

/// A forward kernel together with its dual, p_hat_t(x, y) = p_t(y, x).
struct DualPair {
    TransitionKernel forward;
    TransitionKernel dual;

    static DualPair of(const TransitionKernel& k) { return {k, k.dual()}; }
};

struct PotentialValue {
    double value = 0.0;
    double abs_error = 0.0;
};

/// r_alpha(x, y) = int_0^inf exp(-alpha t) p_t(x, y) dt. Closed form where
/// known, Laplace quadrature otherwise.
double potential_density(const TransitionKernel& k, double alpha, double x, double y,
                         const QuadratureSpec& spec = {});

/// Laplace quadrature of the density in time regardless of closed forms
/// (t = u^2 near the origin, truncated where exp(-alpha T) < laplace_tail_tol).
PotentialValue potential_density_numeric(const TransitionKernel& k, double alpha, double x,
                                         double y, const QuadratureSpec& spec = {});

/// A bounded nonnegative function with support in [lower, upper].
struct TestFunction {
    std::function<double(double)> f;
    double lower = 0.0;
    double upper = 0.0;
    std::vector<double> breaks;

    static TestFunction indicator(double a, double b);
    static TestFunction zero();
};

using StatePairs = std::vector<std::pair<double, double>>;

/// n x n lattice of state pairs spanning +-sigmas * sqrt(t) around a
/// reference point inside the space (the interval's own extent for killed kernels).
StatePairs default_lattice(const TransitionKernel& k, double t, const QuadratureSpec& spec = {});

double chapman_kolmogorov_residual(const TransitionKernel& k, double t, double s, double x,
                                   double y, const QuadratureSpec& spec = {});
/// Max Chapman-Kolmogorov residual over a lattice.
double check_chapman_kolmogorov(const TransitionKernel& k, double t, double s,
                                const StatePairs& grid, const QuadratureSpec& spec = {});
/// Max |p_t(x, y) - p_t(y, x)| over the lattice.
double check_symmetry(const TransitionKernel& k, double t, const StatePairs& grid);
/// Max |dual(t, x, y) - forward(t, y, x)| over the lattice.
double check_dual_density(const DualPair& pair, double t, const StatePairs& grid);
/// Max of 1 - survival or survival - 1 excursions: how far the mass leaves [0, 1]
/// (or, for conservative kernels, how far it is from 1).
double check_mass(const TransitionKernel& k, double t, const StatePairs& grid,
                  const QuadratureSpec& spec = {});

/// max over the grid of |r_min - r_max - |alpha - beta| int r_alpha(x,z) r_beta(z,y) dz|.
double check_resolvent_equation(const TransitionKernel& k, double alpha, double beta,
                                const StatePairs& grid, const QuadratureSpec& spec = {});

/// |<P_t f, g> - <f, P_hat_t g>| by tensor quadrature.
double check_duality(const DualPair& pair, double t, const TestFunction& f,
                     const TestFunction& g, const QuadratureSpec& spec = {});

}  // namespace kacm
