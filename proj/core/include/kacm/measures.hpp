#pragma once

#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "kacm/kernels.hpp"
#include "kacm/quadrature_spec.hpp"

namespace kacm {

/// Catalog density against Lebesgue measure, restricted to [lower, upper].
struct AcDensity {
    enum class Kind { Constant, GaussianBump };

    Kind kind = Kind::Constant;
    double level = 1.0;   // constant value, or peak height of the bump
    double centre = 0.0;  // bump only
    double width = 1.0;   // bump standard deviation
    double lower = -std::numeric_limits<double>::infinity();
    double upper = std::numeric_limits<double>::infinity();

    static AcDensity constant(double level);
    static AcDensity indicator(double a, double b, double level = 1.0);
    static AcDensity gaussian_bump(double centre, double width, double height);

    double operator()(double z) const;
    /// Points where the density or its derivative jumps.
    std::vector<double> breakpoints() const;
    /// Interval outside which the density is below 1e-300 relative to its peak.
    std::pair<double, double> effective_support() const;
    double mass() const;
    std::string describe() const;

    bool operator==(const AcDensity&) const = default;
};

struct Atom {
    double location = 0.0;
    double weight = 0.0;
    bool operator==(const Atom&) const = default;
};

/// mu = sum_j f_j(y) dy + sum_i w_i delta_{a_i}.
class RevuzMeasure {
public:
    RevuzMeasure() = default;
    RevuzMeasure(std::vector<AcDensity> densities, std::vector<Atom> atoms);

    static RevuzMeasure lebesgue(double scale = 1.0);
    static RevuzMeasure indicator(double a, double b, double level = 1.0);
    static RevuzMeasure gaussian_bump(double centre, double width, double height);
    static RevuzMeasure dirac(double location, double weight = 1.0);

    const std::vector<AcDensity>& densities() const { return densities_; }
    const std::vector<Atom>& atoms() const { return atoms_; }
    bool empty() const { return densities_.empty() && atoms_.empty(); }
    bool has_ac() const { return !densities_.empty(); }

    double density(double z) const;
    double total_mass() const;
    /// Hull of all atoms and density supports.
    std::pair<double, double> support_bounds() const;
    std::vector<double> breakpoints() const;

    RevuzMeasure operator+(const RevuzMeasure& o) const;
    RevuzMeasure scaled(double c) const;
    /// mu restricted to the open interval (a, b). Atoms on the boundary throw DomainError.
    RevuzMeasure restricted_to(double a, double b) const;

    /// Throws DomainError if an atom sits outside the interior of the space.
    void validate(const StateSpace& space) const;

    std::string describe() const;
    bool operator==(const RevuzMeasure&) const = default;

private:
    std::vector<AcDensity> densities_;
    std::vector<Atom> atoms_;
};

/// int g d mu over the measure restricted to `space`.
double integrate(const RevuzMeasure& mu, const std::function<double(double)>& g,
                 const StateSpace& space = StateSpace::full_line(), const QuadratureSpec& spec = {});

/// U_alpha mu(x) = int r_alpha(x, y) mu(dy).
double potential_of_measure(const TransitionKernel& k, const RevuzMeasure& mu, double alpha, double x,
                            const QuadratureSpec& spec = {});

struct PotentialProfile {
    double alpha = 0.0;
    std::map<double, double> values;
    double sup_estimate = 0.0;
    double margin = 0.0;
};

/// U_alpha mu on a grid and a sup bound: grid max plus half a grid step
/// times the largest observed slope.
PotentialProfile potential_profile(const TransitionKernel& k, const RevuzMeasure& mu, double alpha,
                                   const std::vector<double>& grid, const QuadratureSpec& spec = {});

struct KatoReport {
    std::optional<double> alpha_star;
    /// Bisection estimate of the rate where the sup-curve crosses 1.
    std::optional<double> alpha_crossing;
    std::map<double, double> sup_curve;
    bool in_extended_kato = false;
    bool s00_verdict = false;
    double total_mass = 0.0;
    double sup_u1 = 0.0;
};

/// Rates 2^j for j = -4..20.
std::vector<double> default_alpha_ladder();
/// Grid over the measure's support padded by four standard deviations of
/// the slowest tested potential, always containing every atom.
std::vector<double> default_kato_grid(const TransitionKernel& k, const RevuzMeasure& mu, int points = 161);

KatoReport kato_classify(const TransitionKernel& k, const RevuzMeasure& mu, const std::vector<double>& alphas,
                         const std::vector<double>& grid, const QuadratureSpec& spec = {});

}  // namespace kacm
