#include "kacm/measures.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "kacm/errors.hpp"
#include "kacm/quadrature.hpp"

namespace kacm {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kBumpReach = 12.0;
}  // namespace

AcDensity AcDensity::constant(double level) {
    if (!(level >= 0.0) || !std::isfinite(level)) throw ArgumentError("density level must be finite and >= 0");
    AcDensity d;
    d.level = level;
    return d;
}

AcDensity AcDensity::indicator(double a, double b, double level) {
    if (!(a < b)) throw ArgumentError("indicator density needs a < b");
    AcDensity d = constant(level);
    d.lower = a;
    d.upper = b;
    return d;
}

AcDensity AcDensity::gaussian_bump(double centre, double width, double height) {
    if (!(width > 0.0)) throw ArgumentError("bump width must be positive");
    if (!(height >= 0.0) || !std::isfinite(height)) throw ArgumentError("bump height must be finite and >= 0");
    AcDensity d;
    d.kind = Kind::GaussianBump;
    d.level = height;
    d.centre = centre;
    d.width = width;
    return d;
}

double AcDensity::operator()(double z) const {
    if (z < lower || z > upper) return 0.0;
    if (kind == Kind::Constant) return level;
    const double u = (z - centre) / width;
    return level * std::exp(-0.5 * u * u);
}

std::vector<double> AcDensity::breakpoints() const {
    std::vector<double> b;
    if (std::isfinite(lower)) b.push_back(lower);
    if (std::isfinite(upper)) b.push_back(upper);
    if (kind == Kind::GaussianBump && centre > lower && centre < upper) b.push_back(centre);
    return b;
}

std::pair<double, double> AcDensity::effective_support() const {
    if (kind == Kind::Constant) return {lower, upper};
    return {std::max(lower, centre - kBumpReach * width), std::min(upper, centre + kBumpReach * width)};
}

double AcDensity::mass() const {
    if (level == 0.0) return 0.0;
    if (kind == Kind::Constant) return std::isfinite(lower) && std::isfinite(upper) ? level * (upper - lower) : kInf;
    const double a = (lower - centre) / (width * std::numbers::sqrt2);
    const double b = (upper - centre) / (width * std::numbers::sqrt2);
    return level * width * std::sqrt(std::numbers::pi / 2.0) * (std::erf(b) - std::erf(a));
}

std::string AcDensity::describe() const {
    std::ostringstream os;
    os.precision(17);
    if (kind == Kind::Constant)
        os << "const(" << level << ")";
    else
        os << "bump(" << centre << "," << width << "," << level << ")";
    os << "[" << lower << "," << upper << "]";
    return os.str();
}

RevuzMeasure::RevuzMeasure(std::vector<AcDensity> densities, std::vector<Atom> atoms)
    : densities_(std::move(densities)), atoms_(std::move(atoms)) {
    for (const auto& a : atoms_) {
        if (!(a.weight > 0.0) || !std::isfinite(a.weight)) throw ArgumentError("atom weights must be finite and > 0");
        if (!std::isfinite(a.location)) throw ArgumentError("atom locations must be finite");
    }
    std::sort(atoms_.begin(), atoms_.end(), [](const Atom& l, const Atom& r) { return l.location < r.location; });
}

RevuzMeasure RevuzMeasure::lebesgue(double scale) { return {{AcDensity::constant(scale)}, {}}; }
RevuzMeasure RevuzMeasure::indicator(double a, double b, double level) {
    return {{AcDensity::indicator(a, b, level)}, {}};
}
RevuzMeasure RevuzMeasure::gaussian_bump(double centre, double width, double height) {
    return {{AcDensity::gaussian_bump(centre, width, height)}, {}};
}
RevuzMeasure RevuzMeasure::dirac(double location, double weight) { return {{}, {{location, weight}}}; }

double RevuzMeasure::density(double z) const {
    double s = 0.0;
    for (const auto& d : densities_) s += d(z);
    return s;
}

double RevuzMeasure::total_mass() const {
    double m = 0.0;
    for (const auto& d : densities_) m += d.mass();
    for (const auto& a : atoms_) m += a.weight;
    return m;
}

std::pair<double, double> RevuzMeasure::support_bounds() const {
    double lo = kInf;
    double hi = -kInf;
    for (const auto& d : densities_) {
        const auto [a, b] = d.effective_support();
        lo = std::min(lo, a);
        hi = std::max(hi, b);
    }
    for (const auto& a : atoms_) {
        lo = std::min(lo, a.location);
        hi = std::max(hi, a.location);
    }
    return {lo, hi};
}

std::vector<double> RevuzMeasure::breakpoints() const {
    std::vector<double> b;
    for (const auto& d : densities_) {
        const auto more = d.breakpoints();
        b.insert(b.end(), more.begin(), more.end());
    }
    for (const auto& a : atoms_) b.push_back(a.location);
    std::sort(b.begin(), b.end());
    b.erase(std::unique(b.begin(), b.end()), b.end());
    return b;
}

RevuzMeasure RevuzMeasure::operator+(const RevuzMeasure& o) const {
    auto d = densities_;
    d.insert(d.end(), o.densities_.begin(), o.densities_.end());
    auto a = atoms_;
    a.insert(a.end(), o.atoms_.begin(), o.atoms_.end());
    return {std::move(d), std::move(a)};
}

RevuzMeasure RevuzMeasure::scaled(double c) const {
    if (!(c > 0.0)) throw ArgumentError("measure scale must be positive");
    auto d = densities_;
    for (auto& x : d) x.level *= c;
    auto a = atoms_;
    for (auto& x : a) x.weight *= c;
    return {std::move(d), std::move(a)};
}

RevuzMeasure RevuzMeasure::restricted_to(double a, double b) const {
    RevuzMeasure out;
    for (auto d : densities_) {
        d.lower = std::max(d.lower, a);
        d.upper = std::min(d.upper, b);
        if (d.lower < d.upper && d.level > 0.0) out.densities_.push_back(d);
    }
    for (const auto& at : atoms_) {
        if (at.location == a || at.location == b) {
            std::ostringstream os;
            os << "atom at " << at.location << " lies on the boundary of (" << a << "," << b << ")";
            throw DomainError(os.str());
        }
        if (at.location > a && at.location < b) out.atoms_.push_back(at);
    }
    return out;
}

void RevuzMeasure::validate(const StateSpace& space) const {
    for (const auto& a : atoms_) {
        if (!space.contains(a.location)) {
            std::ostringstream os;
            os << "atom at " << a.location << " outside " << space.describe();
            throw DomainError(os.str());
        }
        if (!space.interior(a.location) && space.kind() != SpaceKind::FullLine) {
            // reflecting boundaries may carry mass; killing ones never do
            const bool killing = (a.location == space.lower() && space.lower_boundary() == Boundary::Killing) ||
                                 (a.location == space.upper() && space.upper_boundary() == Boundary::Killing);
            if (killing) throw DomainError("atom on a killing boundary");
        }
    }
}

std::string RevuzMeasure::describe() const {
    std::ostringstream os;
    os.precision(17);
    bool first = true;
    for (const auto& d : densities_) {
        os << (first ? "" : "+") << d.describe();
        first = false;
    }
    for (const auto& a : atoms_) {
        os << (first ? "" : "+") << a.weight << "*delta(" << a.location << ")";
        first = false;
    }
    if (first) os << "0";
    return os.str();
}

double integrate(const RevuzMeasure& mu, const std::function<double(double)>& g, const StateSpace& space,
                 const QuadratureSpec& spec) {
    double total = 0.0;
    for (const auto& a : mu.atoms())
        if (space.contains(a.location)) total += a.weight * g(a.location);
    for (const auto& d : mu.densities()) {
        const double lo = std::max(d.lower, space.lower());
        const double hi = std::min(d.upper, space.upper());
        if (!(lo < hi) || d.level == 0.0) continue;
        auto f = [&](double z) { return d(z) * g(z); };
        const auto breaks = d.breakpoints();
        const auto q = quad::integrate_line(f, lo, hi, breaks, spec.rel_tol, spec.abs_tol);
        if (!q.converged || !std::isfinite(q.value))
            throw NumericError("integral against the measure did not converge", q.abs_error);
        total += q.value;
    }
    return total;
}

double potential_of_measure(const TransitionKernel& k, const RevuzMeasure& mu, double alpha, double x,
                            const QuadratureSpec& spec) {
    if (!(alpha > 0.0)) throw ArgumentError("alpha must be positive");
    if (!k.space().contains(x)) throw DomainError("state outside " + k.space().describe());
    double total = 0.0;
    for (const auto& a : mu.atoms())
        if (k.space().contains(a.location)) total += a.weight * potential_density(k, alpha, x, a.location, spec);
    const double reach = 40.0 / k.potential_decay_rate(alpha);
    for (const auto& d : mu.densities()) {
        const double lo = std::max({d.lower, k.space().lower(), x - reach});
        const double hi = std::min({d.upper, k.space().upper(), x + reach});
        if (!(lo < hi) || d.level == 0.0) continue;
        auto f = [&](double y) {
            if (!k.space().contains(y)) return 0.0;
            return d(y) * potential_density(k, alpha, x, y, spec);
        };
        auto breaks = d.breakpoints();
        breaks.push_back(x);
        const auto q = quad::integrate_split(f, lo, hi, breaks, std::min(spec.rel_tol, 1e-11), spec.abs_tol);
        if (!q.converged) throw NumericError("potential of the measure did not converge", q.abs_error);
        total += q.value;
    }
    return total;
}

PotentialProfile potential_profile(const TransitionKernel& k, const RevuzMeasure& mu, double alpha,
                                   const std::vector<double>& grid, const QuadratureSpec& spec) {
    PotentialProfile p;
    p.alpha = alpha;
    for (double x : grid) p.values[x] = potential_of_measure(k, mu, alpha, x, spec);
    double peak = 0.0;
    double slope = 0.0;
    double step = 0.0;
    const double* prev_x = nullptr;
    const double* prev_v = nullptr;
    for (const auto& [x, v] : p.values) {
        peak = std::max(peak, v);
        if (prev_x != nullptr) {
            const double h = x - *prev_x;
            step = std::max(step, h);
            if (h > 0.0) slope = std::max(slope, std::abs(v - *prev_v) / h);
        }
        prev_x = &x;
        prev_v = &v;
    }
    p.margin = 0.5 * step * slope;
    p.sup_estimate = peak + p.margin;
    return p;
}

std::vector<double> default_alpha_ladder() {
    std::vector<double> a;
    for (int j = -4; j <= 20; ++j) a.push_back(std::ldexp(1.0, j));
    return a;
}

std::vector<double> default_kato_grid(const TransitionKernel& k, const RevuzMeasure& mu, int points) {
    const auto& sp = k.space();
    double lo = kInf;
    double hi = -kInf;
    for (double b : mu.breakpoints()) {
        lo = std::min(lo, b);
        hi = std::max(hi, b);
    }
    if (!(lo <= hi)) lo = hi = sp.clamp(0.0);
    const double pad = 4.0;
    lo = sp.clamp(lo - pad);
    hi = sp.clamp(hi + pad);
    std::vector<double> grid;
    for (int i = 0; i < points; ++i) {
        const double z = lo + (hi - lo) * i / (points - 1.0);
        if (sp.contains(z)) grid.push_back(z);
    }
    for (const auto& a : mu.atoms())
        if (sp.contains(a.location)) grid.push_back(a.location);
    if (sp.bounded()) {
        // interior neighbours of the killing endpoints
        const double eps = 1e-3 * (sp.upper() - sp.lower());
        grid.push_back(sp.lower() + eps);
        grid.push_back(sp.upper() - eps);
    }
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
    return grid;
}

KatoReport kato_classify(const TransitionKernel& k, const RevuzMeasure& mu, const std::vector<double>& alphas,
                         const std::vector<double>& grid, const QuadratureSpec& spec) {
    if (alphas.empty()) throw ArgumentError("kato_classify needs at least one rate");
    for (std::size_t i = 0; i < alphas.size(); ++i) {
        if (!(alphas[i] > 0.0)) throw ArgumentError("rates must be positive");
        if (i > 0 && !(alphas[i] > alphas[i - 1])) throw ArgumentError("rates must be increasing");
    }
    if (grid.empty()) throw ArgumentError("kato_classify needs a nonempty grid");
    KatoReport r;
    std::optional<double> below;  // largest tested rate with sup >= 1
    for (double a : alphas) {
        const double sup = potential_profile(k, mu, a, grid, spec).sup_estimate;
        r.sup_curve[a] = sup;
        if (sup < 1.0) {
            if (!r.alpha_star) r.alpha_star = a;
        } else if (!r.alpha_star) {
            below = a;
        }
    }
    r.in_extended_kato = r.alpha_star.has_value();
    if (r.alpha_star && below) {
        double lo = std::log(*below);
        double hi = std::log(*r.alpha_star);
        for (int it = 0; it < 30 && hi - lo > 1e-6; ++it) {
            const double mid = 0.5 * (lo + hi);
            const double sup = potential_profile(k, mu, std::exp(mid), grid, spec).sup_estimate;
            (sup < 1.0 ? hi : lo) = mid;
        }
        r.alpha_crossing = std::exp(hi);
    } else if (r.alpha_star) {
        r.alpha_crossing = r.alpha_star;
    }
    const auto it = r.sup_curve.find(1.0);
    r.sup_u1 = it != r.sup_curve.end() ? it->second : potential_profile(k, mu, 1.0, grid, spec).sup_estimate;
    r.total_mass = mu.total_mass();
    r.s00_verdict = std::isfinite(r.sup_u1) && std::isfinite(r.total_mass);
    return r;
}

}  // namespace kacm
