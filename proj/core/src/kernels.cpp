#include "kacm/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "kacm/errors.hpp"
#include "kacm/quadrature.hpp"

namespace kacm {

namespace {

constexpr double kInvSqrt2Pi = 0.398942280401432677939946059934;

inline double gauss(double t, double d) { return kInvSqrt2Pi / std::sqrt(t) * std::exp(-d * d / (2.0 * t)); }

// P(a <= Z <= b) for standard normal Z, accurate in both tails.
double normal_interval(double a, double b) {
    constexpr double r2 = std::numbers::sqrt2;
    if (a >= 0.0) return 0.5 * (std::erfc(a / r2) - std::erfc(b / r2));
    if (b <= 0.0) return 0.5 * (std::erfc(-b / r2) - std::erfc(-a / r2));
    return 1.0 - 0.5 * std::erfc(-a / r2) - 0.5 * std::erfc(b / r2);
}

void require_time(double t) {
    if (!(t > 0.0) || !std::isfinite(t)) throw ArgumentError("time must be positive and finite");
}

}  // namespace

std::string family_name(Family f) {
    switch (f) {
        case Family::Brownian: return "brownian";
        case Family::BrownianDrift: return "brownian-drift";
        case Family::ReflectedBrownian: return "reflected-brownian";
        case Family::KilledBrownian: return "killed-brownian";
    }
    return "?";
}

Family parse_family(const std::string& name) {
    if (name == "brownian") return Family::Brownian;
    if (name == "brownian-drift") return Family::BrownianDrift;
    if (name == "reflected-brownian") return Family::ReflectedBrownian;
    if (name == "killed-brownian") return Family::KilledBrownian;
    throw ArgumentError("unknown kernel family '" + name + "'");
}

TransitionKernel::TransitionKernel(Family f, StateSpace space, double drift, double image_tol)
    : family_(f), space_(space), drift_(drift), image_tail_tol_(image_tol) {}

TransitionKernel TransitionKernel::brownian() {
    return {Family::Brownian, StateSpace::full_line(), 0.0, 1e-14};
}

TransitionKernel TransitionKernel::brownian_drift(double drift) {
    if (!std::isfinite(drift)) throw ArgumentError("drift must be finite");
    return {Family::BrownianDrift, StateSpace::full_line(), drift, 1e-14};
}

TransitionKernel TransitionKernel::reflected_brownian(double lower) {
    return {Family::ReflectedBrownian, StateSpace::half_line(lower, Boundary::Reflecting), 0.0, 1e-14};
}

TransitionKernel TransitionKernel::killed_brownian(double lower, double upper, double image_tail_tol) {
    if (!(image_tail_tol > 0.0 && image_tail_tol < 1.0))
        throw ArgumentError("image tail tolerance must lie in (0, 1)");
    return {Family::KilledBrownian,
            StateSpace::interval(lower, upper, Boundary::Killing, Boundary::Killing), 0.0,
            image_tail_tol};
}

std::string TransitionKernel::name() const {
    std::ostringstream os;
    os.precision(17);
    os << family_name(family_);
    if (family_ == Family::BrownianDrift) os << "(" << drift_ << ")";
    if (family_ == Family::ReflectedBrownian) os << "[" << space_.lower() << ",inf)";
    if (family_ == Family::KilledBrownian) os << "(" << space_.lower() << "," << space_.upper() << ")";
    return os.str();
}

bool TransitionKernel::operator==(const TransitionKernel& o) const {
    return family_ == o.family_ && space_ == o.space_ && drift_ == o.drift_ &&
           image_tail_tol_ == o.image_tail_tol_;
}

int TransitionKernel::image_count(double t) const {
    if (family_ != Family::KilledBrownian) return 0;
    const double len = space_.upper() - space_.lower();
    const double reach = std::sqrt(2.0 * t * std::log(1.0 / image_tail_tol_));
    return static_cast<int>(std::ceil(reach / (2.0 * len))) + 1;
}

double TransitionKernel::density(double t, double x, double y) const {
    switch (family_) {
        case Family::Brownian: return gauss(t, x - y);
        case Family::BrownianDrift: return gauss(t, y - x - drift_ * t);
        case Family::ReflectedBrownian: {
            const double lo = space_.lower();
            if (x < lo || y < lo) return 0.0;
            return gauss(t, x - y) + gauss(t, x + y - 2.0 * lo);
        }
        case Family::KilledBrownian: {
            const double lo = space_.lower();
            const double hi = space_.upper();
            if (!(x > lo && x < hi && y > lo && y < hi)) return 0.0;
            const double len = hi - lo;
            const int n_img = image_count(t);
            const double scale = kInvSqrt2Pi / std::sqrt(t);
            const double inv2t = 1.0 / (2.0 * t);
            const double direct = y - x;
            const double image = y + x - 2.0 * lo;
            double sum = 0.0;
            for (int n = -n_img; n <= n_img; ++n) {
                const double shift = 2.0 * n * len;
                const double d1 = direct + shift;
                const double d2 = image + shift;
                sum += std::exp(-d1 * d1 * inv2t) - std::exp(-d2 * d2 * inv2t);
            }
            return std::max(0.0, scale * sum);
        }
    }
    return 0.0;
}

double TransitionKernel::eval(double t, double x, double y) const {
    require_time(t);
    if (!space_.contains(x) || !space_.contains(y))
        throw DomainError("state outside " + space_.describe());
    return density(t, x, y);
}

double TransitionKernel::survival(double t, double x) const {
    require_time(t);
    if (family_ != Family::KilledBrownian) return 1.0;
    const double lo = space_.lower();
    const double hi = space_.upper();
    if (!(x > lo && x < hi)) return 0.0;
    const double len = hi - lo;
    const double st = std::sqrt(t);
    const int n_img = image_count(t);
    double sum = 0.0;
    for (int n = -n_img; n <= n_img; ++n) {
        const double shift = 2.0 * n * len;
        sum += normal_interval((lo - x + shift) / st, (hi - x + shift) / st);
        sum -= normal_interval((x - lo + shift) / st, (hi + x - 2.0 * lo + shift) / st);
    }
    return std::clamp(sum, 0.0, 1.0);
}

double TransitionKernel::potential_decay_rate(double alpha) const {
    if (family_ == Family::BrownianDrift) {
        const double g = std::sqrt(drift_ * drift_ + 2.0 * alpha);
        return g - std::abs(drift_);
    }
    return std::sqrt(2.0 * alpha);
}

TransitionKernel TransitionKernel::dual() const {
    if (family_ == Family::BrownianDrift) return brownian_drift(-drift_);
    return *this;
}

double ExtendedKernel::cemetery_mass(double t, double x) const {
    return std::clamp(1.0 - base_.survival(t, x), 0.0, 1.0);
}

double survival_mass(const ExtendedKernel& kernel, double t, double x, const QuadratureSpec&) {
    const auto& k = kernel.base();
    if (!k.space().contains(x)) throw DomainError("state outside " + k.space().describe());
    return k.survival(t, x);
}

namespace {

// Integration range covering the bulk of p_t(x, .) on the kernel's space.
std::pair<double, double> window(const TransitionKernel& k, double t, double centre, double sigmas) {
    const double w = sigmas * std::sqrt(t);
    return {k.space().clamp(centre - w), k.space().clamp(centre + w)};
}

}  // namespace

double potential_density(const TransitionKernel& k, double alpha, double x, double y,
                         const QuadratureSpec& spec) {
    if (!(alpha > 0.0)) throw ArgumentError("alpha must be positive");
    if (!k.space().contains(x) || !k.space().contains(y))
        throw DomainError("state outside " + k.space().describe());
    switch (k.family()) {
        case Family::Brownian: {
            const double g = std::sqrt(2.0 * alpha);
            return std::exp(-g * std::abs(x - y)) / g;
        }
        case Family::BrownianDrift: {
            const double b = k.drift();
            const double g = std::sqrt(b * b + 2.0 * alpha);
            return std::exp(b * (y - x) - g * std::abs(y - x)) / g;
        }
        case Family::ReflectedBrownian: {
            const double g = std::sqrt(2.0 * alpha);
            const double lo = k.space().lower();
            return (std::exp(-g * std::abs(x - y)) + std::exp(-g * (x + y - 2.0 * lo))) / g;
        }
        case Family::KilledBrownian: break;
    }
    const auto r = potential_density_numeric(k, alpha, x, y, spec);
    return r.value;
}

PotentialValue potential_density_numeric(const TransitionKernel& k, double alpha, double x, double y,
                                         const QuadratureSpec& spec) {
    if (!(alpha > 0.0)) throw ArgumentError("alpha must be positive");
    if (!k.space().contains(x) || !k.space().contains(y))
        throw DomainError("state outside " + k.space().describe());
    const double horizon = std::log(1.0 / spec.laplace_tail_tol) / alpha;
    const double umax = std::sqrt(horizon);
    auto integrand = [&](double u) {
        if (u <= 0.0) return 0.0;
        const double t = u * u;
        return 2.0 * u * std::exp(-alpha * t) * k.density(t, x, y);
    };
    // the integrand in u peaks near |x - y| (and near the drift time scale)
    std::vector<double> breaks{std::abs(x - y), 0.5 * std::abs(x - y), 2.0 * std::abs(x - y)};
    if (k.family() == Family::KilledBrownian) {
        const double len = k.space().upper() - k.space().lower();
        breaks.push_back(len);
        breaks.push_back(0.25 * len);
    }
    const auto q = quad::integrate_split(integrand, 0.0, umax, breaks, std::min(spec.rel_tol, 1e-11),
                                         spec.abs_tol);
    if (!q.converged) throw NumericError("Laplace quadrature of the potential density did not converge", q.abs_error);
    const double tail = std::exp(-alpha * horizon) / alpha * 2.0 * kInvSqrt2Pi / std::sqrt(horizon);
    return {q.value, q.abs_error + tail};
}

TestFunction TestFunction::indicator(double a, double b) {
    if (!(a < b)) throw ArgumentError("indicator needs a < b");
    return {[a, b](double z) { return (z >= a && z <= b) ? 1.0 : 0.0; }, a, b, {}};
}

TestFunction TestFunction::zero() {
    return {[](double) { return 0.0; }, 0.0, 1.0, {}};
}

StatePairs default_lattice(const TransitionKernel& k, double t, const QuadratureSpec& spec) {
    const int n = std::max(2, spec.lattice_size);
    std::vector<double> pts(static_cast<std::size_t>(n));
    const auto& sp = k.space();
    const double half = spec.lattice_sigmas * std::sqrt(t);
    for (int i = 0; i < n; ++i) {
        const double frac = static_cast<double>(i) / (n - 1);
        double p = 0.0;
        switch (sp.kind()) {
            case SpaceKind::FullLine: p = -half + 2.0 * half * frac; break;
            case SpaceKind::HalfLine: p = sp.lower() + 2.0 * half * frac; break;
            case SpaceKind::Interval:
                p = sp.lower() + (sp.upper() - sp.lower()) * (i + 1.0) / (n + 1.0);
                break;
        }
        pts[static_cast<std::size_t>(i)] = p;
    }
    StatePairs out;
    for (double a : pts)
        for (double b : pts) out.emplace_back(a, b);
    return out;
}

double chapman_kolmogorov_residual(const TransitionKernel& k, double t, double s, double x, double y,
                                   const QuadratureSpec& spec) {
    require_time(t);
    require_time(s);
    const double b = k.drift();
    const double c1 = x + b * t;
    const double c2 = y - b * s;
    const double w = 9.0 * std::sqrt(std::max(t, s));
    const double lo = k.space().clamp(std::min(c1, c2) - w);
    const double hi = k.space().clamp(std::max(c1, c2) + w);
    auto f = [&](double z) { return k.density(t, x, z) * k.density(s, z, y); };
    const double breaks[] = {c1, c2, x, y};
    const auto q = quad::integrate_split(f, lo, hi, breaks, std::min(spec.rel_tol, 1e-11), spec.abs_tol);
    return std::abs(q.value - k.density(t + s, x, y));
}

double check_chapman_kolmogorov(const TransitionKernel& k, double t, double s, const StatePairs& grid,
                                const QuadratureSpec& spec) {
    double worst = 0.0;
    for (auto [x, y] : grid) worst = std::max(worst, chapman_kolmogorov_residual(k, t, s, x, y, spec));
    return worst;
}

double check_symmetry(const TransitionKernel& k, double t, const StatePairs& grid) {
    double worst = 0.0;
    for (auto [x, y] : grid) worst = std::max(worst, std::abs(k.eval(t, x, y) - k.eval(t, y, x)));
    return worst;
}

double check_dual_density(const DualPair& pair, double t, const StatePairs& grid) {
    double worst = 0.0;
    for (auto [x, y] : grid)
        worst = std::max(worst, std::abs(pair.dual.eval(t, x, y) - pair.forward.eval(t, y, x)));
    return worst;
}

double check_mass(const TransitionKernel& k, double t, const StatePairs& grid, const QuadratureSpec& spec) {
    double worst = 0.0;
    std::vector<double> xs;
    for (auto [x, y] : grid) xs.push_back(x);
    std::sort(xs.begin(), xs.end());
    xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
    for (double x : xs) {
        const auto [lo, hi] = window(k, t, x + k.drift() * t, 12.0);
        auto f = [&](double z) { return k.density(t, x, z); };
        const double breaks[] = {x, x + k.drift() * t};
        const auto q = quad::integrate_split(f, lo, hi, breaks, std::min(spec.rel_tol, 1e-12), spec.abs_tol);
        const double closed = k.survival(t, x);
        double dev = std::abs(q.value - closed);
        if (closed < 0.0 || closed > 1.0) dev = std::max(dev, 1.0);
        if (k.conservative()) dev = std::max(dev, std::abs(q.value - 1.0));
        worst = std::max(worst, dev);
    }
    return worst;
}

double check_resolvent_equation(const TransitionKernel& k, double alpha, double beta, const StatePairs& grid,
                                const QuadratureSpec& spec) {
    if (!(alpha > 0.0) || !(beta > 0.0)) throw ArgumentError("rates must be positive");
    if (alpha == beta) throw ArgumentError("resolvent equation needs alpha != beta");
    const double lo_rate = std::min(alpha, beta);
    const double hi_rate = std::max(alpha, beta);
    const double kappa = std::min(k.potential_decay_rate(alpha), k.potential_decay_rate(beta));
    const double reach = 40.0 / kappa;
    double worst = 0.0;
    for (auto [x, y] : grid) {
        const double lo = k.space().clamp(std::min(x, y) - reach);
        const double hi = k.space().clamp(std::max(x, y) + reach);
        auto f = [&](double z) {
            if (!k.space().contains(z)) return 0.0;
            return potential_density(k, alpha, x, z, spec) * potential_density(k, beta, z, y, spec);
        };
        const double breaks[] = {x, y};
        const auto q = quad::integrate_split(f, lo, hi, breaks, std::min(spec.rel_tol, 1e-11), spec.abs_tol);
        const double lhs = potential_density(k, lo_rate, x, y, spec) - potential_density(k, hi_rate, x, y, spec);
        worst = std::max(worst, std::abs(lhs - (hi_rate - lo_rate) * q.value));
    }
    return worst;
}

namespace {

double pairing(const TransitionKernel& k, double t, const TestFunction& inner, const TestFunction& outer,
               const QuadratureSpec& spec) {
    const double tol = std::min(spec.rel_tol, 1e-12);
    std::vector<double> ib = inner.breaks;
    ib.push_back(inner.lower);
    ib.push_back(inner.upper);
    auto outer_f = [&](double x) {
        const double gx = outer.f(x);
        if (gx == 0.0) return 0.0;
        auto inner_f = [&](double y) { return k.density(t, x, y) * inner.f(y); };
        std::vector<double> breaks = ib;
        breaks.push_back(x + k.drift() * t);
        return gx * quad::integrate_split(inner_f, inner.lower, inner.upper, breaks, tol, 1e-16).value;
    };
    return quad::integrate_split(outer_f, outer.lower, outer.upper, outer.breaks, tol, 1e-16).value;
}

}  // namespace

double check_duality(const DualPair& pair, double t, const TestFunction& f, const TestFunction& g,
                     const QuadratureSpec& spec) {
    require_time(t);
    const double forward = pairing(pair.forward, t, f, g, spec);
    const double dual = pairing(pair.dual, t, g, f, spec);
    return std::abs(forward - dual);
}

}  // namespace kacm
