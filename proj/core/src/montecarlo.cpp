#include "kacm/montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numbers>
#include <ostream>
#include <sstream>
#include <thread>

#include "kacm/digest.hpp"
#include "kacm/errors.hpp"
#include "kacm/philox.hpp"

namespace kacm {

const char* kill_detection_name(KillDetection k) {
    return k == KillDetection::GridCrossing ? "grid-crossing" : "bridge-corrected";
}

KillDetection parse_kill_detection(const std::string& name) {
    if (name == "grid-crossing") return KillDetection::GridCrossing;
    if (name == "bridge-corrected") return KillDetection::BridgeCorrected;
    throw ArgumentError("unknown killing detection '" + name + "'");
}

const char* local_time_method_name(LocalTimeMethod m) {
    switch (m) {
        case LocalTimeMethod::EpsilonOccupation: return "epsilon-occupation";
        case LocalTimeMethod::Downcrossing: return "downcrossing";
        case LocalTimeMethod::Bridge: return "bridge";
    }
    return "?";
}

LocalTimeMethod parse_local_time_method(const std::string& name) {
    if (name == "epsilon-occupation") return LocalTimeMethod::EpsilonOccupation;
    if (name == "downcrossing") return LocalTimeMethod::Downcrossing;
    if (name == "bridge") return LocalTimeMethod::Bridge;
    throw ArgumentError("unknown local-time method '" + name + "'");
}

PcafEstimator PcafEstimator::occupation(const AcDensity& f) { return {RevuzMeasure({f}, {}), LocalTimeMethod::Bridge, 0.0}; }

PcafEstimator PcafEstimator::local_time(double a, LocalTimeMethod method, double epsilon) {
    return {RevuzMeasure::dirac(a), method, epsilon};
}

PcafEstimator PcafEstimator::from_measure(const RevuzMeasure& mu, LocalTimeMethod method, double epsilon) {
    return {mu, method, epsilon};
}

std::string PcafEstimator::describe() const {
    std::ostringstream os;
    os.precision(17);
    os << measure.describe();
    if (!measure.atoms().empty()) {
        os << "@" << local_time_method_name(method);
        if (method != LocalTimeMethod::Bridge) os << "(eps=" << epsilon << ")";
    }
    return os.str();
}

namespace {

constexpr double kInvSqrt2Pi = 0.3989422804014327;

// Free-space E[local time at a over one step | endpoints], i.e.
// int_0^h g_s(u) g_{h-s}(v) ds / g_h(x1 - x0) = erfc((|u|+|v|)/sqrt(2h)) / (2 g_h(d)).
inline double bridge_pair(double u, double v, double h) {
    return 0.5 * std::erfc((std::abs(u) + std::abs(v)) / std::sqrt(2.0 * h));
}

// P(Brownian bridge from u to v over h touches 0), u and v on the same side.
inline double bridge_touch(double u, double v, double h) {
    if (u * v <= 0.0) return 1.0;
    const double e = 2.0 * u * v / h;
    return e > 700.0 ? 0.0 : std::exp(-e);
}

inline double gauss(double d, double h) { return kInvSqrt2Pi / std::sqrt(h) * std::exp(-d * d / (2.0 * h)); }

struct Geometry {
    double drift = 0.0;
    bool reflected = false;
    double reflect_at = 0.0;
    bool killed = false;
    double kill_lo = 0.0;
    double kill_hi = 0.0;

    explicit Geometry(const TransitionKernel& k) {
        drift = k.family() == Family::BrownianDrift ? k.drift() : 0.0;
        reflected = k.family() == Family::ReflectedBrownian;
        reflect_at = k.space().lower();
        killed = k.family() == Family::KilledBrownian;
        kill_lo = k.space().lower();
        kill_hi = k.space().upper();
    }

    bool inside(double x) const { return !killed || (x > kill_lo && x < kill_hi); }

    // Probability that the Brownian bridge from x0 to x1 over h stays in
    // (lo, hi); product of the two one-sided probabilities.
    double bridge_survival(double x0, double x1, double h) const {
        if (!inside(x1)) return 0.0;
        const double a = 2.0 * (x0 - kill_lo) * (x1 - kill_lo) / h;
        const double b = 2.0 * (kill_hi - x0) * (kill_hi - x1) / h;
        const double qa = a > 40.0 ? 1.0 : -std::expm1(-a);
        const double qb = b > 40.0 ? 1.0 : -std::expm1(-b);
        return qa * qb;
    }

    double bridge_local_time(double x0, double x1, double a, double h) const {
        // erfc(z) e^{delta^2} <= e^{delta^2 - z^2}; image terms are smaller still.
        const double span = std::abs(x0 - a) + std::abs(x1 - a);
        const double dd = x1 - x0;
        if ((span * span - dd * dd) > 90.0 * h) return 0.0;
        if (!reflected) return bridge_pair(x0 - a, a - x1, h) / gauss(x1 - x0, h);
        const double L = reflect_at;
        const double num = bridge_pair(x0 - a, a - x1, h) + bridge_pair(x0 + a - 2 * L, a - x1, h) +
                           bridge_pair(x0 - a, a + x1 - 2 * L, h) + bridge_pair(x0 + a - 2 * L, a + x1 - 2 * L, h);
        return num / (gauss(x1 - x0, h) + gauss(x1 + x0 - 2 * L, h));
    }
};

struct AtomTerm {
    double a;
    double weight;
    double norm;  // m([a - eps, a + eps] within S)
};

// One PCAF at one resolution. Time integrals are kept in units of the
// fine step so that deterministic functionals come out exact.
class Functional {
public:
    Functional(const PcafEstimator& est, const TransitionKernel& k, double eps) : method_(est.method), eps_(eps) {
        dens_ = est.measure.densities();
        const auto& sp = k.space();
        for (const auto& at : est.measure.atoms()) {
            const double lo = std::max(at.location - eps, sp.lower());
            const double hi = std::min(at.location + eps, sp.upper());
            if (method_ == LocalTimeMethod::Downcrossing && k.family() == Family::ReflectedBrownian &&
                at.location <= sp.lower())
                throw ArgumentError("downcrossing local time is undefined at a reflecting boundary");
            atoms_.push_back({at.location, at.weight, hi - lo});
        }
        armed_.assign(atoms_.size(), 0.0);
    }

    void reset(double x) {
        units_ = 0.0;
        direct_ = 0.0;
        for (std::size_t i = 0; i < atoms_.size(); ++i) armed_[i] = x >= atoms_[i].a + eps_ ? 1.0 : 0.0;
    }

    /// Step x0 -> x1 of length `units` fine steps (h = units * h_fine).
    /// e0, e1, em: discount factors at the step start, end and middle;
    /// w: optional spatial weight.
    void step(const Geometry& g, double x0, double x1, double units, double h, double e0 = 1.0, double e1 = 1.0,
              double em = 1.0, const AcDensity* w = nullptr) {
        if (!dens_.empty()) {
            double f0 = 0.0, f1 = 0.0;
            for (const auto& d : dens_) {
                f0 += d(x0);
                f1 += d(x1);
            }
            if (w) {
                f0 *= (*w)(x0);
                f1 *= (*w)(x1);
            }
            units_ += 0.5 * units * (e0 * f0 + e1 * f1);
        }
        for (std::size_t i = 0; i < atoms_.size(); ++i) {
            const auto& at = atoms_[i];
            const double wa = at.weight * (w ? (*w)(at.a) : 1.0);
            switch (method_) {
                case LocalTimeMethod::EpsilonOccupation: {
                    const double i0 = std::abs(x0 - at.a) <= eps_ ? e0 : 0.0;
                    const double i1 = std::abs(x1 - at.a) <= eps_ ? e1 : 0.0;
                    if (i0 != 0.0 || i1 != 0.0) units_ += wa * 0.5 * units * (i0 + i1) / at.norm;
                    break;
                }
                case LocalTimeMethod::Downcrossing: {
                    // The path between grid points is a Brownian bridge; carry the
                    // probability of being armed instead of a hard flag.
                    const double top = at.a + eps_;
                    const double up = bridge_touch(x0 - top, x1 - top, h);
                    const double down = bridge_touch(x0 - at.a, x1 - at.a, h);
                    double& p = armed_[i];
                    double count = p * down;
                    if (x1 <= at.a) count += (1.0 - p) * up;
                    direct_ += wa * at.norm * e1 * count;
                    if (x1 >= top)
                        p = 1.0;
                    else if (x1 <= at.a)
                        p = 0.0;
                    else
                        p = p * (1.0 - down) + (1.0 - p) * up;
                    break;
                }
                case LocalTimeMethod::Bridge:
                    direct_ += wa * em * g.bridge_local_time(x0, x1, at.a, h);
                    break;
            }
        }
    }

    /// Value after `total_units` fine steps spanning time `t`.
    double value(double total_units, double t) const { return units_ / total_units * t + direct_; }

private:
    LocalTimeMethod method_;
    double eps_;
    std::vector<AcDensity> dens_;
    std::vector<AtomTerm> atoms_;
    std::vector<double> armed_;  // probability of having touched a + eps since the last count
    double units_ = 0.0;
    double direct_ = 0.0;
};

struct StepPlan {
    std::int64_t n = 0;
    double h = 0.0;
    bool adjusted = false;
};

StepPlan plan_steps(double t, double dt) {
    if (!(dt > 0.0) || !(t > 0.0)) throw ArgumentError("step and horizon must be positive");
    StepPlan p;
    p.n = std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(t / dt - 1e-9)));
    p.h = t / static_cast<double>(p.n);
    p.adjusted = std::abs(p.h - dt) > 1e-12 * dt;
    return p;
}

double next_state(const Geometry& g, double x, double h, double sqrt_h, double z) {
    double y = x + g.drift * h + sqrt_h * z;
    if (g.reflected && y < g.reflect_at) y = 2.0 * g.reflect_at - y;
    return y;
}

// Runs `body(path, fine_out, coarse_out)` over all paths in blocks and
// reduces in path order.
template <class Body>
void run_paths(std::int64_t n, int workers, std::vector<double>& fine, std::vector<double>& coarse, Body body) {
    fine.assign(static_cast<std::size_t>(n), 0.0);
    coarse.assign(static_cast<std::size_t>(n), 0.0);
    constexpr std::int64_t kBlock = 1024;
    const std::int64_t blocks = (n + kBlock - 1) / kBlock;
    std::atomic<std::int64_t> next{0};
    auto work = [&] {
        for (std::int64_t b; (b = next.fetch_add(1)) < blocks;) {
            const std::int64_t end = std::min(n, (b + 1) * kBlock);
            for (std::int64_t p = b * kBlock; p < end; ++p)
                body(p, fine[static_cast<std::size_t>(p)], coarse[static_cast<std::size_t>(p)]);
        }
    };
    const int w = static_cast<int>(std::clamp<std::int64_t>(workers, 1, blocks));
    if (w == 1) {
        work();
        return;
    }
    std::vector<std::thread> pool;
    for (int i = 0; i < w; ++i) pool.emplace_back(work);
    for (auto& th : pool) th.join();
}

// Shifted two-pass statistics: identical samples give mean == sample and
// a zero standard error.
std::pair<double, double> mean_and_se(const std::vector<double>& v) {
    const double n = static_cast<double>(v.size());
    const double ref = v.front();
    double s = 0.0;
    for (double x : v) s += x - ref;
    const double mean = ref + s / n;
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    const double var = v.size() > 1 ? ss / (n - 1.0) : 0.0;
    return {mean, std::sqrt(var / n)};
}

void add_common_warnings(McEstimate& e, const StepPlan& plan, double dt,
                         const std::vector<const PcafEstimator*>& ests) {
    if (plan.adjusted) {
        std::ostringstream os;
        os.precision(17);
        os << "dt " << dt << " does not divide the horizon; using " << plan.h;
        e.warnings.push_back(os.str());
    }
    for (const auto* est : ests) {
        if (est->measure.atoms().empty() || est->method == LocalTimeMethod::Bridge) continue;
        if (!(est->epsilon > 0.0)) throw ArgumentError("local-time epsilon must be positive");
        if (est->epsilon < std::sqrt(plan.h)) {
            std::ostringstream os;
            os << "epsilon " << est->epsilon << " below the path resolution sqrt(dt) = " << std::sqrt(plan.h)
               << "; local-time bias may dominate";
            e.warnings.push_back(os.str());
        }
    }
}

std::uint64_t config_digest(const PathScheme& s, const std::string& what, std::int64_t n) {
    std::ostringstream os;
    os.precision(17);
    os << s.kernel.name() << "|dt=" << s.dt << "|" << kill_detection_name(s.killing) << "|seed=" << s.seed
       << "|n=" << n << "|" << what;
    return fnv1a64(os.str());
}

void check_common(const PathScheme& scheme, double x, const McOptions& opt) {
    if (opt.n_paths < 2) throw ArgumentError("n-paths must be >= 2");
    if (!scheme.kernel.space().contains(x)) throw DomainError("start point outside " + scheme.kernel.space().describe());
}

// Per-path state for moment estimation at one resolution.
struct MomentTrack {
    std::vector<Functional> fs;
    std::vector<int> powers;
    bool alive = true;
    double weight = 1.0;
    double killed_sum = 0.0;  // cemetery contributions
    double units = 0.0;       // elapsed fine steps

    double n_total = 1.0;  // fine steps in the horizon
    double horizon = 0.0;

    double product() const {
        if (units == 0.0) {
            for (int k : powers)
                if (k > 0) return 0.0;
            return 1.0;
        }
        // elapsed time as a fraction of the horizon keeps A_t = t exact
        const double elapsed = units / n_total * horizon;
        double p = 1.0;
        for (std::size_t i = 0; i < fs.size(); ++i) p *= std::pow(fs[i].value(units, elapsed), powers[i]);
        return p;
    }
};

void track_step(MomentTrack& tr, const Geometry& g, KillDetection kd, double x0, double x1, double units, double h,
                double cemetery) {
    if (!tr.alive) return;
    if (g.killed && kd == KillDetection::GridCrossing && !g.inside(x1)) {
        tr.alive = false;
        tr.killed_sum += cemetery * tr.product();
        return;
    }
    for (auto& f : tr.fs) f.step(g, x0, x1, units, h);
    tr.units += units;
    if (g.killed && kd == KillDetection::BridgeCorrected) {
        const double q = g.bridge_survival(x0, x1, h);
        if (q < 1.0) {
            tr.killed_sum += tr.weight * (1.0 - q) * cemetery * (cemetery != 0.0 ? tr.product() : 0.0);
            tr.weight *= q;
            if (tr.weight == 0.0) tr.alive = false;
        }
    }
}

double track_value(const MomentTrack& tr, const TerminalFunction& f, double x) {
    double v = tr.killed_sum;
    if (tr.alive) v += tr.weight * f(x) * tr.product();
    return v;
}

}  // namespace

McEstimate estimate_moment(const PathScheme& scheme, const McFactors& factors, double x, double t,
                           const std::optional<TerminalFunction>& terminal, const McOptions& opt) {
    check_common(scheme, x, opt);
    const auto plan = plan_steps(t, scheme.dt);
    const Geometry geo(scheme.kernel);
    const auto f = terminal.value_or(TerminalFunction::one());
    const double cem = f.cemetery();
    for (const auto& [est, k] : factors) {
        if (k < 0) throw ArgumentError("powers must be >= 0");
        est.measure.validate(scheme.kernel.space());
    }

    auto make_track = [&](bool coarse) {
        MomentTrack tr;
        for (const auto& [est, k] : factors) {
            tr.fs.emplace_back(est, scheme.kernel, coarse ? 2.0 * est.epsilon : est.epsilon);
            tr.powers.push_back(k);
        }
        tr.n_total = static_cast<double>(plan.n);
        tr.horizon = t;
        return tr;
    };
    const MomentTrack fine_proto = make_track(false);
    const MomentTrack coarse_proto = make_track(true);
    const Philox4x32 gen(scheme.seed);
    const double sqrt_h = std::sqrt(plan.h);

    auto simulate = [&](std::int64_t p, double& out_f, double& out_c, std::ostream* dump) {
        NormalStream ns(gen, static_cast<std::uint64_t>(p));
        MomentTrack fine = fine_proto;
        MomentTrack coarse = coarse_proto;
        for (auto& fn : fine.fs) fn.reset(x);
        for (auto& fn : coarse.fs) fn.reset(x);
        double xc = x;  // coarse grid anchor
        double xs = x;
        for (std::int64_t n = 0; n < plan.n; ++n) {
            const double x1 = next_state(geo, xs, plan.h, sqrt_h, ns.next());
            track_step(fine, geo, scheme.killing, xs, x1, 1.0, plan.h, cem);
            const bool coarse_point = (n % 2 == 1) || n + 1 == plan.n;
            if (coarse_point) {
                const double units = (n % 2 == 1) ? 2.0 : 1.0;
                track_step(coarse, geo, scheme.killing, xc, x1, units, units * plan.h, cem);
                xc = x1;
            }
            xs = x1;
            if (dump) {
                *dump << (n + 1) * plan.h << "," << xs << "," << (fine.alive ? fine.weight : 0.0);
                for (const auto& fn : fine.fs) *dump << "," << fn.value(fine.units, fine.units / fine.n_total * t);
                *dump << "\n";
            }
            if (!fine.alive && !coarse.alive && !dump) break;
        }
        out_f = track_value(fine, f, xs);
        out_c = track_value(coarse, f, xs);
    };

    std::vector<double> fine, coarse;
    run_paths(opt.n_paths, opt.workers, fine, coarse,
              [&](std::int64_t p, double& a, double& b) { simulate(p, a, b, nullptr); });
    if (opt.path_dump && opt.dump_paths > 0) {
        auto& os = *opt.path_dump;
        os.precision(17);
        os << "path,time,state,alive";
        for (std::size_t i = 0; i < factors.size(); ++i) os << ",A_" << (i + 1);
        os << "\n";
        for (int p = 0; p < std::min<std::int64_t>(opt.dump_paths, opt.n_paths); ++p) {
            std::ostringstream buf;
            buf.precision(17);
            double a, b;
            simulate(p, a, b, &buf);
            std::istringstream lines(buf.str());
            for (std::string line; std::getline(lines, line);) os << p << "," << line << "\n";
        }
    }

    McEstimate e;
    std::tie(e.mean, e.std_error) = mean_and_se(fine);
    e.coarse_mean = mean_and_se(coarse).first;
    e.bias_budget = std::abs(e.mean - e.coarse_mean);
    e.n_paths = opt.n_paths;
    e.dt_used = plan.h;
    e.seed = scheme.seed;
    std::vector<std::pair<RevuzMeasure, int>> groups;
    std::ostringstream what;
    what.precision(17);
    std::vector<const PcafEstimator*> ests;
    for (const auto& [est, k] : factors) {
        groups.emplace_back(est.measure, k);
        what << est.describe() << "^" << k << ";";
        ests.push_back(&est);
    }
    what << "|" << f.describe() << "|x=" << x << "|t=" << t;
    e.config_digest = config_digest(scheme, what.str(), opt.n_paths);
    e.problem_digest = product_problem_digest(scheme.kernel, groups, f, x, t);
    add_common_warnings(e, plan, scheme.dt, ests);
    return e;
}

McEstimate estimate_moment(const PathScheme& scheme, const PcafEstimator& estimator, double x, double t, int k,
                           const McOptions& options) {
    return estimate_moment(scheme, McFactors{{estimator, k}}, x, t, std::nullopt, options);
}

std::vector<McEstimate> estimate_discounted(const PathScheme& scheme, const PcafEstimator& estimator,
                                            const std::vector<double>& alphas, const AcDensity& weight, double x,
                                            const McOptions& opt) {
    check_common(scheme, x, opt);
    if (alphas.empty()) throw ArgumentError("estimate_discounted needs at least one rate");
    for (double a : alphas)
        if (!(a > 0.0)) throw ArgumentError("discount rates must be positive");
    estimator.measure.validate(scheme.kernel.space());
    const double a_min = *std::min_element(alphas.begin(), alphas.end());
    const double horizon = std::log(1e6) / a_min;
    const auto plan = plan_steps(horizon, scheme.dt);
    const Geometry geo(scheme.kernel);
    const Philox4x32 gen(scheme.seed);
    const double sqrt_h = std::sqrt(plan.h);
    const std::size_t na = alphas.size();

    // one fine and one coarse functional per rate; the discount multiplies the increments
    struct Track {
        std::vector<Functional> fs;
        std::vector<double> disc;  // e^{-alpha * time}
        double weight = 1.0;
        bool alive = true;
    };
    std::vector<double> step_f(na), half_f(na), step_c(na), half_c(na);
    for (std::size_t i = 0; i < na; ++i) {
        step_f[i] = std::exp(-alphas[i] * plan.h);
        half_f[i] = std::exp(-alphas[i] * plan.h / 2);
        step_c[i] = std::exp(-alphas[i] * 2 * plan.h);
        half_c[i] = std::exp(-alphas[i] * plan.h);
    }
    auto proto = [&](bool coarse) {
        Track tr;
        for (std::size_t i = 0; i < na; ++i)
            tr.fs.emplace_back(estimator, scheme.kernel, coarse ? 2.0 * estimator.epsilon : estimator.epsilon);
        tr.disc.assign(na, 1.0);
        return tr;
    };
    const Track fine_proto = proto(false), coarse_proto = proto(true);
    // Time integrals here carry the physical step as their unit; the
    // survival weight rides on the discount factors.
    auto advance = [&](Track& tr, double x0, double x1, double units, const std::vector<double>& step,
                       const std::vector<double>& half) {
        if (!tr.alive) return;
        const double h = units * plan.h;
        if (geo.killed && scheme.killing == KillDetection::GridCrossing && !geo.inside(x1)) {
            tr.alive = false;
            return;
        }
        for (std::size_t i = 0; i < na; ++i) {
            const double e0 = tr.disc[i];
            const double e1 = e0 * step[i];
            const double w = tr.weight;
            tr.fs[i].step(geo, x0, x1, h, h, w * e0, w * e1, w * e0 * half[i], &weight);
            tr.disc[i] = e1;
        }
        if (geo.killed && scheme.killing == KillDetection::BridgeCorrected) {
            tr.weight *= geo.bridge_survival(x0, x1, h);
            if (tr.weight == 0.0) tr.alive = false;
        }
    };

    std::vector<double> packed_f, packed_c;
    // run once, packing all rates per path
    std::vector<double> all_f(static_cast<std::size_t>(opt.n_paths) * na), all_c(all_f.size());
    run_paths(opt.n_paths, opt.workers, packed_f, packed_c, [&](std::int64_t p, double&, double&) {
        NormalStream ns(gen, static_cast<std::uint64_t>(p));
        Track tf = fine_proto, tc = coarse_proto;
        for (auto& fn : tf.fs) fn.reset(x);
        for (auto& fn : tc.fs) fn.reset(x);
        double xs = x, xc = x;
        for (std::int64_t n = 0; n < plan.n; ++n) {
            const double x1 = next_state(geo, xs, plan.h, sqrt_h, ns.next());
            advance(tf, xs, x1, 1.0, step_f, half_f);
            if (n % 2 == 1) {
                advance(tc, xc, x1, 2.0, step_c, half_c);
                xc = x1;
            } else if (n + 1 == plan.n) {
                // odd step count: a final single fine step for the coarse twin
                advance(tc, xc, x1, 1.0, step_f, half_f);
                xc = x1;
            }
            xs = x1;
            if (!tf.alive && !tc.alive) break;
        }
        for (std::size_t i = 0; i < na; ++i) {
            all_f[static_cast<std::size_t>(p) * na + i] = tf.fs[i].value(1.0, 1.0);
            all_c[static_cast<std::size_t>(p) * na + i] = tc.fs[i].value(1.0, 1.0);
        }
    });

    std::vector<McEstimate> out;
    std::vector<double> col_f(static_cast<std::size_t>(opt.n_paths)), col_c(col_f.size());
    for (std::size_t i = 0; i < na; ++i) {
        for (std::int64_t p = 0; p < opt.n_paths; ++p) {
            col_f[static_cast<std::size_t>(p)] = all_f[static_cast<std::size_t>(p) * na + i];
            col_c[static_cast<std::size_t>(p)] = all_c[static_cast<std::size_t>(p) * na + i];
        }
        McEstimate e;
        std::tie(e.mean, e.std_error) = mean_and_se(col_f);
        e.coarse_mean = mean_and_se(col_c).first;
        e.bias_budget = std::abs(e.mean - e.coarse_mean);
        // truncated tail: e^{-alpha T} sup U_alpha(w mu), bounded per part
        double sup_u = 0.0;
        for (const auto& d : estimator.measure.densities()) sup_u += d.level / alphas[i];
        for (const auto& at : estimator.measure.atoms())
            sup_u += at.weight * potential_density(scheme.kernel.family() == Family::KilledBrownian
                                                       ? TransitionKernel::brownian()
                                                       : scheme.kernel,
                                                   alphas[i], at.location, at.location);
        const double tail = std::exp(-alphas[i] * plan.n * plan.h) * sup_u * weight.level;
        e.std_error = std::hypot(e.std_error, tail);
        e.n_paths = opt.n_paths;
        e.dt_used = plan.h;
        e.seed = scheme.seed;
        std::ostringstream what;
        what.precision(17);
        what << "discounted(" << alphas[i] << ")|" << estimator.describe() << "|w=" << weight.describe()
             << "|x=" << x;
        e.config_digest = config_digest(scheme, what.str(), opt.n_paths);
        e.problem_digest = fnv1a64("discounted|" + scheme.kernel.name() + "|" + what.str());
        add_common_warnings(e, plan, scheme.dt, {&estimator});
        out.push_back(std::move(e));
    }
    return out;
}

McEstimate estimate_discounted(const PathScheme& scheme, const PcafEstimator& estimator, double alpha,
                               const AcDensity& weight, double x, const McOptions& options) {
    return estimate_discounted(scheme, estimator, std::vector<double>{alpha}, weight, x, options).front();
}

double check_additivity(const PathScheme& scheme, const PcafEstimator& estimator, double x, double t, double s,
                        const McOptions& opt) {
    check_common(scheme, x, opt);
    if (!(t > 0.0) || !(s > 0.0)) throw ArgumentError("t and s must be positive");
    estimator.measure.validate(scheme.kernel.space());
    const auto plan = plan_steps(t + s, scheme.dt);
    // the split must fall on the grid
    const auto split = static_cast<std::int64_t>(std::llround(t / plan.h));
    const Geometry geo(scheme.kernel);
    const Philox4x32 gen(scheme.seed);
    const double sqrt_h = std::sqrt(plan.h);
    const Functional proto(estimator, scheme.kernel, estimator.epsilon);

    std::vector<double> dev, unused;
    run_paths(opt.n_paths, opt.workers, dev, unused, [&](std::int64_t p, double& out, double&) {
        NormalStream ns(gen, static_cast<std::uint64_t>(p));
        Functional whole = proto, head = proto, tail = proto;
        whole.reset(x);
        head.reset(x);
        double xs = x;
        for (std::int64_t n = 0; n < plan.n; ++n) {
            const double x1 = next_state(geo, xs, plan.h, sqrt_h, ns.next());
            if (geo.killed && !geo.inside(x1)) break;
            if (n == split) tail.reset(xs);
            whole.step(geo, xs, x1, 1.0, plan.h);
            (n < split ? head : tail).step(geo, xs, x1, 1.0, plan.h);
            xs = x1;
        }
        const double h_units = 1.0;
        const double a_ts = whole.value(h_units, plan.h);
        const double a_t = head.value(h_units, plan.h);
        const double a_s = split < plan.n ? tail.value(h_units, plan.h) : 0.0;
        out = std::abs(a_ts - a_t - a_s);
    });
    return *std::max_element(dev.begin(), dev.end());
}

CompareResult compare_values(double engine_value, double engine_error, const McEstimate& mc) {
    CompareResult r;
    r.combined_error = std::sqrt(mc.std_error * mc.std_error + engine_error * engine_error +
                                 mc.bias_budget * mc.bias_budget);
    const double diff = engine_value - mc.mean;
    if (r.combined_error == 0.0) {
        r.z = diff == 0.0 ? 0.0 : std::copysign(std::numeric_limits<double>::infinity(), diff);
    } else {
        r.z = diff / r.combined_error;
    }
    r.pass = std::abs(r.z) <= 3.0;
    return r;
}

CompareResult compare(const MomentResult& engine, const McEstimate& mc) {
    if (engine.problem_digest != mc.problem_digest)
        throw ConfigError("engine and Monte Carlo describe different problems (digest " +
                          hex_digest(engine.problem_digest) + " vs " + hex_digest(mc.problem_digest) + ")");
    return compare_values(engine.value, engine.error_estimate, mc);
}

}  // namespace kacm
