#include "kacm/moments.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <ostream>
#include <sstream>

#include "kacm/digest.hpp"
#include "kacm/errors.hpp"
#include "recursion.hpp"

namespace kacm {

const char* order_mode_name(OrderMode m) {
    switch (m) {
        case OrderMode::Ordered: return "ordered";
        case OrderMode::PermutationSum: return "permutation-sum";
        case OrderMode::IdenticalPower: return "identical-power";
    }
    return "?";
}

OrderMode parse_order_mode(const std::string& name) {
    if (name == "ordered") return OrderMode::Ordered;
    if (name == "permutation-sum") return OrderMode::PermutationSum;
    if (name == "identical-power") return OrderMode::IdenticalPower;
    throw ArgumentError("unknown order mode '" + name + "'");
}

void MomentResult::write_profile_csv(std::ostream& os) const {
    os << "level,state,remaining_time,value\n";
    os.precision(17);
    for (const auto& n : grid_profile)
        os << n.level << "," << n.state << "," << n.remaining_time << "," << n.value << "\n";
}

namespace {

void require_request(const TransitionKernel& k, double x, double t, const std::vector<RevuzMeasure>& measures) {
    if (!(t > 0.0) || !std::isfinite(t)) throw ArgumentError("horizon t must be positive and finite");
    if (!k.space().contains(x)) throw DomainError("start point outside " + k.space().describe());
    if (measures.empty()) throw ArgumentError("moment needs at least one measure");
    for (const auto& m : measures) m.validate(k.space());
}

// G_k(x, t) in scaled form: value = raw * exp(log_scale).
struct ChainValue {
    double raw = 0.0;
    double log_scale = 0.0;
    double abs_error = 0.0;  // in the same scaled units as raw
    bool zero = false;
};

std::vector<double> chain_anchors(double x, const std::vector<RevuzMeasure>& measures, const TerminalFunction& f) {
    std::vector<double> anchors{x};
    for (const auto& m : measures) {
        const auto b = m.breakpoints();
        anchors.insert(anchors.end(), b.begin(), b.end());
    }
    const auto fb = f.breakpoints();
    anchors.insert(anchors.end(), fb.begin(), fb.end());
    return anchors;
}

std::vector<double> squared_nodes(const quad::ChebyshevNodes& times) {
    std::vector<double> s;
    for (double r : times.nodes()) s.push_back(r * r);
    return s;
}

void record_profile(std::vector<ProfileNode>& out, int level, const detail::Table& tab) {
    const int nt = tab.times.size();
    const double scale = std::exp(tab.log_scale);
    for (int i = 0; i < tab.grid.size(); ++i)
        for (int m = 0; m < nt; ++m) {
            const double r = tab.times.node(m);
            out.push_back({level, tab.grid.node(i), r * r,
                           tab.values[static_cast<std::size_t>(i) * static_cast<std::size_t>(nt) +
                                      static_cast<std::size_t>(m)] * scale});
        }
}

ChainValue finish_point(const TransitionKernel& k, const RevuzMeasure& mu, const detail::Table& prev, double x,
                        double t, const QuadratureSpec& spec) {
    ChainValue out;
    if (prev.log_scale == -std::numeric_limits<double>::infinity()) {
        out.zero = true;
        return out;
    }
    const double times[] = {t};
    const auto lvl = detail::apply_step(k, mu, prev, detail::SpaceGrid::single_point(x), times, spec);
    out.raw = lvl.values[0];
    out.log_scale = prev.log_scale;
    out.abs_error = lvl.errors[0] + std::abs(out.raw) * prev.rel_error;
    return out;
}

// Ordered chain: measures[0] is integrated first in time (outermost).
ChainValue run_chain(const TransitionKernel& k, const std::vector<RevuzMeasure>& measures,
                     const TerminalFunction& f, double x, double t, const QuadratureSpec& spec,
                     std::vector<ProfileNode>* profile) {
    ChainValue zero;
    zero.zero = true;
    if (f.is_zero()) return zero;
    for (const auto& m : measures)
        if (m.empty()) return zero;
    const int n = static_cast<int>(measures.size());
    const auto anchors = chain_anchors(x, measures, f);
    const quad::ChebyshevNodes times(spec.time_nodes, std::sqrt(t));
    const auto s_nodes = squared_nodes(times);

    const auto& innermost = measures[static_cast<std::size_t>(n - 1)];
    const auto f_breaks = f.breakpoints();
    auto grid0 = detail::SpaceGrid::for_measure(k, innermost, f_breaks, anchors, t, spec);
    detail::Table tab = detail::terminal_table(k, f, grid0, t, spec);
    if (profile) record_profile(*profile, 0, tab);
    for (int j = 1; j < n; ++j) {
        if (tab.log_scale == -std::numeric_limits<double>::infinity()) return zero;
        const auto& mu = measures[static_cast<std::size_t>(n - j)];
        const auto& next = measures[static_cast<std::size_t>(n - j - 1)];
        const auto sing = mu.breakpoints();
        auto grid = detail::SpaceGrid::for_measure(k, next, sing, anchors, t, spec);
        auto lvl = detail::apply_step(k, mu, tab, grid, s_nodes, spec);
        tab = detail::make_table(std::move(grid), times, std::move(lvl), tab.log_scale, tab.rel_error);
        if (profile) record_profile(*profile, j, tab);
    }
    return finish_point(k, measures.front(), tab, x, t, spec);
}

MomentResult assemble(const ChainValue& c, double factor) {
    MomentResult r;
    if (c.zero || c.raw == 0.0) {
        r.value = 0.0;
        r.error_estimate = c.zero ? 0.0 : c.abs_error * std::exp(c.log_scale) * factor;
        r.log_value = -std::numeric_limits<double>::infinity();
        return r;
    }
    const double log_factor = std::log(factor);
    r.log_value = std::log(std::abs(c.raw)) + c.log_scale + log_factor;
    r.value = c.raw * std::exp(c.log_scale) * factor;
    r.error_estimate = c.abs_error * std::exp(c.log_scale) * factor;
    if (!std::isfinite(r.value))
        throw NumericError("moment overflows double precision; see log_value", r.log_value);
    if (r.value < 0.0) {
        // quadrature noise around a vanishing moment
        if (-r.value <= r.error_estimate) r.value = 0.0;
        else throw NumericError("negative moment value", r.value);
    }
    return r;
}

std::uint64_t ordered_digest(const MomentRequest& req) {
    std::ostringstream os;
    os.precision(17);
    os << "ordered|" << req.kernel.name() << "|";
    for (const auto& m : req.measures) os << m.describe() << ";";
    os << "|" << req.terminal_or_one().describe() << "|x=" << req.x << "|t=" << req.t;
    return fnv1a64(os.str());
}

}  // namespace

KacEngine::KacEngine(QuadratureSpec spec, bool keep_profile) : spec_(spec), keep_profile_(keep_profile) {
    if (spec_.time_nodes < 2 || spec_.space_nodes < 2 || spec_.time_panels < 1)
        throw ArgumentError("quadrature spec needs at least two nodes per grid");
}

double KacEngine::terminal_expectation(const ExtendedKernel& kernel, const TerminalFunction& f, double s,
                                       double y) const {
    const auto& k = kernel.base();
    if (!k.space().contains(y)) throw DomainError("state outside " + k.space().describe());
    return detail::terminal_expectation_impl(k, f, s, y, spec_);
}

double KacEngine::kac_step(const TransitionKernel& kernel, const RevuzMeasure& mu,
                           const std::function<double(double, double)>& g, double x, double t) const {
    require_request(kernel, x, t, {mu});
    // tabulate g on the measure's grid, then reuse the tabulated step
    std::vector<double> anchors{x};
    const auto b = mu.breakpoints();
    anchors.insert(anchors.end(), b.begin(), b.end());
    auto grid = detail::SpaceGrid::for_measure(kernel, mu, {}, anchors, t, spec_);
    detail::Table tab;
    tab.grid = grid;
    tab.times = quad::ChebyshevNodes(spec_.time_nodes, std::sqrt(t));
    const int nt = tab.times.size();
    tab.values.resize(static_cast<std::size_t>(grid.size()) * static_cast<std::size_t>(nt));
    for (int i = 0; i < grid.size(); ++i)
        for (int m = 0; m < nt; ++m) {
            const double r = tab.times.node(m);
            tab.values[static_cast<std::size_t>(i) * static_cast<std::size_t>(nt) + static_cast<std::size_t>(m)] =
                g(grid.node(i), r * r);
        }
    const double times[] = {t};
    const auto lvl = detail::apply_step(kernel, mu, tab, detail::SpaceGrid::single_point(x), times, spec_);
    return lvl.values[0];
}

MomentResult KacEngine::ordered_product_moment(const MomentRequest& req) const {
    require_request(req.kernel, req.x, req.t, req.measures);
    std::vector<ProfileNode> profile;
    const auto c = run_chain(req.kernel, req.measures, req.terminal_or_one(), req.x, req.t, spec_,
                             keep_profile_ ? &profile : nullptr);
    auto r = assemble(c, 1.0);
    r.problem_digest = ordered_digest(req);
    r.grid_profile = std::move(profile);
    return r;
}

MomentResult KacEngine::kth_moment(const MomentRequest& req) const {
    require_request(req.kernel, req.x, req.t, req.measures);
    for (const auto& m : req.measures)
        if (!(m == req.measures.front())) throw ArgumentError("identical-power mode needs equal measures");
    const int k = static_cast<int>(req.measures.size());
    std::vector<ProfileNode> profile;
    const auto c = run_chain(req.kernel, req.measures, req.terminal_or_one(), req.x, req.t, spec_,
                             keep_profile_ ? &profile : nullptr);
    auto r = assemble(c, std::tgamma(k + 1.0));
    r.problem_digest = product_problem_digest(req.kernel, group_measures(req.measures), req.terminal_or_one(),
                                              req.x, req.t);
    r.grid_profile = std::move(profile);
    return r;
}

MomentResult KacEngine::kth_moment(const TransitionKernel& kernel, const RevuzMeasure& mu, int k, double x,
                                   double t) const {
    if (k < 1) throw ArgumentError("k must be >= 1");
    MomentRequest req;
    req.kernel = kernel;
    req.measures.assign(static_cast<std::size_t>(k), mu);
    req.x = x;
    req.t = t;
    return kth_moment(req);
}

MomentResult KacEngine::permutation_sum_moment(const MomentRequest& req) const {
    require_request(req.kernel, req.x, req.t, req.measures);
    const int k = static_cast<int>(req.measures.size());
    if (k > spec_.factorial_cap)
        throw ArgumentError("permutation sum over " + std::to_string(k) + "! orderings exceeds the cap of " +
                            std::to_string(spec_.factorial_cap));
    // identical measures give identical summands; evaluate each distinct ordering once
    std::vector<int> cls(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) {
        cls[static_cast<std::size_t>(i)] = i;
        for (int j = 0; j < i; ++j)
            if (req.measures[static_cast<std::size_t>(j)] == req.measures[static_cast<std::size_t>(i)]) {
                cls[static_cast<std::size_t>(i)] = cls[static_cast<std::size_t>(j)];
                break;
            }
    }
    std::vector<int> perm(static_cast<std::size_t>(k));
    std::iota(perm.begin(), perm.end(), 0);
    std::map<std::vector<int>, int> orderings;
    do {
        std::vector<int> seq;
        for (int p : perm) seq.push_back(cls[static_cast<std::size_t>(p)]);
        ++orderings[seq];
    } while (std::next_permutation(perm.begin(), perm.end()));

    const auto f = req.terminal_or_one();
    MomentResult total;
    double log_sum = -std::numeric_limits<double>::infinity();
    std::vector<ProfileNode> profile;
    for (const auto& [seq, mult] : orderings) {
        std::vector<RevuzMeasure> ordered;
        for (int c : seq) ordered.push_back(req.measures[static_cast<std::size_t>(c)]);
        const auto c = run_chain(req.kernel, ordered, f, req.x, req.t, spec_, keep_profile_ ? &profile : nullptr);
        const auto part = assemble(c, static_cast<double>(mult));
        total.value += part.value;
        total.error_estimate += part.error_estimate;
        if (part.value > 0.0) {
            const double hi = std::max(log_sum, part.log_value);
            log_sum = hi + std::log(std::exp(log_sum - hi) + std::exp(part.log_value - hi));
        }
    }
    total.log_value = log_sum;
    total.problem_digest = product_problem_digest(req.kernel, group_measures(req.measures), f, req.x, req.t);
    total.grid_profile = std::move(profile);
    return total;
}

MomentResult KacEngine::mixed_second_moment(const TransitionKernel& kernel, const RevuzMeasure& mu_a,
                                            const RevuzMeasure& mu_b, double x, double t) const {
    MomentRequest req;
    req.kernel = kernel;
    req.measures = {mu_a, mu_b};
    req.x = x;
    req.t = t;
    req.mode = OrderMode::PermutationSum;
    return permutation_sum_moment(req);
}

MomentResult KacEngine::first_moment_with_terminal(const TransitionKernel& kernel, const RevuzMeasure& mu,
                                                   const TerminalFunction& f, double x, double t) const {
    MomentRequest req;
    req.kernel = kernel;
    req.measures = {mu};
    req.terminal = f;
    req.x = x;
    req.t = t;
    req.mode = OrderMode::Ordered;
    auto r = ordered_product_moment(req);
    // one factor: ordered and symmetric products coincide
    r.problem_digest = product_problem_digest(kernel, {{mu, 1}}, f, x, t);
    return r;
}

std::vector<MomentResult> KacEngine::moment_sequence(const TransitionKernel& kernel, const RevuzMeasure& mu, int k,
                                                     double x, double t) const {
    if (k < 0) throw ArgumentError("k must be >= 0");
    require_request(kernel, x, t, {mu});
    const auto one = TerminalFunction::one();
    std::vector<MomentResult> out;
    MomentResult m0;
    m0.value = 1.0;
    m0.problem_digest = product_problem_digest(kernel, {}, one, x, t);
    out.push_back(m0);
    if (k == 0) return out;
    if (mu.empty()) {
        for (int j = 1; j <= k; ++j) {
            MomentResult z;
            z.log_value = -std::numeric_limits<double>::infinity();
            z.problem_digest = product_problem_digest(kernel, {{mu, j}}, one, x, t);
            out.push_back(z);
        }
        return out;
    }
    const std::vector<RevuzMeasure> ms{mu};
    const auto anchors = chain_anchors(x, ms, one);
    const quad::ChebyshevNodes times(spec_.time_nodes, std::sqrt(t));
    const auto s_nodes = squared_nodes(times);
    const auto sing = mu.breakpoints();
    const auto grid = detail::SpaceGrid::for_measure(kernel, mu, sing, anchors, t, spec_);
    detail::Table tab = detail::terminal_table(kernel, one, grid, t, spec_);
    double log_fact = 0.0;
    for (int j = 1; j <= k; ++j) {
        log_fact += std::log(static_cast<double>(j));
        const auto c = finish_point(kernel, mu, tab, x, t, spec_);
        auto r = assemble(c, std::exp(log_fact));
        r.problem_digest = product_problem_digest(kernel, {{mu, j}}, one, x, t);
        out.push_back(r);
        if (j < k) {
            auto lvl = detail::apply_step(kernel, mu, tab, grid, s_nodes, spec_);
            tab = detail::make_table(grid, times, std::move(lvl), tab.log_scale, tab.rel_error);
        }
    }
    return out;
}

MomentResult KacEngine::evaluate(const MomentRequest& req) const {
    switch (req.mode) {
        case OrderMode::Ordered: return ordered_product_moment(req);
        case OrderMode::PermutationSum: return permutation_sum_moment(req);
        case OrderMode::IdenticalPower: return kth_moment(req);
    }
    throw ArgumentError("unknown order mode");
}

MomentResult KacEngine::killed_variant(const MomentRequest& req, double a, double b) const {
    if (!(a < b) || !std::isfinite(a) || !std::isfinite(b)) throw ArgumentError("killing domain must be a bounded (a, b)");
    const auto& base = req.kernel;
    const auto& sp = base.space();
    switch (base.family()) {
        case Family::Brownian: break;
        case Family::KilledBrownian:
        case Family::ReflectedBrownian:
            if (a < sp.lower() || b > sp.upper() || (base.family() == Family::ReflectedBrownian && a == sp.lower()))
                throw ArgumentError("killing domain must lie inside the kernel's open domain");
            break;
        case Family::BrownianDrift:
            if (base.drift() != 0.0) throw ArgumentError("part processes are built only from driftless kernels");
            break;
    }
    if (!(req.x > a && req.x < b)) throw DomainError("start point must lie inside the killing domain");
    MomentRequest killed = req;
    killed.kernel = TransitionKernel::killed_brownian(a, b, spec_.image_tail_tol);
    killed.measures.clear();
    for (const auto& m : req.measures) killed.measures.push_back(m.restricted_to(a, b));
    killed.terminal = req.terminal_or_one().for_part_process(a, b);
    bool any_empty = false;
    for (const auto& m : killed.measures) any_empty = any_empty || m.empty();
    if (any_empty) {
        MomentResult r;
        r.log_value = -std::numeric_limits<double>::infinity();
        return r;
    }
    return evaluate(killed);
}

RevuzMeasure weighted_measure(const RevuzMeasure& mu, const AcDensity& w) {
    if (w.kind != AcDensity::Kind::Constant) throw ArgumentError("weights must be constant or indicator densities");
    std::vector<AcDensity> dens;
    for (auto d : mu.densities()) {
        d.level *= w.level;
        d.lower = std::max(d.lower, w.lower);
        d.upper = std::min(d.upper, w.upper);
        if (d.lower < d.upper && d.level > 0.0) dens.push_back(d);
    }
    std::vector<Atom> atoms;
    for (const auto& a : mu.atoms()) {
        const double f = w(a.location);
        if (f > 0.0) atoms.push_back({a.location, a.weight * f});
    }
    return {std::move(dens), std::move(atoms)};
}

}  // namespace kacm
