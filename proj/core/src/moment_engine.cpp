#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <thread>

#include "kacm/errors.hpp"
#include "recursion.hpp"

namespace kacm::detail {

namespace {

bool contains_value(std::span<const double> xs, double v) {
    return std::find(xs.begin(), xs.end(), v) != xs.end();
}

}  // namespace

SpaceGrid SpaceGrid::single_point(double x) {
    SpaceGrid g;
    g.points_.push_back(x);
    g.finish();
    return g;
}

SpaceGrid SpaceGrid::for_measure(const TransitionKernel& k, const RevuzMeasure& target,
                                 std::span<const double> singular, std::span<const double> anchors, double t,
                                 const QuadratureSpec& spec) {
    SpaceGrid g;
    const auto& sp = k.space();
    for (const auto& a : target.atoms())
        if (sp.contains(a.location)) g.points_.push_back(a.location);

    const auto target_breaks = target.breakpoints();
    std::vector<double> sing(singular.begin(), singular.end());
    sing.insert(sing.end(), target_breaks.begin(), target_breaks.end());
    std::sort(sing.begin(), sing.end());
    sing.erase(std::unique(sing.begin(), sing.end()), sing.end());

    double hull_lo = std::numeric_limits<double>::infinity();
    double hull_hi = -hull_lo;
    for (double a : anchors)
        if (std::isfinite(a)) hull_lo = std::min(hull_lo, a), hull_hi = std::max(hull_hi, a);
    for (double a : sing) hull_lo = std::min(hull_lo, a), hull_hi = std::max(hull_hi, a);
    const double root_t = std::sqrt(t);
    const double pad = spec.pad_sigmas * root_t;

    std::vector<std::pair<double, double>> intervals;
    for (const auto& d : target.densities()) {
        if (d.level == 0.0) continue;
        auto [lo, hi] = d.effective_support();
        lo = std::max(lo, sp.lower());
        hi = std::min(hi, sp.upper());
        if (!std::isfinite(lo)) lo = hull_lo - pad;
        if (!std::isfinite(hi)) hi = hull_hi + pad;
        if (lo < hi) intervals.emplace_back(lo, hi);
    }
    std::sort(intervals.begin(), intervals.end());
    std::vector<std::pair<double, double>> merged;
    for (const auto& iv : intervals) {
        if (!merged.empty() && iv.first <= merged.back().second)
            merged.back().second = std::max(merged.back().second, iv.second);
        else
            merged.push_back(iv);
    }

    const double width = spec.space_panel_width * root_t;
    const int levels = std::max(0, spec.grading_levels);
    for (const auto& [lo, hi] : merged) {
        std::vector<double> cuts{lo, hi};
        for (double s : sing)
            if (s > lo && s < hi) cuts.push_back(s);
        std::sort(cuts.begin(), cuts.end());
        for (std::size_t c = 0; c + 1 < cuts.size(); ++c) {
            const double p = cuts[c];
            const double q = cuts[c + 1];
            const bool grade_left = contains_value(sing, p);
            const bool grade_right = contains_value(sing, q);
            const int m = std::max(1, static_cast<int>(std::ceil((q - p) / width)));
            std::vector<double> edges;
            for (int i = 0; i <= m; ++i) edges.push_back(p + (q - p) * i / m);
            if (m == 1 && grade_left && grade_right) edges = {p, 0.5 * (p + q), q};
            std::vector<double> graded = edges;
            if (grade_left) {
                const double h = edges[1] - edges[0];
                for (int l = 1; l <= levels; ++l) graded.push_back(p + h * std::ldexp(1.0, -l));
            }
            if (grade_right) {
                const double h = edges[edges.size() - 1] - edges[edges.size() - 2];
                for (int l = 1; l <= levels; ++l) graded.push_back(q - h * std::ldexp(1.0, -l));
            }
            std::sort(graded.begin(), graded.end());
            graded.erase(std::unique(graded.begin(), graded.end()), graded.end());
            for (std::size_t i = 0; i + 1 < graded.size(); ++i)
                g.panels_.emplace_back(graded[i], graded[i + 1], spec.space_nodes);
        }
    }
    g.finish();
    return g;
}

void SpaceGrid::finish() {
    std::sort(points_.begin(), points_.end());
    points_.erase(std::unique(points_.begin(), points_.end()), points_.end());
    nodes_.clear();
    offsets_.clear();
    for (const auto& p : panels_) {
        offsets_.push_back(static_cast<int>(nodes_.size()));
        for (int i = 0; i < p.size(); ++i) nodes_.push_back(p.node(i));
    }
    point_offset_ = static_cast<int>(nodes_.size());
    nodes_.insert(nodes_.end(), points_.begin(), points_.end());
}

int SpaceGrid::find_point(double z) const {
    const auto it = std::lower_bound(points_.begin(), points_.end(), z);
    if (it != points_.end() && *it == z) return static_cast<int>(it - points_.begin());
    return -1;
}

int SpaceGrid::point_node(double z) const {
    const int pi = find_point(z);
    return pi < 0 ? -1 : point_offset_ + pi;
}

double SpaceGrid::interpolate(const double* slice, double z) const {
    const int pi = find_point(z);
    if (pi >= 0) return slice[point_offset_ + pi];
    if (!panels_.empty()) {
        auto it = std::upper_bound(panels_.begin(), panels_.end(), z,
                                   [](double v, const quad::LobattoPanel& p) { return v < p.lower(); });
        std::size_t idx = it == panels_.begin() ? 0 : static_cast<std::size_t>(it - panels_.begin() - 1);
        const auto& p = panels_[idx];
        if (z >= p.lower() && z <= p.upper()) return p.interpolate(slice + offsets_[idx], z);
    }
    // outside every panel: nearest node
    double best = std::numeric_limits<double>::infinity();
    double value = 0.0;
    for (int i = 0; i < size(); ++i) {
        const double d = std::abs(nodes_[static_cast<std::size_t>(i)] - z);
        if (d < best) best = d, value = slice[i];
    }
    return value;
}

int SpaceGrid::panel_of(double z) const {
    if (panels_.empty()) return -1;
    auto it = std::upper_bound(panels_.begin(), panels_.end(), z,
                               [](double v, const quad::LobattoPanel& p) { return v < p.lower(); });
    if (it == panels_.begin()) return -1;
    const auto idx = static_cast<int>(it - panels_.begin() - 1);
    const auto& p = panels_[static_cast<std::size_t>(idx)];
    if (z > p.upper()) return -1;
    // prefer the left panel at a shared endpoint
    if (z == p.lower() && idx > 0 && panels_[static_cast<std::size_t>(idx - 1)].upper() == z) return idx - 1;
    return idx;
}

void SpaceGrid::coefficients(const double* slice, std::vector<double>& out) const {
    out.resize(static_cast<std::size_t>(point_offset_));
    for (std::size_t p = 0; p < panels_.size(); ++p)
        panels_[p].chebyshev_coefficients(slice + offsets_[p], out.data() + offsets_[p]);
}

void SpaceGrid::boundaries_in(double a, double b, std::vector<double>& out) const {
    auto it = std::upper_bound(panels_.begin(), panels_.end(), a,
                               [](double v, const quad::LobattoPanel& p) { return v < p.lower(); });
    if (it != panels_.begin()) --it;
    for (; it != panels_.end() && it->lower() < b; ++it) {
        if (it->lower() > a) out.push_back(it->lower());
        if (it->upper() > a && it->upper() < b) out.push_back(it->upper());
    }
}

void Table::slice(double tau, std::vector<double>& out, std::vector<double>& scratch) const {
    const int nt = times.size();
    scratch.resize(static_cast<std::size_t>(nt));
    times.weights_at(std::sqrt(std::max(tau, 0.0)), scratch);
    const int n = grid.size();
    out.assign(static_cast<std::size_t>(n), 0.0);
    for (int i = 0; i < n; ++i) {
        const double* row = values.data() + static_cast<std::ptrdiff_t>(i) * nt;
        double acc = 0.0;
        for (int m = 0; m < nt; ++m) acc += scratch[static_cast<std::size_t>(m)] * row[m];
        out[static_cast<std::size_t>(i)] = acc;
    }
}

namespace {

struct TimePoint {
    double u;
    double tau;
    double jac;
    double h;  // half width of the panel in the substituted variable
    int node;  // Kronrod node index within the panel
};

// [0, s] split at s/2; u = v^2 on the first half, s - u = w^2 on the second,
// each half graded geometrically towards its singular end. The first half
// gets `extra` further levels for nodes a distance ~ vmax 2^-extra from an
// atom or density jump, where the kernel switches on at v ~ distance.
std::vector<TimePoint> time_points(double s, int panels, int extra = 0) {
    std::vector<TimePoint> pts;
    const double vmax = std::sqrt(0.5 * s);
    double nodes[quad::GaussKronrod15::kPoints];
    for (int half = 0; half < 2; ++half) {
        const int np = std::max(1, panels) + (half == 0 ? extra : 0);
        for (int p = 0; p < np; ++p) {
            const double lo = p == 0 ? 0.0 : vmax * std::ldexp(1.0, p - np);
            const double hi = vmax * std::ldexp(1.0, p + 1 - np);
            const double h = 0.5 * (hi - lo);
            quad::GaussKronrod15::nodes(lo, hi, nodes);
            for (int i = 0; i < quad::GaussKronrod15::kPoints; ++i) {
                const double v = nodes[i];
                const double jac = 2.0 * v;
                TimePoint tp;
                if (half == 0) {
                    tp.u = v * v;
                    tp.tau = s - v * v;
                } else {
                    tp.u = s - v * v;
                    tp.tau = v * v;
                }
                tp.jac = jac;
                tp.h = h;
                tp.node = i;
                pts.push_back(tp);
            }
        }
    }
    return pts;
}

// int p_u(y, z) G(z) f(z) dz over the absolutely continuous part of mu,
// restricted to a heat-kernel window around y. G is the previous level at
// one remaining time, given by its slice and per-panel Chebyshev
// coefficients; off the grid it is held at the nearest node value.
double ac_integral(const TransitionKernel& k, const RevuzMeasure& mu, double y, double u, const SpaceGrid& grid,
                   const double* slice, const double* coeffs, const QuadratureSpec& spec, double& err,
                   std::vector<double>& cuts) {
    const double root_u = std::sqrt(u);
    const double centre = y + k.drift() * u;
    const double half = spec.window_sigmas * root_u;
    const double piece = spec.window_piece_sigmas * root_u;
    const auto& sp = k.space();
    const auto& panels = grid.panels();
    // free and drifted kernels: one Gaussian around the drifted centre
    const bool gaussian = k.family() == Family::Brownian || k.family() == Family::BrownianDrift;
    const double pref = 1.0 / std::sqrt(2.0 * std::numbers::pi * u);
    const double inv2u = 0.5 / u;
    auto kernel = [&](double z) {
        if (gaussian) {
            const double d = z - centre;
            return pref * std::exp(-d * d * inv2u);
        }
        return k.density(u, y, z);
    };
    double total = 0.0;
    for (const auto& d : mu.densities()) {
        auto [lo, hi] = d.effective_support();
        lo = std::max({lo, sp.lower(), centre - half});
        hi = std::min({hi, sp.upper(), centre + half});
        // mass of the Gaussian outside the window; tables are normalised to max |G| = 1
        if (gaussian) err += std::erfc(spec.window_sigmas / std::numbers::sqrt2) * d.level;
        if (!(lo < hi)) continue;
        cuts.clear();
        cuts.push_back(lo);
        cuts.push_back(hi);
        if (centre > lo && centre < hi) cuts.push_back(centre);
        for (double b : d.breakpoints())
            if (b > lo && b < hi) cuts.push_back(b);
        grid.boundaries_in(lo, hi, cuts);
        std::sort(cuts.begin(), cuts.end());
        for (std::size_t c = 0; c + 1 < cuts.size(); ++c) {
            const double a = cuts[c];
            const double b = cuts[c + 1];
            if (!(b > a)) continue;
            const int p = grid.panel_of(0.5 * (a + b));
            const quad::LobattoPanel* panel = p >= 0 ? &panels[static_cast<std::size_t>(p)] : nullptr;
            const double* cp = p >= 0 ? coeffs + grid.coefficient_offset(p) : nullptr;
            const int n = panel ? panel->size() : 0;
            const double held = panel ? 0.0 : grid.interpolate(slice, 0.5 * (a + b));
            const int m = std::max(1, static_cast<int>(std::ceil((b - a) / piece)));
            const double step = (b - a) / m;
            for (int i = 0; i < m; ++i) {
                const double pa = a + step * i;
                const double pb = i + 1 == m ? b : pa + step;
                const auto sum = quad::GaussKronrod15::apply(
                    [&](double z) {
                        const double g =
                            panel ? quad::LobattoPanel::clenshaw(cp, n, panel->to_reference(z)) : held;
                        return kernel(z) * d(z) * g;
                    },
                    pa, pb);
                total += sum.kronrod;
                err += sum.error();
            }
        }
    }
    return total;
}

template <class Fn>
void parallel_for(int n, int workers, Fn&& fn) {
    if (workers <= 1 || n <= 1) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
    const int w = std::min(workers, n);
    std::vector<std::thread> pool;
    for (int id = 0; id < w; ++id)
        pool.emplace_back([&, id] {
            for (int i = id; i < n; i += w) fn(i);
        });
    for (auto& th : pool) th.join();
}

}  // namespace

LevelResult apply_step(const TransitionKernel& k, const RevuzMeasure& mu, const Table& prev,
                       const SpaceGrid& out_grid, std::span<const double> out_times, const QuadratureSpec& spec) {
    const int ny = out_grid.size();
    const int nt = static_cast<int>(out_times.size());
    LevelResult res;
    res.values.assign(static_cast<std::size_t>(ny) * static_cast<std::size_t>(nt), 0.0);
    res.errors.assign(res.values.size(), 0.0);

    struct AtomRef {
        double location;
        double weight;
        int node;
    };
    std::vector<AtomRef> atoms;
    for (const auto& a : mu.atoms()) {
        if (!k.space().contains(a.location)) continue;
        const int node = prev.grid.point_node(a.location);
        if (node < 0) throw NumericError("atom missing from the recursion grid", a.location);
        atoms.push_back({a.location, a.weight, node});
    }

    // distance from each output node to the nearest point where the
    // integrand in z is singular
    std::vector<double> marks;
    for (const auto& a : atoms) marks.push_back(a.location);
    const auto mb = mu.breakpoints();
    marks.insert(marks.end(), mb.begin(), mb.end());
    std::vector<double> dist(static_cast<std::size_t>(ny), std::numeric_limits<double>::infinity());
    for (int iy = 0; iy < ny; ++iy)
        for (double z : marks) dist[static_cast<std::size_t>(iy)] = std::min(dist[static_cast<std::size_t>(iy)], std::abs(out_grid.node(iy) - z));

    parallel_for(nt, spec.workers, [&](int m) {
        const double s = out_times[static_cast<std::size_t>(m)];
        const double vmax = std::sqrt(0.5 * s);
        const int base = std::max(1, spec.time_panels);
        std::vector<int> depth(static_cast<std::size_t>(ny), 0);
        int max_depth = 0;
        for (int iy = 0; iy < ny; ++iy) {
            const double d = dist[static_cast<std::size_t>(iy)];
            if (d > 0.0 && d < vmax) {
                // smallest first-half panel edge vmax 2^{1-np} should reach d / 2
                const int need = static_cast<int>(std::ceil(std::log2(2.0 * vmax / d))) + 1 - base;
                depth[static_cast<std::size_t>(iy)] = std::clamp(need, 0, 40);
            }
            max_depth = std::max(max_depth, depth[static_cast<std::size_t>(iy)]);
        }
        std::vector<double> slice;
        std::vector<double> scratch;
        std::vector<double> cuts;
        std::vector<double> coeffs;
        for (int extra = 0; extra <= max_depth; ++extra) {
        std::vector<int> group;
        for (int iy = 0; iy < ny; ++iy)
            if (depth[static_cast<std::size_t>(iy)] == extra) group.push_back(iy);
        if (group.empty()) continue;
        const auto tps = time_points(s, spec.time_panels, extra);
        const int ng = static_cast<int>(group.size());
        // integrand values per (time point, node), kept to form per-panel
        // Kronrod/Gauss sums and their resasc
        const std::size_t np = tps.size();
        std::vector<double> vals(np * static_cast<std::size_t>(ng));
        std::vector<double> acc_e(static_cast<std::size_t>(ng), 0.0);
        for (std::size_t p = 0; p < np; ++p) {
            const auto& tp = tps[p];
            prev.slice(tp.tau, slice, scratch);
            const double* sl = slice.data();
            if (mu.has_ac()) prev.grid.coefficients(sl, coeffs);
            for (int ig = 0; ig < ng; ++ig) {
                const double y = out_grid.node(group[static_cast<std::size_t>(ig)]);
                double h = 0.0;
                for (const auto& a : atoms) h += a.weight * k.density(tp.u, y, a.location) * sl[a.node];
                double err = 0.0;
                if (mu.has_ac())
                    h += ac_integral(k, mu, y, tp.u, prev.grid, sl, coeffs.data(), spec, err, cuts);
                const auto i = static_cast<std::size_t>(ig);
                vals[p * static_cast<std::size_t>(ng) + i] = h * tp.jac;
                acc_e[i] += tp.h * quad::GaussKronrod15::kronrod_weight(tp.node) * tp.jac * err;
            }
        }
        constexpr std::size_t kp = quad::GaussKronrod15::kPoints;
        for (int ig = 0; ig < ng; ++ig) {
            const int iy = group[static_cast<std::size_t>(ig)];
            const auto i = static_cast<std::size_t>(ig);
            double total = 0.0;
            double err = acc_e[i];
            for (std::size_t p0 = 0; p0 < np; p0 += kp) {
                double kr = 0.0, ga = 0.0;
                for (std::size_t j = 0; j < kp; ++j) {
                    const double f = vals[(p0 + j) * static_cast<std::size_t>(ng) + i];
                    kr += quad::GaussKronrod15::kronrod_weight(static_cast<int>(j)) * f;
                    ga += quad::GaussKronrod15::gauss_weight(static_cast<int>(j)) * f;
                }
                const double mean = 0.5 * kr;
                double asc = 0.0;
                for (std::size_t j = 0; j < kp; ++j)
                    asc += quad::GaussKronrod15::kronrod_weight(static_cast<int>(j)) *
                           std::abs(vals[(p0 + j) * static_cast<std::size_t>(ng) + i] - mean);
                const double h = tps[p0].h;
                total += h * kr;
                err += quad::kronrod_error(h * (kr - ga), h * asc);
            }
            const auto o = static_cast<std::size_t>(iy) * static_cast<std::size_t>(nt) + static_cast<std::size_t>(m);
            res.values[o] = total;
            res.errors[o] = err;
        }
        }
    });
    return res;
}

double terminal_expectation_impl(const TransitionKernel& k, const TerminalFunction& f, double s, double y,
                                 const QuadratureSpec& spec) {
    if (s < 0.0) throw ArgumentError("terminal_expectation needs s >= 0");
    if (s == 0.0) return f(y);
    const double cemetery = ExtendedKernel(k).cemetery_mass(s, y);
    if (f.is_total_constant()) return f(y) * (1.0 - cemetery) + f.cemetery() * cemetery;
    const double centre = y + k.drift() * s;
    const double half = 12.0 * std::sqrt(s);
    const double lo = k.space().clamp(centre - half);
    const double hi = k.space().clamp(centre + half);
    std::vector<double> breaks = f.breakpoints();
    breaks.push_back(centre);
    breaks.push_back(y);
    const auto q = quad::integrate_split([&](double z) { return k.density(s, y, z) * f(z); }, lo, hi, breaks,
                                         spec.rel_tol, 1e-15);
    if (!q.converged) throw NumericError("terminal expectation quadrature did not converge", q.abs_error);
    return q.value + cemetery * f.cemetery();
}

Table terminal_table(const TransitionKernel& k, const TerminalFunction& f, const SpaceGrid& grid, double t,
                     const QuadratureSpec& spec) {
    Table tab;
    tab.grid = grid;
    tab.times = quad::ChebyshevNodes(spec.time_nodes, std::sqrt(t));
    const int nt = tab.times.size();
    const int n = grid.size();
    tab.values.assign(static_cast<std::size_t>(n) * static_cast<std::size_t>(nt), 0.0);
    if (f.is_total_constant()) {
        std::fill(tab.values.begin(), tab.values.end(), f(0.0));
    } else {
        parallel_for(nt, spec.workers, [&](int m) {
            const double r = tab.times.node(m);
            for (int i = 0; i < n; ++i)
                tab.values[static_cast<std::size_t>(i) * static_cast<std::size_t>(nt) + static_cast<std::size_t>(m)] =
                    terminal_expectation_impl(k, f, r * r, grid.node(i), spec);
        });
    }
    double scale = 0.0;
    for (double v : tab.values) scale = std::max(scale, std::abs(v));
    if (scale > 0.0) {
        for (double& v : tab.values) v /= scale;
        tab.log_scale = std::log(scale);
    }
    tab.rel_error = spec.rel_tol;
    return tab;
}

Table make_table(SpaceGrid grid, const quad::ChebyshevNodes& times, LevelResult level, double prev_log_scale,
                 double prev_rel_error) {
    Table tab;
    tab.grid = std::move(grid);
    tab.times = times;
    tab.values = std::move(level.values);
    double scale = 0.0;
    for (double v : tab.values) scale = std::max(scale, std::abs(v));
    double worst_err = 0.0;
    for (double e : level.errors) worst_err = std::max(worst_err, e);
    if (scale > 0.0) {
        for (double& v : tab.values) v /= scale;
        tab.log_scale = prev_log_scale + std::log(scale);
        const int nt = tab.times.size();
        double tail = 0.0;
        for (int i = 0; i < tab.grid.size(); ++i) {
            const std::span<const double> row(tab.values.data() + static_cast<std::ptrdiff_t>(i) * nt,
                                              static_cast<std::size_t>(nt));
            tail = std::max(tail, tab.times.tail_estimate(row));
        }
        tab.rel_error = worst_err / scale + tail + prev_rel_error;
    } else {
        tab.log_scale = -std::numeric_limits<double>::infinity();
        tab.rel_error = 0.0;
    }
    return tab;
}

}  // namespace kacm::detail
