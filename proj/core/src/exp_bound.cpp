#include "kacm/exp_bound.hpp"

#include <algorithm>
#include <cmath>

#include "kacm/errors.hpp"

namespace kacm {

double exp_moment_bound(double sup_potential, double alpha, double s, double t) {
    const double c = std::exp(s) * sup_potential;
    if (!(c < 1.0)) return std::numeric_limits<double>::infinity();
    const double c1 = 1.0 / (1.0 - c);
    return std::pow(c1, 1.0 + t * alpha / s);
}

namespace {

// log of the bound, for the optimizer
double log_bound(double sup, double alpha, double s, double t) {
    const double c = std::exp(s) * sup;
    if (!(c < 1.0)) return std::numeric_limits<double>::infinity();
    return -(1.0 + t * alpha / s) * std::log1p(-c);
}

}  // namespace

ExpBoundReport exponential_bound(const KacEngine& engine, const TransitionKernel& kernel, const RevuzMeasure& mu,
                                 const KatoReport& report, double x, const std::vector<double>& t_values,
                                 int series_cap) {
    if (!report.in_extended_kato || !report.alpha_star)
        throw NumericError("infeasible: measure not in the extended Kato class on the tested rates", 1.0);
    if (t_values.empty()) throw ArgumentError("exp-bound needs at least one horizon");
    if (series_cap < 2) throw ArgumentError("series cap must be >= 2");

    ExpBoundReport r;
    r.alpha = *report.alpha_star;
    r.sup_potential = report.sup_curve.at(r.alpha);
    r.series_cap = series_cap;
    const double t_max = *std::max_element(t_values.begin(), t_values.end());

    double best_s = 0.0;
    double best = std::numeric_limits<double>::infinity();
    for (int i = 1; i <= 60; ++i) {
        const double s = 0.05 * i;
        const double v = log_bound(r.sup_potential, r.alpha, s, t_max);
        if (v < best) {
            best = v;
            best_s = s;
        }
    }
    if (!std::isfinite(best))
        throw NumericError("infeasible: e^s sup U_alpha mu >= 1 for every tested s", r.sup_potential);

    // golden section on the bracket around the best grid point
    const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
    double lo = std::max(best_s - 0.05, 1e-3);
    double hi = best_s + 0.05;
    double a = hi - phi * (hi - lo);
    double b = lo + phi * (hi - lo);
    double fa = log_bound(r.sup_potential, r.alpha, a, t_max);
    double fb = log_bound(r.sup_potential, r.alpha, b, t_max);
    for (int it = 0; it < 80 && hi - lo > 1e-10; ++it) {
        if (fa < fb) {
            hi = b;
            b = a;
            fb = fa;
            a = hi - phi * (hi - lo);
            fa = log_bound(r.sup_potential, r.alpha, a, t_max);
        } else {
            lo = a;
            a = b;
            fa = fb;
            b = lo + phi * (hi - lo);
            fb = log_bound(r.sup_potential, r.alpha, b, t_max);
        }
    }
    const double s_ref = 0.5 * (lo + hi);
    if (log_bound(r.sup_potential, r.alpha, s_ref, t_max) < best) best_s = s_ref;

    r.s_alpha = best_s;
    r.t_alpha = best_s / r.alpha;
    r.c = std::exp(best_s) * r.sup_potential;
    r.c1 = 1.0 / (1.0 - r.c);

    for (double t : t_values) {
        ExpBoundRow row;
        row.t = t;
        row.bound = exp_moment_bound(r.sup_potential, r.alpha, r.s_alpha, t);
        const auto seq = engine.moment_sequence(kernel, mu, series_cap, x, t);
        double lg = 0.0;
        for (int k = 0; k <= series_cap; ++k) {
            if (k > 0) lg += std::log(static_cast<double>(k));
            const auto& m = seq[static_cast<std::size_t>(k)];
            const double term = m.value > 0.0 ? std::exp(m.log_value - lg) : 0.0;
            row.terms.push_back(term);
        }
        for (double v : row.terms) row.series_value += v;
        // ratio estimate from the last few terms
        const auto& tm = row.terms;
        double ratio = 0.0;
        for (int k = series_cap - 2; k <= series_cap; ++k) {
            const double prev = tm[static_cast<std::size_t>(k - 1)];
            if (prev > 0.0) ratio = std::max(ratio, tm[static_cast<std::size_t>(k)] / prev);
        }
        row.ratio = ratio;
        if (ratio >= 1.0) throw NumericError("nonconvergent: moment series ratio >= 1", ratio);
        row.tail_bound = tm.back() * ratio / (1.0 - ratio);
        row.below_bound = row.series_value + row.tail_bound <= row.bound;
        r.rows.push_back(std::move(row));
    }
    return r;
}

}  // namespace kacm
