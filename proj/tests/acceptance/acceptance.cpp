// Acceptance gate: one PASS/FAIL line per criterion.
//   kacm_acceptance          run all ten
//   kacm_acceptance 3 7      run a subset
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include <boost/math/special_functions/gamma.hpp>

#include "kacm/exp_bound.hpp"
#include "kacm/kernels.hpp"
#include "kacm/measures.hpp"
#include "kacm/moments.hpp"
#include "kacm/montecarlo.hpp"

using namespace kacm;

namespace tol {
constexpr double collapse = 1e-6;
constexpr double collapse_seconds = 10.0;
constexpr double local_time = 1e-4;
constexpr double local_time_seconds = 60.0;
constexpr double z_max = 3.0;
constexpr double mc_seconds = 300.0;
constexpr double resolvent = 1e-6;
constexpr double kernel = 1e-6;
constexpr double duality = 1e-8;
constexpr double widening = 1e-4;
constexpr double exp_series = 1e-3;
constexpr double permutation = 1e-8;
constexpr double mixed = 1e-10;
constexpr double scaling = 1e-4;
}  // namespace tol

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr std::uint64_t kSeed = 20240611;

struct Outcome {
    bool pass = true;
    std::ostringstream detail;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            detail << " [failed: " << what << "]";
        }
    }
};

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

// independent of the library: E|N(0, t)|^k
double abs_gaussian_moment(int k, double t) {
    return std::pow(2.0 * t, 0.5 * k) * boost::math::tgamma(0.5 * (k + 1)) / std::sqrt(kPi);
}

double Phi(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

McOptions mc_paths(std::int64_t n) {
    McOptions o;
    o.n_paths = n;
    return o;
}

void c1(Outcome& o) {
    const auto t0 = std::chrono::steady_clock::now();
    const KacEngine eng;
    const auto b = TransitionKernel::brownian();
    const auto leb = RevuzMeasure::lebesgue();
    double worst = 0.0;
    for (double t : {0.5, 1.0, 2.0})
        for (double x : {-1.0, 0.0, 2.0})
            for (int k = 1; k <= 4; ++k) {
                const double v = eng.kth_moment(b, leb, k, x, t).value;
                worst = std::max(worst, rel(v, std::pow(t, k)));
            }
    const double secs = seconds_since(t0);
    o.detail << "max rel err " << worst << " (tol " << tol::collapse << "), " << secs << " s";
    o.require(worst < tol::collapse, "accuracy");
    o.require(secs < tol::collapse_seconds, "runtime");
}

void c2(Outcome& o) {
    const auto t0 = std::chrono::steady_clock::now();
    const KacEngine eng;
    const auto b = TransitionKernel::brownian();
    const auto d0 = RevuzMeasure::dirac(0.0);
    double worst = 0.0;
    for (double t : {0.25, 1.0, 4.0})
        for (int k = 1; k <= 4; ++k)
            worst = std::max(worst, rel(eng.kth_moment(b, d0, k, 0.0, t).value, abs_gaussian_moment(k, t)));
    const double secs = seconds_since(t0);
    o.detail << "max rel err " << worst << " (tol " << tol::local_time << "), " << secs << " s";
    o.require(worst < tol::local_time, "accuracy");
    o.require(secs < tol::local_time_seconds, "runtime");
}

void c3(Outcome& o) {
    const auto t0 = std::chrono::steady_clock::now();
    const KacEngine eng;
    MomentRequest q;
    q.measures = {RevuzMeasure::dirac(0.0), RevuzMeasure::indicator(0.0, 1.0)};
    q.mode = OrderMode::PermutationSum;
    q.x = 0.0;
    q.t = 1.0;
    const MomentResult r = eng.permutation_sum_moment(q);
    PathScheme s;
    s.dt = 1e-4;
    s.seed = kSeed;
    McFactors f;
    for (const auto& mu : q.measures)
        f.emplace_back(PcafEstimator::from_measure(mu, LocalTimeMethod::EpsilonOccupation, 0.01), 1);
    const McEstimate e = estimate_moment(s, f, 0.0, 1.0, std::nullopt, mc_paths(100000));
    const CompareResult c = compare(r, e);
    const double secs = seconds_since(t0);
    o.detail << "engine " << r.value << " mc " << e.mean << " se " << e.std_error << " bias " << e.bias_budget
             << " z " << c.z << ", " << secs << " s";
    o.require(std::abs(c.z) <= tol::z_max, "|z|");
    o.require(secs < tol::mc_seconds, "runtime");
}

void c4(Outcome& o) {
    const auto b = TransitionKernel::brownian();
    const auto d0 = RevuzMeasure::dirac(0.0);
    const std::vector<double> alphas{0.5, 1.0, 2.0};
    PathScheme s;
    s.dt = 1e-2;
    s.seed = kSeed;
    double worst = 0.0;
    for (double x : {0.0, 1.0}) {
        const auto est = estimate_discounted(s, PcafEstimator::local_time(0.0, LocalTimeMethod::Bridge), alphas,
                                             AcDensity::constant(1.0), x, mc_paths(100000));
        for (std::size_t i = 0; i < alphas.size(); ++i) {
            const double u = potential_of_measure(b, d0, alphas[i], x);
            const double z = (est[i].mean - u) / est[i].std_error;
            worst = std::max(worst, std::abs(z));
            o.detail << "a=" << alphas[i] << ",x=" << x << ": z " << z << "; ";
        }
    }
    o.detail << "max |z| " << worst;
    o.require(worst <= tol::z_max, "|z| in std-errors");
}

void c5(Outcome& o) {
    double worst = 0.0;
    for (const auto& k : {TransitionKernel::brownian(), TransitionKernel::reflected_brownian()})
        for (auto [a, b] : {std::pair{1.0, 2.0}, std::pair{1.0, 3.0}})
            worst = std::max(worst, check_resolvent_equation(k, a, b, default_lattice(k, 1.0)));
    o.detail << "max residual " << worst << " (tol " << tol::resolvent << ")";
    o.require(worst < tol::resolvent, "resolvent");
}

void c6(Outcome& o) {
    const TransitionKernel all[] = {TransitionKernel::brownian(), TransitionKernel::brownian_drift(0.5),
                                    TransitionKernel::reflected_brownian(), TransitionKernel::killed_brownian(-1.0, 1.0)};
    double worst = 0.0;
    for (const auto& k : all)
        for (auto [t, s] : {std::pair{0.5, 0.5}, std::pair{0.2, 1.0}}) {
            worst = std::max(worst, check_chapman_kolmogorov(k, t, s, default_lattice(k, t + s)));
            const auto grid = default_lattice(k, t);
            worst = std::max(worst, check_mass(k, t, grid));
            if (k.symmetric()) worst = std::max(worst, check_symmetry(k, t, grid));
        }
    const auto pair = DualPair::of(TransitionKernel::brownian_drift(0.5));
    const double dual = std::max(check_dual_density(pair, 1.0, default_lattice(pair.forward, 1.0)),
                                 check_duality(pair, 1.0, TestFunction::indicator(-1.0, 1.0),
                                               TestFunction::indicator(0.0, 2.0)));
    o.detail << "max CK/symmetry/mass residual " << worst << " (tol " << tol::kernel << "), duality " << dual
             << " (tol " << tol::duality << ")";
    o.require(worst < tol::kernel, "kernel residuals");
    o.require(dual < tol::duality, "duality");
}

void c7(Outcome& o) {
    const KacEngine eng;
    const auto d0 = RevuzMeasure::dirac(0.0);
    PathScheme s;
    s.kernel = TransitionKernel::killed_brownian(-1.0, 1.0);
    s.killing = KillDetection::BridgeCorrected;
    s.dt = 1e-3;
    s.seed = kSeed;
    for (int k : {1, 2}) {
        MomentRequest q;
        q.measures.assign(static_cast<std::size_t>(k), d0);
        q.x = 0.0;
        q.t = 1.0;
        const MomentResult killed = eng.killed_variant(q, -1.0, 1.0);
        const double free = eng.kth_moment(q).value;
        const double wide = eng.killed_variant(q, -8.0, 8.0).value;
        const McEstimate e = estimate_moment(s, PcafEstimator::local_time(0.0, LocalTimeMethod::Bridge), 0.0, 1.0, k,
                                             mc_paths(100000));
        const CompareResult c = compare(killed, e);
        o.detail << "k=" << k << ": killed " << killed.value << " mc " << e.mean << " z " << c.z << " free " << free
                 << " |wide-free| " << std::abs(wide - free) << "; ";
        o.require(std::abs(c.z) <= tol::z_max, "|z| k=" + std::to_string(k));
        o.require(killed.value <= free, "killed <= free k=" + std::to_string(k));
        o.require(std::abs(wide - free) <= tol::widening * free, "widening k=" + std::to_string(k));
    }
}

void c8(Outcome& o) {
    const KacEngine eng;
    const auto b = TransitionKernel::brownian();
    const auto half = RevuzMeasure::dirac(0.0, 0.5);
    const KatoReport rep = kato_classify(b, half, default_alpha_ladder(), default_kato_grid(b, half));
    const ExpBoundReport eb = exponential_bound(eng, b, half, rep, 0.0, {1.0, 2.0}, 12);
    for (const auto& row : eb.rows) {
        const double exact = 2.0 * std::exp(row.t / 8.0) * Phi(std::sqrt(row.t) / 2.0);
        const double err = rel(row.series_value, exact);
        o.detail << "t=" << row.t << ": series " << row.series_value << " exact " << exact << " rel " << err
                 << " bound " << row.bound << "; ";
        o.require(err < tol::exp_series, "series t=" + std::to_string(row.t));
        o.require(row.series_value < row.bound && exact < row.bound, "below bound t=" + std::to_string(row.t));
    }
}

void c9(Outcome& o) {
    const KacEngine eng;
    const auto b = TransitionKernel::brownian();
    const auto mu = RevuzMeasure::dirac(0.0) + RevuzMeasure::indicator(0.0, 1.0);
    double worst = 0.0;
    for (int k : {2, 3}) {
        MomentRequest q;
        q.measures.assign(static_cast<std::size_t>(k), mu);
        q.x = 0.3;
        q.t = 1.0;
        q.mode = OrderMode::PermutationSum;
        worst = std::max(worst, rel(eng.permutation_sum_moment(q).value, eng.kth_moment(q).value));
    }
    const double m2 = eng.kth_moment(b, mu, 2, 0.3, 1.0).value;
    const double mixed = rel(eng.mixed_second_moment(b, mu, mu, 0.3, 1.0).value, m2);
    o.detail << "permutation vs kth " << worst << " (tol " << tol::permutation << "), mixed vs kth " << mixed
             << " (tol " << tol::mixed << ")";
    o.require(worst < tol::permutation, "permutation");
    o.require(mixed < tol::mixed, "mixed");
}

void c10(Outcome& o) {
    const KacEngine eng;
    struct Case {
        TransitionKernel kernel;
        double x;
        double atom;  // off any boundary
    };
    const Case cases[] = {{TransitionKernel::brownian(), 0.0, 0.0},
                          {TransitionKernel::brownian_drift(0.5), 0.0, 0.0},
                          {TransitionKernel::reflected_brownian(), 0.5, 0.25},
                          {TransitionKernel::killed_brownian(-1.0, 1.0), 0.0, 0.0}};
    int checks = 0;
    double cs_gap = -INFINITY;
    for (const auto& c : cases) {
        const auto d = RevuzMeasure::dirac(c.atom);
        const RevuzMeasure catalog[] = {RevuzMeasure::lebesgue(), RevuzMeasure::indicator(0.0, 1.0),
                                        RevuzMeasure::gaussian_bump(0.5, 0.3, 1.0), d,
                                        d + RevuzMeasure::indicator(0.0, 1.0)};
        for (const auto& mu : catalog) {
            const std::string tag = c.kernel.name() + " " + mu.describe();
            std::vector<double> prev(3, 0.0);
            for (double t : {0.5, 1.0, 2.0}) {
                const auto seq = eng.moment_sequence(c.kernel, mu, 2, c.x, t);
                const double m1 = seq[1].value, m2 = seq[2].value;
                o.require(m1 > 0.0 && m2 > 0.0, "positivity " + tag);
                o.require(m1 >= prev[1] && m2 >= prev[2], "monotone in t " + tag);
                // equality for deterministic A (Lebesgue, conservative kernel): allow the engine's error bars
                const double slack = 2.0 * m1 * seq[1].error_estimate + seq[2].error_estimate;
                o.require(m1 * m1 <= m2 + slack, "Cauchy-Schwarz " + tag);
                cs_gap = std::max(cs_gap, (m1 * m1 - m2) / m2);
                prev = {1.0, m1, m2};
                checks += 4;
            }
        }
        // mu <= nu implies M_k(mu) <= M_k(nu)
        const auto small = RevuzMeasure::indicator(0.0, 1.0);
        const auto big = small + d.scaled(0.5);
        for (int k : {1, 2}) {
            const double a = eng.kth_moment(c.kernel, small, k, c.x, 1.0).value;
            const double bb = eng.kth_moment(c.kernel, big, k, c.x, 1.0).value;
            o.require(a <= bb, "domination " + c.kernel.name());
            ++checks;
        }
    }
    const auto b = TransitionKernel::brownian();
    const auto d0 = RevuzMeasure::dirac(0.0);
    double worst = 0.0;
    for (int k = 1; k <= 4; ++k) {
        const double m1 = eng.kth_moment(b, d0, k, 0.0, 1.0).value;
        for (double t : {0.25, 2.0, 4.0}) {
            worst = std::max(worst, rel(eng.kth_moment(b, d0, k, 0.0, t).value, std::pow(t, 0.5 * k) * m1));
            ++checks;
        }
    }
    o.require(worst < tol::scaling, "local-time scaling");
    o.detail << checks << " invariant checks, max (M1^2 - M2) / M2 " << cs_gap << ", local-time scaling rel err "
             << worst << " (tol " << tol::scaling << ")";
}

}  // namespace

int main(int argc, char** argv) {
    const std::vector<std::function<void(Outcome&)>> criteria{c1, c2, c3, c4, c5, c6, c7, c8, c9, c10};
    std::vector<int> pick;
    for (int i = 1; i < argc; ++i) {
        const int n = std::atoi(argv[i]);
        if (n < 1 || n > 10) {
            std::fprintf(stderr, "usage: %s [criterion 1-10 ...]\n", argv[0]);
            return 2;
        }
        pick.push_back(n);
    }
    if (pick.empty())
        for (int n = 1; n <= 10; ++n) pick.push_back(n);

    int failed = 0;
    for (int n : pick) {
        Outcome o;
        o.detail.precision(6);
        const auto t0 = std::chrono::steady_clock::now();
        try {
            criteria[static_cast<std::size_t>(n - 1)](o);
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail << " [exception: " << e.what() << "]";
        }
        std::printf("criterion %d: %s  %s  (%.1f s)\n", n, o.pass ? "PASS" : "FAIL", o.detail.str().c_str(),
                    seconds_since(t0));
        std::fflush(stdout);
        failed += o.pass ? 0 : 1;
    }
    return failed == 0 ? 0 : 1;
}
