#include <doctest.h>

#include <cmath>

#include "kacm/errors.hpp"
#include "kacm/montecarlo.hpp"
#include "oracles.hpp"

using namespace kacm;

namespace {

McOptions paths(std::int64_t n, int workers = 1) {
    McOptions o;
    o.n_paths = n;
    o.workers = workers;
    return o;
}

PathScheme bm(double dt, std::uint64_t seed = 7) {
    PathScheme s;
    s.dt = dt;
    s.seed = seed;
    return s;
}

bool within(const McEstimate& e, double ref, double sigmas = 4.0) {
    const double band = sigmas * std::hypot(e.std_error, e.bias_budget);
    CAPTURE(e.mean);
    CAPTURE(ref);
    CAPTURE(band);
    return std::abs(e.mean - ref) <= band;
}

}  // namespace

TEST_SUITE("montecarlo") {

TEST_CASE("occupation of the constant one is the elapsed time") {
    const auto est = PcafEstimator::occupation(AcDensity::constant(1.0));
    for (int k : {1, 2}) {
        const McEstimate e = estimate_moment(bm(1e-2), est, 0.3, 1.5, k, paths(200));
        CHECK(e.mean == doctest::Approx(std::pow(1.5, k)).epsilon(1e-12));
        CHECK(e.std_error < 1e-12);
    }
}

TEST_CASE("discounted occupation of one is 1/alpha") {
    const auto est = PcafEstimator::occupation(AcDensity::constant(1.0));
    const auto v = estimate_discounted(bm(1e-2), est, {0.5, 2.0}, AcDensity::constant(1.0), 0.0, paths(50));
    CHECK(v[0].mean == doctest::Approx(2.0).epsilon(1e-4));
    CHECK(v[1].mean == doctest::Approx(0.5).epsilon(1e-4));
    // the horizon tail is folded into the error
    CHECK(v[0].std_error > 0.0);
    CHECK(v[0].std_error < 1e-5);
    const auto z = estimate_discounted(bm(1e-2), est, 1.0, AcDensity::constant(0.0), 0.0, paths(50));
    CHECK(z.mean == 0.0);
    CHECK_THROWS_AS(estimate_discounted(bm(1e-2), est, -1.0, AcDensity::constant(1.0), 0.0, paths(50)), ArgumentError);
}

TEST_CASE("additivity along a shared trajectory") {
    const auto s = bm(1e-3);
    CHECK(check_additivity(s, PcafEstimator::occupation(AcDensity::indicator(-0.5, 0.5)), 0.0, 0.4, 0.6, paths(200)) <
          1e-12);
    CHECK(check_additivity(s, PcafEstimator::local_time(0.0, LocalTimeMethod::EpsilonOccupation, 0.05), 0.0, 0.4, 0.6,
                           paths(200)) < 1e-12);
    CHECK(check_additivity(s, PcafEstimator::local_time(0.0, LocalTimeMethod::Bridge), 0.0, 0.4, 0.6, paths(200)) <
          1e-12);
    // a crossing may straddle the split
    CHECK(check_additivity(s, PcafEstimator::local_time(0.0, LocalTimeMethod::Downcrossing, 0.05), 0.0, 0.4, 0.6,
                           paths(200)) <= 2.0 * 0.05 + 1e-12);
}

TEST_CASE("compare guards") {
    MomentResult r;
    r.value = 1.0;
    r.problem_digest = 1;
    McEstimate e;
    e.problem_digest = 2;
    CHECK_THROWS_AS(compare(r, e), ConfigError);
    e.problem_digest = 1;
    const CompareResult c = compare(r, e);
    CHECK(std::isinf(c.z));
    CHECK_FALSE(c.pass);
    e.mean = 1.0;
    CHECK(compare(r, e).pass);
    e.mean = 0.9;
    e.std_error = 0.05;
    CHECK(compare(r, e).z == doctest::Approx(2.0));
}

TEST_CASE("warnings for step adjustment and coarse epsilon") {
    const auto est = PcafEstimator::local_time(0.0, LocalTimeMethod::EpsilonOccupation, 0.01);
    const McEstimate e = estimate_moment(bm(0.3), est, 0.0, 1.0, 1, paths(10));
    REQUIRE(e.warnings.size() == 2);
    CHECK(e.warnings[0].find("does not divide") != std::string::npos);
    CHECK(e.warnings[1].find("sqrt(dt)") != std::string::npos);
    CHECK(e.dt_used == doctest::Approx(0.25));
    const McEstimate quiet = estimate_moment(bm(1e-4), est, 0.0, 0.01, 1, paths(10));
    CHECK(quiet.warnings.empty());
}

TEST_CASE("argument errors") {
    const auto est = PcafEstimator::occupation(AcDensity::constant(1.0));
    CHECK_THROWS_AS(estimate_moment(bm(1e-2), est, 0.0, 1.0, -1, paths(10)), ArgumentError);
    CHECK_THROWS_AS(estimate_moment(bm(1e-2), est, 0.0, 1.0, 1, paths(1)), ArgumentError);
    CHECK_THROWS_AS(estimate_moment(bm(0.0), est, 0.0, 1.0, 1, paths(10)), ArgumentError);
    PathScheme refl = bm(1e-2);
    refl.kernel = TransitionKernel::reflected_brownian();
    CHECK_THROWS_AS(estimate_moment(refl, est, -1.0, 1.0, 1, paths(10)), DomainError);
    CHECK_THROWS_AS(estimate_moment(refl, PcafEstimator::local_time(0.0, LocalTimeMethod::Downcrossing, 0.05), 0.5,
                                    1.0, 1, paths(10)),
                    ArgumentError);
    CHECK_THROWS_AS(parse_local_time_method("euler"), ArgumentError);
    CHECK(parse_local_time_method(local_time_method_name(LocalTimeMethod::Bridge)) == LocalTimeMethod::Bridge);
    CHECK(parse_kill_detection(kill_detection_name(KillDetection::BridgeCorrected)) == KillDetection::BridgeCorrected);
}

TEST_CASE("results are bitwise independent of the worker count") {
    const auto est = PcafEstimator::from_measure(RevuzMeasure::dirac(0.0) + RevuzMeasure::indicator(0.0, 1.0),
                                                 LocalTimeMethod::Bridge);
    const McEstimate a = estimate_moment(bm(1e-2), est, 0.0, 1.0, 2, paths(5000, 1));
    const McEstimate b = estimate_moment(bm(1e-2), est, 0.0, 1.0, 2, paths(5000, 3));
    CHECK(a.mean == b.mean);
    CHECK(a.std_error == b.std_error);
    CHECK(a.coarse_mean == b.coarse_mean);
    CHECK(a.config_digest == b.config_digest);
}

TEST_CASE("killed survival against the spectral series") {
    PathScheme s = bm(1e-3);
    s.kernel = TransitionKernel::killed_brownian(-1.0, 1.0);
    s.killing = KillDetection::BridgeCorrected;
    const McFactors none;
    const McEstimate e =
        estimate_moment(s, none, 0.3, 0.5, TerminalFunction::constant(1.0, 0.0), paths(20000));
    CHECK(within(e, oracle::dirichlet_survival(0.5, 0.3, -1.0, 1.0)));
    // grid detection overestimates survival
    s.killing = KillDetection::GridCrossing;
    const McEstimate g =
        estimate_moment(s, none, 0.3, 0.5, TerminalFunction::constant(1.0, 0.0), paths(20000));
    CHECK(g.mean > e.mean);
}

TEST_CASE("half-line occupation") {
    // E_0[int_0^1 1_{X_s >= 0} ds] = 1/2 by symmetry
    const auto est = PcafEstimator::occupation(AcDensity::indicator(0.0, INFINITY));
    const McEstimate e = estimate_moment(bm(1e-3), est, 0.0, 1.0, 1, paths(20000));
    CHECK(within(e, 0.5));
}

}

TEST_SUITE("montecarlo-slow") {

TEST_CASE("local-time estimators agree with E L_1 = sqrt(2/pi)") {
    const double ref = std::sqrt(2.0 / oracle::kPi);
    const McEstimate b =
        estimate_moment(bm(1e-3), PcafEstimator::local_time(0.0, LocalTimeMethod::Bridge), 0.0, 1.0, 1, paths(40000));
    CHECK(within(b, ref));
    CHECK(b.std_error < 0.005);
    for (double eps : {0.02, 0.01}) {
        CAPTURE(eps);
        const McEstimate o = estimate_moment(
            bm(1e-4), PcafEstimator::local_time(0.0, LocalTimeMethod::EpsilonOccupation, eps), 0.0, 1.0, 1, paths(8000));
        const McEstimate d = estimate_moment(
            bm(1e-4), PcafEstimator::local_time(0.0, LocalTimeMethod::Downcrossing, eps), 0.0, 1.0, 1, paths(8000));
        CHECK(within(o, ref));
        CHECK(within(d, ref));
        const double band = std::sqrt(o.std_error * o.std_error + d.std_error * d.std_error +
                                      o.bias_budget * o.bias_budget + d.bias_budget * d.bias_budget);
        CHECK(std::abs(o.mean - d.mean) <= 3.0 * band);
    }
}

TEST_CASE("reflected local time at the boundary doubles") {
    PathScheme s = bm(1e-3);
    s.kernel = TransitionKernel::reflected_brownian();
    const McEstimate e =
        estimate_moment(s, PcafEstimator::local_time(0.0, LocalTimeMethod::Bridge), 0.0, 1.0, 1, paths(20000));
    CHECK(within(e, 2.0 * std::sqrt(2.0 / oracle::kPi)));
}

}
