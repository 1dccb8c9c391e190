#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "kacm/errors.hpp"
#include "kacm/measures.hpp"
#include "oracles.hpp"

using namespace kacm;

TEST_SUITE("measures") {

TEST_CASE("catalog densities") {
    const auto c = AcDensity::constant(2.0);
    CHECK(c(-1e6) == 2.0);
    CHECK(c.breakpoints().empty());
    const auto i = AcDensity::indicator(0.0, 1.0, 3.0);
    CHECK(i(0.5) == 3.0);
    CHECK(i(1.5) == 0.0);
    CHECK(i.mass() == doctest::Approx(3.0));
    const auto b = AcDensity::gaussian_bump(1.0, 0.5, 2.0);
    CHECK(b(1.0) == doctest::Approx(2.0));
    CHECK(b.mass() == doctest::Approx(2.0 * 0.5 * std::sqrt(2.0 * oracle::kPi)).epsilon(1e-12));
    const auto [lo, hi] = b.effective_support();
    CHECK(b(lo) / 2.0 < 1e-30);
    CHECK(b(hi) / 2.0 < 1e-30);
}

TEST_CASE("measure algebra") {
    const auto mu = RevuzMeasure::dirac(0.0) + RevuzMeasure::indicator(0.0, 1.0);
    CHECK(mu.total_mass() == doctest::Approx(2.0));
    CHECK(mu.scaled(0.5).total_mass() == doctest::Approx(1.0));
    const auto r = mu.restricted_to(-1.0, 0.5);
    CHECK(r.total_mass() == doctest::Approx(1.5));
    CHECK_THROWS_AS(RevuzMeasure::dirac(1.0).restricted_to(-1.0, 1.0), DomainError);
    CHECK(RevuzMeasure::dirac(3.0).restricted_to(-1.0, 1.0).empty());
    CHECK_THROWS_AS(RevuzMeasure::dirac(-0.5).validate(TransitionKernel::reflected_brownian().space()), DomainError);
    // a reflecting boundary may carry mass, a killing one may not
    CHECK_NOTHROW(RevuzMeasure::dirac(0.0).validate(TransitionKernel::reflected_brownian().space()));
    CHECK_THROWS_AS(RevuzMeasure::dirac(1.0).validate(TransitionKernel::killed_brownian(-1.0, 1.0).space()), DomainError);
}

TEST_CASE("integration against a measure") {
    const auto mu = RevuzMeasure::dirac(0.5, 2.0) + RevuzMeasure::gaussian_bump(0.0, 0.3, 1.0);
    const double got = integrate(mu, [](double y) { return std::cos(y); });
    // int cos(y) exp(-y^2 / (2 s^2)) dy = s sqrt(2 pi) exp(-s^2 / 2)
    const double ref = 2.0 * std::cos(0.5) + 0.3 * std::sqrt(2.0 * oracle::kPi) * std::exp(-0.045);
    CHECK(got == doctest::Approx(ref).epsilon(1e-10));
}

TEST_CASE("potential of a point mass is the potential density") {
    const auto b = TransitionKernel::brownian();
    for (double alpha : {0.5, 1.0, 2.0})
        for (double x : {0.0, 1.0}) {
            const double g = std::sqrt(2.0 * alpha);
            CHECK(potential_of_measure(b, RevuzMeasure::dirac(0.0), alpha, x) ==
                  doctest::Approx(std::exp(-g * std::abs(x)) / g).epsilon(1e-13));
        }
}

TEST_CASE("potential of densities against Boost quadrature") {
    const double alpha = 0.7, g = std::sqrt(2.0 * alpha);
    auto r = [&](double x, double y) { return std::exp(-g * std::abs(x - y)) / g; };
    const auto b = TransitionKernel::brownian();
    for (double x : {-1.0, 0.3, 2.5}) {
        const double cut = std::clamp(x, 0.0, 1.0);  // kink of r at y = x
        const double ind = oracle::gk([&](double y) { return r(x, y); }, 0.0, cut) +
                           oracle::gk([&](double y) { return r(x, y); }, cut, 1.0);
        CHECK(potential_of_measure(b, RevuzMeasure::indicator(0.0, 1.0), alpha, x) == doctest::Approx(ind).epsilon(1e-10));
        auto bf = [&](double y) { return r(x, y) * std::exp(-y * y / (2 * 0.09)); };
        const double bump = oracle::gk(bf, -4.0, x) + oracle::gk(bf, x, 4.0);
        CHECK(potential_of_measure(b, RevuzMeasure::gaussian_bump(0.0, 0.3, 1.0), alpha, x) ==
              doctest::Approx(bump).epsilon(1e-9));
    }
    // Lebesgue: U_alpha 1 = 1 / alpha
    CHECK(potential_of_measure(b, RevuzMeasure::lebesgue(), alpha, 0.4) == doctest::Approx(1.0 / alpha).epsilon(1e-10));
    const auto refl = TransitionKernel::reflected_brownian();
    CHECK(potential_of_measure(refl, RevuzMeasure::lebesgue(), 2.0, 0.0) == doctest::Approx(0.5).epsilon(1e-10));
}

TEST_CASE("killed potential of Lebesgue solves the boundary value problem") {
    // u = U_alpha 1 on (-1, 1): (1/2) u'' - alpha u = -1, u(+-1) = 0
    const double alpha = 1.0, g = std::sqrt(2.0);
    const auto k = TransitionKernel::killed_brownian(-1.0, 1.0);
    for (double x : {0.0, 0.5, -0.9}) {
        const double ref = (1.0 - std::cosh(g * x) / std::cosh(g)) / alpha;
        CHECK(potential_of_measure(k, RevuzMeasure::lebesgue(), alpha, x) == doctest::Approx(ref).epsilon(1e-9));
    }
}

TEST_CASE("Kato classification of point masses") {
    const auto b = TransitionKernel::brownian();
    const auto delta = RevuzMeasure::dirac(0.0);
    const auto rep = kato_classify(b, delta, default_alpha_ladder(), default_kato_grid(b, delta));
    REQUIRE(rep.alpha_star);
    // sup_x U_alpha delta_0 = (2 alpha)^{-1/2} < 1 first on the ladder at alpha = 1
    CHECK(*rep.alpha_star == 1.0);
    // the grid holds the atom, so the peak is exact; the estimate adds a Lipschitz margin on top
    const auto grid = default_kato_grid(b, delta);
    for (const auto& [a, s] : rep.sup_curve) {
        const double exact = 1.0 / std::sqrt(2.0 * a);
        const auto prof = potential_profile(b, delta, a, grid);
        double peak = 0.0;
        for (const auto& [x, v] : prof.values) peak = std::max(peak, v);
        CHECK(peak == doctest::Approx(exact).epsilon(1e-12));
        CHECK(s >= exact);
        CHECK(s == doctest::Approx(peak + prof.margin).epsilon(1e-14));
    }
    CHECK(rep.sup_curve.at(1.0) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(0.05));
    REQUIRE(rep.alpha_crossing);
    CHECK(*rep.alpha_crossing == doctest::Approx(0.5).epsilon(0.05));
    CHECK(rep.in_extended_kato);
    CHECK(rep.s00_verdict);

    const auto half = RevuzMeasure::dirac(0.0, 0.5);
    const auto r2 = kato_classify(b, half, default_alpha_ladder(), default_kato_grid(b, half));
    CHECK(*r2.alpha_star == 0.25);
    CHECK(*r2.alpha_crossing == doctest::Approx(0.125).epsilon(0.05));
}

TEST_CASE("Lebesgue measure is in the Kato class with sup = 1/alpha") {
    const auto b = TransitionKernel::brownian();
    const auto leb = RevuzMeasure::lebesgue();
    const auto rep = kato_classify(b, leb, {0.5, 2.0, 8.0}, default_kato_grid(b, leb, 41));
    CHECK(rep.sup_curve.at(2.0) == doctest::Approx(0.5).epsilon(1e-8));
    CHECK(*rep.alpha_star == 2.0);
}

}
