#include <doctest.h>

#include <cmath>
#include <vector>

#include "kacm/quadrature.hpp"
#include "oracles.hpp"

using namespace kacm::quad;

TEST_SUITE("quadrature") {

TEST_CASE("Gauss-Kronrod panel is exact for degree 22 polynomials") {
    auto f = [](double x) { return std::pow(x, 22) - 3.0 * std::pow(x, 7) + 1.0; };
    const PanelSum s = GaussKronrod15::apply(f, -1.0, 2.0);
    const double exact = (std::pow(2.0, 23) + 1.0) / 23.0 - 3.0 * (std::pow(2.0, 8) - 1.0) / 8.0 + 3.0;
    CHECK(s.kronrod == doctest::Approx(exact).epsilon(1e-14));
    // the 7-point Gauss rule is only exact to degree 13
    CHECK(std::abs(s.gauss - exact) > 1e-6);
    CHECK(s.error() > 0.0);
}

TEST_CASE("node and weight tables agree with apply") {
    double x[15];
    GaussKronrod15::nodes(0.0, 3.0, x);
    double k = 0.0, g = 0.0;
    for (int i = 0; i < 15; ++i) {
        k += GaussKronrod15::kronrod_weight(i) * std::exp(x[i]);
        g += GaussKronrod15::gauss_weight(i) * std::exp(x[i]);
    }
    const PanelSum s = GaussKronrod15::apply([](double z) { return std::exp(z); }, 0.0, 3.0);
    CHECK(1.5 * k == doctest::Approx(s.kronrod).epsilon(1e-14));
    CHECK(1.5 * g == doctest::Approx(s.gauss).epsilon(1e-14));
}

TEST_CASE("QUADPACK error scaling") {
    CHECK(kronrod_error(0.0, 1.0) == 0.0);
    CHECK(kronrod_error(1e-3, 1.0) == doctest::Approx(std::pow(0.2, 1.5)));
    // saturates at resasc
    CHECK(kronrod_error(1.0, 0.5) == doctest::Approx(0.5));
}

TEST_CASE("adaptive integration of an endpoint singularity") {
    const QuadResult r = integrate([](double x) { return 1.0 / std::sqrt(x); }, 0.0, 1.0, 1e-10);
    CHECK(r.converged);
    CHECK(r.value == doctest::Approx(2.0).epsilon(1e-9));
}

TEST_CASE("split integration across a jump") {
    const double br[] = {0.3};
    auto f = [](double x) { return x < 0.3 ? 1.0 : std::cos(x); };
    const QuadResult r = integrate_split(f, 0.0, 1.0, br);
    CHECK(r.value == doctest::Approx(0.3 + std::sin(1.0) - std::sin(0.3)).epsilon(1e-12));
}

TEST_CASE("whole-line Gaussian") {
    const QuadResult r = integrate_line([](double x) { return oracle::heat(0.7, x - 0.2); }, -INFINITY, INFINITY);
    CHECK(r.value == doctest::Approx(1.0).epsilon(1e-10));
    const QuadResult h = integrate_line([](double x) { return x * x * oracle::heat(2.0, x); }, 0.0, INFINITY);
    CHECK(h.value == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("Gauss-Legendre weights sum to 2 and integrate x^{2n-1} exactly") {
    for (int n : {1, 4, 9, 20}) {
        std::vector<double> x, w;
        gauss_legendre(n, x, w);
        double sw = 0.0, m = 0.0;
        for (int i = 0; i < n; ++i) {
            sw += w[static_cast<std::size_t>(i)];
            m += w[static_cast<std::size_t>(i)] * std::pow(x[static_cast<std::size_t>(i)], 2 * n - 2);
        }
        CHECK(sw == doctest::Approx(2.0).epsilon(1e-14));
        CHECK(m == doctest::Approx(2.0 / (2 * n - 1)).epsilon(1e-13));
    }
}

TEST_CASE("Chebyshev interpolation in sqrt-time") {
    ChebyshevNodes c(14, 2.0);
    std::vector<double> v;
    for (double r : c.nodes()) v.push_back(std::sin(3.0 * r));
    for (double r : {0.0, 0.37, 1.1, 2.0}) CHECK(c.interpolate(v, r) == doctest::Approx(std::sin(3.0 * r)).epsilon(1e-8));
    CHECK(c.tail_estimate(v) < 1e-6);
    std::vector<double> w(14);
    c.weights_at(0.5, w);
    double s = 0.0;
    for (double x : w) s += x;
    CHECK(s == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("Lobatto panel coefficients reproduce the interpolant") {
    LobattoPanel p(-0.5, 1.5, 8);
    std::vector<double> v, c(8);
    for (int i = 0; i < 8; ++i) v.push_back(std::exp(p.node(i)));
    p.chebyshev_coefficients(v.data(), c.data());
    for (double z : {-0.5, 0.1, 0.77, 1.5}) {
        const double a = p.interpolate(v.data(), z);
        const double b = LobattoPanel::clenshaw(c.data(), 8, p.to_reference(z));
        CHECK(a == doctest::Approx(b).epsilon(1e-13));
        CHECK(a == doctest::Approx(std::exp(z)).epsilon(1e-6));
    }
    CHECK(p.node(0) == -0.5);
    CHECK(p.node(7) == 1.5);
}

}
