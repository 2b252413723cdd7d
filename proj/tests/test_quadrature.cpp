#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "tklab/quadrature.hpp"

namespace {

double integrate(const tklab::QuadratureRule& r, auto f)
{
    double s = 0.0;
    for (std::size_t i = 0; i < r.nodes.size(); ++i) {
        s += r.weights[i] * f(r.nodes[i]);
    }
    return s;
}

} // namespace

TEST(GaussLegendre, KnownThreePointRule)
{
    const auto r = tklab::gauss_legendre(3);
    EXPECT_NEAR(r.nodes[0], -std::sqrt(0.6), 1e-15);
    EXPECT_NEAR(r.nodes[1], 0.0, 1e-15);
    EXPECT_NEAR(r.nodes[2], std::sqrt(0.6), 1e-15);
    EXPECT_NEAR(r.weights[0], 5.0 / 9.0, 1e-15);
    EXPECT_NEAR(r.weights[1], 8.0 / 9.0, 1e-15);
}

TEST(GaussLegendre, ExactForPolynomialsUpToDegree2mMinus1)
{
    for (std::size_t m : {1u, 2u, 5u, 16u, 40u}) {
        const auto r = tklab::gauss_legendre(m);
        EXPECT_NEAR(std::accumulate(r.weights.begin(), r.weights.end(), 0.0), 2.0, 1e-13);
        for (std::size_t k = 0; k < 2 * m; ++k) {
            const double want = (k % 2 == 1) ? 0.0 : 2.0 / static_cast<double>(k + 1);
            const double got = integrate(r, [k](double x) { return std::pow(x, static_cast<double>(k)); });
            EXPECT_NEAR(got, want, 1e-13) << "m " << m << " k " << k;
        }
        if (m <= 5) {
            // Degree 2m is the first one the rule misses.
            const double next = integrate(r, [m](double x) { return std::pow(x, static_cast<double>(2 * m)); });
            EXPECT_GT(std::abs(next - 2.0 / static_cast<double>(2 * m + 1)), 1e-6) << "m " << m;
        }
    }
    EXPECT_THROW((void)tklab::gauss_legendre(0), std::invalid_argument);
}

TEST(GaussLegendre, NodesSortedAndInsideInterval)
{
    const auto r = tklab::gauss_legendre(33);
    for (std::size_t i = 0; i + 1 < r.nodes.size(); ++i) {
        EXPECT_LT(r.nodes[i], r.nodes[i + 1]);
    }
    EXPECT_GT(r.nodes.front(), -1.0);
    EXPECT_LT(r.nodes.back(), 1.0);
}

TEST(GaussLegendre, MappedRule)
{
    const auto r = tklab::map_rule(tklab::gauss_legendre(8), 1.0, 3.0);
    EXPECT_NEAR(integrate(r, [](double x) { return x * x * x; }), 20.0, 1e-13);
}

TEST(Panels, GradedEdges)
{
    const auto e = tklab::graded_panels(40.0, 8);
    EXPECT_EQ(e.size(), 9u);
    EXPECT_EQ(e.front(), 0.0);
    EXPECT_DOUBLE_EQ(e.back(), 40.0);
    EXPECT_DOUBLE_EQ(e[1], 0.125);
    EXPECT_DOUBLE_EQ(e[4], 1.0);
    for (std::size_t i = 0; i + 1 < e.size(); ++i) {
        EXPECT_LT(e[i], e[i + 1]);
    }
    EXPECT_EQ(tklab::graded_panels(2.0, 1), (std::vector<double>{0.0, 2.0}));
    EXPECT_THROW((void)tklab::graded_panels(0.0, 4), std::invalid_argument);
}

TEST(Panels, CompositeRuleIntegratesDecayingExponential)
{
    const double t_max = 40.0;
    const auto r = tklab::composite_gauss_legendre(tklab::graded_panels(t_max, 16), 16);
    for (double a : {0.5, 1.0, 30.0}) {
        const double got = integrate(r, [a](double t) { return std::exp(-a * t); });
        EXPECT_NEAR(got, (1.0 - std::exp(-a * t_max)) / a, 1e-13) << "a = " << a;
    }
}

TEST(Trapezoid, SecondOrderConvergence)
{
    auto err = [](std::size_t m) {
        const auto r = tklab::composite_trapezoid(1.0, m);
        return std::abs(integrate(r, [](double t) { return std::exp(t); }) - (std::exp(1.0) - 1.0));
    };
    const double ratio = err(64) / err(128);
    EXPECT_NEAR(ratio, 4.0, 0.01);
    EXPECT_THROW((void)tklab::composite_trapezoid(1.0, 0), std::invalid_argument);
}
