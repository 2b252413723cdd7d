#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <stdexcept>
#include <utility>
#include <vector>

namespace tklab {

struct QuadratureRule
{
    std::vector<double> nodes;
    std::vector<double> weights;
};

namespace detail {

/// P_m(x) and P_m'(x) by the three-term recurrence.
inline std::pair<double, double> legendre(std::size_t m, double x)
{
    double p0 = 1.0;
    double p1 = x;
    for (std::size_t k = 2; k <= m; ++k) {
        const double kd = static_cast<double>(k);
        const double p2 = ((2.0 * kd - 1.0) * x * p1 - (kd - 1.0) * p0) / kd;
        p0 = p1;
        p1 = p2;
    }
    const double dp = static_cast<double>(m) * (x * p1 - p0) / (x * x - 1.0);
    return {p1, dp};
}

} // namespace detail

/// m-point Gauss-Legendre rule on [-1, 1] (Newton iteration on P_m).
[[nodiscard]] inline QuadratureRule gauss_legendre(std::size_t m)
{
    if (m == 0) {
        throw std::invalid_argument("Gauss-Legendre needs at least one node");
    }
    QuadratureRule rule{std::vector<double>(m), std::vector<double>(m)};
    const double md = static_cast<double>(m);
    for (std::size_t i = 0; i < (m + 1) / 2; ++i) {
        double x = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) / (md + 0.5));
        for (int it = 0; it < 100; ++it) {
            const auto [p, dp] = detail::legendre(m, x);
            const double dx = p / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) {
                break;
            }
        }
        const double dp = detail::legendre(m, x).second;
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.nodes[i] = -x;
        rule.nodes[m - 1 - i] = x;
        rule.weights[i] = w;
        rule.weights[m - 1 - i] = w;
    }
    return rule;
}

/// The same rule mapped to [a, b].
[[nodiscard]] inline QuadratureRule map_rule(const QuadratureRule& ref, double a, double b)
{
    QuadratureRule r = ref;
    const double half = 0.5 * (b - a);
    const double mid = 0.5 * (a + b);
    for (std::size_t i = 0; i < r.nodes.size(); ++i) {
        r.nodes[i] = mid + half * ref.nodes[i];
        r.weights[i] = half * ref.weights[i];
    }
    return r;
}

/// Panel edges on [0, t_max]: half the panels refine geometrically toward 0
/// over [0, min(1, t_max/2)], the rest split the remainder uniformly. Fast
/// decaying integrand components live near 0.
[[nodiscard]] inline std::vector<double> graded_panels(double t_max, std::size_t panels)
{
    if (panels == 0 || !(t_max > 0.0)) {
        throw std::invalid_argument("graded_panels needs t_max > 0 and at least one panel");
    }
    if (panels == 1) {
        return {0.0, t_max};
    }
    const std::size_t geometric = panels / 2;
    const std::size_t uniform = panels - geometric;
    const double knee = std::min(1.0, 0.5 * t_max);
    std::vector<double> edges{0.0};
    for (std::size_t g = geometric; g > 0; --g) {
        edges.push_back(std::ldexp(knee, -static_cast<int>(g - 1)));
    }
    for (std::size_t u = 1; u <= uniform; ++u) {
        edges.push_back(knee + (t_max - knee) * static_cast<double>(u) / static_cast<double>(uniform));
    }
    return edges;
}

/// Composite Gauss-Legendre rule with `per_panel` nodes on each panel.
[[nodiscard]] inline QuadratureRule composite_gauss_legendre(const std::vector<double>& edges, std::size_t per_panel)
{
    const auto ref = gauss_legendre(per_panel);
    QuadratureRule out;
    for (std::size_t k = 0; k + 1 < edges.size(); ++k) {
        const auto r = map_rule(ref, edges[k], edges[k + 1]);
        out.nodes.insert(out.nodes.end(), r.nodes.begin(), r.nodes.end());
        out.weights.insert(out.weights.end(), r.weights.begin(), r.weights.end());
    }
    return out;
}

/// Composite trapezoid rule with `intervals` equal intervals on [0, t_max].
[[nodiscard]] inline QuadratureRule composite_trapezoid(double t_max, std::size_t intervals)
{
    if (intervals == 0) {
        throw std::invalid_argument("trapezoid needs at least one interval");
    }
    QuadratureRule r;
    const double h = t_max / static_cast<double>(intervals);
    for (std::size_t i = 0; i <= intervals; ++i) {
        r.nodes.push_back(h * static_cast<double>(i));
        r.weights.push_back((i == 0 || i == intervals) ? 0.5 * h : h);
    }
    return r;
}

} // namespace tklab
