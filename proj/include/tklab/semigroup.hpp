#pragma once

#include <cmath>
#include <cstddef>
#include <algorithm>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "linalg.hpp"
#include "operators.hpp"

namespace tklab {

/// Tolerance ladder shared by checks and experiment reports.
struct ToleranceLadder
{
    double construction = 1e-12;
    double two_route = 1e-10;
    double law = 1e-8;
};

namespace strategy {

struct NumericExp
{
    double tol = 1e-12;
};

/// sinh(t) S + cosh(t) I for the block swap S.
struct ClosedFormSwap
{
    std::size_t n = 1;
};

/// e^{-t} (sinh(t) S + cosh(t) I), the semigroup of S - I.
struct ClosedFormRescaledSwap
{
    std::size_t n = 1;
};

/// e^{ct} I.
struct Scalar
{
    cplx c{};
};

} // namespace strategy

using EvaluationStrategy =
    std::variant<strategy::NumericExp, strategy::ClosedFormSwap, strategy::ClosedFormRescaledSwap, strategy::Scalar>;

/// A bounded generator with an evaluation strategy for T(t) = e^{tA} and
/// growth-bound metadata ||T(t)|| <= M e^{omega t}. The metadata is a claim,
/// checked by growth_bound_check, never assumed.
struct SemigroupFamily
{
    DenseOperator generator;
    EvaluationStrategy strategy;
    double M = 1.0;
    double omega = 0.0;

    static SemigroupFamily numeric(DenseOperator a, double M, double omega, double tol = 1e-12)
    {
        return {std::move(a), strategy::NumericExp{tol}, M, omega};
    }

    /// Numeric family with the always-valid bound M = 1, omega = ||A||_2.
    static SemigroupFamily numeric(DenseOperator a)
    {
        const double w = norm_2(a);
        return {std::move(a), strategy::NumericExp{}, 1.0, w};
    }

    static SemigroupFamily swap(std::size_t n, std::size_t dim)
    {
        return {block_swap(n, dim), strategy::ClosedFormSwap{n}, 1.0, 1.0};
    }

    static SemigroupFamily rescaled_swap(std::size_t n, std::size_t dim)
    {
        return {rescaled_generator(n, dim), strategy::ClosedFormRescaledSwap{n}, 1.0, 0.0};
    }

    static SemigroupFamily scalar(cplx c, std::size_t dim)
    {
        return {DenseOperator::scalar(dim, c), strategy::Scalar{c}, 1.0, c.real()};
    }

    [[nodiscard]] std::size_t dim() const { return generator.dim(); }

    [[nodiscard]] std::string strategy_name() const
    {
        return std::visit(
            [](const auto& s) -> std::string {
                using S = std::decay_t<decltype(s)>;
                if constexpr (std::is_same_v<S, strategy::NumericExp>) {
                    return "numeric-exp";
                } else if constexpr (std::is_same_v<S, strategy::ClosedFormSwap>) {
                    return "closed-form-swap(" + std::to_string(s.n) + ")";
                } else if constexpr (std::is_same_v<S, strategy::ClosedFormRescaledSwap>) {
                    return "closed-form-rescaled-swap(" + std::to_string(s.n) + ")";
                } else {
                    return "scalar";
                }
            },
            strategy);
    }
};

namespace detail {

/// alpha * S + beta * I for the block swap S of length n, built entrywise.
inline DenseOperator swap_combination(std::size_t n, std::size_t dim, double alpha, double beta)
{
    BlockSwapSpec{n, dim}.validate();
    DenseOperator r(dim);
    for (std::size_t i = 0; i < n; ++i) {
        r(i, i) = beta;
        r(i + n, i + n) = beta;
        r(i, i + n) = alpha;
        r(i + n, i) = alpha;
    }
    for (std::size_t i = 2 * n; i < dim; ++i) {
        r(i, i) = alpha + beta;
    }
    return r;
}

} // namespace detail

[[nodiscard]] inline DenseOperator evaluate(const SemigroupFamily& family, double t)
{
    if (!(t >= 0.0)) {
        throw std::invalid_argument("semigroups are evaluated for t >= 0 only");
    }
    const std::size_t dim = family.dim();
    return std::visit(
        [&](const auto& s) -> DenseOperator {
            using S = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<S, strategy::NumericExp>) {
                return matrix_exp(family.generator, t, s.tol);
            } else if constexpr (std::is_same_v<S, strategy::ClosedFormSwap>) {
                return detail::swap_combination(s.n, dim, std::sinh(t), std::cosh(t));
            } else if constexpr (std::is_same_v<S, strategy::ClosedFormRescaledSwap>) {
                const double damp = std::exp(-t);
                return detail::swap_combination(s.n, dim, damp * std::sinh(t), damp * std::cosh(t));
            } else {
                return DenseOperator::scalar(dim, std::exp(s.c * t));
            }
        },
        family.strategy);
}

/// A pointwise family t -> E(t) that need not satisfy the semigroup law,
/// e.g. the weak limit of a sequence of semigroups.
struct OperatorFamilyLimit
{
    std::string name;
    std::function<DenseOperator(double)> evaluation;

    [[nodiscard]] DenseOperator operator()(double t) const { return evaluation(t); }

    static OperatorFamilyLimit from_family(SemigroupFamily family, std::string name = "semigroup")
    {
        return {std::move(name), [f = std::move(family)](double t) { return evaluate(f, t); }};
    }

    /// t -> f(t) I.
    static OperatorFamilyLimit scalar_function(std::string name, std::size_t dim, std::function<double(double)> f)
    {
        return {std::move(name), [dim, f = std::move(f)](double t) { return DenseOperator::scalar(dim, f(t)); }};
    }
};

/// ||E(s+t) - E(s)E(t)||_2.
[[nodiscard]] inline double semigroup_law_residual(const OperatorFamilyLimit& e, double s, double t)
{
    if (!(s >= 0.0) || !(t >= 0.0)) {
        throw std::invalid_argument("semigroup law residual needs s, t >= 0");
    }
    return norm_2(e(s + t) - e(s) * e(t));
}

[[nodiscard]] inline double semigroup_law_residual(const SemigroupFamily& family, double s, double t)
{
    if (!(s >= 0.0) || !(t >= 0.0)) {
        throw std::invalid_argument("semigroup law residual needs s, t >= 0");
    }
    return norm_2(evaluate(family, s + t) - evaluate(family, s) * evaluate(family, t));
}

/// Largest law residual over all (s, t) pairs drawn from a grid.
template <typename Family>
[[nodiscard]] double max_law_residual(const Family& family, const std::vector<double>& grid)
{
    double worst = 0.0;
    for (double s : grid) {
        for (double t : grid) {
            worst = std::max(worst, semigroup_law_residual(family, s, t));
        }
    }
    return worst;
}

struct GrowthSample
{
    double t = 0.0;
    double norm = 0.0;
    double bound = 0.0;
    double margin = 0.0;
};

struct GrowthReport
{
    double M = 1.0;
    double omega = 0.0;
    double p = 2.0;
    std::vector<GrowthSample> samples;
    bool pass = true;
    /// Norms for p outside {1, 2, inf} are sampled lower bounds.
    bool lower_bound = false;

    [[nodiscard]] const GrowthSample& worst() const
    {
        return *std::min_element(samples.begin(), samples.end(),
                                 [](const auto& a, const auto& b) { return a.margin < b.margin; });
    }
};

inline constexpr double kGrowthSlack = 1e-8;

/// Checks ||T(t)||_p <= M e^{omega t} on every grid point.
[[nodiscard]] inline GrowthReport growth_bound_check(const SemigroupFamily& family, double M, double omega,
                                                     const std::vector<double>& grid, double p = 2.0)
{
    if (grid.empty()) {
        throw std::invalid_argument("growth_bound_check needs a nonempty grid");
    }
    GrowthReport report{M, omega, p, {}, true, false};
    for (double t : grid) {
        const auto est = operator_norm(evaluate(family, t), p);
        const double bound = M * std::exp(omega * t);
        report.samples.push_back({t, est.value, bound, bound - est.value});
        report.lower_bound = report.lower_bound || est.lower_bound;
        if (bound - est.value < -kGrowthSlack) {
            report.pass = false;
        }
    }
    return report;
}

/// Uniform grid of `points` values on [0, t_max].
[[nodiscard]] inline std::vector<double> uniform_grid(double t_max, std::size_t points)
{
    if (points == 0) {
        throw std::invalid_argument("grid needs at least one point");
    }
    if (points == 1) {
        return {0.0};
    }
    std::vector<double> g(points);
    for (std::size_t i = 0; i < points; ++i) {
        g[i] = t_max * static_cast<double>(i) / static_cast<double>(points - 1);
    }
    return g;
}

} // namespace tklab
