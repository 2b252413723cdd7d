#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "linalg.hpp"
#include "quadrature.hpp"
#include "semigroup.hpp"

namespace tklab {

namespace detail {

inline std::string format_complex(cplx z)
{
    std::ostringstream os;
    os.precision(17);
    os << z.real() << (z.imag() < 0 ? " - " : " + ") << std::abs(z.imag()) << "i";
    return os.str();
}

} // namespace detail

inline constexpr double kResolventResidualTolerance = 1e-10;

/// R(lambda, A) = (lambda I - A)^{-1}, validated by ||(lambda I - A) R - I||_2.
[[nodiscard]] inline DenseOperator resolvent_direct(const DenseOperator& a, cplx lambda)
{
    const std::size_t dim = a.dim();
    const DenseOperator shifted = DenseOperator::scalar(dim, lambda) - a;
    const LuFactorization lu(shifted);
    if (lu.singular(kSingularityThreshold)) {
        throw SingularOperatorError("resolvent: lambda = " + detail::format_complex(lambda) +
                                        " is numerically in the spectrum",
                                    lu.rcond());
    }
    DenseOperator r = lu.inverse();
    const double residual = norm_2(shifted * r - DenseOperator::identity(dim));
    if (residual > kResolventResidualTolerance) {
        throw SingularOperatorError("resolvent: residual " + std::to_string(residual) + " at lambda = " +
                                        detail::format_complex(lambda),
                                    lu.rcond());
    }
    return r;
}

/// R(lambda, A)^k by repeated composition.
[[nodiscard]] inline DenseOperator resolvent_power_direct(const DenseOperator& a, cplx lambda, unsigned k)
{
    if (k == 0) {
        throw std::invalid_argument("resolvent power needs k >= 1");
    }
    const DenseOperator r = resolvent_direct(a, lambda);
    DenseOperator out = r;
    for (unsigned j = 1; j < k; ++j) {
        out = out * r;
    }
    return out;
}

/// -d/dlambda R(lambda, A) by a centered difference with step h.
[[nodiscard]] inline DenseOperator resolvent_derivative_fd(const DenseOperator& a, cplx lambda, double h = 1e-5)
{
    return (-1.0 / (2.0 * h)) * (resolvent_direct(a, lambda + h) - resolvent_direct(a, lambda - h));
}

/// ||R(lambda) - R(mu) - (mu - lambda) R(lambda) R(mu)||_2.
[[nodiscard]] inline double resolvent_identity_residual(const DenseOperator& a, cplx lambda, cplx mu)
{
    const auto rl = resolvent_direct(a, lambda);
    const auto rm = resolvent_direct(a, mu);
    return norm_2(rl - rm - (mu - lambda) * (rl * rm));
}

// ---------------------------------------------------------------------------
// Laplace route: R^k(lambda, A) = 1/(k-1)! * int_0^inf e^{-lambda t} t^{k-1} T(t) dt
// ---------------------------------------------------------------------------

enum class QuadratureKind
{
    CompositeTrapezoid,
    CompositeGaussLegendre,
};

struct QuadratureSpec
{
    double t_max = 30.0;
    std::size_t nodes = 256;
    QuadratureKind rule = QuadratureKind::CompositeGaussLegendre;

    void validate() const
    {
        if (!(t_max > 0.0)) {
            throw std::invalid_argument("QuadratureSpec.t_max must be > 0");
        }
        if (nodes < 16) {
            throw std::invalid_argument("QuadratureSpec.nodes must be >= 16");
        }
    }
};

inline constexpr std::size_t kNodesPerPanel = 16;

/// Bound on the discarded tail int_{t_max}^inf of the k-th power integral,
/// from ||T(t)|| <= M e^{omega t}.
[[nodiscard]] inline double laplace_tail_bound(double M, double omega, double re_lambda, unsigned k, double t_max)
{
    const double a = re_lambda - omega;
    if (!(a > 0.0)) {
        return kInfinity;
    }
    double sum = 0.0;
    double term = 1.0; // t_max^j / j!
    for (unsigned j = 0; j < k; ++j) {
        if (j > 0) {
            term *= t_max / static_cast<double>(j);
        }
        sum += term / std::pow(a, static_cast<double>(k - j));
    }
    return M * std::exp(-a * t_max) * sum;
}

/// Smallest horizon (to 1%) whose tail bound is at most `target`.
[[nodiscard]] inline double laplace_horizon(double M, double omega, double re_lambda, unsigned k,
                                            double target = 1e-10)
{
    if (!(re_lambda > omega)) {
        throw std::invalid_argument("Laplace representation needs Re lambda > omega");
    }
    double hi = 1.0;
    while (laplace_tail_bound(M, omega, re_lambda, k, hi) > target) {
        hi *= 2.0;
    }
    double lo = 0.0;
    while (hi - lo > 0.01 * hi) {
        const double mid = 0.5 * (lo + hi);
        (laplace_tail_bound(M, omega, re_lambda, k, mid) > target ? lo : hi) = mid;
    }
    return hi;
}

/// Default quadrature: 256 Gauss-Legendre nodes, horizon with tail <= 1e-10.
[[nodiscard]] inline QuadratureSpec default_quadrature(const SemigroupFamily& family, cplx lambda, unsigned k,
                                                       std::size_t nodes = 256)
{
    return {laplace_horizon(family.M, family.omega, lambda.real(), k), nodes, QuadratureKind::CompositeGaussLegendre};
}

/// Semigroup samples on a quadrature rule, reusable across lambda and k.
/// `coarse` holds a lower-order rule on the same panels for error estimates.
struct LaplaceSamples
{
    QuadratureSpec spec;
    double M = 1.0;
    double omega = 0.0;
    QuadratureRule fine;
    std::vector<DenseOperator> fine_values;
    QuadratureRule coarse;
    std::vector<DenseOperator> coarse_values;
};

template <typename Evaluator>
[[nodiscard]] LaplaceSamples sample_for_laplace(Evaluator&& eval, double M, double omega, const QuadratureSpec& q)
{
    q.validate();
    LaplaceSamples s{q, M, omega, {}, {}, {}, {}};
    if (q.rule == QuadratureKind::CompositeGaussLegendre) {
        const std::size_t panels = (q.nodes + kNodesPerPanel - 1) / kNodesPerPanel;
        const auto edges = graded_panels(q.t_max, panels);
        s.fine = composite_gauss_legendre(edges, kNodesPerPanel);
        s.coarse = composite_gauss_legendre(edges, kNodesPerPanel / 2);
    } else {
        s.fine = composite_trapezoid(q.t_max, q.nodes);
        s.coarse = composite_trapezoid(q.t_max, q.nodes / 2);
    }
    for (double t : s.fine.nodes) {
        s.fine_values.push_back(eval(t));
    }
    for (double t : s.coarse.nodes) {
        s.coarse_values.push_back(eval(t));
    }
    return s;
}

[[nodiscard]] inline LaplaceSamples sample_for_laplace(const SemigroupFamily& family, const QuadratureSpec& q)
{
    return sample_for_laplace([&](double t) { return evaluate(family, t); }, family.M, family.omega, q);
}

struct LaplaceResult
{
    DenseOperator value;
    double tail_bound = 0.0;
    /// ||fine - coarse||_2, a conservative rule-order estimate.
    double rule_estimate = 0.0;

    [[nodiscard]] double error_estimate() const { return tail_bound + rule_estimate; }
};

namespace detail {

inline DenseOperator laplace_sum(const QuadratureRule& rule, const std::vector<DenseOperator>& values, cplx lambda,
                                 unsigned k)
{
    double factorial = 1.0;
    for (unsigned j = 2; j < k; ++j) {
        factorial *= static_cast<double>(j);
    }
    DenseOperator acc(values.front().dim());
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        const double t = rule.nodes[i];
        const cplx w = rule.weights[i] * std::exp(-lambda * t) * std::pow(t, static_cast<double>(k - 1)) / factorial;
        acc += w * values[i];
    }
    return acc;
}

} // namespace detail

[[nodiscard]] inline LaplaceResult resolvent_power_laplace(const LaplaceSamples& samples, cplx lambda, unsigned k)
{
    if (k == 0) {
        throw std::invalid_argument("resolvent power needs k >= 1");
    }
    if (!(lambda.real() > samples.omega)) {
        throw std::invalid_argument("Laplace representation diverges: Re lambda = " + std::to_string(lambda.real()) +
                                    " <= omega = " + std::to_string(samples.omega));
    }
    auto fine = detail::laplace_sum(samples.fine, samples.fine_values, lambda, k);
    const auto coarse = detail::laplace_sum(samples.coarse, samples.coarse_values, lambda, k);
    const double tail = laplace_tail_bound(samples.M, samples.omega, lambda.real(), k, samples.spec.t_max);
    const double rule = norm_2(fine - coarse);
    return {std::move(fine), tail, rule};
}

[[nodiscard]] inline LaplaceResult resolvent_power_laplace(const SemigroupFamily& family, cplx lambda, unsigned k,
                                                           const QuadratureSpec& q)
{
    if (!(lambda.real() > family.omega)) {
        throw std::invalid_argument("Laplace representation diverges: Re lambda = " + std::to_string(lambda.real()) +
                                    " <= omega = " + std::to_string(family.omega));
    }
    return resolvent_power_laplace(sample_for_laplace(family, q), lambda, k);
}

[[nodiscard]] inline LaplaceResult resolvent_power_laplace(const SemigroupFamily& family, cplx lambda, unsigned k)
{
    return resolvent_power_laplace(family, lambda, k, default_quadrature(family, lambda, k));
}

// ---------------------------------------------------------------------------
// Dunford route: T(t) = 1/(2 pi i) oint_{|z| = r} e^{tz} R(z, A) dz
// ---------------------------------------------------------------------------

struct ContourSpec
{
    double radius = 1.0;
    std::size_t nodes = 256;

    void validate() const
    {
        if (!(radius > 0.0)) {
            throw std::invalid_argument("ContourSpec.radius must be > 0");
        }
        if (nodes < 64) {
            throw std::invalid_argument("ContourSpec.nodes must be >= 64");
        }
    }
};

/// Circle of radius ||A||_2 + 1 with 256 equispaced nodes.
[[nodiscard]] inline ContourSpec default_contour(const DenseOperator& a, std::size_t nodes = 256)
{
    return {norm_2(a) + 1.0, nodes};
}

/// Equispaced nodes z_k = r e^{2 pi i k / N}.
[[nodiscard]] inline std::vector<cplx> contour_nodes(const ContourSpec& c)
{
    c.validate();
    std::vector<cplx> z(c.nodes);
    for (std::size_t k = 0; k < c.nodes; ++k) {
        const double theta = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(c.nodes);
        z[k] = std::polar(c.radius, theta);
    }
    return z;
}

/// Trapezoid rule for a scalar contour integrand given its resolvent values
/// rho_k at the nodes: (1/N) sum_k e^{t z_k} z_k rho_k.
[[nodiscard]] inline cplx dunford_scalar(const std::vector<cplx>& rho, const ContourSpec& c, double t)
{
    const auto z = contour_nodes(c);
    if (rho.size() != z.size()) {
        throw DimensionMismatch(z.size(), rho.size());
    }
    cplx acc{};
    for (std::size_t k = 0; k < z.size(); ++k) {
        acc += std::exp(t * z[k]) * z[k] * rho[k];
    }
    return acc / static_cast<double>(z.size());
}

/// Cached contour resolvents of a bounded operator.
///
/// evaluate(t) applies the trapezoid rule directly; its roundoff grows like
/// eps * e^{t r}. evaluate_scaled(t) evaluates at t / 2^s with t r / 2^s <= 1
/// and squares s times.
class DunfordRepresentation
{
public:
    DunfordRepresentation(const DenseOperator& a, const ContourSpec& c)
        : contour_(c)
        , nodes_(contour_nodes(c))
        , dim_(a.dim())
    {
        const double bound = norm_2(a);
        if (bound > c.radius - 1.0 + 1e-8 * (1.0 + bound)) {
            throw std::invalid_argument("Dunford contour radius " + std::to_string(c.radius) +
                                        " must be at least ||A||_2 + 1 = " + std::to_string(bound + 1.0));
        }
        weighted_.reserve(nodes_.size());
        for (cplx z : nodes_) {
            weighted_.push_back(z * resolvent_direct(a, z));
        }
    }

    [[nodiscard]] const ContourSpec& contour() const noexcept { return contour_; }

    [[nodiscard]] DenseOperator evaluate(double t) const
    {
        if (!(t >= 0.0)) {
            throw std::invalid_argument("Dunford evaluation needs t >= 0");
        }
        DenseOperator acc(dim_);
        for (std::size_t k = 0; k < nodes_.size(); ++k) {
            acc += std::exp(t * nodes_[k]) * weighted_[k];
        }
        acc *= 1.0 / static_cast<double>(nodes_.size());
        return acc;
    }

    [[nodiscard]] DenseOperator evaluate_scaled(double t) const
    {
        int s = 0;
        while (std::ldexp(t * contour_.radius, -s) > 1.0) {
            ++s;
        }
        DenseOperator out = evaluate(std::ldexp(t, -s));
        for (int j = 0; j < s; ++j) {
            out = out * out;
        }
        return out;
    }

private:
    ContourSpec contour_;
    std::vector<cplx> nodes_;
    std::size_t dim_;
    std::vector<DenseOperator> weighted_;
};

[[nodiscard]] inline DenseOperator dunford_evaluate(const DenseOperator& a, double t, const ContourSpec& c)
{
    return DunfordRepresentation(a, c).evaluate(t);
}

[[nodiscard]] inline DenseOperator dunford_evaluate(const DenseOperator& a, double t)
{
    return dunford_evaluate(a, t, default_contour(a));
}

} // namespace tklab
