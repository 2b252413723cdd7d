#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <numeric>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "linalg.hpp"

namespace tklab {

enum class Topology
{
    Norm,
    Strong,
    Weak,
};

[[nodiscard]] inline std::string to_string(Topology t)
{
    switch (t) {
    case Topology::Norm:
        return "norm";
    case Topology::Strong:
        return "strong";
    case Topology::Weak:
        return "weak";
    }
    return "?";
}

[[nodiscard]] inline Topology parse_topology(const std::string& s)
{
    if (s == "norm") {
        return Topology::Norm;
    }
    if (s == "strong") {
        return Topology::Strong;
    }
    if (s == "weak") {
        return Topology::Weak;
    }
    throw std::invalid_argument("unknown topology '" + s + "' (expected norm, strong or weak)");
}

enum class VectorKind
{
    CanonicalBasis,
    FiniteSupport,
    RandomDense,
};

struct TestVector
{
    SequenceVector vector;
    VectorKind kind = VectorKind::CanonicalBasis;
    std::string label;
    std::uint64_t seed = 0;

    [[nodiscard]] bool finite_support() const { return kind != VectorKind::RandomDense; }
};

/// Finite sample standing in for "every x in X". Finite-support members carry
/// exact binary-fraction entries and drive exact verdicts; dense members
/// (seeded, entries decaying like 1/i) probe genuine decay.
class TestVectorSet
{
public:
    TestVectorSet(std::string name, std::vector<TestVector> members)
        : name_(std::move(name))
        , members_(std::move(members))
    {
        if (members_.empty()) {
            throw std::invalid_argument("TestVectorSet must be nonempty");
        }
        const auto dim = members_.front().vector.size();
        const auto p = members_.front().vector.p();
        for (const auto& m : members_) {
            if (m.vector.size() != dim) {
                throw DimensionMismatch(dim, m.vector.size());
            }
            if (m.vector.p() != p) {
                throw std::invalid_argument("TestVectorSet members must share the exponent p");
            }
        }
    }

    /// e_1..e_count.
    static TestVectorSet canonical(std::size_t dim, std::size_t count, double p = 2.0)
    {
        std::vector<TestVector> m;
        for (std::size_t j = 0; j < std::min(count, dim); ++j) {
            m.push_back({SequenceVector::basis(dim, j, p), VectorKind::CanonicalBasis, "e" + std::to_string(j + 1), 0});
        }
        return {"canonical-e1..e" + std::to_string(std::min(count, dim)), std::move(m)};
    }

    /// e_1..e_8, three rational vectors supported in the first 8 coordinates,
    /// and four seeded dense vectors.
    static TestVectorSet default_set(std::size_t dim, double p, std::uint64_t seed)
    {
        auto set = canonical(dim, 8, p);
        auto& m = set.members_;
        const std::vector<std::vector<double>> rationals{
            {1.0, 2.0, 0.0, -1.0, 0.0, 0.0, 0.0, 3.0},
            {0.5, -0.25, 0.125, 0.0, 0.0, 0.0, 0.0, 0.0},
            {0.0, 0.0, 1.0, 1.0, 1.0, 1.0, -2.0, 0.5},
        };
        for (std::size_t r = 0; r < rationals.size(); ++r) {
            std::vector<double> e(dim, 0.0);
            for (std::size_t i = 0; i < std::min(dim, rationals[r].size()); ++i) {
                e[i] = rationals[r][i];
            }
            m.push_back({SequenceVector::from_real(e, p), VectorKind::FiniteSupport, "r" + std::to_string(r + 1), 0});
        }
        for (std::uint64_t k = 0; k < 4; ++k) {
            m.push_back({random_dense(dim, p, seed + k), VectorKind::RandomDense, "dense" + std::to_string(k + 1),
                         seed + k});
        }
        set.name_ = "default(e1..e8, r1..r3, dense1..dense4; seed " + std::to_string(seed) + ")";
        return set;
    }

    /// Entries g_i / i with g_i standard normal from mt19937_64(seed).
    static SequenceVector random_dense(std::size_t dim, double p, std::uint64_t seed)
    {
        std::mt19937_64 rng(seed);
        std::normal_distribution<double> gauss;
        std::vector<cplx> e(dim);
        for (std::size_t i = 0; i < dim; ++i) {
            e[i] = gauss(rng) / static_cast<double>(i + 1);
        }
        return {std::move(e), p};
    }

    [[nodiscard]] const std::string& name() const noexcept { return name_; }
    [[nodiscard]] const std::vector<TestVector>& members() const noexcept { return members_; }
    [[nodiscard]] std::size_t dim() const { return members_.front().vector.size(); }
    [[nodiscard]] double p() const { return members_.front().vector.p(); }

    /// Largest support bound over the finite-support members.
    [[nodiscard]] std::size_t support_bound() const
    {
        std::size_t b = 0;
        for (const auto& m : members_) {
            if (m.finite_support()) {
                b = std::max(b, m.vector.support_bound());
            }
        }
        return b;
    }

    [[nodiscard]] bool has_dense() const
    {
        return std::any_of(members_.begin(), members_.end(), [](const auto& m) { return !m.finite_support(); });
    }

private:
    std::string name_;
    std::vector<TestVector> members_;
};

/// <Ax, y> = sum_i (Ax)_i conj(y_i).
[[nodiscard]] inline cplx inner(const SequenceVector& u, const SequenceVector& y)
{
    if (u.size() != y.size()) {
        throw DimensionMismatch(u.size(), y.size());
    }
    cplx acc{};
    for (std::size_t i = 0; i < u.size(); ++i) {
        acc += u[i] * std::conj(y[i]);
    }
    return acc;
}

[[nodiscard]] inline cplx weak_pairing(const DenseOperator& a, const SequenceVector& x, const SequenceVector& y)
{
    if (x.size() != y.size()) {
        throw DimensionMismatch(x.size(), y.size());
    }
    return inner(apply(a, x), y);
}

struct Verdict
{
    enum class Kind
    {
        ExactBeyond,
        Converges,
        NoConvergence,
        Inconclusive,
    };

    Kind kind = Kind::Inconclusive;
    std::size_t n0 = 0;

    [[nodiscard]] bool converges() const { return kind == Kind::ExactBeyond || kind == Kind::Converges; }

    [[nodiscard]] std::string to_string() const
    {
        switch (kind) {
        case Kind::ExactBeyond:
            return "exact-beyond(" + std::to_string(n0) + ")";
        case Kind::Converges:
            return "converges-to-limit";
        case Kind::NoConvergence:
            return "no-convergence";
        case Kind::Inconclusive:
            return "inconclusive";
        }
        return "?";
    }

    friend bool operator==(const Verdict&, const Verdict&) = default;
};

/// Thresholds separating the verdicts; the gap between them is a dead zone.
struct VerdictThresholds
{
    double converged = 1e-6;
    double divergent = 1e-3;
    double roundoff = 1e-12;
};

/// Classifies a discrepancy sequence over an ascending n-grid.
///
/// exact-beyond(n0): delta is exactly 0 from n0 to the end of the grid.
/// converges-to-limit: final delta below `converged` and non-increasing (up
/// to `roundoff`) from the position of the maximum onward.
/// no-convergence: mean over the last half of the grid above `divergent`.
[[nodiscard]] inline Verdict classify(const std::vector<std::size_t>& ns, const std::vector<double>& deltas,
                                      const VerdictThresholds& th = {})
{
    if (ns.empty() || ns.size() != deltas.size()) {
        throw std::invalid_argument("classify needs one delta per grid point");
    }
    std::size_t first_zero = deltas.size();
    while (first_zero > 0 && deltas[first_zero - 1] == 0.0) {
        --first_zero;
    }
    if (first_zero < deltas.size()) {
        return {Verdict::Kind::ExactBeyond, ns[first_zero]};
    }
    const auto peak = static_cast<std::size_t>(std::max_element(deltas.begin(), deltas.end()) - deltas.begin());
    bool monotone = true;
    for (std::size_t i = peak + 1; i < deltas.size(); ++i) {
        if (deltas[i] > deltas[i - 1] + th.roundoff) {
            monotone = false;
        }
    }
    if (monotone && deltas.back() < th.converged) {
        return {Verdict::Kind::Converges, 0};
    }
    const std::size_t half = deltas.size() / 2;
    double tail = 0.0;
    for (std::size_t i = half; i < deltas.size(); ++i) {
        tail += deltas[i];
    }
    tail /= static_cast<double>(deltas.size() - half);
    if (tail > th.divergent) {
        return {Verdict::Kind::NoConvergence, 0};
    }
    return {Verdict::Kind::Inconclusive, 0};
}

/// Location of the largest discrepancy for one n.
struct Witness
{
    std::size_t n = 0;
    std::optional<cplx> grid_param;
    std::optional<std::size_t> x_index;
    std::optional<std::size_t> y_index;
    double value = 0.0;
};

struct ConvergenceSample
{
    std::size_t n = 0;
    double delta = 0.0;
    Witness witness;
    std::optional<double> delta_dense;
};

enum class GridKind
{
    None,
    Time,
    Spectral,
};

struct ConvergenceReport
{
    Topology topology = Topology::Weak;
    std::string test_set;
    std::size_t support_bound = 0;
    double p = 2.0;
    GridKind grid = GridKind::None;
    std::size_t grid_points = 0;
    std::vector<ConvergenceSample> samples;
    Verdict verdict;
    std::optional<Verdict> dense_verdict;
    /// Least-squares slope of log delta_dense against log n.
    std::optional<double> dense_decay_slope;
    /// Norm-topology deltas for p outside {1, 2, inf} are lower bounds.
    bool lower_bound = false;

    [[nodiscard]] std::vector<double> deltas() const
    {
        std::vector<double> d;
        for (const auto& s : samples) {
            d.push_back(s.delta);
        }
        return d;
    }

    [[nodiscard]] const ConvergenceSample& worst() const
    {
        return *std::max_element(samples.begin(), samples.end(),
                                 [](const auto& a, const auto& b) { return a.delta < b.delta; });
    }
};

namespace detail {

struct Discrepancy
{
    double value = 0.0;
    std::optional<std::size_t> x_index;
    std::optional<std::size_t> y_index;
};

struct SplitDiscrepancy
{
    Discrepancy primary;
    std::optional<Discrepancy> dense;
    bool lower_bound = false;
};

inline void keep_max(Discrepancy& best, double v, std::optional<std::size_t> xi, std::optional<std::size_t> yi)
{
    if (!best.x_index || v > best.value) {
        best = {v, xi, yi};
    }
}

/// Per-topology discrepancy of a difference operator. Finite-support pairs
/// feed the primary value, pairs involving a dense vector the dense value.
inline SplitDiscrepancy operator_discrepancy(const DenseOperator& diff, Topology topology, const TestVectorSet& tests)
{
    SplitDiscrepancy out;
    const double p = tests.p();
    const double q = dual_exponent(p);
    if (topology == Topology::Norm) {
        const auto est = operator_norm(diff, p);
        out.primary.value = est.value;
        out.lower_bound = est.lower_bound;
        return out;
    }
    const auto& m = tests.members();
    std::vector<SequenceVector> images;
    std::vector<double> xscale;
    for (const auto& t : m) {
        images.push_back(apply(diff, t.vector));
        xscale.push_back(std::max(1.0, p_norm(t.vector)));
    }
    if (tests.has_dense()) {
        out.dense = Discrepancy{};
    }
    if (topology == Topology::Strong) {
        for (std::size_t i = 0; i < m.size(); ++i) {
            const double v = p_norm(images[i]) / xscale[i];
            keep_max(m[i].finite_support() ? out.primary : *out.dense, v, i, std::nullopt);
        }
        return out;
    }
    std::vector<double> yscale;
    for (const auto& t : m) {
        yscale.push_back(std::max(1.0, lp_norm(t.vector.entries(), q)));
    }
    for (std::size_t i = 0; i < m.size(); ++i) {
        for (std::size_t j = 0; j < m.size(); ++j) {
            const double v = std::abs(inner(images[i], m[j].vector)) / (xscale[i] * yscale[j]);
            const bool finite = m[i].finite_support() && m[j].finite_support();
            keep_max(finite ? out.primary : *out.dense, v, i, j);
        }
    }
    return out;
}

inline std::optional<double> log_log_slope(const std::vector<std::size_t>& ns, const std::vector<double>& ds)
{
    std::vector<double> xs;
    std::vector<double> ys;
    for (std::size_t i = 0; i < ns.size(); ++i) {
        if (ds[i] > 0.0 && ns[i] > 0) {
            xs.push_back(std::log(static_cast<double>(ns[i])));
            ys.push_back(std::log(ds[i]));
        }
    }
    if (xs.size() < 2) {
        return std::nullopt;
    }
    const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
    const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / static_cast<double>(ys.size());
    double sxy = 0.0;
    double sxx = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxy += (xs[i] - mx) * (ys[i] - my);
        sxx += (xs[i] - mx) * (xs[i] - mx);
    }
    if (sxx == 0.0) {
        return std::nullopt;
    }
    return sxy / sxx;
}

} // namespace detail

/// Operator sequence n -> A_n for an ascending n-grid.
using OperatorSequence = std::function<DenseOperator(std::size_t n)>;
using GridOperatorSequence = std::function<DenseOperator(std::size_t n, cplx s)>;
using GridLimit = std::function<DenseOperator(cplx s)>;

/// delta_n = sup over the grid of the per-topology discrepancy of A_n(s) - L(s).
///
/// norm:   ||A_n - L||_p (operator norm; p = 2 by power iteration)
/// strong: max_x ||(A_n - L)x||_p / max(1, ||x||_p)
/// weak:   max_{x,y} |<(A_n - L)x, y>| / (max(1, ||x||_p) max(1, ||y||_q))
[[nodiscard]] inline ConvergenceReport measure_convergence_on_grid(const std::vector<std::size_t>& ns,
                                                                   const GridOperatorSequence& seq,
                                                                   const GridLimit& limit, Topology topology,
                                                                   const TestVectorSet& tests,
                                                                   const std::vector<cplx>& grid,
                                                                   GridKind kind = GridKind::Time,
                                                                   const VerdictThresholds& th = {})
{
    if (ns.empty()) {
        throw std::invalid_argument("measure_convergence needs a nonempty n-grid");
    }
    if (grid.empty()) {
        throw std::invalid_argument("measure_convergence_on_grid needs a nonempty parameter grid");
    }
    ConvergenceReport report;
    report.topology = topology;
    report.test_set = tests.name();
    report.support_bound = tests.support_bound();
    report.p = tests.p();
    report.grid = kind;
    report.grid_points = grid.size();

    std::vector<DenseOperator> limits;
    for (cplx s : grid) {
        limits.push_back(limit(s));
        if (limits.back().dim() != tests.dim()) {
            throw DimensionMismatch(tests.dim(), limits.back().dim());
        }
    }
    std::vector<double> dense;
    bool any_dense = false;
    for (std::size_t n : ns) {
        ConvergenceSample sample;
        sample.n = n;
        sample.witness.n = n;
        std::optional<double> dense_best;
        for (std::size_t g = 0; g < grid.size(); ++g) {
            const DenseOperator an = seq(n, grid[g]);
            if (an.dim() != tests.dim()) {
                throw DimensionMismatch(tests.dim(), an.dim());
            }
            const auto d = detail::operator_discrepancy(an - limits[g], topology, tests);
            report.lower_bound = report.lower_bound || d.lower_bound;
            if (g == 0 || d.primary.value > sample.delta) {
                sample.delta = d.primary.value;
                sample.witness.value = d.primary.value;
                sample.witness.x_index = d.primary.x_index;
                sample.witness.y_index = d.primary.y_index;
                if (kind != GridKind::None) {
                    sample.witness.grid_param = grid[g];
                }
            }
            if (d.dense) {
                dense_best = std::max(dense_best.value_or(0.0), d.dense->value);
            }
        }
        sample.delta_dense = dense_best;
        if (dense_best) {
            any_dense = true;
            dense.push_back(*dense_best);
        }
        report.samples.push_back(std::move(sample));
    }
    report.verdict = classify(ns, report.deltas(), th);
    if (any_dense && dense.size() == ns.size()) {
        report.dense_verdict = classify(ns, dense, th);
        report.dense_decay_slope = detail::log_log_slope(ns, dense);
    }
    return report;
}

[[nodiscard]] inline ConvergenceReport measure_convergence(const std::vector<std::size_t>& ns,
                                                           const OperatorSequence& seq, const DenseOperator& limit,
                                                           Topology topology, const TestVectorSet& tests,
                                                           const VerdictThresholds& th = {})
{
    return measure_convergence_on_grid(
        ns, [&](std::size_t n, cplx) { return seq(n); }, [&](cplx) { return limit; }, topology, tests, {cplx{}},
        GridKind::None, th);
}

/// Vector sequences x_n(j) -> x(j) for every index j, measured like the
/// strong (norm and strong topologies) or weak topology against the
/// finite-support members of `duals`.
[[nodiscard]] inline ConvergenceReport measure_vector_convergence(
    const std::vector<std::size_t>& ns, const std::function<SequenceVector(std::size_t n, std::size_t j)>& seq,
    const std::vector<SequenceVector>& limits, Topology topology, const TestVectorSet& duals,
    const VerdictThresholds& th = {})
{
    if (ns.empty() || limits.empty()) {
        throw std::invalid_argument("measure_vector_convergence needs nonempty grids");
    }
    ConvergenceReport report;
    report.topology = topology;
    report.test_set = duals.name();
    report.support_bound = duals.support_bound();
    report.p = duals.p();
    const double q = dual_exponent(duals.p());
    for (std::size_t n : ns) {
        ConvergenceSample sample;
        sample.n = n;
        sample.witness.n = n;
        for (std::size_t j = 0; j < limits.size(); ++j) {
            const SequenceVector diff = seq(n, j) - limits[j];
            const double xs = std::max(1.0, p_norm(limits[j]));
            if (topology != Topology::Weak) {
                const double v = p_norm(diff) / xs;
                if (v > sample.delta || !sample.witness.x_index) {
                    sample.delta = std::max(sample.delta, v);
                    sample.witness = {n, std::nullopt, j, std::nullopt, sample.delta};
                }
                continue;
            }
            const auto& m = duals.members();
            for (std::size_t k = 0; k < m.size(); ++k) {
                if (!m[k].finite_support()) {
                    continue;
                }
                const double ys = std::max(1.0, lp_norm(m[k].vector.entries(), q));
                const double v = std::abs(inner(diff, m[k].vector)) / (xs * ys);
                if (v > sample.delta || !sample.witness.x_index) {
                    sample.delta = std::max(sample.delta, v);
                    sample.witness = {n, std::nullopt, j, k, sample.delta};
                }
            }
        }
        report.samples.push_back(std::move(sample));
    }
    report.verdict = classify(ns, report.deltas(), th);
    return report;
}

} // namespace tklab
