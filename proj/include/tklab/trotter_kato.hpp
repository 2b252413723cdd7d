#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "linalg.hpp"
#include "operators.hpp"
#include "resolvent.hpp"
#include "semigroup.hpp"
#include "topology.hpp"

namespace tklab {

/// The four approximation conditions: (a) generators on a core, (b)
/// generators along approximating vectors, (c) resolvents at one lambda,
/// (d) semigroups uniformly on compact time intervals.
enum class Condition : std::size_t
{
    A = 0,
    B = 1,
    C = 2,
    D = 3,
};

inline constexpr std::array<Condition, 4> kConditions{Condition::A, Condition::B, Condition::C, Condition::D};

[[nodiscard]] inline char label(Condition c)
{
    return static_cast<char>('a' + static_cast<std::size_t>(c));
}

enum class Status
{
    Holds,
    Fails,
    Inconclusive,
};

[[nodiscard]] inline std::string to_string(Status s)
{
    switch (s) {
    case Status::Holds:
        return "holds";
    case Status::Fails:
        return "fails";
    case Status::Inconclusive:
        return "inconclusive";
    }
    return "?";
}

[[nodiscard]] inline Status status_of(const Verdict& v)
{
    if (v.converges()) {
        return Status::Holds;
    }
    return v.kind == Verdict::Kind::NoConvergence ? Status::Fails : Status::Inconclusive;
}

/// x_n for the core vector with index j (indices refer to TKInstance::core).
using WitnessBuilder = std::function<SequenceVector(std::size_t n, std::size_t core_index)>;

struct IndexedFamily
{
    std::size_t n = 1;
    SemigroupFamily family;
};

/// One generator sequence A_n with limit candidate A, checked in one mode.
///
/// Every operator is bounded and everywhere defined, so the core of A
/// collapses to the whole space; the finite-support members of `core` stand in
/// for it and all of `core` samples "every x in X".
struct TKInstance
{
    std::string name;
    Topology mode = Topology::Weak;
    std::vector<IndexedFamily> sequence;
    SemigroupFamily limit;
    TestVectorSet core;
    double M = 1.0;
    double omega = 0.0;
    cplx lambda{1.0, 0.0};
    std::vector<cplx> lambda_grid{1.0};
    std::vector<double> t_grid = uniform_grid(5.0, 101);
    std::optional<WitnessBuilder> b_witnesses;
    std::string witness_description = "default x_n = x";
    VerdictThresholds thresholds;

    [[nodiscard]] std::vector<std::size_t> ns() const
    {
        std::vector<std::size_t> out;
        for (const auto& f : sequence) {
            out.push_back(f.n);
        }
        return out;
    }

    [[nodiscard]] const SemigroupFamily& at(std::size_t n) const
    {
        for (const auto& f : sequence) {
            if (f.n == n) {
                return f.family;
            }
        }
        throw std::out_of_range("no generator with index n = " + std::to_string(n));
    }

    [[nodiscard]] std::vector<std::size_t> core_indices() const
    {
        std::vector<std::size_t> idx;
        for (std::size_t j = 0; j < core.members().size(); ++j) {
            if (core.members()[j].finite_support()) {
                idx.push_back(j);
            }
        }
        return idx;
    }
};

struct InstanceValidation
{
    bool growth_ok = true;
    double worst_margin = kInfinity;
    std::string worst_family;
};

/// Checks Re lambda > omega, dimensions, and the growth bound on t_grid for the
/// limit and every member of the sequence. Throws on any violation.
[[nodiscard]] inline InstanceValidation validate(const TKInstance& inst)
{
    if (inst.sequence.empty()) {
        throw std::invalid_argument(inst.name + ": empty generator sequence");
    }
    if (!(inst.lambda.real() > inst.omega)) {
        throw std::invalid_argument(inst.name + ": need Re lambda > omega");
    }
    for (cplx l : inst.lambda_grid) {
        if (!(l.real() > inst.omega)) {
            throw std::invalid_argument(inst.name + ": lambda grid must lie in Re lambda > omega");
        }
    }
    const std::size_t dim = inst.limit.dim();
    if (inst.core.dim() != dim) {
        throw DimensionMismatch(dim, inst.core.dim());
    }
    InstanceValidation v;
    auto check = [&](const SemigroupFamily& f, const std::string& label) {
        if (f.dim() != dim) {
            throw DimensionMismatch(dim, f.dim());
        }
        const auto g = growth_bound_check(f, inst.M, inst.omega, inst.t_grid, inst.core.p());
        const auto& w = g.worst();
        if (w.margin < v.worst_margin) {
            v.worst_margin = w.margin;
            v.worst_family = label;
        }
        v.growth_ok = v.growth_ok && g.pass;
    };
    check(inst.limit, "limit");
    for (const auto& f : inst.sequence) {
        check(f.family, "n=" + std::to_string(f.n));
    }
    if (!v.growth_ok) {
        throw std::invalid_argument(inst.name + ": growth bound M e^{omega t} violated by " + v.worst_family);
    }
    return v;
}

struct ConditionResult
{
    Condition condition = Condition::A;
    Status status = Status::Inconclusive;
    ConvergenceReport report;
    /// Second measurement: A_n x_n -> Ax for (b), lambda-grid uniformity for (c).
    std::optional<ConvergenceReport> secondary;
    std::string note;
};

[[nodiscard]] inline ConditionResult check_condition_a(const TKInstance& inst)
{
    const auto ns = inst.ns();
    ConditionResult r;
    r.condition = Condition::A;
    r.report = measure_convergence(
        ns, [&](std::size_t n) { return inst.at(n).generator; }, inst.limit.generator, inst.mode, inst.core,
        inst.thresholds);
    r.status = status_of(r.report.verdict);
    r.note = "D(A_n) is the whole truncated space, so the core inclusion holds automatically";
    return r;
}

[[nodiscard]] inline ConditionResult check_condition_b(const TKInstance& inst)
{
    const auto ns = inst.ns();
    const auto idx = inst.core_indices();
    const auto& m = inst.core.members();
    const std::size_t dim = inst.limit.dim();
    auto witness = [&](std::size_t n, std::size_t j) -> SequenceVector {
        if (!inst.b_witnesses) {
            return m[idx[j]].vector;
        }
        auto x = (*inst.b_witnesses)(n, idx[j]);
        if (x.size() != dim) {
            throw DimensionMismatch(dim, x.size());
        }
        return x;
    };
    std::vector<SequenceVector> xs;
    std::vector<SequenceVector> axs;
    for (std::size_t j : idx) {
        xs.push_back(m[j].vector);
        axs.push_back(apply(inst.limit.generator, m[j].vector));
    }
    ConditionResult r;
    r.condition = Condition::B;
    r.report = measure_vector_convergence(ns, witness, xs, inst.mode, inst.core, inst.thresholds);
    r.secondary = measure_vector_convergence(
        ns, [&](std::size_t n, std::size_t j) { return apply(inst.at(n).generator, witness(n, j)); }, axs, inst.mode,
        inst.core, inst.thresholds);
    const Status s1 = status_of(r.report.verdict);
    const Status s2 = status_of(r.secondary->verdict);
    if (s1 == Status::Holds && s2 == Status::Holds) {
        r.status = Status::Holds;
    } else if (s1 == Status::Fails || s2 == Status::Fails) {
        r.status = Status::Fails;
    } else {
        r.status = Status::Inconclusive;
    }
    r.note = "witnesses: " + inst.witness_description + "; report = x_n -> x, secondary = A_n x_n -> A x";
    return r;
}

[[nodiscard]] inline ConditionResult check_condition_c(const TKInstance& inst)
{
    const auto ns = inst.ns();
    std::map<std::size_t, DenseOperator> resolvents;
    for (const auto& f : inst.sequence) {
        resolvents.emplace(f.n, resolvent_direct(f.family.generator, inst.lambda));
    }
    ConditionResult r;
    r.condition = Condition::C;
    r.report = measure_convergence(
        ns, [&](std::size_t n) { return resolvents.at(n); }, resolvent_direct(inst.limit.generator, inst.lambda),
        inst.mode, inst.core, inst.thresholds);
    r.status = status_of(r.report.verdict);
    r.secondary = measure_convergence_on_grid(
        ns, [&](std::size_t n, cplx l) { return resolvent_direct(inst.at(n).generator, l); },
        [&](cplx l) { return resolvent_direct(inst.limit.generator, l); }, inst.mode, inst.core, inst.lambda_grid,
        GridKind::Spectral, inst.thresholds);
    r.note = "verdict at the instance lambda; secondary = uniformity over the lambda grid (not part of the verdict)";
    return r;
}

[[nodiscard]] inline ConditionResult check_condition_d(const TKInstance& inst)
{
    const auto ns = inst.ns();
    std::vector<cplx> grid(inst.t_grid.begin(), inst.t_grid.end());
    ConditionResult r;
    r.condition = Condition::D;
    r.report = measure_convergence_on_grid(
        ns, [&](std::size_t n, cplx t) { return evaluate(inst.at(n), t.real()); },
        [&](cplx t) { return evaluate(inst.limit, t.real()); }, inst.mode, inst.core, grid, GridKind::Time,
        inst.thresholds);
    r.status = status_of(r.report.verdict);
    r.note = "sup over a " + std::to_string(grid.size()) + "-point time grid";
    return r;
}

enum class Implication
{
    Consistent,
    CounterexampleFound,
    Untested,
};

[[nodiscard]] inline std::string to_string(Implication i)
{
    switch (i) {
    case Implication::Consistent:
        return "consistent";
    case Implication::CounterexampleFound:
        return "counterexample-found";
    case Implication::Untested:
        return "untested";
    }
    return "?";
}

/// Quantitative form of (d) => (c) through the Laplace representation:
/// delta_c(n) <= delta_d(n) / (Re lambda - omega) + 2M e^{(omega - Re lambda) T} / (Re lambda - omega).
struct LaplaceBoundCheck
{
    bool applicable = false;
    bool holds = true;
    double worst_slack = kInfinity;
};

struct TKReport
{
    std::string instance;
    Topology mode = Topology::Weak;
    InstanceValidation validation;
    std::array<ConditionResult, 4> conditions;
    /// matrix[p][q] is the status of the implication p => q.
    std::array<std::array<Implication, 4>, 4> matrix{};
    LaplaceBoundCheck laplace_bound;
    std::string core_note;

    [[nodiscard]] const ConditionResult& operator[](Condition c) const
    {
        return conditions[static_cast<std::size_t>(c)];
    }

    [[nodiscard]] Implication implication(Condition p, Condition q) const
    {
        return matrix[static_cast<std::size_t>(p)][static_cast<std::size_t>(q)];
    }
};

[[nodiscard]] inline TKReport implication_matrix(const TKInstance& inst)
{
    TKReport rep;
    rep.instance = inst.name;
    rep.mode = inst.mode;
    rep.validation = validate(inst);
    rep.conditions = {check_condition_a(inst), check_condition_b(inst), check_condition_c(inst),
                      check_condition_d(inst)};
    rep.core_note = "bounded generators: the core collapses to the whole space; finite-support test vectors stand in "
                    "for it";
    for (Condition p : kConditions) {
        for (Condition q : kConditions) {
            auto& cell = rep.matrix[static_cast<std::size_t>(p)][static_cast<std::size_t>(q)];
            const Status sp = rep[p].status;
            const Status sq = rep[q].status;
            if (p == q) {
                cell = Implication::Consistent;
            } else if (sp == Status::Inconclusive || (sp == Status::Holds && sq == Status::Inconclusive)) {
                cell = Implication::Untested;
            } else if (sp == Status::Holds && sq == Status::Fails) {
                cell = Implication::CounterexampleFound;
            } else {
                cell = Implication::Consistent;
            }
        }
    }
    if (rep[Condition::D].status == Status::Holds) {
        const double a = inst.lambda.real() - inst.omega;
        const double t_end = inst.t_grid.back();
        const double tail = 2.0 * inst.M * std::exp(-a * t_end) / a;
        auto& lb = rep.laplace_bound;
        lb.applicable = true;
        const auto& dc = rep[Condition::C].report.samples;
        const auto& dd = rep[Condition::D].report.samples;
        for (std::size_t i = 0; i < dc.size(); ++i) {
            const double slack = dd[i].delta / a + tail - dc[i].delta;
            lb.worst_slack = std::min(lb.worst_slack, slack);
            lb.holds = lb.holds && slack >= 0.0;
        }
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Shipped instance suite
// ---------------------------------------------------------------------------

namespace detail {

inline TKInstance make_instance(std::string stem, Topology mode, SemigroupFamily limit, TestVectorSet core)
{
    TKInstance inst{.name = std::move(stem) + "/" + to_string(mode),
                    .mode = mode,
                    .sequence = {},
                    .limit = std::move(limit),
                    .core = std::move(core),
                    .M = 1.0,
                    .omega = 0.0,
                    .lambda = 1.0,
                    .lambda_grid = {1.0},
                    .t_grid = {0.0},
                    .b_witnesses = std::nullopt,
                    .witness_description = "default x_n = x",
                    .thresholds = {}};
    return inst;
}

} // namespace detail

struct SuiteConfig
{
    std::vector<std::size_t> n_grid{2, 4, 8, 16};
    std::size_t dim = 32;
    double p = 2.0;
    std::uint64_t seed = 20070501;
    std::vector<double> t_grid = uniform_grid(5.0, 101);
    std::vector<cplx> lambda_grid{1.0, 1.5, 2.0};
};

/// A_n = S_n - I with limit -I: generators converge weakly, semigroups do not.
[[nodiscard]] inline TKInstance swap_instance(const SuiteConfig& cfg, Topology mode)
{
    TKInstance inst = detail::make_instance("swap-minus-identity", mode, SemigroupFamily::scalar(-1.0, cfg.dim),
                                              TestVectorSet::default_set(cfg.dim, cfg.p, cfg.seed));
    for (std::size_t n : cfg.n_grid) {
        inst.sequence.push_back({n, SemigroupFamily::rescaled_swap(n, cfg.dim)});
    }
    inst.t_grid = cfg.t_grid;
    inst.lambda_grid = cfg.lambda_grid;
    return inst;
}

/// A_n = B_n cogenerated by V_n = (1 - 1/n) S_n, limit -I. Witnesses for (b)
/// are x_n = R(lambda, A_n)(lambda - A)x, the construction behind (c) => (b).
[[nodiscard]] inline TKInstance cogenerator_instance(const SuiteConfig& cfg, Topology mode)
{
    TKInstance inst = detail::make_instance("cogenerator", mode, SemigroupFamily::scalar(-1.0, cfg.dim),
                                              TestVectorSet::default_set(cfg.dim, cfg.p, cfg.seed));
    for (std::size_t n : cfg.n_grid) {
        if (n < 2) {
            continue; // V_1 = 0 gives B_1 = -I, the limit itself
        }
        inst.sequence.push_back(
            {n, SemigroupFamily::numeric(cayley_generator(contraction_v(n, cfg.dim)), 1.0, 0.0)});
    }
    inst.t_grid = cfg.t_grid;
    inst.lambda_grid = cfg.lambda_grid;
    auto shifted = std::make_shared<DenseOperator>(DenseOperator::scalar(cfg.dim, inst.lambda) -
                                                   inst.limit.generator);
    auto cache = std::make_shared<std::map<std::size_t, DenseOperator>>();
    for (const auto& f : inst.sequence) {
        cache->emplace(f.n, resolvent_direct(f.family.generator, inst.lambda) * *shifted);
    }
    auto members = std::make_shared<std::vector<TestVector>>(inst.core.members());
    inst.b_witnesses = [cache, members](std::size_t n, std::size_t j) {
        return apply(cache->at(n), (*members)[j].vector);
    };
    inst.witness_description = "x_n = R(lambda, A_n)(lambda - A) x";
    return inst;
}

/// A_n = -(1 + 1/n) I with limit -I: every condition holds in every mode.
[[nodiscard]] inline TKInstance scalar_instance(const SuiteConfig& cfg, Topology mode)
{
    const std::size_t dim = 16;
    TKInstance inst = detail::make_instance("scalar", mode, SemigroupFamily::scalar(-1.0, dim),
                                              TestVectorSet::default_set(dim, cfg.p, cfg.seed));
    for (std::size_t n = 10; n <= 10'000'000; n *= 10) {
        inst.sequence.push_back({n, SemigroupFamily::scalar(-(1.0 + 1.0 / static_cast<double>(n)), dim)});
    }
    inst.t_grid = cfg.t_grid;
    inst.lambda_grid = cfg.lambda_grid;
    return inst;
}

[[nodiscard]] inline std::vector<TKInstance> shipped_suite(const SuiteConfig& cfg = {})
{
    std::vector<TKInstance> suite;
    for (Topology mode : {Topology::Weak, Topology::Strong}) {
        suite.push_back(swap_instance(cfg, mode));
        suite.push_back(cogenerator_instance(cfg, mode));
        suite.push_back(scalar_instance(cfg, mode));
    }
    return suite;
}

struct AggregateCell
{
    Implication status = Implication::Untested;
    std::vector<std::string> counterexamples;
};

struct ExpectedImplication
{
    Condition from;
    Condition to;
    Implication status;
    /// Instance expected to witness a counterexample (empty for consistent).
    std::string witness;
};

/// Weak-mode pattern: (d) => (c) => (b) <= (a) hold, none of (a), (b), (c) implies (d).
[[nodiscard]] inline std::vector<ExpectedImplication> weak_mode_pattern()
{
    return {
        {Condition::D, Condition::C, Implication::Consistent, ""},
        {Condition::C, Condition::B, Implication::Consistent, ""},
        {Condition::A, Condition::B, Implication::Consistent, ""},
        {Condition::A, Condition::D, Implication::CounterexampleFound, "swap-minus-identity/weak"},
        {Condition::B, Condition::D, Implication::CounterexampleFound, "swap-minus-identity/weak"},
        {Condition::C, Condition::D, Implication::CounterexampleFound, "cogenerator/weak"},
    };
}

struct SuiteReport
{
    std::vector<TKReport> instances;
    /// Aggregated per mode: index 0 = weak, 1 = strong.
    std::array<std::array<std::array<AggregateCell, 4>, 4>, 2> aggregate{};
    bool weak_pattern_reproduced = false;
    bool strong_mode_consistent = false;
    bool mode_monotonicity = false;
    bool d_implies_c_quantitative = false;
    std::vector<std::string> findings;

    [[nodiscard]] bool passed() const
    {
        return weak_pattern_reproduced && strong_mode_consistent && mode_monotonicity && d_implies_c_quantitative;
    }
};

[[nodiscard]] inline std::size_t mode_index(Topology t)
{
    return t == Topology::Strong ? 1 : 0;
}

[[nodiscard]] inline SuiteReport aggregate_suite(std::vector<TKReport> reports)
{
    SuiteReport s;
    s.instances = std::move(reports);
    for (auto& per_mode : s.aggregate) {
        for (auto& row : per_mode) {
            for (auto& cell : row) {
                cell.status = Implication::Consistent;
            }
        }
    }
    for (const auto& r : s.instances) {
        auto& agg = s.aggregate[mode_index(r.mode)];
        for (Condition p : kConditions) {
            for (Condition q : kConditions) {
                auto& cell = agg[static_cast<std::size_t>(p)][static_cast<std::size_t>(q)];
                const auto st = r.implication(p, q);
                if (st == Implication::CounterexampleFound) {
                    cell.status = Implication::CounterexampleFound;
                    cell.counterexamples.push_back(r.instance);
                } else if (st == Implication::Untested && cell.status == Implication::Consistent) {
                    cell.status = Implication::Untested;
                }
            }
        }
    }

    s.weak_pattern_reproduced = true;
    const auto& weak = s.aggregate[0];
    for (const auto& e : weak_mode_pattern()) {
        const auto& cell = weak[static_cast<std::size_t>(e.from)][static_cast<std::size_t>(e.to)];
        std::string claim = std::string("(") + label(e.from) + ") => (" + label(e.to) + ")";
        bool ok = cell.status == e.status;
        if (ok && !e.witness.empty()) {
            ok = std::find(cell.counterexamples.begin(), cell.counterexamples.end(), e.witness) !=
                 cell.counterexamples.end();
        }
        s.findings.push_back(claim + ": " + to_string(cell.status) +
                             (e.witness.empty() ? std::string() : " (expected witness " + e.witness + ")") +
                             (ok ? "" : " MISMATCH"));
        s.weak_pattern_reproduced = s.weak_pattern_reproduced && ok;
    }

    s.strong_mode_consistent = true;
    const auto& strong = s.aggregate[1];
    for (Condition p : kConditions) {
        for (Condition q : kConditions) {
            if (p == Condition::B && q == Condition::A) {
                continue; // (b) does not imply (a) even in the strong topology
            }
            const auto st = strong[static_cast<std::size_t>(p)][static_cast<std::size_t>(q)].status;
            if (st != Implication::Consistent) {
                s.strong_mode_consistent = false;
                s.findings.push_back(std::string("strong mode: (") + label(p) + ") => (" + label(q) + ") is " +
                                     to_string(st));
            }
        }
    }

    s.mode_monotonicity = true;
    for (const auto& r : s.instances) {
        if (r.mode != Topology::Strong) {
            continue;
        }
        const auto stem = r.instance.substr(0, r.instance.find('/'));
        for (const auto& w : s.instances) {
            if (w.mode != Topology::Weak || w.instance.substr(0, w.instance.find('/')) != stem) {
                continue;
            }
            for (Condition c : kConditions) {
                if (r[c].status == Status::Holds && w[c].status != Status::Holds) {
                    s.mode_monotonicity = false;
                    s.findings.push_back(stem + ": (" + label(c) + ") holds strongly but not weakly");
                }
            }
        }
    }

    s.d_implies_c_quantitative = true;
    for (const auto& r : s.instances) {
        if (r.laplace_bound.applicable && !r.laplace_bound.holds) {
            s.d_implies_c_quantitative = false;
            s.findings.push_back(r.instance +
                                 ": Laplace bound delta_c <= delta_d / (Re lambda - omega) + tail violated");
        }
    }
    return s;
}

[[nodiscard]] inline SuiteReport run_suite(const std::vector<TKInstance>& suite)
{
    std::vector<TKReport> reports;
    for (const auto& inst : suite) {
        reports.push_back(implication_matrix(inst));
    }
    return aggregate_suite(std::move(reports));
}

} // namespace tklab
