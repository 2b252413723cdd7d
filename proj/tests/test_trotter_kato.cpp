#include <gtest/gtest.h>

#include <cmath>

#include "tklab/trotter_kato.hpp"

using tklab::Condition;
using tklab::Implication;
using tklab::SemigroupFamily;
using tklab::SequenceVector;
using tklab::Status;
using tklab::Topology;

namespace {

const tklab::SuiteReport& shipped()
{
    static const auto report = tklab::run_suite(tklab::shipped_suite());
    return report;
}

const tklab::TKReport& instance(const std::string& name)
{
    for (const auto& r : shipped().instances) {
        if (r.instance == name) {
            return r;
        }
    }
    throw std::out_of_range(name);
}

std::string statuses(const tklab::TKReport& r)
{
    std::string s;
    for (Condition c : tklab::kConditions) {
        s += tklab::to_string(r[c].status).substr(0, 1);
    }
    return s;
}

} // namespace

TEST(ShippedSuite, ConditionStatusesPerInstance)
{
    EXPECT_EQ(statuses(instance("swap-minus-identity/weak")), "hhff");
    EXPECT_EQ(statuses(instance("cogenerator/weak")), "fhhf");
    EXPECT_EQ(statuses(instance("scalar/weak")), "hhhh");
    EXPECT_EQ(statuses(instance("swap-minus-identity/strong")), "ffff");
    EXPECT_EQ(statuses(instance("cogenerator/strong")), "ffff");
    EXPECT_EQ(statuses(instance("scalar/strong")), "hhhh");
}

TEST(ShippedSuite, ExactVerdictsOnFiniteSupportPairs)
{
    const auto& swap = instance("swap-minus-identity/weak");
    EXPECT_EQ(swap[Condition::A].report.verdict, (tklab::Verdict{tklab::Verdict::Kind::ExactBeyond, 8}));
    const auto& cog = instance("cogenerator/weak");
    EXPECT_EQ(cog[Condition::C].report.verdict, (tklab::Verdict{tklab::Verdict::Kind::ExactBeyond, 8}));
}

TEST(ShippedSuite, WeakPatternStrongConsistencyAndBounds)
{
    const auto& s = shipped();
    EXPECT_TRUE(s.weak_pattern_reproduced);
    EXPECT_TRUE(s.strong_mode_consistent);
    EXPECT_TRUE(s.mode_monotonicity);
    EXPECT_TRUE(s.d_implies_c_quantitative);
    EXPECT_TRUE(s.passed());
    const auto& weak = s.aggregate[tklab::mode_index(Topology::Weak)];
    const auto cell = [&](Condition p, Condition q) {
        return weak[static_cast<std::size_t>(p)][static_cast<std::size_t>(q)];
    };
    EXPECT_EQ(cell(Condition::D, Condition::C).status, Implication::Consistent);
    EXPECT_EQ(cell(Condition::C, Condition::B).status, Implication::Consistent);
    EXPECT_EQ(cell(Condition::A, Condition::B).status, Implication::Consistent);
    EXPECT_EQ(cell(Condition::A, Condition::D).counterexamples, std::vector<std::string>{"swap-minus-identity/weak"});
    EXPECT_EQ(cell(Condition::C, Condition::D).counterexamples, std::vector<std::string>{"cogenerator/weak"});
    EXPECT_EQ(cell(Condition::B, Condition::D).counterexamples,
              (std::vector<std::string>{"swap-minus-identity/weak", "cogenerator/weak"}));
}

TEST(ShippedSuite, LaplaceBoundAppliesWhereSemigroupsConverge)
{
    for (const auto& r : shipped().instances) {
        const bool d_holds = r[Condition::D].status == Status::Holds;
        EXPECT_EQ(r.laplace_bound.applicable, d_holds) << r.instance;
        if (d_holds) {
            EXPECT_TRUE(r.laplace_bound.holds) << r.instance;
            EXPECT_GE(r.laplace_bound.worst_slack, 0.0);
        }
    }
}

TEST(ShippedSuite, ImplicationCellRules)
{
    for (const auto& r : shipped().instances) {
        for (Condition p : tklab::kConditions) {
            for (Condition q : tklab::kConditions) {
                const auto sp = r[p].status;
                const auto sq = r[q].status;
                const auto cell = r.implication(p, q);
                if (p != q && sp == Status::Holds && sq == Status::Fails) {
                    EXPECT_EQ(cell, Implication::CounterexampleFound);
                } else if (sp == Status::Fails || p == q) {
                    EXPECT_EQ(cell, Implication::Consistent);
                }
            }
        }
    }
}

TEST(Instance, UnitTimeSemigroupGap)
{
    auto inst = tklab::swap_instance({}, Topology::Weak);
    inst.t_grid = {1.0};
    const auto d = tklab::check_condition_d(inst);
    const double gap = std::exp(-1.0) * (std::cosh(1.0) - 1.0);
    EXPECT_NEAR(gap, 0.19978820044686396, 1e-16);
    for (const auto& s : d.report.samples) {
        if (s.n >= 8) {
            EXPECT_NEAR(s.delta, gap, 1e-15) << "n " << s.n;
        }
    }
}

TEST(Instance, DefaultWitnessesInheritGeneratorConvergence)
{
    const auto inst = tklab::swap_instance({}, Topology::Weak);
    EXPECT_FALSE(inst.b_witnesses.has_value());
    EXPECT_EQ(tklab::check_condition_a(inst).status, Status::Holds);
    const auto b = tklab::check_condition_b(inst);
    EXPECT_EQ(b.status, Status::Holds);
    for (const auto& s : b.report.samples) {
        EXPECT_EQ(s.delta, 0.0);
    }
}

TEST(Instance, ShiftedWitnessesBreakConditionB)
{
    auto inst = tklab::swap_instance({}, Topology::Weak);
    const auto members = inst.core.members();
    inst.b_witnesses = [members](std::size_t, std::size_t j) { return 2.0 * members[j].vector; };
    inst.witness_description = "x_n = 2x";
    EXPECT_EQ(tklab::check_condition_b(inst).status, Status::Fails);
}

TEST(Instance, WitnessDimensionChecked)
{
    auto inst = tklab::swap_instance({}, Topology::Weak);
    inst.b_witnesses = [](std::size_t, std::size_t) { return SequenceVector::zeros(7); };
    EXPECT_THROW((void)tklab::check_condition_b(inst), tklab::DimensionMismatch);
}

TEST(Instance, CogeneratorWitnessesAreReproducible)
{
    const auto a = tklab::cogenerator_instance({}, Topology::Weak);
    const auto b = tklab::cogenerator_instance({}, Topology::Weak);
    ASSERT_TRUE(a.b_witnesses && b.b_witnesses);
    for (std::size_t n : a.ns()) {
        EXPECT_EQ((*a.b_witnesses)(n, 0), (*b.b_witnesses)(n, 0));
    }
    EXPECT_EQ(a.ns(), (std::vector<std::size_t>{2, 4, 8, 16}));
}

TEST(Instance, ValidationRejectsBadInstances)
{
    auto inst = tklab::swap_instance({}, Topology::Weak);
    EXPECT_TRUE(tklab::validate(inst).growth_ok);

    auto low_lambda = inst;
    low_lambda.lambda = 0.0;
    EXPECT_THROW((void)tklab::validate(low_lambda), std::invalid_argument);

    auto bad_grid = inst;
    bad_grid.lambda_grid = {1.0, -1.0};
    EXPECT_THROW((void)tklab::validate(bad_grid), std::invalid_argument);

    auto growth = inst;
    growth.sequence.push_back({32, SemigroupFamily::swap(16, 32)});
    EXPECT_THROW((void)tklab::validate(growth), std::invalid_argument);

    auto dims = inst;
    dims.sequence.push_back({64, SemigroupFamily::rescaled_swap(2, 8)});
    EXPECT_THROW((void)tklab::validate(dims), tklab::DimensionMismatch);

    auto empty = inst;
    empty.sequence.clear();
    EXPECT_THROW((void)tklab::validate(empty), std::invalid_argument);
    EXPECT_THROW((void)inst.at(3), std::out_of_range);
}

TEST(Instance, ScalarInstanceConvergesAtRateOneOverN)
{
    const auto inst = tklab::scalar_instance({}, Topology::Strong);
    const auto c = tklab::check_condition_c(inst);
    ASSERT_EQ(c.report.samples.size(), 7u);
    for (const auto& s : c.report.samples) {
        const double n = static_cast<double>(s.n);
        // R(1, -(1 + 1/n)) - R(1, -1) = 1/(2 + 1/n) - 1/2.
        EXPECT_NEAR(s.delta, 0.5 - 1.0 / (2.0 + 1.0 / n), 1e-15);
    }
    EXPECT_EQ(c.status, Status::Holds);
}

TEST(Labels, ConditionsAndStatuses)
{
    EXPECT_EQ(tklab::label(Condition::A), 'a');
    EXPECT_EQ(tklab::label(Condition::D), 'd');
    EXPECT_EQ(tklab::to_string(Implication::CounterexampleFound), "counterexample-found");
    EXPECT_EQ(tklab::status_of({tklab::Verdict::Kind::Inconclusive, 0}), Status::Inconclusive);
}
