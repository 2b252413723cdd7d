#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "tklab/semigroup.hpp"

using tklab::cplx;
using tklab::DenseOperator;
using tklab::SemigroupFamily;

TEST(Semigroup, ClosedFormSwapMatchesOracleExponential)
{
    for (std::size_t n : {1u, 4u}) {
        const auto fam = SemigroupFamily::swap(n, 2 * n + 3);
        for (double t : {0.0, 0.3, 1.0, 2.5}) {
            const auto want = oracle::expm(oracle::from(fam.generator), t);
            EXPECT_LT(oracle::max_diff(want, tklab::evaluate(fam, t)) / std::exp(t), 1e-14);
        }
    }
}

TEST(Semigroup, NumericAndClosedFormAgree)
{
    const auto closed = SemigroupFamily::swap(5, 12);
    const auto numeric = SemigroupFamily::numeric(closed.generator, 1.0, 1.0);
    for (double t : {0.1, 1.0, 4.0}) {
        const auto a = tklab::evaluate(closed, t);
        EXPECT_LT(tklab::max_abs_entry(a - tklab::evaluate(numeric, t)) / std::exp(t), 1e-12);
    }
}

TEST(Semigroup, RescaledSwapIsDampedSwapSemigroup)
{
    const auto swap = SemigroupFamily::swap(3, 8);
    const auto rescaled = SemigroupFamily::rescaled_swap(3, 8);
    for (double t : {0.0, 0.5, 3.0}) {
        const auto want = std::exp(-t) * tklab::evaluate(swap, t);
        EXPECT_LT(tklab::max_abs_entry(tklab::evaluate(rescaled, t) - want), 1e-15);
    }
    const auto numeric = SemigroupFamily::numeric(rescaled.generator, 1.0, 0.0);
    EXPECT_LT(tklab::max_abs_entry(tklab::evaluate(numeric, 2.0) - tklab::evaluate(rescaled, 2.0)), 1e-12);
}

TEST(Semigroup, ScalarFamily)
{
    const auto fam = SemigroupFamily::scalar(cplx(-1.0, 2.0), 3);
    const auto t1 = tklab::evaluate(fam, 1.5);
    EXPECT_EQ(t1, DenseOperator::scalar(3, std::exp(cplx(-1.0, 2.0) * 1.5)));
    EXPECT_DOUBLE_EQ(fam.omega, -1.0);
    EXPECT_THROW((void)tklab::evaluate(fam, -0.1), std::invalid_argument);
}

TEST(Semigroup, LawHoldsForGeneratedFamilies)
{
    const auto grid = tklab::uniform_grid(2.0, 5);
    EXPECT_LT(tklab::max_law_residual(SemigroupFamily::swap(4, 8), grid), 1e-12 * std::exp(4.0));
    EXPECT_LT(tklab::max_law_residual(SemigroupFamily::rescaled_swap(4, 8), grid), 1e-13);
    const auto numeric = SemigroupFamily::numeric(tklab::rescaled_generator(2, 6));
    EXPECT_LT(tklab::max_law_residual(numeric, grid), 1e-12);
}

TEST(Semigroup, CoshSquaredFamilyViolatesLaw)
{
    // t -> cosh(t) I is not a semigroup; the defect at s = t = 1 is sinh(1)^2.
    const auto e = tklab::OperatorFamilyLimit::scalar_function("cosh", 4, [](double t) { return std::cosh(t); });
    const double want = std::sinh(1.0) * std::sinh(1.0);
    EXPECT_NEAR(tklab::semigroup_law_residual(e, 1.0, 1.0), want, 1e-12);
    EXPECT_NEAR(want, 1.3810978455418157, 1e-15);
    EXPECT_EQ(tklab::semigroup_law_residual(e, 0.0, 0.0), 0.0);
    EXPECT_THROW((void)tklab::semigroup_law_residual(e, -1.0, 1.0), std::invalid_argument);
}

TEST(Semigroup, FromFamilyWrapsEvaluation)
{
    const auto fam = SemigroupFamily::swap(2, 4);
    const auto e = tklab::OperatorFamilyLimit::from_family(fam);
    EXPECT_EQ(e(0.7), tklab::evaluate(fam, 0.7));
    EXPECT_LT(tklab::semigroup_law_residual(e, 0.4, 0.9), 1e-13);
}

TEST(GrowthBound, SwapBoundHoldsAndTightens)
{
    const auto grid = tklab::uniform_grid(3.0, 13);
    for (double p : {1.0, 2.0, tklab::kInfinity}) {
        const auto fam = SemigroupFamily::swap(3, 8);
        const auto ok = tklab::growth_bound_check(fam, 1.0, 1.0, grid, p);
        EXPECT_TRUE(ok.pass) << "p = " << p;
        EXPECT_FALSE(ok.lower_bound);
        EXPECT_NEAR(ok.worst().margin, 0.0, 1e-9 * std::exp(3.0));
        EXPECT_FALSE(tklab::growth_bound_check(fam, 1.0, 0.9, grid, p).pass);
    }
}

TEST(GrowthBound, RescaledSwapContractiveButSwapNot)
{
    const auto grid = tklab::uniform_grid(5.0, 21);
    EXPECT_TRUE(tklab::growth_bound_check(SemigroupFamily::rescaled_swap(4, 8), 1.0, 0.0, grid).pass);
    EXPECT_FALSE(tklab::growth_bound_check(SemigroupFamily::swap(4, 8), 1.0, 0.0, grid).pass);
}

TEST(GrowthBound, SampledExponentFlagsLowerBound)
{
    const auto r = tklab::growth_bound_check(SemigroupFamily::rescaled_swap(2, 4), 1.0, 0.0, {0.0, 1.0}, 3.0);
    EXPECT_TRUE(r.lower_bound);
    EXPECT_TRUE(r.pass);
    EXPECT_THROW((void)tklab::growth_bound_check(SemigroupFamily::swap(1, 2), 1.0, 1.0, {}), std::invalid_argument);
}

TEST(Grid, UniformGrid)
{
    const auto g = tklab::uniform_grid(5.0, 101);
    EXPECT_EQ(g.size(), 101u);
    EXPECT_EQ(g.front(), 0.0);
    EXPECT_EQ(g.back(), 5.0);
    EXPECT_EQ(tklab::uniform_grid(2.0, 1), std::vector<double>{0.0});
    EXPECT_THROW((void)tklab::uniform_grid(1.0, 0), std::invalid_argument);
}
