#include <gtest/gtest.h>

#include <cmath>

#include "tklab/experiments.hpp"
#include "tklab/report.hpp"

using tklab::cplx;
using tklab::ConfigError;
using tklab::ExperimentConfig;
using tklab::ExperimentReport;
using tklab::Json;

namespace {

const ExperimentReport& swap_report()
{
    static const auto r = tklab::run_swap_semigroup_experiment(tklab::swap_semigroup_defaults());
    return r;
}

const ExperimentReport& cogenerator_report()
{
    static const auto r = tklab::run_cogenerator_experiment(tklab::cogenerator_defaults());
    return r;
}

const ExperimentReport& representation_report()
{
    static const auto r = tklab::run_representation_experiment(tklab::representation_defaults());
    return r;
}

std::string failing(const ExperimentReport& r)
{
    std::string s;
    for (const auto& c : r.claims) {
        if (!c.pass) {
            s += c.id + " ";
        }
    }
    return s;
}

std::string field_of(const ExperimentConfig& cfg)
{
    try {
        cfg.validate();
    } catch (const ConfigError& e) {
        return e.field();
    }
    return "";
}

} // namespace

TEST(SwapExperiment, DefaultsPass)
{
    EXPECT_TRUE(swap_report().passed()) << failing(swap_report());
    EXPECT_EQ(swap_report().experiment, "example-2-1");
}

TEST(SwapExperiment, LawFailureMatchesClosedForm)
{
    const auto& c = swap_report().claim("limit-law-failure");
    EXPECT_TRUE(c.failure_expected);
    EXPECT_NEAR(c.measured.get<double>(), 1.3810978455418157, 1e-12);
    EXPECT_LE(swap_report().claim("generated-families-law").measured.get<double>(), 1e-8);
}

TEST(SwapExperiment, ExactWeakLimits)
{
    const auto& r = swap_report();
    EXPECT_EQ(r.claim("generator-weak-limit").basis, tklab::Basis::ClosedForm);
    EXPECT_TRUE(r.claim("generator-weak-limit").pass);
    EXPECT_TRUE(r.claim("semigroup-weak-limit").pass);
    EXPECT_NEAR(r.claim("rescaled-gap-unit-time").measured.get<double>(), 0.19978820044686396, 5e-7);
}

TEST(SwapExperiment, TrivialTimeGridStillPasses)
{
    auto cfg = tklab::swap_semigroup_defaults();
    cfg.t_grid = {0.0};
    const auto r = tklab::run_swap_semigroup_experiment(cfg);
    EXPECT_TRUE(r.passed()) << failing(r);
    EXPECT_FALSE(r.claim("limit-law-failure-grid").note.empty());
}

TEST(SwapExperiment, OtherExponents)
{
    for (double p : {1.0, tklab::kInfinity}) {
        auto cfg = tklab::swap_semigroup_defaults();
        cfg.p = p;
        cfg.n_grid = {2, 4, 8};
        const auto r = tklab::run_swap_semigroup_experiment(cfg);
        EXPECT_TRUE(r.passed()) << "p " << p << ": " << failing(r);
    }
}

TEST(CogeneratorExperiment, DefaultsPass)
{
    EXPECT_TRUE(cogenerator_report().passed()) << failing(cogenerator_report());
}

TEST(CogeneratorExperiment, PairingsFollowClosedForm)
{
    const auto& m = cogenerator_report().claim("limit-pairing-contradiction").measured;
    for (const auto& row : m["pairings"]) {
        const double n = row["n"].get<double>();
        const double c = 1.0 - 1.0 / n;
        EXPECT_NEAR(row["pairing"].get<double>(), 0.25 * (1.0 + c * c), 1e-12);
        EXPECT_EQ(row["gap_at_least_0.2"].get<bool>(), c * c / 4.0 >= 0.2);
    }
}

TEST(CogeneratorExperiment, LambdaSweep)
{
    auto cfg = tklab::cogenerator_defaults();
    cfg.lambda_grid = {1.0, 1.5, 2.0};
    const auto r = tklab::run_cogenerator_experiment(cfg);
    EXPECT_TRUE(r.passed()) << failing(r);
    EXPECT_FALSE(r.claim("lambda-uniformity[1]").failure_expected);
    EXPECT_TRUE(r.claim("lambda-uniformity[1.5]").failure_expected);
    const auto& two = r.claim("lambda-uniformity[2]").measured;
    EXPECT_DOUBLE_EQ(two["closed_form_weak_limit"].get<double>(), 0.25);
    EXPECT_DOUBLE_EQ(two["limit_resolvent"].get<double>(), 1.0 / 3.0);
}

TEST(CogeneratorExperiment, QuadratureRefinementKeepsVerdicts)
{
    auto cfg = tklab::cogenerator_defaults();
    cfg.quad_nodes = 512;
    const auto r = tklab::run_cogenerator_experiment(cfg);
    ASSERT_EQ(r.claims.size(), cogenerator_report().claims.size());
    for (std::size_t i = 0; i < r.claims.size(); ++i) {
        EXPECT_EQ(r.claims[i].pass, cogenerator_report().claims[i].pass) << r.claims[i].id;
    }
}

TEST(RepresentationExperiment, DefaultsPass)
{
    EXPECT_TRUE(representation_report().passed()) << failing(representation_report());
    const auto& three = representation_report().claim("three-route-agreement");
    EXPECT_LE(three.measured["max_pairwise_gap"].get<double>(), 1e-6);
    EXPECT_LE(representation_report().claim("dunford-vs-exponential").measured["max_gap"].get<double>(), 1e-8);
}

TEST(RepresentationExperiment, CogeneratorNormsGrowLinearly)
{
    const auto& c = representation_report().claim("cogenerator-norm-growth");
    for (const auto& row : c.measured) {
        if (row.contains("n")) {
            EXPECT_NEAR(row["norm"].get<double>(), 2.0 * row["n"].get<double>() - 1.0, 1e-6);
        }
    }
}

TEST(Config, ValidationNamesTheField)
{
    auto cfg = tklab::swap_semigroup_defaults();
    EXPECT_EQ(field_of(cfg), "");
    auto c1 = cfg;
    c1.n_grid = {0, 4};
    EXPECT_EQ(field_of(c1), "n_grid");
    auto c2 = cfg;
    c2.n_grid = {4, 2};
    EXPECT_EQ(field_of(c2), "n_grid");
    auto c3 = cfg;
    c3.dim = 8;
    EXPECT_EQ(field_of(c3), "D");
    auto c4 = cfg;
    c4.t_grid = {1.0, 0.5};
    EXPECT_EQ(field_of(c4), "t_grid");
    auto c5 = cfg;
    c5.lambda_grid = {cplx(-1.0, 0.0)};
    EXPECT_EQ(field_of(c5), "lambda_grid");
    auto c6 = cfg;
    c6.p = 0.5;
    EXPECT_EQ(field_of(c6), "p");
    auto c7 = cfg;
    c7.quad_nodes = 8;
    EXPECT_EQ(field_of(c7), "quad_nodes");
    auto c8 = cfg;
    c8.contour_nodes = 10;
    EXPECT_EQ(field_of(c8), "contour_nodes");
    auto c9 = cfg;
    c9.tolerances.law = 0.0;
    EXPECT_EQ(field_of(c9), "tolerances");
    EXPECT_THROW((void)tklab::run_swap_semigroup_experiment(c3), ConfigError);
}

TEST(Config, DimensionDefaultsToTwiceLargestN)
{
    auto cfg = tklab::cogenerator_defaults();
    EXPECT_EQ(cfg.resolved_dim(), 32u);
    cfg.dim = 40;
    EXPECT_EQ(cfg.resolved_dim(), 40u);
}

TEST(Config, JsonRoundTrip)
{
    auto cfg = tklab::representation_defaults();
    cfg.p = tklab::kInfinity;
    cfg.seed = 99;
    const Json j = tklab::to_json(cfg);
    EXPECT_EQ(j["p"], "inf");
    const auto back = tklab::config_from_json(j, ExperimentConfig{});
    EXPECT_EQ(tklab::to_json(back).dump(), j.dump());
}

TEST(Config, JsonFieldForms)
{
    const auto j = Json::parse(R"({"t_grid": {"t_max": 2, "points": 5}, "lambda_grid": [1, [1, 2]], "p": 3})");
    const auto cfg = tklab::config_from_json(j, tklab::swap_semigroup_defaults());
    EXPECT_EQ(cfg.t_grid, (std::vector<double>{0.0, 0.5, 1.0, 1.5, 2.0}));
    EXPECT_EQ(cfg.lambda_grid, (std::vector<cplx>{1.0, cplx(1.0, 2.0)}));
    EXPECT_EQ(cfg.p, 3.0);
    EXPECT_EQ(cfg.name, "example-2-1");
}

TEST(Config, JsonRejectsUnknownAndMalformedFields)
{
    auto field = [](const char* text) {
        try {
            (void)tklab::config_from_json(Json::parse(text), ExperimentConfig{});
        } catch (const ConfigError& e) {
            return e.field();
        }
        return std::string();
    };
    EXPECT_EQ(field(R"({"nn_grid": [2]})"), "nn_grid");
    EXPECT_EQ(field(R"({"n_grid": [2, -1]})"), "n_grid");
    EXPECT_EQ(field(R"({"seed": 1.5})"), "seed");
    EXPECT_EQ(field(R"({"t_grid": {"t_max": 2}})"), "t_grid");
    EXPECT_EQ(field(R"({"lambda_grid": [[1, 2, 3]]})"), "lambda_grid");
    EXPECT_EQ(field(R"({"tolerances": {"loose": 1}})"), "tolerances.loose");
    EXPECT_EQ(field(R"([1, 2])"), "<root>");
}

TEST(Reports, SerializationIsDeterministic)
{
    auto cfg = tklab::swap_semigroup_defaults();
    cfg.n_grid = {2, 4, 8};
    cfg.seed = 11;
    const auto a = tklab::to_json(tklab::run_swap_semigroup_experiment(cfg)).dump(2);
    const auto b = tklab::to_json(tklab::run_swap_semigroup_experiment(cfg)).dump(2);
    EXPECT_EQ(a, b);
    const Json parsed = Json::parse(a);
    EXPECT_EQ(parsed["schema"], tklab::kSchemaVersion);
    EXPECT_EQ(parsed.dump(2), a);
}

TEST(Reports, ObserverSeesEveryRow)
{
    std::size_t rows = 0;
    auto cfg = tklab::swap_semigroup_defaults();
    cfg.n_grid = {2, 4, 8};
    const auto r = tklab::run_swap_semigroup_experiment(cfg, [&](const tklab::Claim&, double s) {
        ++rows;
        EXPECT_GE(s, 0.0);
    });
    EXPECT_EQ(rows, r.claims.size());
}

TEST(Reports, CsvLayout)
{
    std::ostringstream os;
    tklab::write_csv(os, swap_report());
    std::string line;
    std::istringstream is(os.str());
    std::getline(is, line);
    EXPECT_EQ(line, "id,basis,failure_expected,pass,measured,expected");
    std::size_t count = 0;
    while (std::getline(is, line)) {
        ++count;
    }
    EXPECT_EQ(count, swap_report().claims.size());
    EXPECT_EQ(tklab::csv_quote("a,b\"c"), "\"a,b\"\"c\"");
    EXPECT_EQ(tklab::format_double(0.1), "0.10000000000000001");
}
