#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "tklab/cli.hpp"

using tklab::cplx;
using tklab::Json;

namespace {

struct Run
{
    int code = -1;
    std::string out;
    std::string err;
};

Run run(std::vector<std::string> args)
{
    args.insert(args.begin(), "tklab");
    std::vector<const char*> argv;
    for (const auto& a : args) {
        argv.push_back(a.c_str());
    }
    std::ostringstream out;
    std::ostringstream err;
    Run r;
    r.code = tklab::run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
    r.out = out.str();
    r.err = err.str();
    return r;
}

std::vector<std::string> lines(const std::string& text)
{
    std::vector<std::string> v;
    std::istringstream is(text);
    std::string line;
    while (std::getline(is, line)) {
        v.push_back(line);
    }
    return v;
}

} // namespace

TEST(Parsing, ComplexNumbers)
{
    using tklab::cli::parse_complex;
    EXPECT_EQ(parse_complex("2", "f"), cplx(2.0));
    EXPECT_EQ(parse_complex("1+1i", "f"), cplx(1.0, 1.0));
    EXPECT_EQ(parse_complex("2-0.5i", "f"), cplx(2.0, -0.5));
    EXPECT_EQ(parse_complex("3i", "f"), cplx(0.0, 3.0));
    EXPECT_EQ(parse_complex("-i", "f"), cplx(0.0, -1.0));
    EXPECT_EQ(parse_complex("1e-3+2i", "f"), cplx(1e-3, 2.0));
    EXPECT_THROW((void)parse_complex("", "f"), tklab::ConfigError);
    EXPECT_THROW((void)parse_complex("1+xi", "f"), tklab::ConfigError);
}

TEST(Parsing, RealsAndGrids)
{
    using tklab::cli::parse_n_grid;
    EXPECT_TRUE(std::isinf(tklab::cli::parse_real("inf", "p")));
    EXPECT_THROW((void)tklab::cli::parse_real("2x", "p"), tklab::ConfigError);
    EXPECT_EQ(parse_n_grid("2:5", "n"), (std::vector<std::size_t>{2, 3, 4, 5}));
    EXPECT_EQ(parse_n_grid("1,8,16", "n"), (std::vector<std::size_t>{1, 8, 16}));
    EXPECT_THROW((void)parse_n_grid("5:2", "n"), tklab::ConfigError);
    EXPECT_THROW((void)parse_n_grid("0,4", "n"), tklab::ConfigError);
    EXPECT_THROW((void)parse_n_grid("", "n"), tklab::ConfigError);
}

TEST(Cli, HelpExitsZero)
{
    const auto r = run({"--help"});
    EXPECT_EQ(r.code, 0);
    EXPECT_NE(r.out.find("tk-matrix"), std::string::npos);
}

TEST(Cli, UsageErrorsExitTwo)
{
    EXPECT_EQ(run({}).code, 2);
    EXPECT_EQ(run({"example-9"}).code, 2);
    EXPECT_EQ(run({"example-2-1", "--output", "xml"}).code, 2);
    const auto bad = run({"example-2-1", "--n-grid", "0,4"});
    EXPECT_EQ(bad.code, 2);
    EXPECT_NE(bad.err.find("n_grid"), std::string::npos);
    const auto small = run({"example-2-3", "--dim", "8"});
    EXPECT_EQ(small.code, 2);
    EXPECT_NE(small.err.find("'D'"), std::string::npos);
    EXPECT_EQ(run({"example-2-1", "--config", "/nonexistent/config.json"}).code, 2);
    EXPECT_EQ(run({"converge", "--family", "cayley-resolvent", "--n-grid", "1:4"}).code, 2);
}

TEST(Cli, SwapExperimentJsonRoundTrips)
{
    const auto r = run({"example-2-1", "--n-grid", "2,4,8", "--t-points", "21"});
    EXPECT_EQ(r.code, 0) << r.err;
    const Json j = Json::parse(r.out);
    EXPECT_EQ(j["schema"], 1);
    EXPECT_EQ(j["experiment"], "example-2-1");
    EXPECT_EQ(j["config"]["D"], 16);
    EXPECT_EQ(j["config"]["t_grid"].size(), 21u);
    EXPECT_TRUE(j["passed"].get<bool>());
    EXPECT_EQ(j.dump(2) + "\n", r.out);
}

TEST(Cli, FlagsOverrideConfigFile)
{
    const auto path = std::filesystem::temp_directory_path() / "tklab_cli_test_config.json";
    {
        std::ofstream f(path);
        f << R"({"n_grid": [2, 4], "seed": 5, "p": 1})";
    }
    const auto r = run({"example-2-1", "--config", path.string(), "--seed", "9", "--t-points", "11"});
    std::filesystem::remove(path);
    ASSERT_EQ(r.code, 0) << r.err;
    const Json j = Json::parse(r.out);
    EXPECT_EQ(j["config"]["n_grid"], Json::array({2, 4}));
    EXPECT_EQ(j["config"]["seed"], 9);
    EXPECT_EQ(j["config"]["p"], 1.0);
}

TEST(Cli, ExperimentCsv)
{
    const auto r = run({"example-2-1", "--n-grid", "2,4,8", "--t-points", "11", "--output", "csv"});
    EXPECT_EQ(r.code, 0) << r.err;
    const auto l = lines(r.out);
    ASSERT_FALSE(l.empty());
    EXPECT_EQ(l.front(), "id,basis,failure_expected,pass,measured,expected");
}

TEST(Cli, ConvergeStrongSwapCsv)
{
    const auto r = run({"converge", "--family", "block-swap", "--topology", "strong"});
    EXPECT_EQ(r.code, 0) << r.err;
    const auto l = lines(r.out);
    ASSERT_EQ(l.size(), 16u);
    EXPECT_EQ(l.front(), "n,grid_param,topology,delta,verdict");
    EXPECT_EQ(l[1], "2,,strong,1,no-convergence");
    EXPECT_NE(r.err.find("no-convergence"), std::string::npos);
}

TEST(Cli, ConvergeWeakJsonAndScalarFamily)
{
    const auto weak =
        run({"converge", "--topology", "weak", "--output", "json", "--n-grid", "1:12", "--dim", "24"});
    ASSERT_EQ(weak.code, 0) << weak.err;
    const Json j = Json::parse(weak.out);
    EXPECT_EQ(j["report"]["verdict"], "exact-beyond(8)");
    const auto scalar =
        run({"converge", "--family", "scalar", "--topology", "norm", "--n-grid", "10,1000,100000,10000000"});
    EXPECT_EQ(scalar.code, 0) << scalar.err;
    EXPECT_NE(scalar.err.find("converges-to-limit"), std::string::npos) << scalar.err;
}

TEST(Cli, TkMatrixPrintsMatrixAndPasses)
{
    const auto r = run({"tk-matrix", "--output", "csv"});
    EXPECT_EQ(r.code, 0) << r.err;
    const auto l = lines(r.out);
    EXPECT_EQ(l.front(), "instance,mode,from,to,status");
    EXPECT_EQ(l.size(), 1u + 6u * 12u);
    EXPECT_FALSE(r.err.empty());
}

TEST(Cli, UnwritableOutputExitsTwo)
{
    const auto r = run({"remark", "--n-grid", "2", "--out", "/nonexistent-dir/out.json"});
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("output"), std::string::npos);
}
