#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "experiments.hpp"
#include "report.hpp"
#include "trotter_kato.hpp"

namespace tklab {

namespace cli {

[[nodiscard]] inline double parse_real(const std::string& s, const std::string& field)
{
    if (s == "inf" || s == "infinity") {
        return kInfinity;
    }
    try {
        std::size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos == s.size()) {
            return v;
        }
    } catch (const std::exception&) {
    }
    throw ConfigError(field, "cannot parse '" + s + "' as a number");
}

/// "1", "-2.5", "1+1i", "2-0.5i", "3i", "-i".
[[nodiscard]] inline cplx parse_complex(std::string s, const std::string& field)
{
    std::erase(s, ' ');
    if (s.empty()) {
        throw ConfigError(field, "empty complex number");
    }
    if (s.back() != 'i') {
        return parse_real(s, field);
    }
    const std::string body = s.substr(0, s.size() - 1);
    std::size_t split = std::string::npos;
    for (std::size_t k = body.size(); k-- > 1;) {
        if ((body[k] == '+' || body[k] == '-') && body[k - 1] != 'e' && body[k - 1] != 'E') {
            split = k;
            break;
        }
    }
    auto imag_of = [&](const std::string& t) {
        if (t.empty() || t == "+") {
            return 1.0;
        }
        if (t == "-") {
            return -1.0;
        }
        return parse_real(t, field);
    };
    if (split == std::string::npos) {
        return {0.0, imag_of(body)};
    }
    return {parse_real(body.substr(0, split), field), imag_of(body.substr(split))};
}

/// "a:b" (inclusive range) or a comma-separated list.
[[nodiscard]] inline std::vector<std::size_t> parse_n_grid(const std::string& s, const std::string& field)
{
    auto parse_count = [&](const std::string& t) -> std::size_t {
        try {
            std::size_t pos = 0;
            const long long v = std::stoll(t, &pos);
            if (pos == t.size() && v > 0) {
                return static_cast<std::size_t>(v);
            }
        } catch (const std::exception&) {
        }
        throw ConfigError(field, "'" + t + "' is not a positive integer");
    };
    std::vector<std::size_t> out;
    const auto colon = s.find(':');
    if (colon != std::string::npos) {
        const std::size_t a = parse_count(s.substr(0, colon));
        const std::size_t b = parse_count(s.substr(colon + 1));
        if (b < a) {
            throw ConfigError(field, "empty range " + s);
        }
        for (std::size_t n = a; n <= b; ++n) {
            out.push_back(n);
        }
        return out;
    }
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        out.push_back(parse_count(item));
    }
    if (out.empty()) {
        throw ConfigError(field, "must be nonempty");
    }
    return out;
}

/// Flags shared by every subcommand that builds an ExperimentConfig.
struct ConfigFlags
{
    std::string output = "json";
    std::string out_path;
    std::string config_path;
    std::string n_grid;
    std::size_t dim = 0;
    double t_max = 5.0;
    std::size_t t_points = 101;
    std::vector<std::string> lambdas;
    std::string p;
    std::uint64_t seed = 0;
    std::size_t quad_nodes = 256;
    std::size_t contour_nodes = 256;
    bool verbose = false;

    CLI::Option* dim_opt = nullptr;
    CLI::Option* t_max_opt = nullptr;
    CLI::Option* t_points_opt = nullptr;
    CLI::Option* seed_opt = nullptr;
    CLI::Option* quad_opt = nullptr;
    CLI::Option* contour_opt = nullptr;

    void attach(CLI::App& app, const std::string& default_output = "json")
    {
        output = default_output;
        app.add_option("--output", output, "output format")->check(CLI::IsMember({"json", "csv"}));
        app.add_option("--out", out_path, "write the report here instead of standard output");
        app.add_option("--config", config_path, "JSON file with ExperimentConfig fields");
        app.add_option("--n-grid,--n", n_grid, "n values: a:b or a comma list");
        dim_opt = app.add_option("--dim,-D", dim, "truncation dimension D");
        t_max_opt = app.add_option("--t-max", t_max, "time grid end");
        t_points_opt = app.add_option("--t-points", t_points, "number of time grid points");
        app.add_option("--lambda", lambdas, "spectral parameters, e.g. 1,2,1+1i")->delimiter(',');
        app.add_option("--p", p, "norm exponent (number >= 1 or inf)");
        seed_opt = app.add_option("--seed", seed, "seed for the dense test vectors");
        quad_opt = app.add_option("--quad-nodes", quad_nodes, "Laplace quadrature nodes");
        contour_opt = app.add_option("--contour-nodes", contour_nodes, "Dunford contour nodes");
        app.add_flag("--verbose", verbose, "per-row timing on standard error");
    }

    [[nodiscard]] ExperimentConfig resolve(ExperimentConfig base, bool swap_dimension_rule = true) const
    {
        if (!config_path.empty()) {
            std::ifstream in(config_path);
            if (!in) {
                throw ConfigError("--config", "cannot read '" + config_path + "'");
            }
            Json j;
            try {
                j = Json::parse(in);
            } catch (const Json::parse_error& e) {
                throw ConfigError("--config", std::string("malformed JSON: ") + e.what());
            }
            base = config_from_json(j, base);
        }
        if (!n_grid.empty()) {
            base.n_grid = parse_n_grid(n_grid, "n_grid");
        }
        if (dim_opt->count() > 0) {
            base.dim = dim;
        }
        if (t_max_opt->count() > 0 || t_points_opt->count() > 0) {
            const double end = t_max_opt->count() > 0 ? t_max : base.t_grid.back();
            const std::size_t points = t_points_opt->count() > 0 ? t_points : base.t_grid.size();
            if (points == 0) {
                throw ConfigError("t_grid", "--t-points must be positive");
            }
            if (!(end >= 0.0)) {
                throw ConfigError("t_grid", "--t-max must be >= 0");
            }
            base.t_grid = uniform_grid(end, points);
        }
        if (!lambdas.empty()) {
            base.lambda_grid.clear();
            for (const auto& l : lambdas) {
                base.lambda_grid.push_back(parse_complex(l, "lambda_grid"));
            }
        }
        if (!p.empty()) {
            base.p = parse_real(p, "p");
        }
        if (seed_opt->count() > 0) {
            base.seed = seed;
        }
        if (quad_opt->count() > 0) {
            base.quad_nodes = quad_nodes;
        }
        if (contour_opt->count() > 0) {
            base.contour_nodes = contour_nodes;
        }
        base.validate(swap_dimension_rule);
        return base;
    }
};

/// Writes `text` to `path`, or to `out` when the path is empty. Returns false
/// when the file cannot be written.
inline bool emit(const std::string& text, const std::string& path, std::ostream& out)
{
    if (path.empty()) {
        out << text;
        return static_cast<bool>(out);
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) {
        return false;
    }
    f << text;
    return static_cast<bool>(f);
}

inline std::string render(const Json& j)
{
    return j.dump(2) + "\n";
}

inline void print_matrix(const SuiteReport& s, std::ostream& err)
{
    for (Topology mode : {Topology::Weak, Topology::Strong}) {
        err << to_string(mode) << " mode:\n";
        for (Condition p : kConditions) {
            for (Condition q : kConditions) {
                if (p == q) {
                    continue;
                }
                const auto& cell =
                    s.aggregate[mode_index(mode)][static_cast<std::size_t>(p)][static_cast<std::size_t>(q)];
                err << "  (" << label(p) << ") => (" << label(q) << "): " << to_string(cell.status);
                for (const auto& w : cell.counterexamples) {
                    err << " [" << w << "]";
                }
                err << '\n';
            }
        }
    }
    for (const auto& f : s.findings) {
        err << f << '\n';
    }
}

struct ConvergeFlags
{
    std::string family = "block-swap";
    std::string topology = "weak";
};

[[nodiscard]] inline std::vector<std::string> converge_families()
{
    return {"block-swap",   "swap-semigroup", "rescaled-swap-semigroup", "cayley-resolvent",
            "cayley-semigroup", "scalar"};
}

[[nodiscard]] inline ConvergenceReport run_converge(const std::string& family, Topology topology,
                                                   const ExperimentConfig& cfg)
{
    const auto& ns = cfg.n_grid;
    const std::size_t dim = cfg.resolved_dim();
    const auto tests = TestVectorSet::default_set(dim, cfg.p, cfg.seed);
    const std::vector<cplx> tgrid(cfg.t_grid.begin(), cfg.t_grid.end());
    if (family == "block-swap") {
        return measure_convergence(
            ns, [&](std::size_t n) { return block_swap(n, dim); }, DenseOperator::zero(dim), topology, tests);
    }
    if (family == "swap-semigroup") {
        return measure_convergence_on_grid(
            ns, [&](std::size_t n, cplx t) { return evaluate(SemigroupFamily::swap(n, dim), t.real()); },
            [&](cplx t) { return DenseOperator::scalar(dim, std::cosh(t.real())); }, topology, tests, tgrid);
    }
    if (family == "rescaled-swap-semigroup") {
        return measure_convergence_on_grid(
            ns, [&](std::size_t n, cplx t) { return evaluate(SemigroupFamily::rescaled_swap(n, dim), t.real()); },
            [&](cplx t) { return DenseOperator::scalar(dim, std::exp(-t.real())); }, topology, tests, tgrid);
    }
    if (family == "cayley-resolvent" || family == "cayley-semigroup") {
        for (std::size_t n : ns) {
            if (n < 2) {
                throw ConfigError("n_grid", "the Cayley family needs n >= 2 (n = 1 gives the limit -I itself)");
            }
        }
        auto gen = [&](std::size_t n) { return cayley_generator(contraction_v(n, dim)); };
        if (family == "cayley-semigroup") {
            return measure_convergence_on_grid(
                ns, [&](std::size_t n, cplx t) { return matrix_exp(gen(n), t.real()); },
                [&](cplx t) { return DenseOperator::scalar(dim, std::exp(-t.real())); }, topology, tests, tgrid);
        }
        const cplx l = cfg.lambda_grid.front();
        return measure_convergence(
            ns, [&](std::size_t n) { return resolvent_direct(gen(n), l); },
            DenseOperator::scalar(dim, 1.0 / (l + 1.0)), topology, tests);
    }
    if (family == "scalar") {
        return measure_convergence(
            ns, [&](std::size_t n) { return DenseOperator::scalar(dim, -(1.0 + 1.0 / static_cast<double>(n))); },
            DenseOperator::scalar(dim, -1.0), topology, tests);
    }
    throw ConfigError("--family", "unknown family '" + family + "'");
}

} // namespace cli

/// Entry point of the command-line tool. Exit codes: 0 all claims pass, 1 a
/// claim failed, 2 configuration or output error.
[[nodiscard]] inline int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Trotter-Kato approximation laboratory: semigroup convergence experiments"};
    app.require_subcommand(1);

    cli::ConfigFlags swap_flags;
    cli::ConfigFlags cogen_flags;
    cli::ConfigFlags repr_flags;
    cli::ConfigFlags matrix_flags;
    cli::ConfigFlags converge_flags;
    cli::ConvergeFlags family;

    auto* swap_cmd = app.add_subcommand("example-2-1", "block swap semigroups: weak generator limit, non-semigroup "
                                                       "semigroup limit");
    swap_flags.attach(*swap_cmd);
    auto* cogen_cmd = app.add_subcommand("example-2-3", "Cayley family: resolvents converge, semigroups do not");
    cogen_flags.attach(*cogen_cmd);
    auto* repr_cmd = app.add_subcommand("remark", "resolvent powers via direct, Laplace and Dunford routes");
    repr_flags.attach(*repr_cmd);
    auto* matrix_cmd = app.add_subcommand("tk-matrix", "run the instance suite and print the implication matrix");
    matrix_flags.attach(*matrix_cmd);
    auto* converge_cmd = app.add_subcommand("converge", "measure convergence of a named family");
    converge_flags.attach(*converge_cmd, "csv");
    converge_cmd->add_option("--family", family.family, "operator family")
        ->check(CLI::IsMember(cli::converge_families()));
    converge_cmd->add_option("--topology", family.topology, "norm, strong or weak")
        ->check(CLI::IsMember({"norm", "strong", "weak"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        (void)app.exit(e, out, err);
        return 2;
    }

    try {
        auto run_experiment = [&](const cli::ConfigFlags& flags, ExperimentConfig defaults,
                                  ExperimentReport (*runner)(const ExperimentConfig&, const RowObserver&)) {
            const auto cfg = flags.resolve(std::move(defaults));
            RowObserver observer;
            if (flags.verbose) {
                observer = [&err](const Claim& c, double seconds) {
                    err << (c.pass ? "pass " : "FAIL ") << c.id << " (" << format_double(seconds) << " s)\n";
                };
            }
            const auto report = runner(cfg, observer);
            std::ostringstream text;
            if (flags.output == "csv") {
                write_csv(text, report);
            } else {
                text << cli::render(to_json(report));
            }
            if (!cli::emit(text.str(), flags.out_path, out)) {
                err << "error: cannot write output '" << flags.out_path << "'\n";
                return 2;
            }
            std::size_t passed = 0;
            for (const auto& c : report.claims) {
                if (c.pass) {
                    ++passed;
                } else {
                    err << "failed claim " << c.id << ": measured " << c.measured.dump() << ", expected "
                        << c.expected.dump() << '\n';
                }
            }
            err << report.experiment << ": " << passed << "/" << report.claims.size() << " claims pass\n";
            return report.passed() ? 0 : 1;
        };

        if (*swap_cmd) {
            return run_experiment(swap_flags, swap_semigroup_defaults(), &run_swap_semigroup_experiment);
        }
        if (*cogen_cmd) {
            return run_experiment(cogen_flags, cogenerator_defaults(), &run_cogenerator_experiment);
        }
        if (*repr_cmd) {
            return run_experiment(repr_flags, representation_defaults(), &run_representation_experiment);
        }
        if (*matrix_cmd) {
            auto defaults = swap_semigroup_defaults();
            defaults.name = "tk-matrix";
            defaults.lambda_grid = SuiteConfig{}.lambda_grid;
            const auto cfg = matrix_flags.resolve(defaults);
            SuiteConfig sc;
            sc.n_grid = cfg.n_grid;
            sc.dim = cfg.resolved_dim();
            sc.p = cfg.p;
            sc.seed = cfg.seed;
            sc.t_grid = cfg.t_grid;
            sc.lambda_grid = cfg.lambda_grid;
            std::vector<TKReport> reports;
            for (const auto& inst : shipped_suite(sc)) {
                const auto start = std::chrono::steady_clock::now();
                reports.push_back(implication_matrix(inst));
                if (matrix_flags.verbose) {
                    const std::chrono::duration<double> dt = std::chrono::steady_clock::now() - start;
                    err << inst.name << " (" << format_double(dt.count()) << " s)\n";
                }
            }
            const auto suite = aggregate_suite(std::move(reports));
            std::ostringstream text;
            if (matrix_flags.output == "csv") {
                write_csv(text, suite);
            } else {
                Json j = to_json(suite);
                j["config"] = to_json(cfg);
                text << cli::render(j);
            }
            if (!cli::emit(text.str(), matrix_flags.out_path, out)) {
                err << "error: cannot write output '" << matrix_flags.out_path << "'\n";
                return 2;
            }
            cli::print_matrix(suite, err);
            return suite.passed() ? 0 : 1;
        }
        if (*converge_cmd) {
            auto defaults = swap_semigroup_defaults();
            defaults.name = "converge";
            defaults.n_grid = cli::parse_n_grid("2:16", "n_grid");
            const bool scalar = family.family == "scalar";
            if (scalar) {
                defaults.dim = 16;
            }
            const auto cfg = converge_flags.resolve(defaults, !scalar);
            const auto report = cli::run_converge(family.family, parse_topology(family.topology), cfg);
            std::ostringstream text;
            if (converge_flags.output == "csv") {
                write_csv(text, report);
            } else {
                Json j;
                j["schema"] = kSchemaVersion;
                j["command"] = "converge";
                j["family"] = family.family;
                j["config"] = to_json(cfg);
                j["report"] = to_json(report);
                text << cli::render(j);
            }
            if (!cli::emit(text.str(), converge_flags.out_path, out)) {
                err << "error: cannot write output '" << converge_flags.out_path << "'\n";
                return 2;
            }
            err << family.family << " (" << family.topology << "): " << report.verdict.to_string() << '\n';
            return 0;
        }
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return 2;
    } catch (const std::invalid_argument& e) {
        err << "config error: " << e.what() << '\n';
        return 2;
    }
    return 2;
}

} // namespace tklab
