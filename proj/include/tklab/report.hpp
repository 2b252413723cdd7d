#pragma once

#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "linalg.hpp"
#include "semigroup.hpp"
#include "topology.hpp"
#include "trotter_kato.hpp"

namespace tklab {

using Json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;

/// Where the expected value of a claim comes from.
enum class Basis
{
    ClosedForm,    ///< exact formula evaluated in double precision
    DerivedOracle, ///< independent computation by a second route
    Identity,      ///< algebraic identity with expected value 0
};

[[nodiscard]] inline std::string to_string(Basis b)
{
    switch (b) {
    case Basis::ClosedForm:
        return "closed-form";
    case Basis::DerivedOracle:
        return "derived-oracle";
    case Basis::Identity:
        return "identity";
    }
    return "?";
}

/// One checked statement of an experiment report.
///
/// `failure_expected` marks rows that exhibit a failure (of a semigroup law,
/// of a convergence mode); such a row passes when the failure is observed
/// with the predicted magnitude.
struct Claim
{
    std::string id;
    std::string anchor;
    Json measured;
    Json expected;
    double tolerance = 0.0;
    Basis basis = Basis::Identity;
    bool pass = false;
    bool failure_expected = false;
    std::string note;
};

struct ExperimentReport
{
    std::string experiment;
    Json config;
    std::vector<Claim> claims;
    std::vector<std::string> notes;

    [[nodiscard]] bool passed() const
    {
        return std::all_of(claims.begin(), claims.end(), [](const Claim& c) { return c.pass; });
    }

    [[nodiscard]] const Claim& claim(const std::string& id) const
    {
        for (const auto& c : claims) {
            if (c.id == id) {
                return c;
            }
        }
        throw std::out_of_range("no claim with id " + id);
    }
};

[[nodiscard]] inline Json complex_json(cplx z)
{
    return Json::array({z.real(), z.imag()});
}

/// Reals stay plain numbers; complex values with nonzero imaginary part become [re, im].
[[nodiscard]] inline Json scalar_json(cplx z)
{
    if (z.imag() == 0.0) {
        return z.real();
    }
    return complex_json(z);
}

[[nodiscard]] inline Json optional_json(const std::optional<double>& v)
{
    return v ? Json(*v) : Json(nullptr);
}

[[nodiscard]] inline Json to_json(const Witness& w)
{
    Json j;
    j["grid_param"] = w.grid_param ? scalar_json(*w.grid_param) : Json(nullptr);
    j["x"] = w.x_index ? Json(*w.x_index) : Json(nullptr);
    j["y"] = w.y_index ? Json(*w.y_index) : Json(nullptr);
    j["value"] = w.value;
    return j;
}

[[nodiscard]] inline std::string to_string(GridKind g)
{
    switch (g) {
    case GridKind::None:
        return "none";
    case GridKind::Time:
        return "time";
    case GridKind::Spectral:
        return "spectral";
    }
    return "?";
}

[[nodiscard]] inline Json to_json(const ConvergenceReport& r)
{
    Json j;
    j["topology"] = to_string(r.topology);
    j["test_set"] = r.test_set;
    j["support_bound"] = r.support_bound;
    j["p"] = r.p;
    j["grid"] = to_string(r.grid);
    j["grid_points"] = r.grid_points;
    j["verdict"] = r.verdict.to_string();
    j["lower_bound"] = r.lower_bound;
    Json samples = Json::array();
    for (const auto& s : r.samples) {
        Json row;
        row["n"] = s.n;
        row["delta"] = s.delta;
        row["witness"] = to_json(s.witness);
        row["delta_dense"] = optional_json(s.delta_dense);
        samples.push_back(std::move(row));
    }
    j["samples"] = std::move(samples);
    j["dense_verdict"] = r.dense_verdict ? Json(r.dense_verdict->to_string()) : Json(nullptr);
    j["dense_decay_slope"] = optional_json(r.dense_decay_slope);
    return j;
}

[[nodiscard]] inline Json to_json(const GrowthReport& g)
{
    const auto& w = g.worst();
    Json j;
    j["M"] = g.M;
    j["omega"] = g.omega;
    j["p"] = g.p;
    j["pass"] = g.pass;
    j["lower_bound"] = g.lower_bound;
    j["worst"] = {{"t", w.t}, {"norm", w.norm}, {"bound", w.bound}, {"margin", w.margin}};
    return j;
}

[[nodiscard]] inline Json to_json(const ConditionResult& c)
{
    Json j;
    j["condition"] = std::string(1, label(c.condition));
    j["status"] = to_string(c.status);
    j["note"] = c.note;
    j["report"] = to_json(c.report);
    j["secondary"] = c.secondary ? to_json(*c.secondary) : Json(nullptr);
    return j;
}

[[nodiscard]] inline Json to_json(const TKReport& r)
{
    Json j;
    j["instance"] = r.instance;
    j["mode"] = to_string(r.mode);
    j["core_note"] = r.core_note;
    j["growth_ok"] = r.validation.growth_ok;
    j["growth_worst_margin"] = r.validation.worst_margin;
    Json conds = Json::array();
    for (const auto& c : r.conditions) {
        conds.push_back(to_json(c));
    }
    j["conditions"] = std::move(conds);
    Json matrix = Json::object();
    for (Condition p : kConditions) {
        for (Condition q : kConditions) {
            if (p != q) {
                matrix[std::string(1, label(p)) + "=>" + label(q)] = to_string(r.implication(p, q));
            }
        }
    }
    j["implications"] = std::move(matrix);
    j["laplace_bound"] = {{"applicable", r.laplace_bound.applicable},
                          {"holds", r.laplace_bound.holds},
                          {"worst_slack", r.laplace_bound.applicable ? Json(r.laplace_bound.worst_slack)
                                                                     : Json(nullptr)}};
    return j;
}

[[nodiscard]] inline Json to_json(const SuiteReport& s)
{
    Json j;
    j["schema"] = kSchemaVersion;
    j["command"] = "tk-matrix";
    Json agg = Json::object();
    for (Topology mode : {Topology::Weak, Topology::Strong}) {
        Json m = Json::object();
        for (Condition p : kConditions) {
            for (Condition q : kConditions) {
                if (p == q) {
                    continue;
                }
                const auto& cell =
                    s.aggregate[mode_index(mode)][static_cast<std::size_t>(p)][static_cast<std::size_t>(q)];
                m[std::string(1, label(p)) + "=>" + label(q)] = {{"status", to_string(cell.status)},
                                                                 {"counterexamples", cell.counterexamples}};
            }
        }
        agg[to_string(mode)] = std::move(m);
    }
    j["aggregate"] = std::move(agg);
    j["weak_pattern_reproduced"] = s.weak_pattern_reproduced;
    j["strong_mode_consistent"] = s.strong_mode_consistent;
    j["mode_monotonicity"] = s.mode_monotonicity;
    j["d_implies_c_quantitative"] = s.d_implies_c_quantitative;
    j["passed"] = s.passed();
    j["findings"] = s.findings;
    Json inst = Json::array();
    for (const auto& r : s.instances) {
        inst.push_back(to_json(r));
    }
    j["instances"] = std::move(inst);
    return j;
}

[[nodiscard]] inline Json to_json(const Claim& c)
{
    Json j;
    j["id"] = c.id;
    j["anchor"] = c.anchor;
    j["basis"] = to_string(c.basis);
    j["measured"] = c.measured;
    j["expected"] = c.expected;
    j["tolerance"] = c.tolerance;
    j["failure_expected"] = c.failure_expected;
    j["pass"] = c.pass;
    if (!c.note.empty()) {
        j["note"] = c.note;
    }
    return j;
}

[[nodiscard]] inline Json to_json(const ExperimentReport& r)
{
    Json j;
    j["schema"] = kSchemaVersion;
    j["experiment"] = r.experiment;
    j["config"] = r.config;
    j["environment"] = {{"scalar", "complex<double>"}, {"arithmetic", "IEEE 754 binary64"}};
    Json claims = Json::array();
    for (const auto& c : r.claims) {
        claims.push_back(to_json(c));
    }
    j["claims"] = std::move(claims);
    j["notes"] = r.notes;
    j["passed"] = r.passed();
    return j;
}

// ---------------------------------------------------------------------------
// CSV
// ---------------------------------------------------------------------------

/// %.17g, enough digits to round-trip a double.
[[nodiscard]] inline std::string format_double(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

[[nodiscard]] inline std::string format_grid_param(const std::optional<cplx>& z)
{
    if (!z) {
        return "";
    }
    if (z->imag() == 0.0) {
        return format_double(z->real());
    }
    return format_double(z->real()) + (z->imag() < 0 ? "" : "+") + format_double(z->imag()) + "i";
}

[[nodiscard]] inline std::string csv_quote(const std::string& s)
{
    if (s.find_first_of(",\"\n") == std::string::npos) {
        return s;
    }
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') {
            out += '"';
        }
        out += c;
    }
    return out + "\"";
}

inline void write_csv(std::ostream& os, const ConvergenceReport& r)
{
    os << "n,grid_param,topology,delta,verdict\n";
    for (const auto& s : r.samples) {
        os << s.n << ',' << format_grid_param(s.witness.grid_param) << ',' << to_string(r.topology) << ','
           << format_double(s.delta) << ',' << r.verdict.to_string() << '\n';
    }
}

inline void write_csv(std::ostream& os, const ExperimentReport& r)
{
    os << "id,basis,failure_expected,pass,measured,expected\n";
    for (const auto& c : r.claims) {
        os << csv_quote(c.id) << ',' << to_string(c.basis) << ',' << (c.failure_expected ? "true" : "false") << ','
           << (c.pass ? "true" : "false") << ',' << csv_quote(c.measured.dump()) << ','
           << csv_quote(c.expected.dump()) << '\n';
    }
}

inline void write_csv(std::ostream& os, const SuiteReport& s)
{
    os << "instance,mode,from,to,status\n";
    for (const auto& r : s.instances) {
        for (Condition p : kConditions) {
            for (Condition q : kConditions) {
                if (p != q) {
                    os << csv_quote(r.instance) << ',' << to_string(r.mode) << ',' << label(p) << ',' << label(q)
                       << ',' << to_string(r.implication(p, q)) << '\n';
                }
            }
        }
    }
}

} // namespace tklab
