// io.hpp
//
// Output machinery shared by the command-line tool and the tests: the JSON
// schema for expressions, differential forms, tensors and reports; a LaTeX
// renderer; fixed-width table helpers; and the run configuration that is
// echoed into every output so results are reproducible from the output alone.

#pragma once

#include <cstdint>
#include <iomanip>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "ode3geo/classify.hpp"
#include "ode3geo/prolong.hpp"

namespace ode3geo {

using json = nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// Output format and run configuration
// ---------------------------------------------------------------------------

enum class OutputFormat { Json, Latex, Table };

inline const char* to_string(OutputFormat f) {
    switch (f) {
        case OutputFormat::Json: return "json";
        case OutputFormat::Latex: return "latex";
        case OutputFormat::Table: return "table";
    }
    return "json";
}

inline std::optional<OutputFormat> parse_output_format(const std::string& s) {
    if (s == "json") return OutputFormat::Json;
    if (s == "latex") return OutputFormat::Latex;
    if (s == "table") return OutputFormat::Table;
    return std::nullopt;
}

/// Everything that influences a run's output apart from the inputs themselves.
struct RunConfig {
    std::uint64_t seed = 1;
    int probes = 24;
    double abs_threshold = 1e-9;
    double rel_threshold = 1e-9;
    OutputFormat format = OutputFormat::Json;
    std::map<std::string, double> bound_parameters; ///< --param name=value
    std::set<std::string> symbolic_parameters;      ///< --param name
    char metric_variant = 'c';

    ProbeConfig probe_config() const {
        ProbeConfig cfg;
        cfg.seed = seed;
        cfg.probes = probes;
        cfg.abs_threshold = abs_threshold;
        cfg.rel_threshold = rel_threshold;
        cfg.pinned = bound_parameters;
        return cfg;
    }

    /// All declared parameter names, bound or symbolic.
    std::set<std::string> parameter_names() const {
        std::set<std::string> s = symbolic_parameters;
        for (const auto& [k, v] : bound_parameters) s.insert(k);
        return s;
    }
};

inline json to_json(const RunConfig& rc) {
    json params = json::object();
    for (const auto& name : rc.parameter_names()) {
        auto it = rc.bound_parameters.find(name);
        if (it == rc.bound_parameters.end())
            params[name] = nullptr;
        else
            params[name] = it->second;
    }
    return json{{"seed", rc.seed},
                {"probes", rc.probes},
                {"abs_threshold", rc.abs_threshold},
                {"rel_threshold", rc.rel_threshold},
                {"format", to_string(rc.format)},
                {"parameters", params},
                {"metric_variant", std::string(1, rc.metric_variant)}};
}

// ---------------------------------------------------------------------------
// Differential forms, tensors, matrices
// ---------------------------------------------------------------------------

inline std::string differential_name(const std::string& coord, bool latex) {
    return latex ? "\\mathrm{d}" + detail::latex_symbol(coord) : "d" + coord;
}

inline std::string basis_name(const DifferentialForm& f, const std::vector<int>& idx, bool latex) {
    std::string out;
    for (std::size_t k = 0; k < idx.size(); ++k) {
        if (k) out += latex ? " \\wedge " : "^";
        out += differential_name(f.coords[idx[k]], latex);
    }
    return out;
}

inline json to_json(const DifferentialForm& f) {
    json terms = json::array();
    for (const auto& [idx, c] : f.terms) {
        json t;
        t["idx"] = idx;
        t["coeff"] = to_string(to_expr(c));
        terms.push_back(std::move(t));
    }
    return json{{"kind", "form"}, {"degree", f.degree}, {"coords", f.coords}, {"terms", terms}};
}

/// Plain-text rendering, e.g. "q*dx^dy - dp^dq".
inline std::string form_to_plain(const DifferentialForm& f) {
    if (f.terms.empty()) return "0";
    std::string out;
    for (const auto& [idx, c] : f.terms) {
        std::string cs = to_string(to_expr(c));
        std::string basis = basis_name(f, idx, false);
        std::string piece;
        if (basis.empty())
            piece = cs;
        else if (cs == "1")
            piece = basis;
        else if (cs == "-1")
            piece = "-" + basis;
        else {
            bool atomic = cs.find_first_of("+-") == std::string::npos ||
                          (cs[0] == '-' && cs.find_first_of("+-", 1) == std::string::npos);
            piece = (atomic ? cs : "(" + cs + ")") + "*" + basis;
        }
        if (!out.empty() && piece[0] != '-') out += " + ";
        else if (!out.empty()) {
            out += " - ";
            piece = piece.substr(1);
        }
        out += piece;
    }
    return out;
}

inline std::string form_to_latex(const DifferentialForm& f) {
    if (f.terms.empty()) return "0";
    std::string out;
    bool first = true;
    for (const auto& [idx, c] : f.terms) {
        ExprPtr e = to_expr(c);
        bool negative = detail::is_negative_leading(e);
        if (negative) e = detail::negate_leading(e);
        std::string cs = detail::latex_expr(e, 2);
        std::string basis = basis_name(f, idx, true);
        std::string piece = basis.empty() ? cs : (cs == "1" ? basis : cs + " \\, " + basis);
        if (first)
            out += (negative ? "-" : "") + piece;
        else
            out += (negative ? " - " : " + ") + piece;
        first = false;
    }
    return out;
}

inline json to_json(const SymTensor2& t) {
    json terms = json::array();
    const int n = static_cast<int>(t.coords.size());
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) {
            if (t.m[i][j].is_zero()) continue;
            json e;
            e["idx"] = std::vector<int>{i, j};
            e["coeff"] = to_string(to_expr(t.m[i][j]));
            terms.push_back(std::move(e));
        }
    return json{
        {"kind", "symmetric"}, {"degree", 2}, {"coords", t.coords}, {"terms", terms}};
}

/// Upper-triangle component rows "g[x,q] = 1" for tables.
inline std::vector<std::pair<std::string, std::string>> sym_to_rows(const SymTensor2& t,
                                                                    const std::string& name) {
    std::vector<std::pair<std::string, std::string>> rows;
    const int n = static_cast<int>(t.coords.size());
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) {
            if (t.m[i][j].is_zero()) continue;
            rows.push_back({name + "[" + t.coords[i] + "," + t.coords[j] + "]",
                            to_string(to_expr(t.m[i][j]))});
        }
    if (rows.empty()) rows.push_back({name, "0"});
    return rows;
}

inline std::string sym_to_latex(const SymTensor2& t) {
    std::string out = "\\begin{pmatrix}";
    const int n = static_cast<int>(t.coords.size());
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            if (j) out += " & ";
            out += to_latex(to_expr(t.m[i][j]));
        }
        if (i + 1 < n) out += " \\\\ ";
    }
    return out + "\\end{pmatrix}";
}

inline json to_json(const MatrixOfForms& m) {
    json rows = json::array();
    for (const auto& row : m.entries) {
        json r = json::array();
        for (const auto& e : row) r.push_back(to_json(e));
        rows.push_back(std::move(r));
    }
    return json{{"rows", m.rows()}, {"cols", m.cols()}, {"entries", rows}};
}

inline std::string matrix_to_latex(const MatrixOfForms& m) {
    std::string out = "\\begin{pmatrix}";
    for (std::size_t i = 0; i < m.rows(); ++i) {
        for (std::size_t j = 0; j < m.cols(); ++j) {
            if (j) out += " & ";
            out += form_to_latex(m.entries[i][j]);
        }
        if (i + 1 < m.rows()) out += " \\\\ ";
    }
    return out + "\\end{pmatrix}";
}

// ---------------------------------------------------------------------------
// Reports
// ---------------------------------------------------------------------------

inline json to_json(const ScalarCheck& c) {
    return json{{"name", c.name},
                {"value", c.value ? json(to_string(c.value)) : json(nullptr)},
                {"verdict", to_string(c.verdict)}};
}

inline json outcome_json(ConditionOutcome o) {
    switch (o) {
        case ConditionOutcome::True: return json(true);
        case ConditionOutcome::False: return json(false);
        case ConditionOutcome::Unknown: return json("unknown");
        case ConditionOutcome::NotApplicable: return json("not_applicable");
    }
    return json("unknown");
}

inline json to_json(const ClassificationReport& rep) {
    json outcomes = json::object();
    for (const auto& c : rep.conditions) outcomes[c.id] = outcome_json(c.outcome);
    json conditions = json::array();
    for (const auto& c : rep.conditions) {
        json cj;
        cj["id"] = c.id;
        cj["outcome"] = outcome_json(c.outcome);
        json checks = json::array();
        for (const auto& ch : c.checks) checks.push_back(to_json(ch));
        cj["checks"] = checks;
        json context = json::array();
        for (const auto& ch : c.context) context.push_back(to_json(ch));
        cj["context"] = context;
        cj["notes"] = c.notes;
        conditions.push_back(std::move(cj));
    }
    json out;
    out["outcomes"] = outcomes;
    out["ricci_sign"] = rep.ricci_sign;
    out["linearization_mu"] =
        rep.linearization_mu ? json(to_string(rep.linearization_mu)) : json(nullptr);
    if (rep.cubic)
        out["cubic"] = json{{"a3", to_string(rep.cubic->a3)},
                            {"a2", to_string(rep.cubic->a2)},
                            {"a1", to_string(rep.cubic->a1)},
                            {"a0", to_string(rep.cubic->a0)}};
    else
        out["cubic"] = nullptr;
    out["conditions"] = conditions;
    out["notes"] = rep.notes;
    return out;
}

inline json to_json(const ComponentVerdict& cv) {
    return json{{"name", cv.name},
                {"value", cv.value ? json(to_string(cv.value)) : json(nullptr)},
                {"verdict", to_string(cv.verdict)}};
}

inline json to_json(const ObstructionReport& rep) {
    json comps = json::array();
    for (const auto& c : rep.components) comps.push_back(to_json(c));
    json ctx = json::array();
    for (const auto& c : rep.context) ctx.push_back(to_json(c));
    return json{{"title", rep.title},
                {"overall", to_string(rep.overall)},
                {"components", comps},
                {"context", ctx},
                {"notes", rep.notes}};
}

inline json to_json(const EwNumericReport& rep) {
    json per = json::array();
    for (const auto& r : rep.per_x0) {
        per.push_back(json{{"x0", r.x0.get_str()},
                           {"max_residual", r.max_residual},
                           {"min_ricci", r.min_ricci},
                           {"max_ricci", r.max_ricci},
                           {"ricci_sign", r.ricci_sign},
                           {"points_evaluated", r.points_evaluated},
                           {"points_skipped", r.points_skipped}});
    }
    return json{{"per_x0", per},
                {"ratio_test_applicable", rep.ratio_test_applicable},
                {"ratio_max_deviation", rep.ratio_max_deviation},
                {"notes", rep.notes}};
}

// ---------------------------------------------------------------------------
// Tables
// ---------------------------------------------------------------------------

/// Two-column fixed-width table; rows ("key", "value").
inline std::string render_table(const std::vector<std::pair<std::string, std::string>>& rows) {
    std::size_t width = 0;
    for (const auto& r : rows) width = std::max(width, r.first.size());
    std::string out;
    for (const auto& r : rows) {
        out += r.first;
        out.append(width - r.first.size() + 2, ' ');
        out += r.second;
        out += "\n";
    }
    return out;
}

/// Depth-first flattening of a JSON document into (path, scalar) rows.
inline void flatten_json(const json& j, const std::string& prefix,
                         std::vector<std::pair<std::string, std::string>>& out) {
    if (j.is_object()) {
        for (auto it = j.begin(); it != j.end(); ++it)
            flatten_json(it.value(), prefix.empty() ? it.key() : prefix + "." + it.key(), out);
    } else if (j.is_array()) {
        for (std::size_t i = 0; i < j.size(); ++i)
            flatten_json(j[i], prefix + "[" + std::to_string(i) + "]", out);
        if (j.empty()) out.push_back({prefix, "[]"});
    } else if (j.is_string()) {
        out.push_back({prefix, j.get<std::string>()});
    } else {
        out.push_back({prefix, j.dump()});
    }
}

} // namespace ode3geo
