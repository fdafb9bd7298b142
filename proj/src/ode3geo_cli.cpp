// ode3geo_cli.cpp
//
// Command-line front end.  Every subcommand takes an equation y''' = F given
// as an expression in x, y, p (= y'), q (= y'') plus declared parameters, and
// prints its output in one of three formats (json, latex, table), always with
// the run configuration echoed so a result can be reproduced from the output
// alone.  Exit codes: 0 on success, 2 when a verdict came back unknown
// (neither provably zero nor provably nonzero at the configured probe budget),
// 1 on hard errors (bad usage, parse failures, domain errors).

#include <cstdio>
#include <exception>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ode3geo/ode3geo.hpp"

namespace {

using namespace ode3geo;

constexpr const char* kGrammar =
    "expression grammar: rational numbers (3, -1/2, 0.25), symbols x y p q u c1 c2 c3\n"
    "and declared parameters, + - * / ^ with rational exponents, parentheses, and the\n"
    "functions sqrt, cbrt, exp, ln, sin, cos; p stands for y', q for y''.";

// ---------------------------------------------------------------------------
// Shared command state
// ---------------------------------------------------------------------------

struct Output {
    json result = json::object();
    std::vector<std::pair<std::string, std::string>> rows; // table payload
    std::vector<std::string> latex;                        // latex payload
    bool unknown_seen = false;
};

struct Session {
    RunConfig rc;
    std::vector<std::string> raw_params;

    void finalize_params() {
        for (const auto& spec : raw_params) {
            std::string name = spec;
            std::optional<double> value;
            auto eq = spec.find('=');
            if (eq != std::string::npos) {
                name = spec.substr(0, eq);
                try {
                    value = std::stod(spec.substr(eq + 1));
                } catch (const std::exception&) {
                    throw Error("cannot parse parameter value in '--param " + spec + "'");
                }
            }
            if (name.empty()) throw Error("empty parameter name in '--param " + spec + "'");
            static const std::set<std::string> reserved = {"x", "y", "p", "q",
                                                           "u", "c1", "c2", "c3"};
            if (reserved.count(name))
                throw Error("'" + name + "' is a coordinate and cannot be a parameter");
            if (value)
                rc.bound_parameters[name] = *value;
            else
                rc.symbolic_parameters.insert(name);
        }
    }

    Ode3 ode(const std::string& f) const { return parse_ode(f, rc.parameter_names()); }

    ExprPtr expr(const std::string& s, std::set<std::string> coords) const {
        for (const auto& p : rc.parameter_names()) coords.insert(p);
        return parse_expr(s, coords);
    }
};

std::string escape_latex(const std::string& s) {
    std::string out;
    for (char c : s) {
        if (c == '_' || c == '%' || c == '#' || c == '&') out += '\\';
        out += c;
    }
    return out;
}

// Exact rational from a decimal or fraction literal ("0.3" -> 3/10).
Rational parse_rational(const std::string& s) {
    try {
        auto slash = s.find('/');
        if (slash != std::string::npos) {
            Rational r(s);
            r.canonicalize();
            return r;
        }
        auto dot = s.find('.');
        if (dot == std::string::npos) {
            Rational r(s);
            r.canonicalize();
            return r;
        }
        std::string digits = s.substr(0, dot) + s.substr(dot + 1);
        std::size_t frac_len = s.size() - dot - 1;
        std::string den = "1" + std::string(frac_len, '0');
        Rational r(digits + "/" + den);
        r.canonicalize();
        return r;
    } catch (const std::exception&) {
        throw Error("cannot parse '" + s + "' as a rational number");
    }
}

void note_verdict(Output& out, ZeroVerdict v) {
    if (v == ZeroVerdict::Unknown) out.unknown_seen = true;
}

// ---------------------------------------------------------------------------
// Rendering helpers
// ---------------------------------------------------------------------------

void add_form(Output& out, const std::string& name, const std::string& latex_name,
              const DifferentialForm& f) {
    out.result[name] = to_json(f);
    out.rows.push_back({name, form_to_plain(f)});
    out.latex.push_back("\\[" + latex_name + " = " + form_to_latex(f) + "\\]");
}

void add_sym_tensor(Output& out, const std::string& name, const std::string& latex_name,
                    const SymTensor2& t) {
    out.result[name] = to_json(t);
    for (auto& r : sym_to_rows(t, name)) out.rows.push_back(r);
    out.latex.push_back("\\[" + latex_name + " = " + sym_to_latex(t) + "\\]");
}

void add_matrix(Output& out, const std::string& name, const ConnectionMatrix& m) {
    out.result[name] = to_json(m.forms);
    out.result["algebra"] = to_string(m.algebra);
    for (std::size_t i = 0; i < m.forms.rows(); ++i)
        for (std::size_t j = 0; j < m.forms.cols(); ++j)
            if (!m.forms.entries[i][j].is_zero())
                out.rows.push_back({name + "[" + std::to_string(i + 1) + "][" +
                                        std::to_string(j + 1) + "]",
                                    form_to_plain(m.forms.entries[i][j])});
    if (out.rows.empty()) out.rows.push_back({name, "0"});
    out.latex.push_back("\\[" + name + " = " + matrix_to_latex(m.forms) + "\\]");
}

void add_curvature(Output& out, const std::string& name, const MatrixOfForms& m) {
    out.result[name] = to_json(m);
    bool any = false;
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j)
            if (!m.entries[i][j].is_zero()) {
                out.rows.push_back({name + "[" + std::to_string(i + 1) + "][" +
                                        std::to_string(j + 1) + "]",
                                    form_to_plain(m.entries[i][j])});
                any = true;
            }
    if (!any) out.rows.push_back({name, "0"});
    out.latex.push_back("\\[" + name + " = " + matrix_to_latex(m) + "\\]");
}

void rows_from_json(Output& out) { flatten_json(out.result, "", out.rows); }

void latex_from_rows(Output& out) {
    out.latex.push_back("\\begin{tabular}{ll}");
    for (const auto& r : out.rows)
        out.latex.push_back("  " + escape_latex(r.first) + " & " + escape_latex(r.second) +
                            " \\\\");
    out.latex.push_back("\\end{tabular}");
}

// ---------------------------------------------------------------------------
// Subcommand implementations
// ---------------------------------------------------------------------------

Output run_invariants(const Session& s, const std::string& f, std::vector<std::string> names) {
    Ode3 ode = s.ode(f);
    InvariantEngine eng(ode);
    if (names.empty())
        for (const auto& [id, nm] : invariant_name_table()) names.push_back(nm);
    Output out;
    json errors = json::object();
    for (const auto& name : names) {
        std::optional<InvariantName> id;
        for (const auto& [iid, nm] : invariant_name_table())
            if (name == nm) id = iid;
        if (!id) throw Error("unknown invariant '" + name + "'");
        try {
            ExprPtr v = to_expr(eng.invariant(*id));
            out.result[name] = to_string(v);
            out.rows.push_back({name, to_string(v)});
            out.latex.push_back("\\[" + escape_latex(name) + " = " + to_latex(v) + "\\]");
        } catch (const Error& e) {
            out.result[name] = nullptr;
            errors[name] = e.what();
            out.rows.push_back({name, std::string("undefined (") + e.what() + ")"});
        }
    }
    if (!errors.empty()) out.result["errors"] = errors;
    return out;
}

Output run_classify(const Session& s, const std::string& f) {
    ClassificationReport rep = classify(s.ode(f), s.rc.probe_config());
    Output out;
    out.result = to_json(rep);
    for (const auto& c : rep.conditions) {
        out.rows.push_back({c.id, to_string(c.outcome)});
        if (c.outcome == ConditionOutcome::Unknown) out.unknown_seen = true;
    }
    out.rows.push_back({"ricci_sign", rep.ricci_sign});
    if (rep.ricci_sign == "unknown") out.unknown_seen = true;
    if (rep.linearization_mu)
        out.rows.push_back({"linearization_mu", to_string(rep.linearization_mu)});
    if (rep.cubic) {
        out.rows.push_back({"cubic.a3", to_string(rep.cubic->a3)});
        out.rows.push_back({"cubic.a2", to_string(rep.cubic->a2)});
        out.rows.push_back({"cubic.a1", to_string(rep.cubic->a1)});
        out.rows.push_back({"cubic.a0", to_string(rep.cubic->a0)});
    }
    for (const auto& n : rep.notes) out.rows.push_back({"note", n});
    latex_from_rows(out);
    return out;
}

Picture parse_picture(const std::string& s) {
    if (s == "contact") return Picture::Contact;
    if (s == "point") return Picture::Point;
    if (s == "fibre") return Picture::Fibre;
    throw Error("unknown picture '" + s + "' (expected contact, point or fibre)");
}

Output run_coframe(const Session& s, const std::string& f, const std::string& picture) {
    Picture pic = parse_picture(picture);
    GeometryEngine geo(s.ode(f));
    auto cf = geo.coframe(pic);
    const char* names[4] = {"omega1", "omega2", "omega3_tilde",
                            pic == Picture::Point ? "omega4_tilde" : "omega4"};
    const char* latex_names[4] = {"\\omega^{1}", "\\omega^{2}", "\\tilde\\omega^{3}",
                                  pic == Picture::Point ? "\\tilde\\omega^{4}" : "\\omega^{4}"};
    Output out;
    out.result["picture"] = picture;
    for (int i = 0; i < 4; ++i) add_form(out, names[i], latex_names[i], cf[i]);
    return out;
}

Output run_connection(const Session& s, const std::string& f, const std::string& picture) {
    GeometryEngine geo(s.ode(f));
    ConnectionMatrix c = geo.connection(parse_picture(picture));
    Output out;
    out.result["picture"] = picture;
    add_matrix(out, "connection", c);
    return out;
}

Output run_curvature(const Session& s, const std::string& f, const std::string& picture) {
    GeometryEngine geo(s.ode(f));
    ConnectionMatrix c = geo.connection(parse_picture(picture));
    MatrixOfForms k = geo.curvature(c);
    Output out;
    out.result["picture"] = picture;
    out.result["algebra"] = to_string(c.algebra);
    add_curvature(out, "curvature", k);
    return out;
}

Output run_metric(const Session& s, const std::string& f) {
    GeometryEngine geo(s.ode(f));
    Output out;
    out.result["variant"] = std::string(1, s.rc.metric_variant);
    add_sym_tensor(out, "conformal_metric", "g", geo.conformal_metric());
    add_sym_tensor(out, "six_dim_metric", "\\hat g", geo.six_dim_metric(s.rc.metric_variant));
    add_form(out, "weyl_potential", "\\varphi", geo.weyl_potential());
    return out;
}

Output run_cotton(const Session& s, const std::string& f) {
    GeometryEngine geo(s.ode(f));
    auto dp = geo.cotton();
    Output out;
    add_form(out, "P1", "P_{1}", dp[0]);
    add_form(out, "P2", "P_{2}", dp[1]);
    add_form(out, "P3", "P_{3}", dp[2]);
    return out;
}

Output run_fivedim(const Session& s, const std::string& f) {
    Ode3 ode = s.ode(f);
    GeometryEngine geo(ode);
    auto cf = geo.five_dim_coframe();
    FiveDimStructure st = geo.five_dim_structure();
    Output out;
    const char* names[5] = {"theta1", "theta2", "theta3", "theta4", "Omega"};
    const char* latex_names[5] = {"\\theta^{1}", "\\theta^{2}", "\\theta^{3}", "\\theta^{4}",
                                  "\\Omega"};
    for (int i = 0; i < 5; ++i) add_form(out, names[i], latex_names[i], cf[i]);

    InvariantEngine eng(ode);
    json inv = json::object();
    for (const char* nm : {"a5", "b5", "e5", "h5", "k5"}) {
        for (const auto& [iid, n] : invariant_name_table())
            if (std::string(nm) == n) {
                ExprPtr v = to_expr(eng.invariant(iid));
                inv[nm] = to_string(v);
                out.rows.push_back({nm, to_string(v)});
                out.latex.push_back("\\[" + std::string(nm) + " = " + to_latex(v) + "\\]");
            }
    }
    out.result["invariants"] = inv;

    json sf = json::object();
    const std::pair<const char*, const Fraction*> slots[] = {
        {"a", &st.a}, {"b", &st.b}, {"c", &st.c}, {"e", &st.e}, {"f", &st.f},
        {"g", &st.g}, {"h", &st.h}, {"k", &st.k}, {"l", &st.l}, {"m", &st.m}};
    for (const auto& [nm, fr] : slots) {
        std::string v = to_string(to_expr(*fr));
        sf[nm] = v;
        out.rows.push_back({std::string("structure.") + nm, v});
    }
    out.result["structure_functions"] = sf;
    return out;
}

VariableMap build_map(const Session& s, const std::string& kind_str, const std::string& chi,
                      const std::string& phi, const std::string& psi,
                      const std::vector<std::string>& inverse) {
    MapKind kind = map_kind_of(kind_str);
    std::set<std::string> coords =
        kind == MapKind::Contact ? std::set<std::string>{"x", "y", "p"}
                                 : std::set<std::string>{"x", "y"};
    ExprPtr chi_e = s.expr(chi, coords);
    ExprPtr phi_e = s.expr(phi, coords);
    ExprPtr psi_e = psi.empty() ? nullptr : s.expr(psi, coords);
    std::vector<ExprPtr> inv;
    for (const auto& c : inverse) inv.push_back(s.expr(c, coords));
    return make_variable_map(kind, chi_e, phi_e, psi_e, inv, s.rc.parameter_names(),
                             s.rc.probe_config());
}

Output run_transform(const Session& s, const std::string& f, const std::string& kind,
                     const std::string& chi, const std::string& phi, const std::string& psi,
                     const std::vector<std::string>& inverse) {
    VariableMap map = build_map(s, kind, chi, phi, psi, inverse);
    Ode3 ode = s.ode(f);
    ProlongedMap pm = prolong(map, ode, s.rc.probe_config());
    Ode3 image = transform_ode(map, ode, s.rc.probe_config());
    Output out;
    out.result["map_kind"] = kind;
    out.result["F_bar"] = to_string(image.F);
    out.result["prolongation"] = json{{"xbar", to_string(pm.xbar)},
                                      {"ybar", to_string(pm.ybar)},
                                      {"pbar", to_string(pm.pbar)},
                                      {"qbar", to_string(pm.qbar)},
                                      {"rbar", to_string(pm.rbar)}};
    rows_from_json(out);
    out.latex.push_back("\\[\\bar F = " + to_latex(image.F) + "\\]");
    return out;
}

Output run_verify(const Session& s, const std::string& source, const std::string& target,
                  const std::string& kind, const std::string& chi, const std::string& phi,
                  const std::string& psi) {
    VariableMap map = build_map(s, kind, chi, phi, psi, {});
    Ode3 src = s.ode(source);
    Ode3 tgt = s.ode(target);
    ProbeConfig cfg = s.rc.probe_config();
    ProlongedMap pm = prolong(map, src, cfg);
    ExprPtr image = substitute(
        tgt.F, {{"x", pm.xbar}, {"y", pm.ybar}, {"p", pm.pbar}, {"q", pm.qbar}});
    ExprPtr residual = sub(image, pm.rbar);
    ZeroTestResult res = is_zero_detailed(residual, cfg);
    Output out;
    out.result["map_kind"] = kind;
    out.result["verdict"] = to_string(res.verdict);
    out.result["residual"] = to_string(to_expr(normal_form(residual)));
    if (res.witness) {
        json w = json::object();
        for (const auto& [k, v] : res.witness->values) w[k] = v;
        out.result["witness"] = w;
        out.result["witness_value"] = res.witness_value;
    }
    note_verdict(out, res.verdict);
    rows_from_json(out);
    latex_from_rows(out);
    return out;
}

Output run_oracle(const Session& s, const std::string& f, const std::string& which) {
    Ode3 ode = s.ode(f);
    ProbeConfig cfg = s.rc.probe_config();
    Output out;
    auto ingest = [&](const char* key, const ObstructionReport& rep) {
        out.result[key] = to_json(rep);
        out.rows.push_back({std::string(key) + ".overall", to_string(rep.overall)});
        note_verdict(out, rep.overall);
        for (const auto& c : rep.components) {
            out.rows.push_back({std::string(key) + "." + c.name, to_string(c.verdict)});
            note_verdict(out, c.verdict);
        }
        for (const auto& c : rep.context)
            out.rows.push_back({std::string(key) + "." + c.name, to_string(c.verdict)});
    };
    if (which == "transport" || which == "both")
        ingest("transport", wunschmann_oracle(ode, cfg));
    if (which == "descent" || which == "both")
        ingest("descent", ew_descent_obstruction(ode, cfg));
    if (out.result.empty())
        throw Error("unknown oracle check '" + which + "' (expected transport, descent or both)");
    latex_from_rows(out);
    return out;
}

Output run_solution_space(const Session& s, const std::string& f, const std::string& solution,
                          std::vector<std::string> x0_raw, int grid_points) {
    Ode3 ode = s.ode(f);
    std::set<std::string> coords = {"x", "c1", "c2", "c3"};
    ExprPtr sol = s.expr(solution, coords);
    if (x0_raw.empty()) x0_raw.push_back("0");
    std::vector<Rational> x0s;
    for (const auto& r : x0_raw) x0s.push_back(parse_rational(r));

    GeometryEngine geo(ode);
    EwGridConfig grid;
    grid.points_per_axis = grid_points;
    grid.probe = s.rc.probe_config();

    Output out;
    json per = json::array();
    for (const auto& x0 : x0s) {
        SymTensor2 g = geo.solution_space_metric(sol, x0, grid.probe);
        DifferentialForm phi = geo.solution_space_potential(sol, x0, grid.probe);
        json j;
        j["x0"] = x0.get_str();
        j["metric"] = to_json(g);
        j["potential"] = to_json(phi);
        per.push_back(std::move(j));
        std::string tag = "x0=" + x0.get_str();
        for (auto& r : sym_to_rows(g, "g(" + tag + ")")) out.rows.push_back(r);
        out.rows.push_back({"phi(" + tag + ")", form_to_plain(phi)});
        out.latex.push_back("\\[g|_{x_0=" + x0.get_str() + "} = " + sym_to_latex(g) + "\\]");
        out.latex.push_back("\\[\\varphi|_{x_0=" + x0.get_str() + "} = " + form_to_latex(phi) +
                            "\\]");
    }
    out.result["per_x0"] = per;

    EwNumericReport num = ew_numeric_check(ode, sol, x0s, grid);
    out.result["numeric"] = to_json(num);
    for (const auto& r : num.per_x0) {
        std::string tag = "numeric(x0=" + r.x0.get_str() + ")";
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.6e", r.max_residual);
        out.rows.push_back({tag + ".max_residual", buf});
        out.rows.push_back({tag + ".ricci_sign", r.ricci_sign});
    }
    return out;
}

// ---------------------------------------------------------------------------
// Output emission
// ---------------------------------------------------------------------------

int emit(const Session& s, const std::string& command, const std::string& input_desc,
         const Output& out) {
    switch (s.rc.format) {
        case OutputFormat::Json: {
            json envelope;
            envelope["tool"] = "ode3geo";
            envelope["command"] = command;
            envelope["config"] = to_json(s.rc);
            if (!input_desc.empty()) envelope["input"] = input_desc;
            envelope["result"] = out.result;
            std::fputs((envelope.dump(2) + "\n").c_str(), stdout);
            break;
        }
        case OutputFormat::Table: {
            std::vector<std::pair<std::string, std::string>> head;
            flatten_json(to_json(s.rc), "config", head);
            std::string header;
            for (const auto& h : head) header += "# " + h.first + " = " + h.second + "\n";
            if (!input_desc.empty()) header += "# input = " + input_desc + "\n";
            std::fputs(header.c_str(), stdout);
            std::fputs(render_table(out.rows).c_str(), stdout);
            break;
        }
        case OutputFormat::Latex: {
            std::vector<std::pair<std::string, std::string>> head;
            flatten_json(to_json(s.rc), "config", head);
            std::string text;
            for (const auto& h : head) text += "% " + h.first + " = " + h.second + "\n";
            if (!input_desc.empty()) text += "% input = " + input_desc + "\n";
            for (const auto& line : out.latex) text += line + "\n";
            std::fputs(text.c_str(), stdout);
            break;
        }
    }
    return out.unknown_seen ? 2 : 0;
}

} // namespace

// ---------------------------------------------------------------------------
// main
// ---------------------------------------------------------------------------

int main(int argc, char** argv) {
    CLI::App app{"Differential geometry of third-order ODEs y''' = F(x, y, y', y'')"};
    app.require_subcommand(1);

    Session s;
    std::string format_str = "json";
    std::string metric_variant = "c";
    app.add_option("--seed", s.rc.seed, "probe RNG seed");
    app.add_option("--probes", s.rc.probes, "numeric probe count for zero tests");
    app.add_option("--abs-threshold", s.rc.abs_threshold, "absolute zero threshold");
    app.add_option("--rel-threshold", s.rc.rel_threshold, "relative zero threshold");
    app.add_option("--format", format_str, "output format: json, latex or table");
    app.add_option("--param", s.raw_params,
                   "declare a parameter: NAME for symbolic, NAME=VALUE to bind")
        ->allow_extra_args(false);
    app.add_option("--metric-variant", metric_variant,
                   "six-dimensional metric variant: c (contact) or p (point)");

    std::string f, picture = "contact", names_f;
    std::vector<std::string> inv_names;
    std::string map_kind = "point", chi, phi, psi;
    std::string inv_chi, inv_phi, inv_psi;
    std::string source, target, solution, oracle_which = "both";
    std::vector<std::string> x0_list;
    int grid_points = 9;

    auto add_f = [&](CLI::App* cmd) {
        cmd->add_option("F", f, "right-hand side of y''' = F(x, y, p, q)")->required();
        cmd->fallthrough();
    };

    CLI::App* c_inv = app.add_subcommand("invariants", "scalar invariants of the equation");
    c_inv->add_option("--name", inv_names, "invariant name (repeatable; default: all)")
        ->allow_extra_args(false);
    add_f(c_inv);

    CLI::App* c_classify = app.add_subcommand("classify", "equivalence-class membership report");
    add_f(c_classify);

    CLI::App* c_coframe = app.add_subcommand("coframe", "adapted coframe of a picture");
    c_coframe->add_option("--picture", picture, "contact, point or fibre");
    add_f(c_coframe);

    CLI::App* c_conn = app.add_subcommand("connection", "Cartan connection matrix");
    c_conn->add_option("--picture", picture, "contact, point or fibre");
    add_f(c_conn);

    CLI::App* c_curv = app.add_subcommand("curvature", "curvature of the Cartan connection");
    c_curv->add_option("--picture", picture, "contact, point or fibre");
    add_f(c_curv);

    CLI::App* c_metric = app.add_subcommand("metric", "conformal and lifted metrics");
    add_f(c_metric);

    CLI::App* c_cotton = app.add_subcommand("cotton", "conformal-to-flat obstruction 2-forms");
    add_f(c_cotton);

    CLI::App* c_five = app.add_subcommand("fivedim", "five-dimensional reduction (needs W != 0)");
    add_f(c_five);

    CLI::App* c_transform = app.add_subcommand("transform", "push the equation through a map");
    c_transform->add_option("--map-kind", map_kind, "fibre, point or contact");
    c_transform->add_option("--chi", chi, "xbar component")->required();
    c_transform->add_option("--phi", phi, "ybar component")->required();
    c_transform->add_option("--psi", psi, "pbar component (contact maps)");
    c_transform->add_option("--inverse-chi", inv_chi, "x component of the inverse")->required();
    c_transform->add_option("--inverse-phi", inv_phi, "y component of the inverse")->required();
    c_transform->add_option("--inverse-psi", inv_psi, "p component of the inverse");
    add_f(c_transform);

    CLI::App* c_verify = app.add_subcommand("verify", "test whether a map sends source to target");
    c_verify->add_option("--map-kind", map_kind, "fibre, point or contact");
    c_verify->add_option("--chi", chi, "xbar component")->required();
    c_verify->add_option("--phi", phi, "ybar component")->required();
    c_verify->add_option("--psi", psi, "pbar component (contact maps)");
    c_verify->add_option("--source", source, "source equation right-hand side")->required();
    c_verify->add_option("--target", target, "target equation right-hand side")->required();
    c_verify->fallthrough();

    CLI::App* c_oracle = app.add_subcommand("oracle", "independent geometric verification");
    c_oracle->add_option("--check", oracle_which, "transport, descent or both");
    add_f(c_oracle);

    CLI::App* c_sol = app.add_subcommand("solution-space",
                                         "pull the Weyl structure back along a general solution");
    c_sol->add_option("--solution", solution, "general solution f(x; c1, c2, c3)")->required();
    c_sol->add_option("--x0", x0_list, "section position (repeatable; rational or decimal)")
        ->allow_extra_args(false);
    c_sol->add_option("--grid-points", grid_points, "numeric grid points per axis");
    add_f(c_sol);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        if (code != 0) std::fprintf(stderr, "%s\n", kGrammar);
        return code == 0 ? 0 : 1;
    }

    try {
        s.finalize_params();
        auto fmt = parse_output_format(format_str);
        if (!fmt) throw Error("unknown format '" + format_str + "'");
        s.rc.format = *fmt;
        if (metric_variant != "c" && metric_variant != "p")
            throw Error("metric variant must be c or p");
        s.rc.metric_variant = metric_variant[0];

        if (c_inv->parsed()) return emit(s, "invariants", f, run_invariants(s, f, inv_names));
        if (c_classify->parsed()) return emit(s, "classify", f, run_classify(s, f));
        if (c_coframe->parsed()) return emit(s, "coframe", f, run_coframe(s, f, picture));
        if (c_conn->parsed()) return emit(s, "connection", f, run_connection(s, f, picture));
        if (c_curv->parsed()) return emit(s, "curvature", f, run_curvature(s, f, picture));
        if (c_metric->parsed()) return emit(s, "metric", f, run_metric(s, f));
        if (c_cotton->parsed()) return emit(s, "cotton", f, run_cotton(s, f));
        if (c_five->parsed()) return emit(s, "fivedim", f, run_fivedim(s, f));
        if (c_transform->parsed()) {
            std::vector<std::string> inverse;
            if (!inv_chi.empty()) inverse.push_back(inv_chi);
            if (!inv_phi.empty()) inverse.push_back(inv_phi);
            if (!inv_psi.empty()) inverse.push_back(inv_psi);
            return emit(s, "transform", f,
                        run_transform(s, f, map_kind, chi, phi, psi, inverse));
        }
        if (c_verify->parsed())
            return emit(s, "verify", source + " -> " + target,
                        run_verify(s, source, target, map_kind, chi, phi, psi));
        if (c_oracle->parsed()) return emit(s, "oracle", f, run_oracle(s, f, oracle_which));
        if (c_sol->parsed())
            return emit(s, "solution-space", f,
                        run_solution_space(s, f, solution, x0_list, grid_points));
        throw Error("no subcommand selected");
    } catch (const ParseError& e) {
        std::fprintf(stderr, "error: %s\n%s\n", e.what(), kGrammar);
        return 1;
    } catch (const Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "internal error: %s\n", e.what());
        return 1;
    }
}
