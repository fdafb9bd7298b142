// prolong.hpp
//
// Jet prolongation of variable changes.  A change of variables on the
// (x, y) plane (or on the first jet space, for contact maps) lifts to the
// space of second jets by repeated total differentiation:
//
//     pbar = Dphi / Dchi,   qbar = D(pbar) / Dchi,   rbar = D(qbar) / Dchi,
//
// where D is the total derivative along solutions of the source equation
// (the third derivative is replaced by F).  The lifted map transports one
// equation into another; `transform_ode` computes the transported
// right-hand side when a closed-form inverse is supplied, and
// `verify_equivalence` checks a claimed equivalence without any inverse.

#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "ode3geo/ode.hpp"

namespace ode3geo {

// ---------------------------------------------------------------------------
// Map kinds
// ---------------------------------------------------------------------------

// Ordered by generality: every fibre-preserving map is a point map and every
// point map (prolonged once) is a contact map.
enum class MapKind { Fibre, Point, Contact };

inline std::string to_string(MapKind k) {
    switch (k) {
        case MapKind::Fibre: return "fibre";
        case MapKind::Point: return "point";
        default: return "contact";
    }
}

inline MapKind map_kind_of(const std::string& s) {
    if (s == "fibre") return MapKind::Fibre;
    if (s == "point") return MapKind::Point;
    if (s == "contact") return MapKind::Contact;
    throw Error("unknown map kind '" + s + "' (expected fibre, point or contact)");
}

// ---------------------------------------------------------------------------
// VariableMap
// ---------------------------------------------------------------------------

// A change of variables:
//   fibre:    xbar = chi(x),        ybar = phi(x, y)
//   point:    xbar = chi(x, y),     ybar = phi(x, y)
//   contact:  xbar = chi(x, y, p),  ybar = phi(x, y, p),  pbar = psi(x, y, p)
// `inverse`, when present, holds the components of the inverse map written
// in the barred variables (named x, y and, for contact maps, p).
struct VariableMap {
    MapKind kind = MapKind::Point;
    ExprPtr chi;
    ExprPtr phi;
    ExprPtr psi;                      // contact maps only
    std::vector<ExprPtr> inverse;     // empty, {chi, phi} or {chi, phi, psi}
    std::set<std::string> parameters; // symbolic constants appearing in the map
};

namespace detail {

inline void check_frees(const ExprPtr& e, const std::set<std::string>& allowed,
                        const std::set<std::string>& parameters, const std::string& what) {
    std::set<std::string> frees;
    collect_symbols(e, frees);
    for (const auto& s : frees) {
        if (allowed.count(s) || parameters.count(s)) continue;
        throw CoordinateMismatchError(what + " depends on '" + s +
                                      "', which this map kind does not allow");
    }
}

} // namespace detail

// Builds a map and validates the shape constraints of its kind.  Contact maps
// must satisfy the two compatibility constraints
//     psi * chi_p = phi_p     and     psi * (chi_x + p chi_y) = phi_x + p phi_y,
// which express that the pbar component really is the transported first
// derivative; a map provably violating them is rejected.
inline VariableMap make_variable_map(MapKind kind, const ExprPtr& chi, const ExprPtr& phi,
                                     const ExprPtr& psi = nullptr,
                                     std::vector<ExprPtr> inverse = {},
                                     std::set<std::string> parameters = {},
                                     const ProbeConfig& cfg = {}) {
    if (!chi || !phi) throw Error("variable map needs both chi and phi components");
    switch (kind) {
        case MapKind::Fibre:
            detail::check_frees(chi, {"x"}, parameters, "fibre map component chi");
            detail::check_frees(phi, {"x", "y"}, parameters, "fibre map component phi");
            break;
        case MapKind::Point:
            detail::check_frees(chi, {"x", "y"}, parameters, "point map component chi");
            detail::check_frees(phi, {"x", "y"}, parameters, "point map component phi");
            break;
        case MapKind::Contact: {
            if (!psi) throw Error("contact maps require the psi component");
            detail::check_frees(chi, {"x", "y", "p"}, parameters, "contact map component chi");
            detail::check_frees(phi, {"x", "y", "p"}, parameters, "contact map component phi");
            detail::check_frees(psi, {"x", "y", "p"}, parameters, "contact map component psi");
            ExprPtr c1 = sub(mul(psi, diff(chi, "p")), diff(phi, "p"));
            ExprPtr c2 = sub(mul(psi, add(diff(chi, "x"), mul(sym("p"), diff(chi, "y")))),
                             add(diff(phi, "x"), mul(sym("p"), diff(phi, "y"))));
            if (is_zero(c1, cfg) == ZeroVerdict::ProvedNonzero ||
                is_zero(c2, cfg) == ZeroVerdict::ProvedNonzero)
                throw DegenerateMapError(
                    "contact map components violate the compatibility constraints "
                    "psi*chi_p = phi_p, psi*(chi_x + p chi_y) = phi_x + p phi_y");
            break;
        }
    }
    VariableMap m;
    m.kind = kind;
    m.chi = chi;
    m.phi = phi;
    m.psi = (kind == MapKind::Contact) ? psi : nullptr;
    m.inverse = std::move(inverse);
    m.parameters = std::move(parameters);
    return m;
}

inline VariableMap identity_map(MapKind kind = MapKind::Point) {
    return make_variable_map(kind, sym("x"), sym("y"),
                             kind == MapKind::Contact ? sym("p") : nullptr,
                             {sym("x"), sym("y"), sym("p")});
}

// ---------------------------------------------------------------------------
// Prolongation
// ---------------------------------------------------------------------------

// Images of the jet coordinates under the lifted map, as expressions in the
// source coordinates (x, y, p, q).  rbar is the transported third derivative
// along the source equation.
struct ProlongedMap {
    ExprPtr xbar, ybar, pbar, qbar, rbar;
};

namespace detail {

inline Ode3 with_map_parameters(const Ode3& ode, const VariableMap& map) {
    if (map.parameters.empty()) return ode;
    std::set<std::string> merged = ode.parameters;
    merged.insert(map.parameters.begin(), map.parameters.end());
    return make_ode(ode.F, std::move(merged));
}

} // namespace detail

inline ProlongedMap prolong(const VariableMap& map, const Ode3& ode,
                            const ProbeConfig& cfg = {}) {
    (void)cfg;
    InvariantEngine eng(detail::with_map_parameters(ode, map));
    const Fraction chi = normal_form(map.chi);
    const Fraction phi = normal_form(map.phi);

    // Dchi is a function of at most (x, y, p, q); its normal form is zero
    // exactly when the map collapses the independent variable.
    const Fraction Dchi = eng.D(chi);
    if (Dchi.is_zero())
        throw DegenerateMapError("total derivative of chi vanishes identically; "
                                 "the map does not define a new independent variable");

    const Fraction pbar = div_fraction(eng.D(phi), Dchi);
    const Fraction qbar = div_fraction(eng.D(pbar), Dchi);
    const Fraction rbar = div_fraction(eng.D(qbar), Dchi);

    ProlongedMap out;
    out.xbar = to_expr(chi);
    out.ybar = to_expr(phi);
    out.pbar = to_expr(pbar);
    out.qbar = to_expr(qbar);
    out.rbar = to_expr(rbar);
    return out;
}

// ---------------------------------------------------------------------------
// Transporting an equation
// ---------------------------------------------------------------------------

inline Ode3 transform_ode(const VariableMap& map, const Ode3& ode,
                          const ProbeConfig& cfg = {}) {
    if (map.inverse.size() < 2)
        throw MissingInverseError("transform_ode requires the closed-form inverse "
                                  "components of the map");
    const bool contact = (map.kind == MapKind::Contact);
    if (contact && map.inverse.size() < 3)
        throw MissingInverseError("contact maps require all three inverse components");

    const ExprPtr inv_chi = map.inverse[0];
    const ExprPtr inv_phi = map.inverse[1];
    const ExprPtr inv_psi = contact ? map.inverse[2] : nullptr;

    // The supplied inverse must actually undo the forward map: composing it
    // with (chi, phi[, psi]) has to give back the identity on each coordinate.
    std::map<std::string, ExprPtr> forward = {{"x", map.chi}, {"y", map.phi}};
    if (contact) forward["p"] = map.psi;
    auto check_identity = [&](const ExprPtr& component, const char* name) {
        ExprPtr resid = sub(substitute(component, forward), sym(name));
        if (is_zero(resid, cfg) != ZeroVerdict::ProvedZero)
            throw InverseMismatchError(std::string("inverse component for '") + name +
                                       "' does not invert the forward map");
    };
    check_identity(inv_chi, "x");
    check_identity(inv_phi, "y");
    if (contact) check_identity(inv_psi, "p");

    // Prolong the inverse to second order.  Its components depend on (x, y, p)
    // at most, so only the truncated total derivative d/dx + p d/dy + q d/dp
    // is needed -- no reference to the (unknown) transported equation.
    const Fraction px = normal_form(sym("p"));
    const Fraction qx = normal_form(sym("q"));
    auto trunc_D = [&](const Fraction& f) {
        return add_fraction(diff_fraction(f, "x"),
                            add_fraction(mul_fraction(px, diff_fraction(f, "y")),
                                         mul_fraction(qx, diff_fraction(f, "p"))));
    };
    const Fraction ichi = normal_form(inv_chi);
    const Fraction iphi = normal_form(inv_phi);
    const Fraction iDchi = trunc_D(ichi);
    if (iDchi.is_zero())
        throw DegenerateMapError("total derivative of the inverse chi vanishes identically");
    const Fraction ip = div_fraction(trunc_D(iphi), iDchi);
    const Fraction iq = div_fraction(trunc_D(ip), iDchi);

    // The transported right-hand side is rbar written in the barred jet
    // coordinates; substituting the inverse prolongation renames them back
    // to plain (x, y, p, q).
    ProlongedMap fwd = prolong(map, ode, cfg);
    ExprPtr fbar = substitute(fwd.rbar, {{"x", to_expr(ichi)},
                                         {"y", to_expr(iphi)},
                                         {"p", to_expr(ip)},
                                         {"q", to_expr(iq)}});
    std::set<std::string> merged = ode.parameters;
    merged.insert(map.parameters.begin(), map.parameters.end());
    return make_ode(to_expr(normal_form(fbar)), std::move(merged));
}

// ---------------------------------------------------------------------------
// Equivalence verification
// ---------------------------------------------------------------------------

// Checks the claim "map transports `source` into `target`" directly:
// the target right-hand side, evaluated on the prolonged images, must agree
// with the transported third derivative.  No inverse is needed.
inline ZeroVerdict verify_equivalence(const VariableMap& map, const Ode3& source,
                                      const Ode3& target, const ProbeConfig& cfg = {}) {
    ProlongedMap P = prolong(map, source, cfg);
    ExprPtr image = substitute(target.F, {{"x", P.xbar},
                                          {"y", P.ybar},
                                          {"p", P.pbar},
                                          {"q", P.qbar}});
    return is_zero(sub(image, P.rbar), cfg);
}

// ---------------------------------------------------------------------------
// Composition
// ---------------------------------------------------------------------------

// Composite map outer . inner (apply `inner` first).  The composite kind is
// the wider of the two kinds; inverses compose in the opposite order when
// both are available.
inline VariableMap compose_maps(const VariableMap& outer, const VariableMap& inner,
                                const ProbeConfig& cfg = {}) {
    MapKind kind = std::max(outer.kind, inner.kind);

    std::map<std::string, ExprPtr> into_inner = {{"x", inner.chi}, {"y", inner.phi}};
    // The inner pbar image: psi for contact maps, the lifted quotient otherwise.
    ExprPtr inner_pbar;
    if (inner.kind == MapKind::Contact) {
        inner_pbar = inner.psi;
    } else {
        ExprPtr Dchi = add(diff(inner.chi, "x"), mul(sym("p"), diff(inner.chi, "y")));
        ExprPtr Dphi = add(diff(inner.phi, "x"), mul(sym("p"), diff(inner.phi, "y")));
        inner_pbar = quot(Dphi, Dchi);
    }
    into_inner["p"] = inner_pbar;

    ExprPtr chi = substitute(outer.chi, into_inner);
    ExprPtr phi = substitute(outer.phi, into_inner);
    ExprPtr psi;
    if (kind == MapKind::Contact) {
        if (outer.kind == MapKind::Contact)
            psi = substitute(outer.psi, into_inner);
        else {
            // An outer plane map acts on first jets through its own lift.
            ExprPtr Dchi = add(diff(outer.chi, "x"), mul(sym("p"), diff(outer.chi, "y")));
            ExprPtr Dphi = add(diff(outer.phi, "x"), mul(sym("p"), diff(outer.phi, "y")));
            psi = substitute(quot(Dphi, Dchi), into_inner);
        }
    }

    std::vector<ExprPtr> inverse;
    if (outer.inverse.size() >= 2 && inner.inverse.size() >= 2) {
        std::map<std::string, ExprPtr> into_outer_inv = {{"x", outer.inverse[0]},
                                                         {"y", outer.inverse[1]}};
        if (outer.inverse.size() >= 3) into_outer_inv["p"] = outer.inverse[2];
        inverse.push_back(substitute(inner.inverse[0], into_outer_inv));
        inverse.push_back(substitute(inner.inverse[1], into_outer_inv));
        if (kind == MapKind::Contact && inner.inverse.size() >= 3 &&
            outer.inverse.size() >= 3)
            inverse.push_back(substitute(inner.inverse[2], into_outer_inv));
    }

    std::set<std::string> parameters = outer.parameters;
    parameters.insert(inner.parameters.begin(), inner.parameters.end());
    return make_variable_map(kind, to_expr(normal_form(chi)), to_expr(normal_form(phi)),
                             psi ? to_expr(normal_form(psi)) : nullptr,
                             std::move(inverse), std::move(parameters), cfg);
}

} // namespace ode3geo
