// ode.hpp — third-order ODEs y''' = F(x, y, y', y'') and their scalar
// invariants.
//
// An Ode3 wraps the right-hand side F as an expression in the jet coordinates
// (x, y, p, q) = (x, y, y', y'') plus declared parameters.  The invariant
// engine computes the total derivative along solutions and the named scalar
// invariants (K, L, M, W, Z, the relative invariants of the contact / point /
// fibre-preserving pictures, the five-dimensional family a5..k5, and the
// conformal-geometry scalars).  All computation happens on normal-form
// fractions with aggressive caching of repeated partial derivatives.

#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "ode3geo/normal.hpp"
#include "ode3geo/parser.hpp"

namespace ode3geo {

// ---------------------------------------------------------------------------
// Ode3
// ---------------------------------------------------------------------------

struct Ode3 {
    ExprPtr F;                         // right-hand side in (x, y, p, q)
    std::set<std::string> parameters;  // extra symbolic constants, e.g. "mu"
};

inline Ode3 make_ode(const ExprPtr& F, std::set<std::string> parameters = {}) {
    std::set<std::string> frees;
    collect_symbols(F, frees);
    for (const auto& s : frees) {
        if (s == "x" || s == "y" || s == "p" || s == "q") continue;
        if (parameters.count(s)) continue;
        throw CoordinateMismatchError("right-hand side depends on '" + s +
                                      "', which is neither a jet coordinate (x, y, p, q) "
                                      "nor a declared parameter");
    }
    return Ode3{F, std::move(parameters)};
}

inline Ode3 parse_ode(const std::string& text, std::set<std::string> parameters = {}) {
    std::set<std::string> names = {"x", "y", "p", "q"};
    for (const auto& s : parameters) names.insert(s);
    return make_ode(parse_expr(text, names), std::move(parameters));
}

// ---------------------------------------------------------------------------
// Invariant names
// ---------------------------------------------------------------------------

enum class InvariantName {
    K, L, M, W, Z,
    A1c, B1c,                          // contact picture
    A1p, B1p, B2p, B4p, C1p,           // point picture
    A1f, B1f, C1f, B5f,                // fibre-preserving picture
    a5, b5, e5, h5, k5,                // five-dimensional picture (carry u)
    EWcartan,                          // Einstein-Weyl obstruction, direct form
    RicciScalarDensity,                // 6 * B4p
    LorentzObstruction,                // Lorentzian solution-metric obstruction
};

inline const std::vector<std::pair<InvariantName, const char*>>& invariant_name_table() {
    static const std::vector<std::pair<InvariantName, const char*>> table = {
        {InvariantName::K, "K"},
        {InvariantName::L, "L"},
        {InvariantName::M, "M"},
        {InvariantName::W, "W"},
        {InvariantName::Z, "Z"},
        {InvariantName::A1c, "A1c"},
        {InvariantName::B1c, "B1c"},
        {InvariantName::A1p, "A1p"},
        {InvariantName::B1p, "B1p"},
        {InvariantName::B2p, "B2p"},
        {InvariantName::B4p, "B4p"},
        {InvariantName::C1p, "C1p"},
        {InvariantName::A1f, "A1f"},
        {InvariantName::B1f, "B1f"},
        {InvariantName::C1f, "C1f"},
        {InvariantName::B5f, "B5f"},
        {InvariantName::a5, "a5"},
        {InvariantName::b5, "b5"},
        {InvariantName::e5, "e5"},
        {InvariantName::h5, "h5"},
        {InvariantName::k5, "k5"},
        {InvariantName::EWcartan, "EWcartan"},
        {InvariantName::RicciScalarDensity, "RicciScalarDensity"},
        {InvariantName::LorentzObstruction, "LorentzObstruction"},
    };
    return table;
}

inline const char* to_string(InvariantName n) {
    for (const auto& [k, s] : invariant_name_table())
        if (k == n) return s;
    return "?";
}

inline std::optional<InvariantName> invariant_name_of(const std::string& s) {
    for (const auto& [k, t] : invariant_name_table())
        if (s == t) return k;
    return std::nullopt;
}

// True for the invariants whose formulas divide by W (or a root of W).
inline bool requires_nonzero_wuenschmann(InvariantName n) {
    switch (n) {
        case InvariantName::Z:
        case InvariantName::a5:
        case InvariantName::b5:
        case InvariantName::e5:
        case InvariantName::h5:
        case InvariantName::k5:
            return true;
        default:
            return false;
    }
}

// ---------------------------------------------------------------------------
// Invariant engine
// ---------------------------------------------------------------------------

// Stateful evaluator bound to one Ode3.  Keeps a DiffContext plus caches of
// the base invariants and their iterated partials, so that geometry layers
// can ask for e.g. part("K", "qq") without recomputing anything.
class InvariantEngine {
public:
    explicit InvariantEngine(Ode3 ode)
        : ode_(std::move(ode)),
          F_(normal_form(ode_.F)),
          p_(fraction_of_poly(poly_atom(make_symbol_atom("p")))),
          q_(fraction_of_poly(poly_atom(make_symbol_atom("q")))),
          u_(fraction_of_poly(poly_atom(make_symbol_atom("u")))) {}

    const Ode3& ode() const { return ode_; }
    const Fraction& F() const { return F_; }
    DiffContext& ctx() { return ctx_; }

    // Partial derivative of a fraction (no caching; cheap via DiffContext).
    Fraction d(const Fraction& f, const std::string& var) { return ctx_.diff(f, var); }

    // Total derivative along solutions: e_x + p e_y + q e_p + F e_q.
    Fraction D(const Fraction& e) {
        Fraction r = ctx_.diff(e, "x");
        r = add_fraction(r, mul_fraction(p_, ctx_.diff(e, "y")));
        r = add_fraction(r, mul_fraction(q_, ctx_.diff(e, "p")));
        r = add_fraction(r, mul_fraction(F_, ctx_.diff(e, "q")));
        return r;
    }

    // Iterated partial of a named base invariant, e.g. part("F", "qq").
    // Base names: F, K, L, M, W, Z.
    const Fraction& part(const std::string& name, const std::string& vars = "") {
        std::string key = name + "." + vars;
        auto it = cache_.find(key);
        if (it != cache_.end()) return it->second;
        Fraction v = vars.empty()
                         ? compute_base(name)
                         : ctx_.diff(part(name, vars.substr(0, vars.size() - 1)),
                                     std::string(1, vars.back()));
        return cache_.emplace(std::move(key), std::move(v)).first->second;
    }

    // Total derivative of a named base, cached ("D.Z" etc.).
    const Fraction& Dpart(const std::string& name, const std::string& vars = "") {
        std::string key = "D." + name + "." + vars;
        auto it = cache_.find(key);
        if (it != cache_.end()) return it->second;
        Fraction v = D(part(name, vars));
        return cache_.emplace(std::move(key), std::move(v)).first->second;
    }

    bool wuenschmann_vanishes() { return part("W").is_zero(); }

    // Scalar invariant as a normal-form fraction (cached per name).
    const Fraction& invariant(InvariantName n) {
        std::string key = std::string("I.") + to_string(n);
        auto it = cache_.find(key);
        if (it != cache_.end()) return it->second;
        Fraction v = compute_invariant(n);
        return cache_.emplace(std::move(key), std::move(v)).first->second;
    }

private:
    Fraction sc(const Fraction& f, long num, long den) {
        return mul_fraction(fraction_rat(Rational(num, den)), f);
    }
    static Fraction sum_of(std::initializer_list<Fraction> fs) {
        Fraction r = fraction_rat(Rational(0));
        for (const auto& f : fs) r = add_fraction(r, f);
        return r;
    }

    // Cube root of W as a fraction; requires W != 0.
    const Fraction& root_w(InvariantName who) {
        auto it = cache_.find("rootW");
        if (it != cache_.end()) return it->second;
        const Fraction& w = part("W");
        if (w.is_zero())
            throw WunschmannZeroError(std::string("invariant ") + to_string(who) +
                                      " requires W != 0, but W vanishes identically");
        return cache_.emplace("rootW", fraction_root(w, 3)).first->second;
    }

    Fraction compute_base(const std::string& name) {
        if (name == "F") return F_;
        if (name == "K") {
            // K = (1/6) D F_q - (1/9) F_q^2 - (1/2) F_p
            const Fraction& Fq = part("F", "q");
            return sum_of({sc(Dpart("F", "q"), 1, 6),
                           sc(mul_fraction(Fq, Fq), -1, 9),
                           sc(part("F", "p"), -1, 2)});
        }
        if (name == "L") {
            // L = (1/3) F_qq K - (1/3) F_q K_q - K_p - (1/3) F_qy
            return sum_of({sc(mul_fraction(part("F", "qq"), part("K")), 1, 3),
                           sc(mul_fraction(part("F", "q"), part("K", "q")), -1, 3),
                           neg_fraction(part("K", "p")),
                           sc(part("F", "qy"), -1, 3)});
        }
        if (name == "M") {
            // M = 2 K_qq K - 2 K_qy + (1/3) F_qq L - (2/3) F_q L_q - 2 L_p
            return sum_of({sc(mul_fraction(part("K", "qq"), part("K")), 2, 1),
                           sc(part("K", "qy"), -2, 1),
                           sc(mul_fraction(part("F", "qq"), part("L")), 1, 3),
                           sc(mul_fraction(part("F", "q"), part("L", "q")), -2, 3),
                           sc(part("L", "p"), -2, 1)});
        }
        if (name == "W") {
            // W = D K - (2/3) F_q K + F_y
            return sum_of({Dpart("K"),
                           sc(mul_fraction(part("F", "q"), part("K")), -2, 3),
                           part("F", "y")});
        }
        if (name == "Z") {
            // Z = (D W)/W - F_q
            const Fraction& w = part("W");
            if (w.is_zero())
                throw WunschmannZeroError("invariant Z requires W != 0, but W vanishes identically");
            return add_fraction(div_fraction(Dpart("W"), w), neg_fraction(part("F", "q")));
        }
        throw Error("unknown invariant base '" + name + "'");
    }

    Fraction compute_invariant(InvariantName n) {
        switch (n) {
            case InvariantName::K: return part("K");
            case InvariantName::L: return part("L");
            case InvariantName::M: return part("M");
            case InvariantName::W: return part("W");
            case InvariantName::Z: return part("Z");

            case InvariantName::A1c:
            case InvariantName::A1p:
            case InvariantName::A1f:
                return part("W");

            case InvariantName::B1c:
                return sc(part("F", "qqqq"), 1, 6);

            case InvariantName::B1p:
                // F_qqq F_q / 18 + F_qq^2 / 36 + F_qqp / 6
                return sum_of({sc(mul_fraction(part("F", "qqq"), part("F", "q")), 1, 18),
                               sc(mul_fraction(part("F", "qq"), part("F", "qq")), 1, 36),
                               sc(part("F", "qqp"), 1, 6)});
            case InvariantName::B2p:
                return sc(part("F", "qqq"), 1, 6);
            case InvariantName::B4p:
                // K_qq + F_qqq F_q / 9 + F_qqp / 3 + F_qq^2 / 12
                return sum_of({part("K", "qq"),
                               sc(mul_fraction(part("F", "qqq"), part("F", "q")), 1, 9),
                               sc(part("F", "qqp"), 1, 3),
                               sc(mul_fraction(part("F", "qq"), part("F", "qq")), 1, 12)});
            case InvariantName::C1p:
                // 2 F_qq K + (2/3) F_q F_qp - 2 F_qy + F_pp + 2 W_q
                return sum_of({sc(mul_fraction(part("F", "qq"), part("K")), 2, 1),
                               sc(mul_fraction(part("F", "q"), part("F", "qp")), 2, 3),
                               sc(part("F", "qy"), -2, 1),
                               part("F", "pp"),
                               sc(part("W", "q"), 2, 1)});

            case InvariantName::B1f:
                return sc(part("F", "qq"), 1, 3);
            case InvariantName::C1f:
                // (2/3) F_qq K - (1/3) K_q F_q - K_p - (2/3) F_qy
                return sum_of({sc(mul_fraction(part("F", "qq"), part("K")), 2, 3),
                               sc(mul_fraction(part("K", "q"), part("F", "q")), -1, 3),
                               neg_fraction(part("K", "p")),
                               sc(part("F", "qy"), -2, 3)});
            case InvariantName::B5f:
                // -(1/3)(D(F_qq) + (1/3) F_qq F_q)
                return sc(add_fraction(Dpart("F", "qq"),
                                       sc(mul_fraction(part("F", "qq"), part("F", "q")), 1, 3)),
                          -1, 3);

            case InvariantName::a5: {
                // (1 / cbrt(W)^2) (K + Z^2/18 + Z F_q / 9 - D Z / 3)
                const Fraction& rw = root_w(n);
                const Fraction& Zf = part("Z");
                Fraction inner = sum_of({part("K"),
                                         sc(mul_fraction(Zf, Zf), 1, 18),
                                         sc(mul_fraction(Zf, part("F", "q")), 1, 9),
                                         sc(Dpart("Z"), -1, 3)});
                return div_fraction(inner, mul_fraction(rw, rw));
            }
            case InvariantName::b5: {
                // (1 / (3 u cbrt(W)^2)) ( (1/27) F_qq Z^2
                //   + (K_q - Z_p/3 - (2/9) F_q Z_q) Z + (D Z / 3 - 2K) Z_q
                //   + Z_y + F_qq K - 3 K_p - K_q F_q - F_qy + W_q )
                const Fraction& rw = root_w(n);
                const Fraction& Zf = part("Z");
                Fraction coeff_z = sum_of({part("K", "q"),
                                           sc(part("Z", "p"), -1, 3),
                                           sc(mul_fraction(part("F", "q"), part("Z", "q")), -2, 9)});
                Fraction coeff_zq = add_fraction(sc(Dpart("Z"), 1, 3), sc(part("K"), -2, 1));
                Fraction inner = sum_of({sc(mul_fraction(part("F", "qq"), mul_fraction(Zf, Zf)), 1, 27),
                                         mul_fraction(coeff_z, Zf),
                                         mul_fraction(coeff_zq, part("Z", "q")),
                                         part("Z", "y"),
                                         mul_fraction(part("F", "qq"), part("K")),
                                         sc(part("K", "p"), -3, 1),
                                         neg_fraction(mul_fraction(part("K", "q"), part("F", "q"))),
                                         neg_fraction(part("F", "qy")),
                                         part("W", "q")});
                Fraction den = sc(mul_fraction(u_, mul_fraction(rw, rw)), 3, 1);
                return div_fraction(inner, den);
            }
            case InvariantName::e5: {
                // (1/u) ( (1/3) F_qq + (1/W)((2/9) W_q Z - (2/3) W_p - (2/9) W_q F_q) )
                const Fraction& w = part("W");
                if (w.is_zero())
                    throw WunschmannZeroError("invariant e5 requires W != 0, but W vanishes identically");
                Fraction inner = sum_of({sc(mul_fraction(part("W", "q"), part("Z")), 2, 9),
                                         sc(part("W", "p"), -2, 3),
                                         sc(mul_fraction(part("W", "q"), part("F", "q")), -2, 9)});
                Fraction val = add_fraction(sc(part("F", "qq"), 1, 3), div_fraction(inner, w));
                return div_fraction(val, u_);
            }
            case InvariantName::h5: {
                // (1 / (3 u cbrt(W))) ( ( (1/9) W_q Z^2 - (1/3) W_p Z + W_y
                //   - (1/3) W_q D Z ) / W + D(Z_q) + (1/3) F_q Z_q )
                const Fraction& rw = root_w(n);
                const Fraction& Zf = part("Z");
                Fraction top = sum_of({sc(mul_fraction(part("W", "q"), mul_fraction(Zf, Zf)), 1, 9),
                                       sc(mul_fraction(part("W", "p"), Zf), -1, 3),
                                       part("W", "y"),
                                       sc(mul_fraction(part("W", "q"), Dpart("Z")), -1, 3)});
                Fraction inner = sum_of({div_fraction(top, part("W")),
                                         Dpart("Z", "q"),
                                         sc(mul_fraction(part("F", "q"), part("Z", "q")), 1, 3)});
                return div_fraction(inner, sc(mul_fraction(u_, rw), 3, 1));
            }
            case InvariantName::k5: {
                // (1 / (u^2 cbrt(W))) ( 2 W_q^2 / (9 W) - W_qq / 3 )
                const Fraction& rw = root_w(n);
                const Fraction& Wq = part("W", "q");
                Fraction inner = add_fraction(
                    div_fraction(sc(mul_fraction(Wq, Wq), 2, 1), sc(part("W"), 9, 1)),
                    sc(part("W", "qq"), -1, 3));
                return div_fraction(inner, mul_fraction(mul_fraction(u_, u_), rw));
            }

            case InvariantName::EWcartan: {
                // ((1/3) D F_q - (2/9) F_q^2 - F_p) F_qq + (2/3) F_q F_qp - 2 F_qy + F_pp
                const Fraction& Fq = part("F", "q");
                Fraction head = sum_of({sc(Dpart("F", "q"), 1, 3),
                                        sc(mul_fraction(Fq, Fq), -2, 9),
                                        neg_fraction(part("F", "p"))});
                return sum_of({mul_fraction(head, part("F", "qq")),
                               sc(mul_fraction(Fq, part("F", "qp")), 2, 3),
                               sc(part("F", "qy"), -2, 1),
                               part("F", "pp")});
            }
            case InvariantName::RicciScalarDensity:
                return sc(invariant(InvariantName::B4p), 6, 1);
            case InvariantName::LorentzObstruction: {
                // (D + (2/3) F_q)(6 K_qq + (2/3) F_qqq F_q + 2 F_qqp + (1/2) F_qq^2)
                Fraction body = sum_of({sc(part("K", "qq"), 6, 1),
                                        sc(mul_fraction(part("F", "qqq"), part("F", "q")), 2, 3),
                                        sc(part("F", "qqp"), 2, 1),
                                        sc(mul_fraction(part("F", "qq"), part("F", "qq")), 1, 2)});
                return add_fraction(D(body), sc(mul_fraction(part("F", "q"), body), 2, 3));
            }

            default:
                throw Error("unhandled invariant name");
        }
    }

    Ode3 ode_;
    DiffContext ctx_;
    Fraction F_;
    Fraction p_, q_, u_;
    std::map<std::string, Fraction> cache_;
};

// ---------------------------------------------------------------------------
// Free-function API
// ---------------------------------------------------------------------------

inline ExprPtr total_derivative(const Ode3& ode, const ExprPtr& e) {
    std::set<std::string> frees;
    collect_symbols(e, frees);
    for (const auto& s : frees) {
        if (s == "x" || s == "y" || s == "p" || s == "q") continue;
        if (ode.parameters.count(s)) continue;
        throw CoordinateMismatchError("total derivative argument depends on '" + s +
                                      "', which is neither a jet coordinate nor a declared parameter");
    }
    InvariantEngine eng(ode);
    return to_expr(eng.D(normal_form(e)));
}

inline ExprPtr scalar_invariant(const Ode3& ode, InvariantName name) {
    InvariantEngine eng(ode);
    return to_expr(eng.invariant(name));
}

}  // namespace ode3geo
