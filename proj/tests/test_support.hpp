// test_support.hpp
//
// Small helpers shared by the unit suites and the acceptance runner: exact
// (normal-form) equality, parsing with the jet coordinates predeclared, and
// seeded random equation generators used by the property tests.

#pragma once

#include <random>
#include <set>
#include <string>
#include <vector>

#include "ode3geo/ode3geo.hpp"

namespace ts {

using namespace ode3geo;

// Parse with the jet coordinates and any extra names declared.
inline ExprPtr P(const std::string& s, std::set<std::string> extra = {}) {
    std::set<std::string> names = {"x", "y", "p", "q"};
    for (const auto& e : extra) names.insert(e);
    return parse_expr(s, names);
}

// Exact zero / equality in the algebraic normal form (no probing involved).
inline bool nf_zero(const ExprPtr& e) { return normal_form(e).is_zero(); }
inline bool nf_equal(const ExprPtr& a, const ExprPtr& b) { return nf_zero(sub(a, b)); }

inline bool form_zero(const DifferentialForm& f) { return f.is_zero(); }

inline bool forms_equal(const DifferentialForm& a, const DifferentialForm& b) {
    return sub_forms(a, b).is_zero();
}

inline bool sym_equal(const SymTensor2& a, const SymTensor2& b) {
    return sub_sym(a, b).is_zero();
}

// ---------------------------------------------------------------------------
// Seeded random equation generators
// ---------------------------------------------------------------------------

// Random polynomial in (x, y, p, q) of total degree <= 2 with small integer
// coefficients; never identically zero.
inline ExprPtr random_poly_deg2(std::mt19937_64& rng) {
    static const std::vector<std::vector<const char*>> monomials = {
        {}, {"x"}, {"y"}, {"p"}, {"q"},
        {"x", "x"}, {"x", "y"}, {"x", "p"}, {"x", "q"},
        {"y", "y"}, {"y", "p"}, {"y", "q"},
        {"p", "p"}, {"p", "q"}, {"q", "q"}};
    std::uniform_int_distribution<int> pick(0, static_cast<int>(monomials.size()) - 1);
    std::uniform_int_distribution<int> coeff(-3, 3);
    std::uniform_int_distribution<int> count(2, 4);
    ExprPtr acc = rat(0);
    int wanted = count(rng);
    for (int t = 0; t < wanted; ++t) {
        int c = coeff(rng);
        if (c == 0) c = 1;
        ExprPtr term = rat(c);
        for (const char* v : monomials[pick(rng)]) term = mul(term, sym(v));
        acc = add(acc, term);
    }
    if (nf_zero(acc)) acc = add(acc, sym("q"));
    return acc;
}

// Random polynomial in (x, y, p) of total degree <= 1.
inline ExprPtr random_affine_xyp(std::mt19937_64& rng) {
    std::uniform_int_distribution<int> coeff(-2, 2);
    ExprPtr acc = rat(coeff(rng));
    for (const char* v : {"x", "y", "p"}) acc = add(acc, mul(rat(coeff(rng)), sym(v)));
    return acc;
}

// Random cubic-in-q equation a3 q^3 + a2 q^2 + a1 q + a0 with affine
// coefficients in (x, y, p).
inline ExprPtr random_cubic_in_q(std::mt19937_64& rng, ExprPtr out_coeffs[4]) {
    ExprPtr q = sym("q");
    ExprPtr acc = rat(0);
    for (int k = 3; k >= 0; --k) {
        ExprPtr c = random_affine_xyp(rng);
        out_coeffs[3 - k] = c; // out_coeffs = {a3, a2, a1, a0}
        acc = add(acc, mul(c, pow(q, Rational(k))));
    }
    return acc;
}

// The catalogued equations used across the suites.
inline const std::vector<std::string>& named_corpus() {
    static const std::vector<std::string> corpus = {
        "0",
        "y",
        "3*q^2/(2*p)",
        "3*q^2*p/(p^2+1)",
        "3*q^2/p",
        "q^3",
        "q^(3/2)",
        "(q^2+1)^(3/2)",
    };
    return corpus;
}

// Wuenschmann examples that carry the symbolic parameter mu.
inline const std::vector<std::string>& mu_corpus() {
    static const std::vector<std::string> corpus = {
        "mu*(2*q*y-p^2)^(3/2)/y^2",
        "4*mu*(q-p^2)^(3/2) + 6*q*p - 4*p^3",
        "mu*(q^2/p^2+p^2)^(3/2) + 3*q^2/p + p^3",
        "mu*(q^2/(1-p^2)-p^2+1)^(3/2) - 3*q^2*p/(1-p^2) + p^3 - p",
        "-2*mu*p + y",
    };
    return corpus;
}

} // namespace ts
