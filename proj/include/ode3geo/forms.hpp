// forms.hpp — exterior calculus over explicit coordinate lists.
//
// Differential forms are stored in canonical shape: only strictly increasing
// index tuples are kept, every coefficient is a normal-form fraction, zero
// coefficients are pruned.  Vector fields, symmetric 2-tensors and matrices
// of forms live here too, together with wedge, exterior derivative, interior
// product, Lie derivatives, curvature of a connection matrix, exact matrix
// inversion over the fraction field, and structure-function extraction for a
// coframe (solving d(theta^a) = c^a_{bc} theta^b ^ theta^c, b < c).

#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ode3geo/normal.hpp"

namespace ode3geo {

// ---------------------------------------------------------------------------
// Coordinates
// ---------------------------------------------------------------------------

// Global coordinate order: x < y < p < q < u < c1 < c2 < c3.
inline int coord_rank(const std::string& name) { return symbol_rank(name); }

inline std::vector<std::string> base_coords() { return {"x", "y", "p", "q"}; }
inline std::vector<std::string> scaled_coords() { return {"x", "y", "p", "q", "u"}; }
inline std::vector<std::string> solution_coords() { return {"c1", "c2", "c3"}; }

inline void check_same_coords(const std::vector<std::string>& a, const std::vector<std::string>& b) {
    if (a != b) throw CoordinateMismatchError("operands live over different coordinate lists");
}

// ---------------------------------------------------------------------------
// DifferentialForm
// ---------------------------------------------------------------------------

struct DifferentialForm {
    int degree = 0;
    std::vector<std::string> coords;
    // strictly increasing index tuples -> nonzero normal-form coefficient;
    // a 0-form stores its value under the empty tuple
    std::map<std::vector<int>, Fraction> terms;

    bool is_zero() const { return terms.empty(); }
};

namespace detail {

// Sort an index tuple, returning the permutation sign, or nullopt when an
// index repeats (the term vanishes by antisymmetry).
inline std::optional<std::pair<std::vector<int>, int>> canonical_tuple(std::vector<int> idx) {
    int sign = 1;
    for (size_t i = 1; i < idx.size(); ++i)
        for (size_t j = i; j > 0 && idx[j] < idx[j - 1]; --j) {
            std::swap(idx[j], idx[j - 1]);
            sign = -sign;
        }
    for (size_t i = 1; i < idx.size(); ++i)
        if (idx[i] == idx[i - 1]) return std::nullopt;
    return std::make_pair(std::move(idx), sign);
}

}  // namespace detail

inline DifferentialForm zero_form(int degree, std::vector<std::string> coords) {
    DifferentialForm f;
    f.degree = degree;
    f.coords = std::move(coords);
    return f;
}

inline DifferentialForm scalar_form(std::vector<std::string> coords, Fraction value) {
    DifferentialForm f = zero_form(0, std::move(coords));
    if (!value.is_zero()) f.terms.emplace(std::vector<int>{}, std::move(value));
    return f;
}

// Accumulate c * dx_{idx[0]} ^ ... ^ dx_{idx[k-1]} into f (any index order).
inline void add_form_term(DifferentialForm& f, std::vector<int> idx, const Fraction& c) {
    if (static_cast<int>(idx.size()) != f.degree)
        throw CoordinateMismatchError("term arity does not match form degree");
    for (int i : idx)
        if (i < 0 || i >= static_cast<int>(f.coords.size()))
            throw CoordinateMismatchError("coordinate index out of range");
    if (c.is_zero()) return;
    auto canon = detail::canonical_tuple(std::move(idx));
    if (!canon) return;
    Fraction signed_c = canon->second < 0 ? neg_fraction(c) : c;
    auto it = f.terms.find(canon->first);
    if (it == f.terms.end()) {
        f.terms.emplace(std::move(canon->first), std::move(signed_c));
        return;
    }
    it->second = add_fraction(it->second, signed_c);
    if (it->second.is_zero()) f.terms.erase(it);
}

// The coordinate differential d(var).
inline DifferentialForm coordinate_differential(std::vector<std::string> coords, const std::string& var) {
    DifferentialForm f = zero_form(1, std::move(coords));
    for (size_t i = 0; i < f.coords.size(); ++i)
        if (f.coords[i] == var) {
            add_form_term(f, {static_cast<int>(i)}, fraction_rat(Rational(1)));
            return f;
        }
    throw CoordinateMismatchError("'" + var + "' is not among the form's coordinates");
}

inline DifferentialForm add_forms(const DifferentialForm& a, const DifferentialForm& b) {
    check_same_coords(a.coords, b.coords);
    if (a.degree != b.degree) throw CoordinateMismatchError("cannot add forms of different degree");
    DifferentialForm r = a;
    for (const auto& [idx, c] : b.terms) {
        auto it = r.terms.find(idx);
        if (it == r.terms.end()) {
            r.terms.emplace(idx, c);
            continue;
        }
        it->second = add_fraction(it->second, c);
        if (it->second.is_zero()) r.terms.erase(it);
    }
    return r;
}

inline DifferentialForm scale_form(const DifferentialForm& a, const Fraction& s) {
    DifferentialForm r = zero_form(a.degree, a.coords);
    if (s.is_zero()) return r;
    for (const auto& [idx, c] : a.terms) {
        Fraction v = mul_fraction(c, s);
        if (!v.is_zero()) r.terms.emplace(idx, std::move(v));
    }
    return r;
}

inline DifferentialForm scale_form(const DifferentialForm& a, const Rational& s) {
    return scale_form(a, fraction_rat(s));
}

inline DifferentialForm neg_form(const DifferentialForm& a) { return scale_form(a, Rational(-1)); }

inline DifferentialForm sub_forms(const DifferentialForm& a, const DifferentialForm& b) {
    return add_forms(a, neg_form(b));
}

inline DifferentialForm wedge(const DifferentialForm& a, const DifferentialForm& b) {
    check_same_coords(a.coords, b.coords);
    DifferentialForm r = zero_form(a.degree + b.degree, a.coords);
    for (const auto& [ia, ca] : a.terms)
        for (const auto& [ib, cb] : b.terms) {
            std::vector<int> idx = ia;
            idx.insert(idx.end(), ib.begin(), ib.end());
            add_form_term(r, std::move(idx), mul_fraction(ca, cb));
        }
    return r;
}

// d f as a 1-form.
inline DifferentialForm differential_of(const Fraction& f, const std::vector<std::string>& coords,
                                        DiffContext& ctx) {
    DifferentialForm r = zero_form(1, coords);
    for (size_t i = 0; i < coords.size(); ++i)
        add_form_term(r, {static_cast<int>(i)}, ctx.diff(f, coords[i]));
    return r;
}

inline DifferentialForm exterior_d(const DifferentialForm& a, DiffContext& ctx) {
    DifferentialForm r = zero_form(a.degree + 1, a.coords);
    for (const auto& [idx, c] : a.terms)
        for (size_t i = 0; i < a.coords.size(); ++i) {
            Fraction dc = ctx.diff(c, a.coords[i]);
            if (dc.is_zero()) continue;
            std::vector<int> ext;
            ext.reserve(idx.size() + 1);
            ext.push_back(static_cast<int>(i));
            ext.insert(ext.end(), idx.begin(), idx.end());
            add_form_term(r, std::move(ext), dc);
        }
    return r;
}

inline DifferentialForm exterior_d(const DifferentialForm& a) {
    DiffContext ctx;
    return exterior_d(a, ctx);
}

// ---------------------------------------------------------------------------
// VectorField, interior product, Lie derivative
// ---------------------------------------------------------------------------

struct VectorField {
    std::vector<std::string> coords;
    std::map<std::string, Fraction> components;  // missing entries are zero

    Fraction component(const std::string& var) const {
        auto it = components.find(var);
        return it == components.end() ? fraction_rat(Rational(0)) : it->second;
    }
};

inline DifferentialForm interior(const VectorField& v, const DifferentialForm& a) {
    check_same_coords(v.coords, a.coords);
    if (a.degree == 0) return zero_form(0, a.coords);
    DifferentialForm r = zero_form(a.degree - 1, a.coords);
    for (const auto& [idx, c] : a.terms)
        for (size_t t = 0; t < idx.size(); ++t) {
            Fraction comp = v.component(a.coords[idx[t]]);
            if (comp.is_zero()) continue;
            Fraction term = mul_fraction(comp, c);
            if (t % 2 == 1) term = neg_fraction(term);
            std::vector<int> rest;
            rest.reserve(idx.size() - 1);
            for (size_t s = 0; s < idx.size(); ++s)
                if (s != t) rest.push_back(idx[s]);
            add_form_term(r, std::move(rest), term);
        }
    return r;
}

// Cartan formula: L_v = d iota_v + iota_v d.
inline DifferentialForm lie_derivative(const VectorField& v, const DifferentialForm& a,
                                       DiffContext& ctx) {
    return add_forms(exterior_d(interior(v, a), ctx), interior(v, exterior_d(a, ctx)));
}

inline DifferentialForm lie_derivative(const VectorField& v, const DifferentialForm& a) {
    DiffContext ctx;
    return lie_derivative(v, a, ctx);
}

// ---------------------------------------------------------------------------
// SymTensor2
// ---------------------------------------------------------------------------

struct SymTensor2 {
    std::vector<std::string> coords;
    std::vector<std::vector<Fraction>> m;  // symmetric, dense

    bool is_zero() const {
        for (const auto& row : m)
            for (const auto& e : row)
                if (!e.is_zero()) return false;
        return true;
    }
};

inline SymTensor2 sym_tensor_zero(std::vector<std::string> coords) {
    SymTensor2 t;
    t.coords = std::move(coords);
    t.m.assign(t.coords.size(), std::vector<Fraction>(t.coords.size(), fraction_rat(Rational(0))));
    return t;
}

inline Fraction form_coefficient(const DifferentialForm& a, const std::vector<int>& idx) {
    auto it = a.terms.find(idx);
    return it == a.terms.end() ? fraction_rat(Rational(0)) : it->second;
}

// Symmetric product of two 1-forms: (a b)_derived = 1/2 (a (x) b + b (x) a).
inline SymTensor2 sym_product(const DifferentialForm& a, const DifferentialForm& b) {
    check_same_coords(a.coords, b.coords);
    if (a.degree != 1 || b.degree != 1)
        throw CoordinateMismatchError("symmetric product expects two 1-forms");
    SymTensor2 t = sym_tensor_zero(a.coords);
    const int n = static_cast<int>(a.coords.size());
    Fraction half = fraction_rat(Rational(1, 2));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            Fraction v = add_fraction(mul_fraction(form_coefficient(a, {i}), form_coefficient(b, {j})),
                                      mul_fraction(form_coefficient(a, {j}), form_coefficient(b, {i})));
            t.m[i][j] = mul_fraction(half, v);
        }
    return t;
}

// a (x) a for a 1-form.
inline SymTensor2 outer_square(const DifferentialForm& a) { return sym_product(a, a); }

inline SymTensor2 add_sym(const SymTensor2& a, const SymTensor2& b) {
    check_same_coords(a.coords, b.coords);
    SymTensor2 t = sym_tensor_zero(a.coords);
    for (size_t i = 0; i < a.m.size(); ++i)
        for (size_t j = 0; j < a.m.size(); ++j) t.m[i][j] = add_fraction(a.m[i][j], b.m[i][j]);
    return t;
}

inline SymTensor2 scale_sym(const SymTensor2& a, const Fraction& s) {
    SymTensor2 t = sym_tensor_zero(a.coords);
    for (size_t i = 0; i < a.m.size(); ++i)
        for (size_t j = 0; j < a.m.size(); ++j) t.m[i][j] = mul_fraction(a.m[i][j], s);
    return t;
}

inline SymTensor2 sub_sym(const SymTensor2& a, const SymTensor2& b) {
    return add_sym(a, scale_sym(b, fraction_rat(Rational(-1))));
}

// (L_v T)_ij = v^k d_k T_ij + T_kj d_i v^k + T_ik d_j v^k.
inline SymTensor2 lie_derivative(const VectorField& v, const SymTensor2& g, DiffContext& ctx) {
    check_same_coords(v.coords, g.coords);
    const int n = static_cast<int>(g.coords.size());
    SymTensor2 t = sym_tensor_zero(g.coords);
    std::vector<Fraction> comp;
    comp.reserve(n);
    for (int k = 0; k < n; ++k) comp.push_back(v.component(g.coords[k]));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            Fraction acc = fraction_rat(Rational(0));
            for (int k = 0; k < n; ++k) {
                if (!comp[k].is_zero())
                    acc = add_fraction(acc, mul_fraction(comp[k], ctx.diff(g.m[i][j], g.coords[k])));
                if (!g.m[k][j].is_zero())
                    acc = add_fraction(acc, mul_fraction(g.m[k][j], ctx.diff(comp[k], g.coords[i])));
                if (!g.m[i][k].is_zero())
                    acc = add_fraction(acc, mul_fraction(g.m[i][k], ctx.diff(comp[k], g.coords[j])));
            }
            t.m[i][j] = std::move(acc);
        }
    return t;
}

inline SymTensor2 lie_derivative(const VectorField& v, const SymTensor2& g) {
    DiffContext ctx;
    return lie_derivative(v, g, ctx);
}

// ---------------------------------------------------------------------------
// Matrices of forms, curvature
// ---------------------------------------------------------------------------

struct MatrixOfForms {
    std::vector<std::vector<DifferentialForm>> entries;

    size_t rows() const { return entries.size(); }
    size_t cols() const { return entries.empty() ? 0 : entries[0].size(); }
    bool is_zero() const {
        for (const auto& row : entries)
            for (const auto& e : row)
                if (!e.is_zero()) return false;
        return true;
    }
};

inline MatrixOfForms matrix_of_forms(size_t n, int degree, const std::vector<std::string>& coords) {
    MatrixOfForms m;
    m.entries.assign(n, std::vector<DifferentialForm>(n, zero_form(degree, coords)));
    return m;
}

// Curvature d(omega) + omega ^ omega of a matrix of 1-forms, entrywise.
inline MatrixOfForms curvature_of(const MatrixOfForms& omega, DiffContext& ctx) {
    const size_t n = omega.rows();
    if (n == 0) return omega;
    MatrixOfForms k = matrix_of_forms(n, 2, omega.entries[0][0].coords);
    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < n; ++j) {
            DifferentialForm e = exterior_d(omega.entries[i][j], ctx);
            for (size_t s = 0; s < n; ++s)
                e = add_forms(e, wedge(omega.entries[i][s], omega.entries[s][j]));
            k.entries[i][j] = std::move(e);
        }
    return k;
}

// ---------------------------------------------------------------------------
// Exact linear algebra over the fraction field
// ---------------------------------------------------------------------------

// Gauss-Jordan inverse; entries are exact rational functions, so a pivot is
// admissible iff its normal form is not the zero fraction.
inline std::vector<std::vector<Fraction>> invert_fraction_matrix(
    std::vector<std::vector<Fraction>> a) {
    const int n = static_cast<int>(a.size());
    std::vector<std::vector<Fraction>> inv(n, std::vector<Fraction>(n, fraction_rat(Rational(0))));
    for (int i = 0; i < n; ++i) inv[i][i] = fraction_rat(Rational(1));
    for (int col = 0; col < n; ++col) {
        int piv = -1;
        for (int r = col; r < n; ++r)
            if (!a[r][col].is_zero()) {
                piv = r;
                break;
            }
        if (piv < 0) throw SingularCoframeError("coefficient matrix is singular");
        std::swap(a[piv], a[col]);
        std::swap(inv[piv], inv[col]);
        Fraction d = a[col][col];
        for (int c = 0; c < n; ++c) {
            a[col][c] = div_fraction(a[col][c], d);
            inv[col][c] = div_fraction(inv[col][c], d);
        }
        for (int r = 0; r < n; ++r) {
            if (r == col || a[r][col].is_zero()) continue;
            Fraction f = a[r][col];
            for (int c = 0; c < n; ++c) {
                a[r][c] = add_fraction(a[r][c], neg_fraction(mul_fraction(f, a[col][c])));
                inv[r][c] = add_fraction(inv[r][c], neg_fraction(mul_fraction(f, inv[col][c])));
            }
        }
    }
    return inv;
}

// ---------------------------------------------------------------------------
// Structure functions of a coframe
// ---------------------------------------------------------------------------

// Coefficients c^a_{bc} (b < c) in d(theta^a) = sum_{b<c} c^a_{bc} theta^b ^ theta^c.
struct StructureFunctions {
    int count = 0;
    std::map<std::array<int, 3>, Fraction> c;  // key {a, b, c} with b < c, 0-based

    Fraction get(int a, int b, int cc) const {
        if (b == cc) return fraction_rat(Rational(0));
        bool flip = b > cc;
        if (flip) std::swap(b, cc);
        auto it = c.find({a, b, cc});
        Fraction v = it == c.end() ? fraction_rat(Rational(0)) : it->second;
        return flip ? neg_fraction(v) : v;
    }
};

inline StructureFunctions structure_functions(const std::vector<DifferentialForm>& coframe,
                                              DiffContext& ctx) {
    const int n = static_cast<int>(coframe.size());
    if (n == 0) return {};
    const auto& coords = coframe[0].coords;
    if (static_cast<int>(coords.size()) != n)
        throw CoordinateMismatchError("coframe must contain one 1-form per coordinate");
    for (const auto& f : coframe) {
        check_same_coords(f.coords, coords);
        if (f.degree != 1) throw CoordinateMismatchError("coframe entries must be 1-forms");
    }

    // theta^a = A[a][i] dx_i; dx_i = Inv[i][b] theta^b.
    std::vector<std::vector<Fraction>> A(n, std::vector<Fraction>(n, fraction_rat(Rational(0))));
    for (int a = 0; a < n; ++a)
        for (int i = 0; i < n; ++i) A[a][i] = form_coefficient(coframe[a], {i});
    auto inv = invert_fraction_matrix(std::move(A));

    StructureFunctions sf;
    sf.count = n;
    for (int a = 0; a < n; ++a) {
        DifferentialForm da = exterior_d(coframe[a], ctx);
        for (int b = 0; b < n; ++b)
            for (int cc = b + 1; cc < n; ++cc) {
                Fraction acc = fraction_rat(Rational(0));
                for (const auto& [idx, coeff] : da.terms) {
                    // d(theta^a) = sum_{i<j} coeff_{ij} dx_i ^ dx_j
                    const int i = idx[0], j = idx[1];
                    Fraction basis = add_fraction(
                        mul_fraction(inv[i][b], inv[j][cc]),
                        neg_fraction(mul_fraction(inv[i][cc], inv[j][b])));
                    acc = add_fraction(acc, mul_fraction(coeff, basis));
                }
                sf.c[{a, b, cc}] = std::move(acc);
            }
    }
    return sf;
}

inline StructureFunctions structure_functions(const std::vector<DifferentialForm>& coframe) {
    DiffContext ctx;
    return structure_functions(coframe, ctx);
}

// ---------------------------------------------------------------------------
// Zero testing of compound objects
// ---------------------------------------------------------------------------

inline ZeroVerdict combine_verdicts(ZeroVerdict acc, ZeroVerdict v) {
    if (acc == ZeroVerdict::ProvedNonzero || v == ZeroVerdict::ProvedNonzero)
        return ZeroVerdict::ProvedNonzero;
    if (acc == ZeroVerdict::Unknown || v == ZeroVerdict::Unknown) return ZeroVerdict::Unknown;
    return ZeroVerdict::ProvedZero;
}

inline ZeroVerdict form_is_zero(const DifferentialForm& a, const ProbeConfig& cfg = {}) {
    ZeroVerdict acc = ZeroVerdict::ProvedZero;
    for (const auto& [idx, c] : a.terms) acc = combine_verdicts(acc, is_zero(to_expr(c), cfg));
    return acc;
}

inline ZeroVerdict sym_is_zero(const SymTensor2& t, const ProbeConfig& cfg = {}) {
    ZeroVerdict acc = ZeroVerdict::ProvedZero;
    for (size_t i = 0; i < t.m.size(); ++i)
        for (size_t j = i; j < t.m.size(); ++j)
            acc = combine_verdicts(acc, is_zero(to_expr(t.m[i][j]), cfg));
    return acc;
}

inline ZeroVerdict matrix_is_zero(const MatrixOfForms& m, const ProbeConfig& cfg = {}) {
    ZeroVerdict acc = ZeroVerdict::ProvedZero;
    for (const auto& row : m.entries)
        for (const auto& e : row) acc = combine_verdicts(acc, form_is_zero(e, cfg));
    return acc;
}

}  // namespace ode3geo
