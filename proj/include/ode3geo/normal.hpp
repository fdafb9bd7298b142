/*
 * normal.hpp
 * ----------
 * Rational normal form for expression trees, and the zero-test built on it.
 *
 * An expression is flattened into a quotient of multivariate polynomials over
 * ℚ.  Polynomial indeterminates ("atoms") are:
 *
 *   - symbols (x, y, p, q, u, c1..c3, declared parameters),
 *   - function kernels  exp(f), ln(f), sin(f), cos(f)  with normalized
 *     argument f, and
 *   - root kernels  β = f^(1/b)  for b ≥ 2 with normalized base f.
 *
 * Root kernels carry the rewrite β^b → f, applied eagerly during monomial
 * multiplication, so exponents of a root atom always stay in [1, b).  This
 * merges q^(3/2)·q^(1/2) to q² while leaving genuinely distinct kernels
 * (e.g. exp(ln(q)) versus q) untouched.  No algebraic simplification of
 * nested radicals is attempted.
 *
 * Canonical fractions satisfy:
 *   - numerator and denominator share no polynomial factor (GCD cancelled),
 *   - the denominator is free of root atoms whenever the monomial-content
 *     rationalization loop can achieve it (always true for denominators of
 *     the form monomial · root-free polynomial, which covers this library's
 *     workload),
 *   - coefficients are scaled to a unique representative: all integer,
 *     jointly coprime, denominator's leading coefficient positive,
 *   - monomials are kept in a fixed deterministic order.
 *
 * Soundness note: the zero test reports ProvedZero only when the canonical
 * numerator is the literal zero polynomial, and that conclusion relies only
 * on identities valid for the real-signed root convention, so it is sound
 * even for degenerate kernels such as sqrt(q²).  ProvedNonzero always comes
 * with a numeric witness evaluated on the original expression tree.
 */
#pragma once

#include "common.hpp"
#include "expr.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace ode3geo {

// ---------------------------------------------------------------------------
// Atoms
// ---------------------------------------------------------------------------

struct Fraction;
using FractionPtr = std::shared_ptr<const Fraction>;

struct Atom {
    enum class Kind : std::uint8_t { Symbol = 0, FuncKernel, RootKernel };

    Kind kind = Kind::Symbol;
    std::string name;     // Symbol
    Func func = Func::Exp;  // FuncKernel
    long root = 0;        // RootKernel: the index b >= 2 in f^(1/b)
    FractionPtr content;  // FuncKernel argument / RootKernel base
    int rank = 0;         // nesting depth; rewrite targets have smaller rank
    std::string key;      // canonical sort key (injective)
};
using AtomPtr = std::shared_ptr<const Atom>;

inline int atom_cmp(const AtomPtr& a, const AtomPtr& b) {
    if (a.get() == b.get()) return 0;
    int c = a->key.compare(b->key);
    return c < 0 ? -1 : (c > 0 ? 1 : 0);
}

// ---------------------------------------------------------------------------
// Monomials and polynomials
// ---------------------------------------------------------------------------

/// Product of atom powers; factors sorted by atom key, exponents >= 1.
/// Root-atom exponents stay below the root index in canonical polynomials.
struct Monomial {
    std::vector<std::pair<AtomPtr, int>> factors;
    bool is_constant() const { return factors.empty(); }
};

inline int mono_cmp(const Monomial& a, const Monomial& b) {
    std::size_t n = std::min(a.factors.size(), b.factors.size());
    for (std::size_t i = 0; i < n; ++i) {
        if (int c = atom_cmp(a.factors[i].first, b.factors[i].first)) return c;
        if (a.factors[i].second != b.factors[i].second)
            return a.factors[i].second > b.factors[i].second ? -1 : 1;
    }
    if (a.factors.size() != b.factors.size()) return a.factors.size() > b.factors.size() ? -1 : 1;
    return 0;
}

struct MonoLess {
    bool operator()(const Monomial& a, const Monomial& b) const { return mono_cmp(a, b) < 0; }
};

struct Poly {
    std::map<Monomial, Rational, MonoLess> terms;

    bool is_zero() const { return terms.empty(); }
    bool is_constant() const { return terms.empty() || (terms.size() == 1 && terms.begin()->first.is_constant()); }
    Rational constant_value() const { return terms.empty() ? Rational(0) : terms.begin()->second; }
};

inline void poly_add_term(Poly& p, const Monomial& m, const Rational& c) {
    if (c == 0) return;
    auto it = p.terms.find(m);
    if (it == p.terms.end()) {
        p.terms.emplace(m, c);
    } else {
        it->second += c;
        if (it->second == 0) p.terms.erase(it);
    }
}

inline Poly poly_rat(const Rational& c) {
    Poly p;
    if (c != 0) p.terms.emplace(Monomial{}, c);
    return p;
}

inline Poly poly_one() { return poly_rat(Rational(1)); }

inline Poly poly_atom(const AtomPtr& a, int e = 1) {
    Poly p;
    Monomial m;
    m.factors.emplace_back(a, e);
    p.terms.emplace(std::move(m), Rational(1));
    return p;
}

inline Poly poly_add(const Poly& a, const Poly& b) {
    Poly r = a;
    for (const auto& [m, c] : b.terms) poly_add_term(r, m, c);
    return r;
}

inline Poly poly_neg(const Poly& a) {
    Poly r;
    for (const auto& [m, c] : a.terms) r.terms.emplace(m, -c);
    return r;
}

inline Poly poly_scale(const Poly& a, const Rational& c) {
    Poly r;
    if (c == 0) return r;
    for (const auto& [m, v] : a.terms) r.terms.emplace(m, v * c);
    return r;
}

/// Free-ring monomial product: exponents simply add (no root rewrite).
inline Monomial mono_mul_free(const Monomial& a, const Monomial& b) {
    Monomial r;
    std::size_t i = 0, j = 0;
    while (i < a.factors.size() && j < b.factors.size()) {
        int c = atom_cmp(a.factors[i].first, b.factors[j].first);
        if (c < 0)
            r.factors.push_back(a.factors[i++]);
        else if (c > 0)
            r.factors.push_back(b.factors[j++]);
        else {
            r.factors.emplace_back(a.factors[i].first, a.factors[i].second + b.factors[j].second);
            ++i, ++j;
        }
    }
    while (i < a.factors.size()) r.factors.push_back(a.factors[i++]);
    while (j < b.factors.size()) r.factors.push_back(b.factors[j++]);
    return r;
}

/// Free-ring polynomial product (atoms treated as independent variables).
inline Poly poly_mul_free(const Poly& a, const Poly& b) {
    Poly r;
    for (const auto& [ma, ca] : a.terms)
        for (const auto& [mb, cb] : b.terms) poly_add_term(r, mono_mul_free(ma, mb), ca * cb);
    return r;
}

inline bool mono_has_root_overflow(const Monomial& m) {
    for (const auto& [a, e] : m.factors)
        if (a->kind == Atom::Kind::RootKernel && e >= a->root) return true;
    return false;
}

inline bool mono_has_root_atom(const Monomial& m) {
    for (const auto& [a, e] : m.factors)
        if (a->kind == Atom::Kind::RootKernel) return true;
    return false;
}

inline bool poly_has_root_atom(const Poly& p) {
    for (const auto& [m, c] : p.terms)
        if (mono_has_root_atom(m)) return true;
    return false;
}

inline void collect_atoms(const Poly& p, std::map<std::string, AtomPtr>& out) {
    for (const auto& [m, c] : p.terms)
        for (const auto& [a, e] : m.factors) out.emplace(a->key, a);
}

// ---------------------------------------------------------------------------
// Canonical keys
// ---------------------------------------------------------------------------

inline std::string poly_key(const Poly& p) {
    std::string k;
    for (const auto& [m, c] : p.terms) {
        k += c.get_str();
        k += '*';
        for (const auto& [a, e] : m.factors) {
            k += a->key;
            k += '^';
            k += std::to_string(e);
            k += ';';
        }
        k += '|';
    }
    return k;
}

// ---------------------------------------------------------------------------
// Fractions
// ---------------------------------------------------------------------------

struct Fraction {
    Poly num;  // root exponents in range
    Poly den;  // nonzero; root-free whenever rationalization succeeds
    std::string key;

    bool is_zero() const { return num.is_zero(); }
    bool is_rational() const { return num.is_constant() && den.is_constant(); }
    Rational rational_value() const { return num.constant_value() / den.constant_value(); }
};

inline bool fraction_equal(const Fraction& a, const Fraction& b) { return a.key == b.key; }

Fraction make_fraction(Poly num, Poly den);
Fraction add_fraction(const Fraction& a, const Fraction& b);
Fraction mul_fraction(const Fraction& a, const Fraction& b);
Fraction div_fraction(const Fraction& a, const Fraction& b);
Fraction poly_mul_frac(const Poly& a, const Poly& b);

inline Fraction fraction_rat(const Rational& c) { return make_fraction(poly_rat(c), poly_one()); }

inline Fraction fraction_of_poly(Poly p) { return make_fraction(std::move(p), poly_one()); }

// ---------------------------------------------------------------------------
// Atom construction
// ---------------------------------------------------------------------------

inline int max_rank(const Poly& p) {
    int r = 0;
    for (const auto& [m, c] : p.terms)
        for (const auto& [a, e] : m.factors) r = std::max(r, a->rank);
    return r;
}

inline AtomPtr make_symbol_atom(const std::string& name) {
    auto a = std::make_shared<Atom>();
    a->kind = Atom::Kind::Symbol;
    a->name = name;
    a->rank = 0;
    a->key = "A";
    a->key += static_cast<char>('0' + symbol_rank(name));
    a->key += ':';
    a->key += name;
    return a;
}

inline AtomPtr make_func_atom(Func f, Fraction content) {
    auto a = std::make_shared<Atom>();
    a->kind = Atom::Kind::FuncKernel;
    a->func = f;
    auto c = std::make_shared<Fraction>(std::move(content));
    a->rank = 1 + std::max(max_rank(c->num), max_rank(c->den));
    a->key = "B";
    a->key += static_cast<char>('0' + static_cast<int>(f));
    a->key += ":{" + c->key + "}";
    a->content = std::move(c);
    return a;
}

inline AtomPtr make_root_atom(long b, Fraction content) {
    auto a = std::make_shared<Atom>();
    a->kind = Atom::Kind::RootKernel;
    a->root = b;
    auto c = std::make_shared<Fraction>(std::move(content));
    a->rank = 1 + std::max(max_rank(c->num), max_rank(c->den));
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%06ld", b);
    a->key = "C";
    a->key += buf;
    a->key += ":{" + c->key + "}";
    a->content = std::move(c);
    return a;
}

// b-th root of a fraction as a canonical kernel; rational perfect roots fold.
inline Fraction fraction_root(const Fraction& f, long b) {
    if (f.is_zero()) return f;
    if (f.is_rational()) {
        if (auto r = rat_perfect_root(f.rational_value(), b)) return fraction_rat(*r);
    }
    return fraction_of_poly(poly_atom(make_root_atom(b, f)));
}

// ---------------------------------------------------------------------------
// Root rewrite: reduce monomials whose root exponents overflow
// ---------------------------------------------------------------------------

namespace detail {

inline Fraction fraction_int_pow(const Fraction& f, long e) {
    if (e == 0) return fraction_rat(Rational(1));
    bool inv = e < 0;
    unsigned long n = inv ? static_cast<unsigned long>(-e) : static_cast<unsigned long>(e);
    Fraction acc = fraction_rat(Rational(1));
    Fraction base = f;
    while (n) {
        if (n & 1) acc = mul_fraction(acc, base);
        base = (n >>= 1) ? mul_fraction(base, base) : base;
    }
    if (inv) return div_fraction(fraction_rat(Rational(1)), acc);
    return acc;
}

/// c·m where m may carry root exponents ≥ the root index; rewrites β^b → base
/// recursively (bases have strictly smaller rank, so this terminates).
inline Fraction reduce_term(const Rational& c, const Monomial& m) {
    for (std::size_t i = 0; i < m.factors.size(); ++i) {
        const auto& [a, e] = m.factors[i];
        if (a->kind == Atom::Kind::RootKernel && e >= a->root) {
            long s = e / a->root;
            int r = static_cast<int>(e % a->root);
            Monomial rest;
            rest.factors.reserve(m.factors.size());
            for (std::size_t j = 0; j < m.factors.size(); ++j) {
                if (j == i) {
                    if (r > 0) rest.factors.emplace_back(a, r);
                } else {
                    rest.factors.push_back(m.factors[j]);
                }
            }
            Fraction powed = fraction_int_pow(*a->content, s);
            return mul_fraction(powed, reduce_term(c, rest));
        }
    }
    Poly p;
    p.terms.emplace(m, c);
    return make_fraction(std::move(p), poly_one());
}

}  // namespace detail

/// Rewrite-aware polynomial product.  The fast path (no root overflow)
/// accumulates a plain polynomial; overflowing terms fall back to fractions.
inline Fraction poly_mul_frac(const Poly& a, const Poly& b) {
    Poly simple;
    std::vector<Fraction> hard;
    for (const auto& [ma, ca] : a.terms) {
        for (const auto& [mb, cb] : b.terms) {
            Monomial m = mono_mul_free(ma, mb);
            Rational c = ca * cb;
            if (mono_has_root_overflow(m))
                hard.push_back(detail::reduce_term(c, m));
            else
                poly_add_term(simple, m, c);
        }
    }
    Fraction res = make_fraction(std::move(simple), poly_one());
    for (const auto& f : hard) res = add_fraction(res, f);
    return res;
}

// ---------------------------------------------------------------------------
// Polynomial GCD (free-ring view; atoms treated as independent variables)
// ---------------------------------------------------------------------------

namespace detail {

/// Univariate view of p in the atom v: degree → coefficient polynomial.
inline std::map<int, Poly> univariate_in(const Poly& p, const AtomPtr& v) {
    std::map<int, Poly> out;
    for (const auto& [m, c] : p.terms) {
        int deg = 0;
        Monomial rest;
        for (const auto& [a, e] : m.factors) {
            if (atom_cmp(a, v) == 0)
                deg = e;
            else
                rest.factors.push_back({a, e});
        }
        poly_add_term(out[deg], rest, c);
    }
    for (auto it = out.begin(); it != out.end();)
        it = it->second.is_zero() ? out.erase(it) : std::next(it);
    return out;
}

inline Poly from_univariate(const std::map<int, Poly>& u, const AtomPtr& v) {
    Poly out;
    for (const auto& [deg, coeff] : u) {
        for (const auto& [m, c] : coeff.terms) {
            Monomial mm = m;
            if (deg > 0) {
                Monomial vm;
                vm.factors.emplace_back(v, deg);
                mm = mono_mul_free(mm, vm);
            }
            poly_add_term(out, mm, c);
        }
    }
    return out;
}

/// Exact division in the free ring; nullopt when not divisible.
inline std::optional<Poly> poly_div_exact(const Poly& a, const Poly& b) {
    if (b.is_zero()) return std::nullopt;
    if (a.is_zero()) return Poly{};
    if (b.is_constant()) return poly_scale(a, Rational(1) / b.constant_value());

    std::map<std::string, AtomPtr> atoms;
    collect_atoms(b, atoms);
    AtomPtr v = atoms.rbegin()->second;  // highest atom of the divisor

    auto bu = univariate_in(b, v);
    int degb = bu.rbegin()->first;
    const Poly& lcb = bu.rbegin()->second;

    std::map<int, Poly> q;
    Poly rem = a;
    for (;;) {
        if (rem.is_zero()) break;
        auto ru = univariate_in(rem, v);
        int degr = ru.rbegin()->first;
        if (degr < degb) return std::nullopt;
        auto qc = poly_div_exact(ru.rbegin()->second, lcb);
        if (!qc) return std::nullopt;
        q[degr - degb] = poly_add(q[degr - degb], *qc);
        std::map<int, Poly> qpart;
        qpart[degr - degb] = *qc;
        Poly sub = poly_mul_free(from_univariate(qpart, v), b);
        rem = poly_add(rem, poly_neg(sub));
    }
    return from_univariate(q, v);
}

/// Rational content: gcd of numerators / lcm of denominators, signed so that
/// p / content has +1 leading (first-in-order) coefficient.
inline Rational rational_content(const Poly& p) {
    if (p.is_zero()) return Rational(1);
    mpz_class g(0), l(1);
    for (const auto& [m, c] : p.terms) {
        mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), mpz_class(c.get_num()).get_mpz_t());
        mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), mpz_class(c.get_den()).get_mpz_t());
    }
    Rational content(g, l);
    content.canonicalize();
    if (p.terms.begin()->second < 0) content = -content;
    return content;
}

Poly poly_gcd(const Poly& a, const Poly& b);

/// Content of the univariate view = gcd of its coefficient polynomials.
inline Poly univariate_content(const std::map<int, Poly>& u) {
    Poly g;
    for (const auto& [deg, coeff] : u) {
        g = g.is_zero() ? coeff : poly_gcd(g, coeff);
        if (g.is_constant() && !g.is_zero()) return poly_one();
    }
    return g.is_zero() ? poly_one() : g;
}

inline std::map<int, Poly> univariate_primitive(const std::map<int, Poly>& u, const Poly& content) {
    if (content.is_constant()) {
        if (content.constant_value() == 1) return u;
        std::map<int, Poly> r;
        for (const auto& [d, c] : u) r[d] = poly_scale(c, Rational(1) / content.constant_value());
        return r;
    }
    std::map<int, Poly> r;
    for (const auto& [d, c] : u) {
        auto q = poly_div_exact(c, content);
        if (!q) return u;  // should not happen; degrade gracefully
        r[d] = *q;
    }
    return r;
}

/// Evaluate a polynomial at integer atom assignments (free-ring semantics).
inline Rational eval_poly_ints(const Poly& p, const std::map<std::string, Rational>& assign) {
    Rational total(0);
    for (const auto& [m, c] : p.terms) {
        Rational t = c;
        for (const auto& [a, e] : m.factors) t *= rat_pow(assign.at(a->key), e);
        total += t;
    }
    return total;
}

/// Sound coprimality shortcut: evaluate all atoms but v at fixed small primes;
/// if the leading coefficients survive and the univariate images are coprime,
/// the primitive parts share no factor involving v.
inline bool precheck_coprime(const std::map<int, Poly>& au, const std::map<int, Poly>& bu,
                             const std::map<std::string, AtomPtr>& others) {
    static const long primes[] = {3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41};
    for (int trial = 0; trial < 3; ++trial) {
        std::map<std::string, Rational> assign;
        int i = 0;
        for (const auto& [k, a] : others) {
            assign[k] = Rational(primes[(i + 5 * trial) % 12]);
            ++i;
        }
        auto eval_side = [&](const std::map<int, Poly>& u, std::vector<Rational>& out) {
            int deg = u.rbegin()->first;
            out.assign(deg + 1, Rational(0));
            for (const auto& [d, c] : u) out[d] = eval_poly_ints(c, assign);
            return out.back() != 0;  // leading coefficient survived
        };
        std::vector<Rational> fa, fb;
        if (!eval_side(au, fa) || !eval_side(bu, fb)) continue;
        // univariate Euclid over ℚ
        while (!fb.empty()) {
            while (!fb.empty() && fb.back() == 0) fb.pop_back();
            if (fb.empty()) break;
            if (fb.size() == 1) { fa = fb; break; }
            // fa mod fb
            while (fa.size() >= fb.size()) {
                Rational factor = fa.back() / fb.back();
                std::size_t off = fa.size() - fb.size();
                for (std::size_t k = 0; k < fb.size(); ++k) fa[off + k] -= factor * fb[k];
                while (!fa.empty() && fa.back() == 0) fa.pop_back();
                if (fa.empty()) break;
            }
            std::swap(fa, fb);
        }
        if (fa.size() == 1 && fa[0] != 0) return true;  // gcd degree 0 in v
        if (!fa.empty() && fa.size() >= 2) return false;  // likely common factor: go to PRS
    }
    return false;  // inconclusive: fall through to PRS
}

/// Pseudo-remainder of f by g (both as univariate views in the same atom).
inline std::map<int, Poly> pseudo_rem(std::map<int, Poly> f, const std::map<int, Poly>& g) {
    int degg = g.rbegin()->first;
    const Poly& lcg = g.rbegin()->second;
    while (!f.empty() && f.rbegin()->first >= degg) {
        int degf = f.rbegin()->first;
        Poly lcf = f.rbegin()->second;
        // f := lc(g)·f − lc(f)·g·v^(degf−degg)
        std::map<int, Poly> nf;
        for (const auto& [d, c] : f)
            if (d != degf) nf[d] = poly_mul_free(c, lcg);
        for (const auto& [d, c] : g) {
            if (d == degg) continue;
            int dd = d + degf - degg;
            Poly sub = poly_mul_free(c, lcf);
            nf[dd] = nf.count(dd) ? poly_add(nf[dd], poly_neg(sub)) : poly_neg(sub);
        }
        for (auto it = nf.begin(); it != nf.end();)
            it = it->second.is_zero() ? nf.erase(it) : std::next(it);
        f = std::move(nf);
    }
    return f;
}

}  // namespace detail

/// GCD in the free polynomial ring (atoms independent), primitive PRS with a
/// random-evaluation coprimality shortcut.  Result is defined up to a scalar;
/// it is used only for cancellation, never for semantic decisions.
inline Poly detail_poly_gcd_impl(const Poly& a, const Poly& b) {
    using namespace detail;
    if (a.is_zero()) return b;
    if (b.is_zero()) return a;
    if (a.is_constant() || b.is_constant()) return poly_one();

    // Shared atoms; without any, only rational content is common.
    std::map<std::string, AtomPtr> aa, ab, shared;
    collect_atoms(a, aa);
    collect_atoms(b, ab);
    for (const auto& [k, at] : aa)
        if (ab.count(k)) shared.emplace(k, at);
    if (shared.empty()) return poly_one();

    AtomPtr v = shared.rbegin()->second;
    auto au = univariate_in(a, v);
    auto bu = univariate_in(b, v);

    Poly ca = univariate_content(au);
    Poly cb = univariate_content(bu);
    Poly cg = poly_gcd(ca, cb);

    auto fu = univariate_primitive(au, ca);
    auto gu = univariate_primitive(bu, cb);

    std::map<std::string, AtomPtr> others;
    collect_atoms(a, others);
    collect_atoms(b, others);
    others.erase(v->key);

    if (precheck_coprime(fu, gu, others)) return cg;

    // primitive PRS
    if (fu.rbegin()->first < gu.rbegin()->first) std::swap(fu, gu);
    int guard = 0;
    while (true) {
        if (++guard > 64) return cg;  // defensive; realistic degrees are tiny
        auto r = pseudo_rem(fu, gu);
        if (r.empty()) break;
        Poly rc = univariate_content(r);
        r = univariate_primitive(r, rc);
        fu = std::move(gu);
        gu = std::move(r);
        if (gu.rbegin()->first == 0) return cg;  // degree dropped to 0: coprime in v
    }
    // gu is the primitive gcd in v (up to content); normalize its content away.
    Poly gc = univariate_content(gu);
    gu = univariate_primitive(gu, gc);
    return poly_mul_free(cg, detail::from_univariate(gu, v));
}

inline Poly detail::poly_gcd(const Poly& a, const Poly& b) { return detail_poly_gcd_impl(a, b); }

// ---------------------------------------------------------------------------
// Fraction canonicalization and arithmetic
// ---------------------------------------------------------------------------

namespace detail {

/// Atom-wise minimum exponents over all monomials (the monomial content).
inline std::map<std::string, std::pair<AtomPtr, int>> monomial_content(const Poly& p) {
    std::map<std::string, std::pair<AtomPtr, int>> content;
    bool first = true;
    for (const auto& [m, c] : p.terms) {
        if (first) {
            for (const auto& [a, e] : m.factors) content[a->key] = {a, e};
            first = false;
            continue;
        }
        std::map<std::string, int> here;
        for (const auto& [a, e] : m.factors) here[a->key] = e;
        for (auto it = content.begin(); it != content.end();) {
            auto h = here.find(it->first);
            if (h == here.end()) {
                it = content.erase(it);
            } else {
                it->second.second = std::min(it->second.second, h->second);
                ++it;
            }
        }
        if (content.empty()) break;
    }
    return content;
}

inline Poly divide_out_monomial(const Poly& p, const std::map<std::string, int>& shift) {
    Poly out;
    for (const auto& [m, c] : p.terms) {
        Monomial mm;
        for (const auto& [a, e] : m.factors) {
            auto it = shift.find(a->key);
            int ne = it == shift.end() ? e : e - it->second;
            if (ne > 0) mm.factors.emplace_back(a, ne);
        }
        out.terms.emplace(std::move(mm), c);
    }
    return out;
}

}  // namespace detail

namespace detail {

/// Rewrite any out-of-range root exponents appearing in a raw polynomial.
inline Fraction reduce_poly(const Poly& p) {
    Poly simple;
    std::vector<Fraction> hard;
    for (const auto& [m, c] : p.terms) {
        if (mono_has_root_overflow(m))
            hard.push_back(reduce_term(c, m));
        else
            poly_add_term(simple, m, c);
    }
    Fraction res = make_fraction(std::move(simple), poly_one());
    for (const auto& f : hard) res = add_fraction(res, f);
    return res;
}

inline bool poly_has_overflow(const Poly& p) {
    for (const auto& [m, c] : p.terms)
        if (mono_has_root_overflow(m)) return true;
    return false;
}

}  // namespace detail

inline Fraction make_fraction(Poly num, Poly den) {
    using namespace detail;
    if (den.is_zero()) throw DivisionByZeroError("zero denominator in normal form");
    if (num.is_zero()) {
        Fraction z;
        z.num = Poly{};
        z.den = poly_one();
        z.key = poly_key(z.num) + "/" + poly_key(z.den);
        return z;
    }

    // 0. Defensive: raw inputs may carry out-of-range root exponents (only
    //    reachable through degenerate mixed-root denominators); reduce them.
    if (poly_has_overflow(num) || poly_has_overflow(den)) {
        Fraction fn = reduce_poly(num);
        Fraction fd = reduce_poly(den);
        if (fd.num.is_zero()) throw DivisionByZeroError("zero denominator in normal form");
        num = poly_mul_free(fn.num, fd.den);
        den = poly_mul_free(fn.den, fd.num);
        if (num.is_zero()) return make_fraction(Poly{}, poly_one());
    }

    // 1. Rationalize root atoms out of the denominator while its monomial
    //    content carries any (covers monomial·(root-free poly) denominators).
    for (int pass = 0; pass < 64; ++pass) {
        if (!poly_has_root_atom(den)) break;
        auto content = monomial_content(den);
        AtomPtr target;
        int have = 0;
        for (const auto& [k, ae] : content) {
            if (ae.first->kind == Atom::Kind::RootKernel) {
                target = ae.first;
                have = ae.second;
                break;
            }
        }
        if (!target) break;  // mixed-position roots: leave as-is (documented)
        int lift = static_cast<int>(target->root) - have;
        Poly mult = poly_atom(target, lift);
        Fraction nn = poly_mul_frac(num, mult);   // num · β^(b−k)
        Fraction dd = poly_mul_frac(den, mult);   // den · β^(b−k): β^b rewrites
        // (nn.num/nn.den) / (dd.num/dd.den) = nn.num·dd.den / (nn.den·dd.num)
        num = poly_mul_free(nn.num, dd.den);
        den = poly_mul_free(nn.den, dd.num);
        if (den.is_zero()) throw DivisionByZeroError("zero denominator in normal form");
    }

    // 2. Cancel the shared monomial content.
    auto cn = monomial_content(num);
    auto cd = monomial_content(den);
    std::map<std::string, int> shift;
    for (const auto& [k, ae] : cn) {
        auto it = cd.find(k);
        if (it != cd.end()) shift[k] = std::min(ae.second, it->second.second);
    }
    if (!shift.empty()) {
        num = divide_out_monomial(num, shift);
        den = divide_out_monomial(den, shift);
    }

    // 3. Cancel the polynomial GCD (verified exact divisions; on any anomaly
    //    the cancellation is skipped, which affects only canonicity).
    if (!num.is_constant() && !den.is_constant()) {
        Poly g = detail::poly_gcd(num, den);
        if (!g.is_constant() && !g.is_zero()) {
            auto qn = detail::poly_div_exact(num, g);
            auto qd = detail::poly_div_exact(den, g);
            if (qn && qd && !qd->is_zero()) {
                bool in_range = true;
                for (const auto& [m, c] : qn->terms)
                    if (mono_has_root_overflow(m)) in_range = false;
                for (const auto& [m, c] : qd->terms)
                    if (mono_has_root_overflow(m)) in_range = false;
                if (in_range) {
                    num = std::move(*qn);
                    den = std::move(*qd);
                }
            }
        }
    }

    // 4. Unique scaling: all coefficients integer and jointly coprime, with
    //    the denominator's first-in-order coefficient positive.
    mpz_class g(0), l(1);
    for (const Poly* p : {&num, &den}) {
        for (const auto& [m, c] : p->terms) {
            mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), mpz_class(c.get_num()).get_mpz_t());
            mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), mpz_class(c.get_den()).get_mpz_t());
        }
    }
    Rational scale(l, g);
    scale.canonicalize();
    if (den.terms.begin()->second < 0) scale = -scale;
    if (scale != 1) {
        num = poly_scale(num, scale);
        den = poly_scale(den, scale);
    }

    Fraction f;
    f.num = std::move(num);
    f.den = std::move(den);
    f.key = poly_key(f.num) + "/" + poly_key(f.den);
    return f;
}

inline Fraction add_fraction(const Fraction& a, const Fraction& b) {
    if (a.is_zero()) return b;
    if (b.is_zero()) return a;
    if (poly_key(a.den) == poly_key(b.den))
        return make_fraction(poly_add(a.num, b.num), a.den);
    // Denominators are root-free in the supported cases, so the cross
    // products below stay in the free ring.
    Poly g = detail::poly_gcd(a.den, b.den);
    if (!g.is_constant() && !g.is_zero()) {
        auto da = detail::poly_div_exact(a.den, g);
        auto db = detail::poly_div_exact(b.den, g);
        if (da && db) {
            Poly n = poly_add(poly_mul_free(a.num, *db), poly_mul_free(b.num, *da));
            Poly d = poly_mul_free(a.den, *db);
            return make_fraction(std::move(n), std::move(d));
        }
    }
    Poly n = poly_add(poly_mul_free(a.num, b.den), poly_mul_free(b.num, a.den));
    Poly d = poly_mul_free(a.den, b.den);
    return make_fraction(std::move(n), std::move(d));
}

inline Fraction neg_fraction(const Fraction& a) { return make_fraction(poly_neg(a.num), a.den); }

inline Fraction mul_fraction(const Fraction& a, const Fraction& b) {
    if (a.is_zero() || b.is_zero()) return fraction_rat(Rational(0));
    Fraction nn = poly_mul_frac(a.num, b.num);        // may rewrite roots
    Poly dd = poly_mul_free(a.den, b.den);            // root-free × root-free
    return make_fraction(nn.num, poly_mul_free(nn.den, dd));
}

inline Fraction div_fraction(const Fraction& a, const Fraction& b) {
    if (b.is_zero()) throw DivisionByZeroError("division by an expression that normalizes to zero");
    // invert b (make_fraction rationalizes the new denominator), then multiply
    Fraction binv = make_fraction(b.den, b.num);
    return mul_fraction(a, binv);
}

// ---------------------------------------------------------------------------
// Expression → normal form
// ---------------------------------------------------------------------------

namespace detail {

using NfMemo = std::unordered_map<const Expr*, Fraction>;

inline const Fraction& normal_form_impl(const ExprPtr& e, NfMemo& memo) {
    if (auto it = memo.find(e.get()); it != memo.end()) return it->second;
    Fraction out;
    switch (e->kind()) {
        case ExprKind::Rational:
            out = fraction_rat(e->value());
            break;
        case ExprKind::Symbol:
            out = fraction_of_poly(poly_atom(make_symbol_atom(e->name())));
            break;
        case ExprKind::Sum: {
            Fraction acc = fraction_rat(Rational(0));
            for (const auto& k : e->children()) acc = add_fraction(acc, normal_form_impl(k, memo));
            out = std::move(acc);
            break;
        }
        case ExprKind::Product: {
            Fraction acc = fraction_rat(Rational(1));
            for (const auto& k : e->children()) {
                acc = mul_fraction(acc, normal_form_impl(k, memo));
                if (acc.is_zero()) break;
            }
            out = std::move(acc);
            break;
        }
        case ExprKind::Quotient:
            out = div_fraction(normal_form_impl(e->children()[0], memo),
                               normal_form_impl(e->children()[1], memo));
            break;
        case ExprKind::Power: {
            Fraction base = normal_form_impl(e->children()[0], memo);
            const Rational& r = e->exponent();
            long b = static_cast<long>(r.get_den().get_si());
            long a = static_cast<long>(r.get_num().get_si());
            if (b == 1) {
                out = fraction_int_pow(base, a);
            } else if (base.is_zero()) {
                if (a < 0) throw DivisionByZeroError("0 raised to a negative power");
                out = base;
            } else if (base.is_rational() && rat_perfect_root(base.rational_value(), b)) {
                out = fraction_rat(rat_pow(*rat_perfect_root(base.rational_value(), b), a));
            } else {
                AtomPtr beta = make_root_atom(b, base);
                out = fraction_int_pow(fraction_of_poly(poly_atom(beta, 1)), a);
            }
            break;
        }
        default: {  // Apply
            Fraction arg = normal_form_impl(e->children()[0], memo);
            if (arg.is_rational()) {
                Rational v = arg.rational_value();
                if (e->func() == Func::Exp && v == 0) { out = fraction_rat(Rational(1)); break; }
                if (e->func() == Func::Ln && v == 1) { out = fraction_rat(Rational(0)); break; }
                if (e->func() == Func::Sin && v == 0) { out = fraction_rat(Rational(0)); break; }
                if (e->func() == Func::Cos && v == 0) { out = fraction_rat(Rational(1)); break; }
            }
            AtomPtr k = make_func_atom(e->func(), arg);
            out = fraction_of_poly(poly_atom(k));
            break;
        }
    }
    return memo.emplace(e.get(), std::move(out)).first->second;
}

}  // namespace detail

inline Fraction normal_form(const ExprPtr& e) {
    detail::NfMemo memo;
    return detail::normal_form_impl(e, memo);
}

// ---------------------------------------------------------------------------
// Differentiation on normal forms
// ---------------------------------------------------------------------------
//
// Derivatives computed directly on fractions stay canonical and avoid the
// intermediate swell of tree-level differentiation.  Root kernels are closed
// under d/dv: with β = f^(1/b),  β' = (1/b)·f'·β/f.

class DiffContext {
public:
    Fraction diff(const Fraction& f, const std::string& var) {
        Fraction dn = diff_poly(f.num, var);
        if (f.den.is_constant()) {
            if (f.den.constant_value() == 1) return dn;
            return mul_fraction(dn, fraction_rat(Rational(1) / f.den.constant_value()));
        }
        Fraction dd = diff_poly(f.den, var);
        Fraction t1 = mul_fraction(dn, fraction_of_poly(f.den));
        if (dd.is_zero())
            return make_div(t1, f.den);
        Fraction t2 = mul_fraction(fraction_of_poly(f.num), dd);
        return make_div(add_fraction(t1, neg_fraction(t2)), f.den);
    }

    Fraction diff_poly(const Poly& p, const std::string& var) {
        Fraction acc = fraction_rat(Rational(0));
        for (const auto& [m, c] : p.terms) {
            for (std::size_t i = 0; i < m.factors.size(); ++i) {
                const auto& [a, e] = m.factors[i];
                const Fraction& da = diff_atom(a, var);
                if (da.is_zero()) continue;
                Monomial rest;
                rest.factors.reserve(m.factors.size());
                for (std::size_t j = 0; j < m.factors.size(); ++j) {
                    if (j == i) {
                        if (e > 1) rest.factors.emplace_back(a, e - 1);
                    } else {
                        rest.factors.push_back(m.factors[j]);
                    }
                }
                Poly piece;
                piece.terms.emplace(std::move(rest), c * e);
                acc = add_fraction(acc, mul_fraction(fraction_of_poly(std::move(piece)), da));
            }
        }
        return acc;
    }

private:
    std::map<std::string, Fraction> atom_memo_;  // key: atom key + '\n' + var

    // t / den²
    static Fraction make_div(const Fraction& t, const Poly& den) {
        return div_fraction(t, fraction_of_poly(poly_mul_free(den, den)));
    }

    const Fraction& diff_atom(const AtomPtr& a, const std::string& var) {
        std::string key = a->key + '\n' + var;
        if (auto it = atom_memo_.find(key); it != atom_memo_.end()) return it->second;
        Fraction out;
        switch (a->kind) {
            case Atom::Kind::Symbol:
                out = fraction_rat(Rational(a->name == var ? 1 : 0));
                break;
            case Atom::Kind::FuncKernel: {
                Fraction fp = diff(*a->content, var);
                if (fp.is_zero()) {
                    out = fp;
                    break;
                }
                switch (a->func) {
                    case Func::Exp:
                        out = mul_fraction(fraction_of_poly(poly_atom(a)), fp);
                        break;
                    case Func::Ln:
                        out = div_fraction(fp, *a->content);
                        break;
                    case Func::Sin:
                        out = mul_fraction(fraction_of_poly(poly_atom(make_func_atom(Func::Cos, *a->content))), fp);
                        break;
                    default:
                        out = neg_fraction(mul_fraction(
                            fraction_of_poly(poly_atom(make_func_atom(Func::Sin, *a->content))), fp));
                        break;
                }
                break;
            }
            default: {  // RootKernel
                Fraction fp = diff(*a->content, var);
                if (fp.is_zero()) {
                    out = fp;
                    break;
                }
                Fraction t = mul_fraction(fp, fraction_of_poly(poly_atom(a)));
                t = mul_fraction(t, fraction_rat(Rational(1, a->root)));
                out = div_fraction(t, *a->content);
                break;
            }
        }
        return atom_memo_.emplace(std::move(key), std::move(out)).first->second;
    }
};

inline Fraction diff_fraction(const Fraction& f, const std::string& var) {
    DiffContext ctx;
    return ctx.diff(f, var);
}

// ---------------------------------------------------------------------------
// Normal form → expression
// ---------------------------------------------------------------------------

inline ExprPtr to_expr(const Fraction& f);

inline ExprPtr atom_to_expr(const AtomPtr& a) {
    switch (a->kind) {
        case Atom::Kind::Symbol:
            return sym(a->name);
        case Atom::Kind::FuncKernel:
            return Expr::apply_node(a->func, to_expr(*a->content));
        default:
            return Expr::power_node(to_expr(*a->content), Rational(1, a->root));
    }
}

inline ExprPtr poly_to_expr(const Poly& p) {
    if (p.is_zero()) return rat(0);
    std::vector<ExprPtr> terms;
    for (const auto& [m, c] : p.terms) {
        std::vector<ExprPtr> factors;
        if (c != 1 || m.factors.empty()) factors.push_back(rat(c));
        for (const auto& [a, e] : m.factors) {
            ExprPtr ae = atom_to_expr(a);
            factors.push_back(e == 1 ? ae : pow(ae, e));
        }
        terms.push_back(product(std::move(factors)));
    }
    return sum(std::move(terms));
}

inline ExprPtr to_expr(const Fraction& f) {
    ExprPtr n = poly_to_expr(f.num);
    if (f.den.is_constant() && f.den.constant_value() == 1) return n;
    return quot(n, poly_to_expr(f.den));
}

/// Canonical form of an expression (normal form rendered back as a tree).
inline ExprPtr normalize(const ExprPtr& e) { return to_expr(normal_form(e)); }

// ---------------------------------------------------------------------------
// Probing and the zero verdict
// ---------------------------------------------------------------------------

/// Symbols that must be sampled positive: anything under an even root index
/// or inside a logarithm (per the numeric domain policy).
inline void collect_positive_symbols(const ExprPtr& e, std::set<std::string>& out) {
    if (e->kind() == ExprKind::Power && e->exponent().get_den() % 2 == 0) {
        collect_symbols(e->children()[0], out);
    } else if (e->kind() == ExprKind::Apply && e->func() == Func::Ln) {
        collect_symbols(e->children()[0], out);
    }
    for (const auto& k : e->children()) collect_positive_symbols(k, out);
}

/// One probe point: magnitudes uniform in [0.3, 2.0], random sign unless the
/// symbol must stay positive; pinned values (parameters) override sampling.
inline Point sample_point(const std::set<std::string>& symbols, const std::set<std::string>& positive,
                          Rng& rng, const std::map<std::string, double>& pinned) {
    Point pt;
    for (const auto& s : symbols) {
        auto it = pinned.find(s);
        if (it != pinned.end()) {
            pt.values[s] = it->second;
            continue;
        }
        double mag = 0.3 + 1.7 * rng.next_unit();
        bool negative = positive.count(s) ? false : rng.next_bool();
        pt.values[s] = negative ? -mag : mag;
    }
    return pt;
}

/// Zero test: ProvedZero on literal-zero normal form; otherwise numeric
/// probing of the original tree with witness reporting. Deterministic for a
/// fixed seed.
inline ZeroTestResult is_zero_detailed(const ExprPtr& e, const ProbeConfig& cfg = {}) {
    ZeroTestResult res;
    Fraction nf = normal_form(e);
    if (nf.is_zero()) {
        res.verdict = ZeroVerdict::ProvedZero;
        return res;
    }
    if (nf.is_rational()) {
        res.verdict = ZeroVerdict::ProvedNonzero;
        res.witness = Point{};
        res.witness_value = rat_to_double(nf.rational_value());
        res.max_abs_seen = std::fabs(res.witness_value);
        res.probes_evaluated = 0;
        return res;
    }

    std::set<std::string> symbols = free_symbols(e);
    std::set<std::string> positive;
    collect_positive_symbols(e, positive);

    Rng rng(cfg.seed);
    int retries_left = cfg.max_domain_retries;
    for (int i = 0; i < cfg.probes; ++i) {
        bool evaluated = false;
        while (!evaluated) {
            Point pt = sample_point(symbols, positive, rng, cfg.pinned);
            try {
                EvalResult ev = eval_numeric(e, pt, FloatKind::f64);
                ++res.probes_evaluated;
                evaluated = true;
                double bound = cfg.abs_threshold + cfg.rel_threshold * ev.max_magnitude;
                if (std::fabs(ev.value) > bound) {
                    res.verdict = ZeroVerdict::ProvedNonzero;
                    res.witness = pt;
                    res.witness_value = ev.value;
                    res.max_abs_seen = std::max(res.max_abs_seen, std::fabs(ev.value));
                    return res;
                }
                res.max_abs_seen = std::max(res.max_abs_seen, std::fabs(ev.value));
            } catch (const Error&) {
                ++res.domain_rejections;
                if (--retries_left <= 0) {
                    res.verdict = ZeroVerdict::Unknown;
                    return res;
                }
            }
        }
    }
    res.verdict = ZeroVerdict::Unknown;
    return res;
}

inline ZeroVerdict is_zero(const ExprPtr& e, const ProbeConfig& cfg = {}) {
    return is_zero_detailed(e, cfg).verdict;
}

// ---------------------------------------------------------------------------
// Constancy
// ---------------------------------------------------------------------------

struct ConstantResult {
    std::optional<ExprPtr> value;  // present iff constant in x, y, p, q
    bool warning = false;          // absent because a partial came back Unknown
};

/// Tests whether the expression is independent of the jet coordinates
/// x, y, p, q.  The returned constant may still contain parameters.
inline ConstantResult is_constant(const ExprPtr& e, const ProbeConfig& cfg = {}) {
    ConstantResult out;
    bool unknown = false;
    for (const char* v : {"x", "y", "p", "q"}) {
        ZeroVerdict verdict = is_zero(diff(e, v), cfg);
        if (verdict == ZeroVerdict::ProvedNonzero) return out;
        if (verdict == ZeroVerdict::Unknown) unknown = true;
    }
    if (unknown) {
        out.warning = true;
        return out;
    }
    ExprPtr n = normalize(e);
    std::set<std::string> fs = free_symbols(n);
    if (fs.count("x") || fs.count("y") || fs.count("p") || fs.count("q")) {
        // Provedly constant but the coordinates linger syntactically:
        // pin them at 1 (any value of a constant function works).
        std::map<std::string, ExprPtr> at_one = {
            {"x", rat(1)}, {"y", rat(1)}, {"p", rat(1)}, {"q", rat(1)}};
        n = normalize(substitute(n, at_one));
    }
    out.value = n;
    return out;
}

}  // namespace ode3geo
