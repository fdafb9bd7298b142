/*
 * expr.hpp
 * --------
 * Immutable symbolic expression trees over exact rationals.
 *
 * Node kinds: rational constant, symbol, n-ary sum, n-ary product, binary
 * quotient, power with an exact rational exponent, and application of one of
 * the elementary functions exp/ln/sin/cos.  sqrt and cbrt are sugar for
 * powers 1/2 and 1/3.  Exponents are always rational constants — symbolic
 * exponents are outside the accepted grammar.
 *
 * Trees are shared through ExprPtr (shared_ptr<const Expr>) and never
 * mutated.  Smart constructors perform only trivially sound folds (rational
 * arithmetic, dropping additive zeros and multiplicative ones, exact perfect
 * roots); semantic canonicalization lives in normal.hpp.
 *
 * Numeric evaluation uses the real-signed convention for roots with odd
 * index: x^(a/b) with b odd is (sign-preserving b-th root of x)^a, so cube
 * roots of negative numbers are real.  Even-index roots of negative numbers
 * raise DomainError.
 */
#pragma once

#include "common.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace ode3geo {

enum class ExprKind : std::uint8_t { Rational = 0, Symbol, Power, Apply, Product, Quotient, Sum };

enum class Func : std::uint8_t { Exp = 0, Ln, Sin, Cos };

inline const char* func_name(Func f) {
    switch (f) {
        case Func::Exp: return "exp";
        case Func::Ln: return "ln";
        case Func::Sin: return "sin";
        default: return "cos";
    }
}

class Expr;
using ExprPtr = std::shared_ptr<const Expr>;

class Expr {
public:
    // Use the free builder functions below; these constructors are the raw
    // node factories.
    static ExprPtr rational(Rational v);
    static ExprPtr symbol(std::string name);
    static ExprPtr sum_node(std::vector<ExprPtr> terms);
    static ExprPtr product_node(std::vector<ExprPtr> factors);
    static ExprPtr quotient_node(ExprPtr num, ExprPtr den);
    static ExprPtr power_node(ExprPtr base, Rational exponent);
    static ExprPtr apply_node(Func f, ExprPtr arg);

    ExprKind kind() const { return kind_; }
    const Rational& value() const { return value_; }        // Rational
    const std::string& name() const { return name_; }       // Symbol
    const std::vector<ExprPtr>& children() const { return kids_; }
    const Rational& exponent() const { return value_; }     // Power
    Func func() const { return func_; }                     // Apply
    std::uint64_t hash() const { return hash_; }

    bool is_rational() const { return kind_ == ExprKind::Rational; }
    bool is_zero_literal() const { return kind_ == ExprKind::Rational && value_ == 0; }
    bool is_one_literal() const { return kind_ == ExprKind::Rational && value_ == 1; }

private:
    Expr() = default;
    void finish_hash();

    ExprKind kind_ = ExprKind::Rational;
    Rational value_;              // Rational payload, or Power exponent
    std::string name_;            // Symbol payload
    std::vector<ExprPtr> kids_;   // Sum/Product members, Quotient [num,den], Power [base], Apply [arg]
    Func func_ = Func::Exp;
    std::uint64_t hash_ = 0;
};

// ---------------------------------------------------------------------------
// Structural order, equality, hashing
// ---------------------------------------------------------------------------

/// Rank of the fixed coordinate order x < y < p < q < u < c1 < c2 < c3;
/// all other identifiers (parameters) come after, ordered by name.
inline int symbol_rank(const std::string& name) {
    static const char* kCoords[] = {"x", "y", "p", "q", "u", "c1", "c2", "c3"};
    for (int i = 0; i < 8; ++i)
        if (name == kCoords[i]) return i;
    return 8;
}

int compare(const ExprPtr& a, const ExprPtr& b);

inline bool structural_equal(const ExprPtr& a, const ExprPtr& b) {
    if (a.get() == b.get()) return true;
    if (a->hash() != b->hash()) return false;
    return compare(a, b) == 0;
}

/// Deterministic total order on expression trees: by kind, then contents.
inline int compare(const ExprPtr& a, const ExprPtr& b) {
    if (a.get() == b.get()) return 0;
    if (a->kind() != b->kind()) return a->kind() < b->kind() ? -1 : 1;
    switch (a->kind()) {
        case ExprKind::Rational:
            return cmp(a->value(), b->value()) < 0 ? -1 : (cmp(a->value(), b->value()) > 0 ? 1 : 0);
        case ExprKind::Symbol: {
            int ra = symbol_rank(a->name()), rb = symbol_rank(b->name());
            if (ra != rb) return ra < rb ? -1 : 1;
            return a->name().compare(b->name()) < 0 ? -1 : (a->name() == b->name() ? 0 : 1);
        }
        case ExprKind::Power: {
            if (int c = compare(a->children()[0], b->children()[0])) return c;
            int c = cmp(a->exponent(), b->exponent());
            return c < 0 ? -1 : (c > 0 ? 1 : 0);
        }
        case ExprKind::Apply: {
            if (a->func() != b->func()) return a->func() < b->func() ? -1 : 1;
            return compare(a->children()[0], b->children()[0]);
        }
        default: {  // Sum, Product, Quotient: lexicographic over children
            const auto& ka = a->children();
            const auto& kb = b->children();
            std::size_t n = std::min(ka.size(), kb.size());
            for (std::size_t i = 0; i < n; ++i)
                if (int c = compare(ka[i], kb[i])) return c;
            if (ka.size() != kb.size()) return ka.size() < kb.size() ? -1 : 1;
            return 0;
        }
    }
}

inline void Expr::finish_hash() {
    std::uint64_t h = hash_string("expr");
    h = hash_combine(h, static_cast<std::uint64_t>(kind_));
    switch (kind_) {
        case ExprKind::Rational:
            h = hash_string(value_.get_str(), h);
            break;
        case ExprKind::Symbol:
            h = hash_string(name_, h);
            break;
        case ExprKind::Power:
            h = hash_combine(h, kids_[0]->hash());
            h = hash_string(value_.get_str(), h);
            break;
        case ExprKind::Apply:
            h = hash_combine(h, static_cast<std::uint64_t>(func_));
            h = hash_combine(h, kids_[0]->hash());
            break;
        default:
            for (const auto& k : kids_) h = hash_combine(h, k->hash());
            break;
    }
    hash_ = h;
}

// ---------------------------------------------------------------------------
// Raw node factories
// ---------------------------------------------------------------------------

inline ExprPtr Expr::rational(Rational v) {
    auto e = std::shared_ptr<Expr>(new Expr());
    e->kind_ = ExprKind::Rational;
    e->value_ = std::move(v);
    e->finish_hash();
    return e;
}

inline ExprPtr Expr::symbol(std::string name) {
    auto e = std::shared_ptr<Expr>(new Expr());
    e->kind_ = ExprKind::Symbol;
    e->name_ = std::move(name);
    e->finish_hash();
    return e;
}

inline ExprPtr Expr::sum_node(std::vector<ExprPtr> terms) {
    auto e = std::shared_ptr<Expr>(new Expr());
    e->kind_ = ExprKind::Sum;
    e->kids_ = std::move(terms);
    e->finish_hash();
    return e;
}

inline ExprPtr Expr::product_node(std::vector<ExprPtr> factors) {
    auto e = std::shared_ptr<Expr>(new Expr());
    e->kind_ = ExprKind::Product;
    e->kids_ = std::move(factors);
    e->finish_hash();
    return e;
}

inline ExprPtr Expr::quotient_node(ExprPtr num, ExprPtr den) {
    auto e = std::shared_ptr<Expr>(new Expr());
    e->kind_ = ExprKind::Quotient;
    e->kids_ = {std::move(num), std::move(den)};
    e->finish_hash();
    return e;
}

inline ExprPtr Expr::power_node(ExprPtr base, Rational exponent) {
    auto e = std::shared_ptr<Expr>(new Expr());
    e->kind_ = ExprKind::Power;
    e->kids_ = {std::move(base)};
    e->value_ = std::move(exponent);
    e->finish_hash();
    return e;
}

inline ExprPtr Expr::apply_node(Func f, ExprPtr arg) {
    auto e = std::shared_ptr<Expr>(new Expr());
    e->kind_ = ExprKind::Apply;
    e->func_ = f;
    e->kids_ = {std::move(arg)};
    e->finish_hash();
    return e;
}

// ---------------------------------------------------------------------------
// Smart builders (trivially sound folds only)
// ---------------------------------------------------------------------------

inline ExprPtr rat(long num, long den = 1) { return Expr::rational(rational_of(num, den)); }
inline ExprPtr rat(const Rational& r) { return Expr::rational(r); }
inline ExprPtr sym(const std::string& name) { return Expr::symbol(name); }

inline ExprPtr sum(std::vector<ExprPtr> terms) {
    std::vector<ExprPtr> kept;
    Rational c(0);
    auto absorb = [&](auto&& self, const ExprPtr& t) -> void {
        if (!t) return;
        if (t->is_rational())
            c += t->value();
        else if (t->kind() == ExprKind::Sum)
            for (const auto& k : t->children()) self(self, k);
        else
            kept.push_back(t);
    };
    for (auto& t : terms) absorb(absorb, t);
    if (kept.empty()) return Expr::rational(c);
    if (c != 0) kept.push_back(Expr::rational(c));
    if (kept.size() == 1) return kept[0];
    return Expr::sum_node(std::move(kept));
}

inline ExprPtr add(const ExprPtr& a, const ExprPtr& b) { return sum({a, b}); }

inline ExprPtr product(std::vector<ExprPtr> factors) {
    std::vector<ExprPtr> kept;
    Rational c(1);
    auto absorb = [&](auto&& self, const ExprPtr& f) -> void {
        if (!f) return;
        if (f->is_rational())
            c *= f->value();
        else if (f->kind() == ExprKind::Product)
            for (const auto& k : f->children()) self(self, k);
        else
            kept.push_back(f);
    };
    for (auto& f : factors) absorb(absorb, f);
    if (c == 0) return rat(0);
    if (kept.empty()) return Expr::rational(c);
    if (c != 1) kept.insert(kept.begin(), Expr::rational(c));
    if (kept.size() == 1) return kept[0];
    return Expr::product_node(std::move(kept));
}

inline ExprPtr mul(const ExprPtr& a, const ExprPtr& b) { return product({a, b}); }
inline ExprPtr neg(const ExprPtr& a) { return product({rat(-1), a}); }
inline ExprPtr sub(const ExprPtr& a, const ExprPtr& b) { return sum({a, neg(b)}); }

inline ExprPtr pow(const ExprPtr& base, const Rational& e);

inline ExprPtr quot(const ExprPtr& num, const ExprPtr& den) {
    if (den->is_rational()) {
        if (den->value() == 0) throw DivisionByZeroError("division by literal zero");
        if (den->value() == 1) return num;
        return product({Expr::rational(1 / den->value()), num});
    }
    if (num->is_zero_literal()) return num;
    return Expr::quotient_node(num, den);
}

inline ExprPtr pow(const ExprPtr& base, const Rational& e) {
    if (e == 0) return rat(1);
    if (e == 1) return base;
    if (base->is_rational()) {
        const Rational& v = base->value();
        if (v == 0) {
            if (e < 0) throw DivisionByZeroError("0 raised to a negative power");
            return rat(0);
        }
        if (e.get_den() == 1 && e.get_num().fits_slong_p())
            return Expr::rational(rat_pow(v, e.get_num().get_si()));
        // Fractional exponent of a rational: fold exactly when the base has
        // an exact root (e.g. 1^(1/3), 8^(2/3)); otherwise keep symbolic.
        if (e.get_den().fits_slong_p() && e.get_num().fits_slong_p()) {
            if (auto root = rat_perfect_root(v, e.get_den().get_si()))
                return Expr::rational(rat_pow(*root, e.get_num().get_si()));
        }
    }
    // (b^r)^n with integer n folds to b^(r·n); valid under the real-signed
    // root convention because the root index is unchanged.
    if (base->kind() == ExprKind::Power && e.get_den() == 1)
        return pow(base->children()[0], base->exponent() * e);
    return Expr::power_node(base, e);
}

inline ExprPtr pow(const ExprPtr& base, long num, long den = 1) { return pow(base, rational_of(num, den)); }

inline ExprPtr apply_func(Func f, const ExprPtr& arg) {
    if (arg->is_rational()) {
        const Rational& v = arg->value();
        if (f == Func::Exp && v == 0) return rat(1);
        if (f == Func::Ln && v == 1) return rat(0);
        if (f == Func::Sin && v == 0) return rat(0);
        if (f == Func::Cos && v == 0) return rat(1);
    }
    return Expr::apply_node(f, arg);
}

inline ExprPtr sqrt_of(const ExprPtr& e) { return pow(e, rational_of(1, 2)); }
inline ExprPtr cbrt_of(const ExprPtr& e) { return pow(e, rational_of(1, 3)); }

// ---------------------------------------------------------------------------
// Differentiation, substitution, symbol collection
// ---------------------------------------------------------------------------
//
// Expressions form DAGs (builders share subtree pointers), so the recursive
// operations memoize on node identity to stay linear in the DAG size.

namespace detail {

using ExprMemo = std::unordered_map<const Expr*, ExprPtr>;

inline ExprPtr diff_impl(const ExprPtr& e, const std::string& var, ExprMemo& memo) {
    if (auto it = memo.find(e.get()); it != memo.end()) return it->second;
    ExprPtr out;
    switch (e->kind()) {
        case ExprKind::Rational:
            out = rat(0);
            break;
        case ExprKind::Symbol:
            out = e->name() == var ? rat(1) : rat(0);
            break;
        case ExprKind::Sum: {
            std::vector<ExprPtr> parts;
            parts.reserve(e->children().size());
            for (const auto& k : e->children()) parts.push_back(diff_impl(k, var, memo));
            out = sum(std::move(parts));
            break;
        }
        case ExprKind::Product: {
            std::vector<ExprPtr> parts;
            const auto& ks = e->children();
            for (std::size_t i = 0; i < ks.size(); ++i) {
                ExprPtr di = diff_impl(ks[i], var, memo);
                if (di->is_zero_literal()) continue;
                std::vector<ExprPtr> fs;
                for (std::size_t j = 0; j < ks.size(); ++j) fs.push_back(j == i ? di : ks[j]);
                parts.push_back(product(std::move(fs)));
            }
            out = sum(std::move(parts));
            break;
        }
        case ExprKind::Quotient: {
            const ExprPtr& a = e->children()[0];
            const ExprPtr& b = e->children()[1];
            ExprPtr da = diff_impl(a, var, memo), db = diff_impl(b, var, memo);
            // (a/b)' = (a'·b − a·b')/b²
            out = quot(sub(mul(da, b), mul(a, db)), pow(b, 2));
            break;
        }
        case ExprKind::Power: {
            const ExprPtr& b = e->children()[0];
            ExprPtr db = diff_impl(b, var, memo);
            if (db->is_zero_literal())
                out = rat(0);
            else
                out = product({rat(e->exponent()), pow(b, e->exponent() - 1), db});
            break;
        }
        default: {  // Apply
            const ExprPtr& a = e->children()[0];
            ExprPtr da = diff_impl(a, var, memo);
            if (da->is_zero_literal()) {
                out = rat(0);
            } else {
                switch (e->func()) {
                    case Func::Exp: out = mul(e, da); break;
                    case Func::Ln: out = quot(da, a); break;
                    case Func::Sin: out = mul(apply_func(Func::Cos, a), da); break;
                    default: out = product({rat(-1), apply_func(Func::Sin, a), da}); break;
                }
            }
            break;
        }
    }
    memo.emplace(e.get(), out);
    return out;
}

inline ExprPtr substitute_impl(const ExprPtr& e, const std::map<std::string, ExprPtr>& bindings,
                               ExprMemo& memo) {
    if (auto it = memo.find(e.get()); it != memo.end()) return it->second;
    ExprPtr out;
    switch (e->kind()) {
        case ExprKind::Rational:
            out = e;
            break;
        case ExprKind::Symbol: {
            auto it = bindings.find(e->name());
            out = it == bindings.end() ? e : it->second;
            break;
        }
        case ExprKind::Sum:
        case ExprKind::Product: {
            std::vector<ExprPtr> ks;
            ks.reserve(e->children().size());
            bool changed = false;
            for (const auto& k : e->children()) {
                ks.push_back(substitute_impl(k, bindings, memo));
                changed = changed || ks.back().get() != k.get();
            }
            if (!changed)
                out = e;
            else
                out = e->kind() == ExprKind::Sum ? sum(std::move(ks)) : product(std::move(ks));
            break;
        }
        case ExprKind::Quotient: {
            ExprPtr a = substitute_impl(e->children()[0], bindings, memo);
            ExprPtr b = substitute_impl(e->children()[1], bindings, memo);
            out = (a.get() == e->children()[0].get() && b.get() == e->children()[1].get()) ? e : quot(a, b);
            break;
        }
        case ExprKind::Power: {
            ExprPtr b = substitute_impl(e->children()[0], bindings, memo);
            out = b.get() == e->children()[0].get() ? e : pow(b, e->exponent());
            break;
        }
        default: {
            ExprPtr a = substitute_impl(e->children()[0], bindings, memo);
            out = a.get() == e->children()[0].get() ? e : apply_func(e->func(), a);
            break;
        }
    }
    memo.emplace(e.get(), out);
    return out;
}

}  // namespace detail

inline ExprPtr diff(const ExprPtr& e, const std::string& var) {
    detail::ExprMemo memo;
    return detail::diff_impl(e, var, memo);
}

inline ExprPtr substitute(const ExprPtr& e, const std::map<std::string, ExprPtr>& bindings) {
    detail::ExprMemo memo;
    return detail::substitute_impl(e, bindings, memo);
}

namespace detail {

inline void collect_symbols_impl(const ExprPtr& e, std::set<std::string>& out,
                                 std::unordered_set<const Expr*>& seen) {
    if (!seen.insert(e.get()).second) return;
    if (e->kind() == ExprKind::Symbol) {
        out.insert(e->name());
        return;
    }
    for (const auto& k : e->children()) collect_symbols_impl(k, out, seen);
}

}  // namespace detail

inline void collect_symbols(const ExprPtr& e, std::set<std::string>& out) {
    std::unordered_set<const Expr*> seen;
    detail::collect_symbols_impl(e, out, seen);
}

inline std::set<std::string> free_symbols(const ExprPtr& e) {
    std::set<std::string> s;
    collect_symbols(e, s);
    return s;
}

// ---------------------------------------------------------------------------
// Numeric evaluation
// ---------------------------------------------------------------------------

enum class FloatKind { f32, f64, f80 };

struct EvalResult {
    double value = 0.0;
    double max_magnitude = 0.0;  ///< largest |intermediate| encountered
};

namespace detail {

template <typename T>
T eval_impl(const ExprPtr& e, const Point& at, double& max_mag,
            std::unordered_map<const Expr*, T>& memo) {
    if (auto it = memo.find(e.get()); it != memo.end()) return it->second;
    T v;
    switch (e->kind()) {
        case ExprKind::Rational:
            v = static_cast<T>(rat_to_double(e->value()));
            break;
        case ExprKind::Symbol:
            v = static_cast<T>(at.at(e->name()));
            break;
        case ExprKind::Sum: {
            v = T(0);
            for (const auto& k : e->children()) v += eval_impl<T>(k, at, max_mag, memo);
            break;
        }
        case ExprKind::Product: {
            v = T(1);
            for (const auto& k : e->children()) v *= eval_impl<T>(k, at, max_mag, memo);
            break;
        }
        case ExprKind::Quotient: {
            T a = eval_impl<T>(e->children()[0], at, max_mag, memo);
            T b = eval_impl<T>(e->children()[1], at, max_mag, memo);
            if (b == T(0)) throw DivisionByZeroError("division by zero at evaluation point");
            v = a / b;
            break;
        }
        case ExprKind::Power: {
            T b = eval_impl<T>(e->children()[0], at, max_mag, memo);
            const Rational& r = e->exponent();
            double ex = rat_to_double(r);
            if (r.get_den() == 1) {
                if (b == T(0) && r < 0) throw DivisionByZeroError("0 raised to a negative power");
                v = static_cast<T>(std::pow(static_cast<double>(b), ex));
            } else if (b >= T(0)) {
                if (b == T(0) && r < 0) throw DivisionByZeroError("0 raised to a negative power");
                v = static_cast<T>(std::pow(static_cast<double>(b), ex));
            } else {
                // negative base: real-signed branch only for odd root index
                if (mpz_class(r.get_den()) % 2 == 0)
                    throw DomainError("even root of a negative number");
                bool odd_num = mpz_class(r.get_num()) % 2 != 0;
                double mag = std::pow(-static_cast<double>(b), ex);
                v = static_cast<T>(odd_num ? -mag : mag);
            }
            break;
        }
        default: {
            T a = eval_impl<T>(e->children()[0], at, max_mag, memo);
            switch (e->func()) {
                case Func::Exp: v = static_cast<T>(std::exp(static_cast<double>(a))); break;
                case Func::Ln:
                    if (a <= T(0)) throw DomainError("ln of a non-positive number");
                    v = static_cast<T>(std::log(static_cast<double>(a)));
                    break;
                case Func::Sin: v = static_cast<T>(std::sin(static_cast<double>(a))); break;
                default: v = static_cast<T>(std::cos(static_cast<double>(a))); break;
            }
            break;
        }
    }
    if (!std::isfinite(static_cast<double>(v))) throw DomainError("non-finite intermediate value");
    double m = std::fabs(static_cast<double>(v));
    if (m > max_mag) max_mag = m;
    memo.emplace(e.get(), v);
    return v;
}

}  // namespace detail

/// Evaluate at a point. Throws DomainError / DivisionByZeroError on
/// out-of-domain input. max_magnitude supports relative zero-test thresholds.
inline EvalResult eval_numeric(const ExprPtr& e, const Point& at, FloatKind precision = FloatKind::f64) {
    EvalResult r;
    switch (precision) {
        case FloatKind::f32: {
            std::unordered_map<const Expr*, float> memo;
            r.value = static_cast<double>(detail::eval_impl<float>(e, at, r.max_magnitude, memo));
            break;
        }
        case FloatKind::f64: {
            std::unordered_map<const Expr*, double> memo;
            r.value = detail::eval_impl<double>(e, at, r.max_magnitude, memo);
            break;
        }
        default: {
            std::unordered_map<const Expr*, long double> memo;
            r.value = static_cast<double>(detail::eval_impl<long double>(e, at, r.max_magnitude, memo));
            break;
        }
    }
    return r;
}

// ---------------------------------------------------------------------------
// Printing (grammar round-trip) and LaTeX
// ---------------------------------------------------------------------------

namespace detail {

// Precedence levels: sum 1, product/quotient 2, power 3, atoms 4.
std::string print_expr(const ExprPtr& e, int context);

inline bool is_negative_leading(const ExprPtr& e) {
    if (e->is_rational()) return e->value() < 0;
    if (e->kind() == ExprKind::Product && e->children()[0]->is_rational())
        return e->children()[0]->value() < 0;
    return false;
}

/// e with the leading rational coefficient negated (used by sum printing).
inline ExprPtr negate_leading(const ExprPtr& e) {
    if (e->is_rational()) return Expr::rational(-e->value());
    std::vector<ExprPtr> ks = e->children();
    Rational c = -ks[0]->value();
    if (c == 1 && ks.size() > 1)
        ks.erase(ks.begin());
    else
        ks[0] = Expr::rational(c);
    if (ks.size() == 1) return ks[0];
    return Expr::product_node(std::move(ks));
}

inline std::string print_expr(const ExprPtr& e, int context) {
    std::string out;
    int prec = 4;
    switch (e->kind()) {
        case ExprKind::Rational: {
            out = rat_to_string(e->value());
            if (e->value() < 0 || e->value().get_den() != 1) prec = (e->value() < 0) ? 1 : 2;
            break;
        }
        case ExprKind::Symbol:
            out = e->name();
            break;
        case ExprKind::Sum: {
            prec = 1;
            bool first = true;
            for (const auto& k : e->children()) {
                if (!first && is_negative_leading(k)) {
                    out += "-" + print_expr(negate_leading(k), 2);
                } else {
                    if (!first) out += "+";
                    out += print_expr(k, first ? 1 : 2);
                }
                first = false;
            }
            break;
        }
        case ExprKind::Product: {
            prec = 2;
            std::vector<ExprPtr> ks = e->children();
            std::string sign;
            if (!ks.empty() && ks[0]->is_rational() && ks[0]->value() < 0 && ks.size() > 1) {
                sign = "-";
                prec = 1;  // leading '-' binds like a sum w.r.t. parents
                if (ks[0]->value() == -1)
                    ks.erase(ks.begin());
                else
                    ks[0] = Expr::rational(-ks[0]->value());
            }
            bool first = true;
            for (const auto& k : ks) {
                if (!first) out += "*";
                out += print_expr(k, 2);
                first = false;
            }
            out = sign + out;
            break;
        }
        case ExprKind::Quotient: {
            prec = 2;
            const ExprPtr& num = e->children()[0];
            if (is_negative_leading(num)) {
                out = "-" + print_expr(negate_leading(num), 2) + "/" + print_expr(e->children()[1], 3);
                prec = 1;
            } else {
                out = print_expr(num, 2) + "/" + print_expr(e->children()[1], 3);
            }
            break;
        }
        case ExprKind::Power: {
            prec = 3;
            const Rational& r = e->exponent();
            if (r == rational_of(1, 2)) {
                out = "sqrt(" + print_expr(e->children()[0], 1) + ")";
                prec = 4;
            } else if (r == rational_of(1, 3)) {
                out = "cbrt(" + print_expr(e->children()[0], 1) + ")";
                prec = 4;
            } else {
                out = print_expr(e->children()[0], 4) + "^";
                if (r.get_den() == 1)
                    out += r.get_str();
                else
                    out += "(" + r.get_str() + ")";
            }
            break;
        }
        default:
            out = std::string(func_name(e->func())) + "(" + print_expr(e->children()[0], 1) + ")";
            break;
    }
    if (prec < context) out = "(" + out + ")";
    return out;
}

std::string latex_expr(const ExprPtr& e, int context);

inline std::string latex_symbol(const std::string& name) {
    static const std::set<std::string> greek = {"alpha", "beta", "gamma", "delta", "epsilon", "lambda",
                                                "mu",    "nu",   "rho",   "sigma", "tau",     "omega"};
    if (greek.count(name)) return "\\" + name;
    if (name.size() == 2 && name[0] == 'c' && std::isdigit(static_cast<unsigned char>(name[1])))
        return std::string("c_{") + name[1] + "}";
    return name;
}

inline std::string latex_expr(const ExprPtr& e, int context) {
    std::string out;
    int prec = 4;
    switch (e->kind()) {
        case ExprKind::Rational: {
            const Rational& v = e->value();
            if (v.get_den() == 1) {
                out = v.get_num().get_str();
                if (v < 0) prec = 1;
            } else {
                mpz_class n = v.get_num();
                std::string sign = n < 0 ? "-" : "";
                if (n < 0) n = -n;
                out = sign + "\\frac{" + n.get_str() + "}{" + v.get_den().get_str() + "}";
                if (!sign.empty()) prec = 1;
            }
            break;
        }
        case ExprKind::Symbol:
            out = latex_symbol(e->name());
            break;
        case ExprKind::Sum: {
            prec = 1;
            bool first = true;
            for (const auto& k : e->children()) {
                if (!first && is_negative_leading(k))
                    out += "-" + latex_expr(negate_leading(k), 2);
                else {
                    if (!first) out += "+";
                    out += latex_expr(k, first ? 1 : 2);
                }
                first = false;
            }
            break;
        }
        case ExprKind::Product: {
            prec = 2;
            std::vector<ExprPtr> ks = e->children();
            std::string sign;
            if (!ks.empty() && ks[0]->is_rational() && ks[0]->value() < 0 && ks.size() > 1) {
                sign = "-";
                prec = 1;
                if (ks[0]->value() == -1)
                    ks.erase(ks.begin());
                else
                    ks[0] = Expr::rational(-ks[0]->value());
            }
            bool first = true;
            for (const auto& k : ks) {
                if (!first) out += "\\,";
                out += latex_expr(k, 2);
                first = false;
            }
            out = sign + out;
            break;
        }
        case ExprKind::Quotient:
            prec = 2;
            out = "\\frac{" + latex_expr(e->children()[0], 1) + "}{" + latex_expr(e->children()[1], 1) + "}";
            prec = 4;
            break;
        case ExprKind::Power: {
            prec = 3;
            const Rational& r = e->exponent();
            if (r == rational_of(1, 2)) {
                out = "\\sqrt{" + latex_expr(e->children()[0], 1) + "}";
                prec = 4;
            } else if (r == rational_of(1, 3)) {
                out = "\\sqrt[3]{" + latex_expr(e->children()[0], 1) + "}";
                prec = 4;
            } else {
                std::string ex = r.get_den() == 1 ? r.get_num().get_str()
                                                  : r.get_num().get_str() + "/" + r.get_den().get_str();
                out = latex_expr(e->children()[0], 4) + "^{" + ex + "}";
            }
            break;
        }
        default: {
            const char* f = e->func() == Func::Ln ? "\\ln" : (e->func() == Func::Exp ? "\\exp"
                                                              : e->func() == Func::Sin ? "\\sin" : "\\cos");
            out = std::string(f) + "\\left(" + latex_expr(e->children()[0], 1) + "\\right)";
            break;
        }
    }
    if (prec < context) out = "\\left(" + out + "\\right)";
    return out;
}

}  // namespace detail

/// Render in the accepted grammar (round-trips through the parser).
inline std::string to_string(const ExprPtr& e) { return detail::print_expr(e, 1); }

inline std::string to_latex(const ExprPtr& e) { return detail::latex_expr(e, 1); }

}  // namespace ode3geo
