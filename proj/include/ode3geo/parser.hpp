/*
 * parser.hpp
 * ----------
 * Recursive-descent parser for the expression grammar:
 *
 *   expr     := ['-'] term (('+'|'-') term)*
 *   term     := factor (('*'|'/') factor)*
 *   factor   := base ('^' exponent)?
 *   base     := number | ident | '(' expr ')' | func '(' expr ')'
 *   exponent := signed integer | '(' signed rational ')'
 *   func     := exp | ln | sin | cos | sqrt | cbrt
 *   number   := integer or decimal literal (decimals become exact rationals)
 *   ident    := [A-Za-z_][A-Za-z0-9_]*
 *
 * The leading unary minus is a small superset of the base grammar kept for
 * ergonomics; every printed expression round-trips.  Implicit multiplication
 * is rejected.  sqrt(e) ≡ e^(1/2), cbrt(e) ≡ e^(1/3).
 *
 * Identifiers must be declared up front; anything else raises
 * UnknownIdentifierError carrying the byte offset and the declared names.
 */
#pragma once

#include "common.hpp"
#include "expr.hpp"

#include <cctype>
#include <optional>
#include <string_view>

namespace ode3geo {

namespace detail {

class Parser {
public:
    Parser(std::string_view src, std::set<std::string> declared)
        : src_(src), declared_(std::move(declared)) {}

    ExprPtr run() {
        ExprPtr e = parse_sum();
        skip_ws();
        if (pos_ != src_.size())
            throw ParseError("unexpected trailing input", pos_);
        return e;
    }

private:
    std::string_view src_;
    std::set<std::string> declared_;
    std::size_t pos_ = 0;

    void skip_ws() {
        while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    }

    bool peek_is(char c) {
        skip_ws();
        return pos_ < src_.size() && src_[pos_] == c;
    }

    bool eat(char c) {
        if (peek_is(c)) {
            ++pos_;
            return true;
        }
        return false;
    }

    void expect(char c, const char* what) {
        if (!eat(c)) throw ParseError(std::string("expected '") + c + "' " + what, pos_);
    }

    ExprPtr parse_sum() {
        skip_ws();
        bool lead_neg = eat('-');
        ExprPtr e = parse_term();
        if (lead_neg) e = neg(e);
        for (;;) {
            if (eat('+'))
                e = add(e, parse_term());
            else if (eat('-'))
                e = sub(e, parse_term());
            else
                return e;
        }
    }

    ExprPtr parse_term() {
        ExprPtr e = parse_factor();
        for (;;) {
            if (eat('*'))
                e = mul(e, parse_factor());
            else if (eat('/'))
                e = make_quotient(e, parse_factor());
            else
                return e;
        }
    }

    // a/b keeping the written shape when possible (rational denominators
    // fold; literal zero denominators are a parse-time error).
    ExprPtr make_quotient(const ExprPtr& a, const ExprPtr& b) {
        if (b->is_rational() && b->value() == 0)
            throw ParseError("division by literal zero", pos_);
        return quot(a, b);
    }

    ExprPtr parse_factor() {
        ExprPtr base = parse_base();
        skip_ws();
        if (!eat('^')) return base;
        Rational e = parse_exponent();
        if (base->is_rational() && base->value() == 0 && e < 0)
            throw ParseError("0 raised to a negative power", pos_);
        return pow(base, e);
    }

    Rational parse_exponent() {
        skip_ws();
        if (eat('(')) {
            Rational r = parse_signed_rational();
            expect(')', "closing the exponent");
            return r;
        }
        return Rational(parse_signed_integer());
    }

    mpz_class parse_signed_integer() {
        skip_ws();
        std::size_t start = pos_;
        bool negative = eat('-');
        if (!negative) eat('+');
        skip_ws();
        std::string digits = read_digits();
        if (digits.empty()) throw ParseError("expected an integer exponent", start);
        mpz_class v(digits);
        return negative ? mpz_class(-v) : v;
    }

    Rational parse_signed_rational() {
        mpz_class num = parse_signed_integer();
        skip_ws();
        if (eat('/')) {
            skip_ws();
            std::size_t dstart = pos_;
            std::string digits = read_digits();
            if (digits.empty()) throw ParseError("expected a denominator", dstart);
            mpz_class den(digits);
            if (den == 0) throw ParseError("zero denominator in exponent", dstart);
            Rational r(num, den);
            r.canonicalize();
            return r;
        }
        return Rational(num);
    }

    std::string read_digits() {
        std::string out;
        while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_])))
            out += src_[pos_++];
        return out;
    }

    ExprPtr parse_base() {
        skip_ws();
        if (pos_ >= src_.size()) throw ParseError("unexpected end of input", pos_);
        char c = src_[pos_];
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
        if (c == '(') {
            ++pos_;
            ExprPtr e = parse_sum();
            expect(')', "closing the group");
            return e;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return parse_ident_or_call();
        throw ParseError(std::string("unexpected character '") + c + "'", pos_);
    }

    ExprPtr parse_number() {
        std::size_t start = pos_;
        std::string ipart = read_digits();
        std::string fpart;
        if (pos_ < src_.size() && src_[pos_] == '.') {
            ++pos_;
            fpart = read_digits();
            if (ipart.empty() && fpart.empty())
                throw ParseError("malformed number", start);
        }
        if (ipart.empty() && fpart.empty()) throw ParseError("malformed number", start);
        mpz_class num(ipart.empty() ? "0" : ipart);
        Rational v(num);
        if (!fpart.empty()) {
            mpz_class scale(1);
            for (std::size_t i = 0; i < fpart.size(); ++i) scale *= 10;
            Rational frac(mpz_class(fpart), scale);
            frac.canonicalize();
            v += frac;
        }
        return Expr::rational(v);
    }

    ExprPtr parse_ident_or_call() {
        std::size_t start = pos_;
        std::string name;
        while (pos_ < src_.size() &&
               (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
            name += src_[pos_++];

        static const std::map<std::string, Func> funcs = {
            {"exp", Func::Exp}, {"ln", Func::Ln}, {"sin", Func::Sin}, {"cos", Func::Cos}};
        if (auto it = funcs.find(name); it != funcs.end()) {
            expect('(', "after function name");
            ExprPtr arg = parse_sum();
            expect(')', "closing the call");
            return apply_func(it->second, arg);
        }
        if (name == "sqrt" || name == "cbrt") {
            expect('(', "after function name");
            ExprPtr arg = parse_sum();
            expect(')', "closing the call");
            return name == "sqrt" ? sqrt_of(arg) : cbrt_of(arg);
        }
        if (!declared_.count(name))
            throw UnknownIdentifierError(name, start, {declared_.begin(), declared_.end()});
        return sym(name);
    }
};

}  // namespace detail

/// Parse source text against a set of declared identifiers.
inline ExprPtr parse_expr(std::string_view src, const std::set<std::string>& declared) {
    return detail::Parser(src, declared).run();
}

/// Declared set used throughout: jet coordinates plus solution-space labels.
inline std::set<std::string> standard_names(const std::set<std::string>& parameters = {}) {
    std::set<std::string> s = {"x", "y", "p", "q", "u", "c1", "c2", "c3"};
    s.insert(parameters.begin(), parameters.end());
    return s;
}

}  // namespace ode3geo
