// classify.hpp
//
// Equivalence-class membership tests for y''' = F(x, y, y', y'').  Each branch
// is decided from the vanishing pattern of scalar invariants; the report keeps
// every sub-check (name, value, verdict) so a caller can see exactly which
// condition failed.  Where a printed closed form is known to disagree with the
// structurally derived invariant, the classifier decides with the derived one
// and reports the printed scalar alongside, adding an explicit discrepancy
// note instead of silently preferring either.

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ode3geo/oracle.hpp"

namespace ode3geo {

enum class ConditionOutcome { True, False, Unknown, NotApplicable };

inline const char* to_string(ConditionOutcome o) {
    switch (o) {
        case ConditionOutcome::True: return "true";
        case ConditionOutcome::False: return "false";
        case ConditionOutcome::Unknown: return "unknown";
        case ConditionOutcome::NotApplicable: return "not_applicable";
    }
    return "unknown";
}

struct ScalarCheck {
    std::string name;
    ExprPtr value;
    ZeroVerdict verdict = ZeroVerdict::Unknown;
};

struct ConditionReport {
    std::string id;
    ConditionOutcome outcome = ConditionOutcome::Unknown;
    std::vector<ScalarCheck> checks;  ///< conditions that decide the outcome
    std::vector<ScalarCheck> context; ///< informational scalars, not decisive
    std::vector<std::string> notes;
};

/// F = a3 q^3 + a2 q^2 + a1 q + a0 with coefficients free of q.
struct CubicCoefficients {
    ExprPtr a3, a2, a1, a0;
};

struct ClassificationReport {
    std::vector<ConditionReport> conditions;
    ExprPtr linearization_mu;               ///< non-null iff linearizable holds
    std::optional<CubicCoefficients> cubic; ///< set iff contact_projective holds
    std::string ricci_sign;                 ///< sign of the solution-space scalar curvature
    std::vector<std::string> notes;

    const ConditionReport* find(const std::string& id) const {
        for (const auto& c : conditions)
            if (c.id == id) return &c;
        return nullptr;
    }
    ConditionOutcome outcome(const std::string& id) const {
        const ConditionReport* c = find(id);
        return c ? c->outcome : ConditionOutcome::Unknown;
    }
    bool holds(const std::string& id) const {
        return outcome(id) == ConditionOutcome::True;
    }
};

// ---------------------------------------------------------------------------
// Cubic coefficient extraction
// ---------------------------------------------------------------------------

/// Splits a right-hand side that is polynomial of degree <= 3 in q into its
/// coefficients (a3, a2, a1, a0), canonicalized by evaluation at q = 0.
/// Throws NotCubicError unless d^4F/dq^4 is proved zero.
inline CubicCoefficients cubic_coefficients(const Ode3& ode, const ProbeConfig& cfg = {}) {
    ExprPtr F = to_expr(normal_form(ode.F));
    ExprPtr Fq = diff(F, "q");
    ExprPtr Fqq = diff(Fq, "q");
    ExprPtr Fqqq = diff(Fqq, "q");
    if (is_zero(diff(Fqqq, "q"), cfg) != ZeroVerdict::ProvedZero)
        throw NotCubicError("right-hand side is not polynomial of degree <= 3 in q''");
    std::map<std::string, ExprPtr> at0 = {{"q", rat(0)}};
    CubicCoefficients c;
    c.a3 = to_expr(normal_form(quot(substitute(Fqqq, at0), rat(6))));
    c.a2 = to_expr(normal_form(quot(substitute(Fqq, at0), rat(2))));
    c.a1 = to_expr(normal_form(substitute(Fq, at0)));
    c.a0 = to_expr(normal_form(substitute(F, at0)));
    return c;
}

// ---------------------------------------------------------------------------
// Sign sampling
// ---------------------------------------------------------------------------

/// Deterministically samples the expression over its domain and reports the
/// observed sign: "negative", "positive", "indefinite on sampled domain", or
/// "unknown" when no sample cleared the significance threshold.  Symbols in
/// `extra_positive` are sampled positive even when the expression itself no
/// longer shows the constraint (e.g. a root in the originating equation that
/// cancelled out of the derived scalar).
inline std::string sign_by_probes(const ExprPtr& e, const ProbeConfig& cfg = {},
                                  const std::set<std::string>& extra_positive = {}) {
    std::set<std::string> symbols = free_symbols(e);
    std::set<std::string> positive = extra_positive;
    collect_positive_symbols(e, positive);
    Rng rng(cfg.seed);
    int retries = cfg.max_domain_retries;
    int pos = 0, neg = 0, taken = 0;
    while (taken < cfg.probes && retries > 0) {
        Point pt = sample_point(symbols, positive, rng, cfg.pinned);
        try {
            EvalResult r = eval_numeric(e, pt, FloatKind::f64);
            double thr = cfg.abs_threshold + cfg.rel_threshold * r.max_magnitude;
            ++taken;
            if (r.value > thr)
                ++pos;
            else if (r.value < -thr)
                ++neg;
        } catch (const Error&) {
            --retries;
        }
    }
    if (pos == 0 && neg == 0) return "unknown";
    if (pos > 0 && neg > 0) return "indefinite on sampled domain";
    return neg > 0 ? "negative" : "positive";
}

// ---------------------------------------------------------------------------
// Classification
// ---------------------------------------------------------------------------

namespace detail {

inline ConditionOutcome outcome_of_checks(const std::vector<ScalarCheck>& cs) {
    bool unknown = false;
    for (const auto& c : cs) {
        if (c.verdict == ZeroVerdict::ProvedNonzero) return ConditionOutcome::False;
        if (c.verdict == ZeroVerdict::Unknown) unknown = true;
    }
    return unknown ? ConditionOutcome::Unknown : ConditionOutcome::True;
}

} // namespace detail

inline ClassificationReport classify(const Ode3& ode, const ProbeConfig& cfg = {}) {
    ClassificationReport rep;
    InvariantEngine eng(ode);

    auto check = [&](const std::string& name, const ExprPtr& v) {
        ScalarCheck c;
        c.name = name;
        c.value = v;
        c.verdict = is_zero(v, cfg);
        return c;
    };
    auto fcheck = [&](const std::string& name, const Fraction& v) { return check(name, to_expr(v)); };

    ScalarCheck W_check = fcheck("W", eng.invariant(InvariantName::W));
    ScalarCheck Fqqqq_check = fcheck("F_qqqq", eng.part("F", "qqqq"));
    ScalarCheck Fqqq_check = fcheck("F_qqq", eng.part("F", "qqq"));

    // --- contact_trivial: equivalent to y''' = 0 under contact maps ---------
    {
        ConditionReport c;
        c.id = "contact_trivial";
        c.checks = {W_check, Fqqqq_check};
        c.outcome = detail::outcome_of_checks(c.checks);
        rep.conditions.push_back(std::move(c));
    }

    // --- contact_projective: cubic in q'' ------------------------------------
    {
        ConditionReport c;
        c.id = "contact_projective";
        c.checks = {Fqqqq_check};
        c.outcome = detail::outcome_of_checks(c.checks);
        if (c.outcome == ConditionOutcome::True) {
            try {
                rep.cubic = cubic_coefficients(ode, cfg);
            } catch (const Error& e) {
                // Transcendental atoms can make the coefficients unevaluable at
                // the canonicalization point even when the derivative vanishes.
                c.notes.push_back(std::string("cubic coefficient extraction failed: ") +
                                  e.what());
            }
        }
        rep.conditions.push_back(std::move(c));
    }

    // --- point_trivial: equivalent to y''' = 0 under point maps --------------
    // Condition 4 uses the structurally derived invariant
    //   C1 = D(2 K_q + (1/9) F_qq F_q + (1/3) F_qp) + (1/3) F_qy,
    // the w1-coefficient of the curvature slot it lives in; the printed closed
    // form is evaluated alongside.
    Fraction c1_inner = add_fraction(
        mul_fraction(fraction_rat(Rational(2)), eng.part("K", "q")),
        add_fraction(mul_fraction(fraction_rat(Rational(1, 9)),
                                  mul_fraction(eng.part("F", "qq"), eng.part("F", "q"))),
                     mul_fraction(fraction_rat(Rational(1, 3)), eng.part("F", "qp"))));
    Fraction C1_corrected = add_fraction(
        eng.D(c1_inner), mul_fraction(fraction_rat(Rational(1, 3)), eng.part("F", "qy")));
    {
        ConditionReport c;
        c.id = "point_trivial";
        Fraction cond3 = add_fraction(
            mul_fraction(eng.part("F", "qq"), eng.part("F", "qq")),
            mul_fraction(fraction_rat(Rational(6)), eng.part("F", "qqp")));
        c.checks = {W_check, Fqqq_check, fcheck("F_qq^2 + 6*F_qqp", cond3),
                    fcheck("C1", C1_corrected)};
        c.outcome = detail::outcome_of_checks(c.checks);
        ScalarCheck printed = fcheck("C1_printed", eng.invariant(InvariantName::C1p));
        if (printed.verdict != c.checks[3].verdict)
            c.notes.push_back("printed fourth triviality scalar disagrees with the structurally "
                              "derived C1; the derived invariant decides (the printed closed "
                              "form contains a transcription defect)");
        c.context.push_back(std::move(printed));
        rep.conditions.push_back(std::move(c));
    }

    // --- point_projective: quadratic in q'' ----------------------------------
    {
        ConditionReport c;
        c.id = "point_projective";
        c.checks = {Fqqq_check};
        c.outcome = detail::outcome_of_checks(c.checks);
        rep.conditions.push_back(std::move(c));
    }

    // --- fibre_metric: solution metric exists fibrewise ----------------------
    {
        ConditionReport c;
        c.id = "fibre_metric";
        c.checks = {W_check, fcheck("B5f", eng.invariant(InvariantName::B5f))};
        c.outcome = detail::outcome_of_checks(c.checks);
        rep.conditions.push_back(std::move(c));
    }

    // --- einstein_weyl: the Weyl pair descends to the solution space ---------
    {
        ConditionReport c;
        c.id = "einstein_weyl";
        ObstructionReport desc = ew_descent_obstruction(ode, cfg);
        for (const auto& cv : desc.components) c.checks.push_back({cv.name, cv.value, cv.verdict});
        for (const auto& cv : desc.context) c.checks.push_back({cv.name, cv.value, cv.verdict});
        c.outcome = detail::outcome_of_checks(c.checks);
        ScalarCheck printed = fcheck("EWcartan_printed", eng.invariant(InvariantName::EWcartan));
        bool printed_zero = printed.verdict == ZeroVerdict::ProvedZero;
        if ((c.outcome == ConditionOutcome::True && printed.verdict == ZeroVerdict::ProvedNonzero) ||
            (c.outcome == ConditionOutcome::False && printed_zero))
            c.notes.push_back("printed Einstein-Weyl scalar disagrees with the descent "
                              "obstruction; the obstruction decides (the printed closed form "
                              "contains a transcription defect)");
        c.context.push_back(std::move(printed));
        rep.conditions.push_back(std::move(c));
    }

    // --- lorentzian_metric: non-degenerate solution-space metric -------------
    {
        ConditionReport c;
        c.id = "lorentzian_metric";
        c.checks = {W_check,
                    fcheck("LorentzObstruction", eng.invariant(InvariantName::LorentzObstruction))};
        ScalarCheck density = fcheck("RicciScalarDensity",
                                     eng.invariant(InvariantName::RicciScalarDensity));
        c.outcome = detail::outcome_of_checks(c.checks);
        if (c.outcome == ConditionOutcome::True) {
            if (density.verdict == ZeroVerdict::ProvedZero) {
                c.outcome = ConditionOutcome::False;
                c.notes.push_back("scalar curvature density vanishes: the candidate metric "
                                  "degenerates to the flat case");
            } else if (density.verdict == ZeroVerdict::Unknown) {
                c.outcome = ConditionOutcome::Unknown;
            }
        }
        // sign of the scalar curvature, from the density's defining scalar
        if (density.verdict == ZeroVerdict::ProvedZero)
            rep.ricci_sign = "zero";
        else if (density.verdict == ZeroVerdict::Unknown)
            rep.ricci_sign = "unknown";
        else {
            // sample inside the equation's own domain: roots in F constrain
            // their arguments' symbols even after they cancel from B4p
            std::set<std::string> ode_positive;
            collect_positive_symbols(ode.F, ode_positive);
            rep.ricci_sign =
                sign_by_probes(to_expr(eng.invariant(InvariantName::B4p)), cfg, ode_positive);
        }
        c.context.push_back(std::move(density));
        rep.conditions.push_back(std::move(c));
    }

    // --- linearizable: constant-coefficient normal form y''' = -2 mu y' + y --
    {
        ConditionReport c;
        c.id = "linearizable";
        if (W_check.verdict == ZeroVerdict::ProvedZero) {
            c.outcome = ConditionOutcome::NotApplicable;
            c.notes.push_back("the fundamental invariant vanishes identically; the "
                              "five-dimensional reduction this branch lives on does not exist");
        } else if (W_check.verdict == ZeroVerdict::Unknown) {
            c.outcome = ConditionOutcome::Unknown;
        } else {
            try {
                ScalarCheck k5_check = fcheck("k5", eng.invariant(InvariantName::k5));
                ExprPtr a5e = to_expr(eng.invariant(InvariantName::a5));
                ConstantResult cr = is_constant(a5e, cfg);
                ScalarCheck a5_check;
                a5_check.name = "a5 constant";
                a5_check.value = a5e;
                a5_check.verdict = cr.value ? ZeroVerdict::ProvedZero
                                  : cr.warning ? ZeroVerdict::Unknown
                                               : ZeroVerdict::ProvedNonzero;
                c.checks = {k5_check, a5_check};
                c.outcome = detail::outcome_of_checks(c.checks);
                if (c.outcome == ConditionOutcome::True) rep.linearization_mu = *cr.value;
            } catch (const WunschmannZeroError&) {
                c.outcome = ConditionOutcome::NotApplicable;
            }
        }
        rep.conditions.push_back(std::move(c));
    }

    for (const auto& c : rep.conditions)
        for (const auto& n : c.notes) rep.notes.push_back(c.id + ": " + n);
    return rep;
}

} // namespace ode3geo
