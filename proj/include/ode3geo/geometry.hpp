// geometry.hpp — coframes, Cartan connection matrices, curvatures, metrics
// and reductions attached to a third-order ODE.
//
// Everything is emitted at the identity section of the relevant bundle, in
// the fixed coordinate order x < y < p < q < u < c1 < c2 < c3.  The engine
// wraps an InvariantEngine and shares its differentiation context, so the
// scalar invariants and the forms are computed from one cache.

#pragma once

#include <array>
#include <string>
#include <vector>

#include "ode3geo/forms.hpp"
#include "ode3geo/ode.hpp"

namespace ode3geo {

enum class Picture { Contact, Point, Fibre };

inline const char* to_string(Picture p) {
    switch (p) {
        case Picture::Contact: return "contact";
        case Picture::Point: return "point";
        case Picture::Fibre: return "fibre";
    }
    return "?";
}

enum class ConnectionAlgebra { sp4, co21_semidirect, r2mu };

inline const char* to_string(ConnectionAlgebra a) {
    switch (a) {
        case ConnectionAlgebra::sp4: return "sp4";
        case ConnectionAlgebra::co21_semidirect: return "co21_semidirect";
        case ConnectionAlgebra::r2mu: return "r2mu";
    }
    return "?";
}

struct ConnectionMatrix {
    MatrixOfForms forms;
    ConnectionAlgebra algebra = ConnectionAlgebra::sp4;
};

// Structure functions of the five-dimensional coframe (theta^1..theta^4,
// Omega), named after their slots in the structural equations:
//   d theta^2 = Omega^theta^2 + a theta^1^theta^4 - theta^3^theta^4, ...
struct FiveDimStructure {
    Fraction a, b, c, e, f, g, h, k, l, m;
    StructureFunctions raw;
};

class GeometryEngine {
public:
    explicit GeometryEngine(Ode3 ode) : eng_(std::move(ode)) {}

    InvariantEngine& invariants() { return eng_; }
    const Ode3& ode() const { return eng_.ode(); }

    // -- base coframe ------------------------------------------------------

    // omega^1 = dy - p dx, omega^2 = dp - q dx, omega^3 = dq - F dx,
    // omega^4 = dx, over an arbitrary coordinate list containing x,y,p,q.
    DifferentialForm omega(int i, const std::vector<std::string>& coords) {
        switch (i) {
            case 1:
                return sub_forms(coordinate_differential(coords, "y"),
                                 scale_form(coordinate_differential(coords, "x"), symf("p")));
            case 2:
                return sub_forms(coordinate_differential(coords, "p"),
                                 scale_form(coordinate_differential(coords, "x"), symf("q")));
            case 3:
                return sub_forms(coordinate_differential(coords, "q"),
                                 scale_form(coordinate_differential(coords, "x"), eng_.F()));
            case 4:
                return coordinate_differential(coords, "x");
        }
        throw Error("omega index out of range");
    }
    DifferentialForm omega(int i) { return omega(i, base_coords()); }

    // omega~3 = omega^3 - (1/3) F_q omega^2 + K omega^1
    DifferentialForm omega3_tilde(const std::vector<std::string>& coords) {
        return add_forms(
            sub_forms(omega(3, coords), scale_form(omega(2, coords), sc(eng_.part("F", "q"), 1, 3))),
            scale_form(omega(1, coords), eng_.part("K")));
    }
    DifferentialForm omega3_tilde() { return omega3_tilde(base_coords()); }

    // omega~4 = dx + (1/6) F_qq omega^1   (point picture only)
    DifferentialForm omega4_tilde(const std::vector<std::string>& coords) {
        return add_forms(coordinate_differential(coords, "x"),
                         scale_form(omega(1, coords), sc(eng_.part("F", "qq"), 1, 6)));
    }
    DifferentialForm omega4_tilde() { return omega4_tilde(base_coords()); }

    // The four coframe forms of a picture: (omega^1, omega^2, omega~3, *).
    std::vector<DifferentialForm> coframe(Picture pic) {
        DifferentialForm fourth = pic == Picture::Point ? omega4_tilde() : omega(4);
        return {omega(1), omega(2), omega3_tilde(), fourth};
    }

    // -- the Omega^0 forms -------------------------------------------------

    std::vector<DifferentialForm> omega0(Picture pic) {
        switch (pic) {
            case Picture::Contact: return contact_omega0();
            case Picture::Point: return point_omega0();
            case Picture::Fibre: return fibre_omega0();
        }
        throw Error("unknown picture");
    }

    // -- connection and curvature ------------------------------------------

    ConnectionMatrix connection(Picture pic) {
        auto cf = coframe(pic);
        auto om = omega0(pic);
        const auto& w1 = cf[0];
        const auto& w2 = cf[1];
        const auto& w3t = cf[2];
        const auto& w4 = cf[3];

        ConnectionMatrix c;
        c.algebra = pic == Picture::Contact ? ConnectionAlgebra::sp4
                                            : ConnectionAlgebra::co21_semidirect;
        c.forms = matrix_of_forms(4, 1, base_coords());
        auto& e = c.forms.entries;

        Fraction half = fraction_rat(Rational(1, 2));
        Fraction mhalf = fraction_rat(Rational(-1, 2));

        e[0][0] = scale_form(om[0], half);
        e[0][1] = scale_form(om[1], half);
        e[1][0] = w4;
        e[1][1] = sub_forms(om[2], scale_form(om[0], half));
        e[2][0] = w2;
        e[2][1] = w3t;
        e[2][2] = sub_forms(scale_form(om[0], half), om[2]);
        e[2][3] = scale_form(om[1], mhalf);
        e[3][0] = scale_form(w1, Rational(2));
        e[3][1] = w2;
        e[3][2] = neg_form(w4);
        e[3][3] = scale_form(om[0], mhalf);

        if (pic == Picture::Contact) {
            e[0][2] = scale_form(om[3], mhalf);
            e[0][3] = scale_form(om[5], fraction_rat(Rational(-1, 4)));
            e[1][2] = neg_form(om[4]);
            e[1][3] = scale_form(om[3], mhalf);
        }
        return c;
    }

    MatrixOfForms curvature(const ConnectionMatrix& c) { return curvature_of(c.forms, ctx()); }

    // -- conformal structure -----------------------------------------------

    // g = 2 omega^1 omega~3 - (omega^2)^2 (symmetric products).
    SymTensor2 conformal_metric() {
        SymTensor2 g = scale_sym(sym_product(omega(1), omega3_tilde()), fraction_rat(Rational(2)));
        return sub_sym(g, outer_square(omega(2)));
    }

    // phi = -(2K_q + (1/9) F_qq F_q + (1/3) F_qp) omega^1
    //       + (1/3) F_qq omega^2 + (1/3) F_q dx.
    DifferentialForm weyl_potential() {
        Fraction c1 = sum3(sc(eng_.part("K", "q"), 2, 1),
                           sc(mul_fraction(eng_.part("F", "qq"), eng_.part("F", "q")), 1, 9),
                           sc(eng_.part("F", "qp"), 1, 3));
        DifferentialForm r = scale_form(omega(1), neg_fraction(c1));
        r = add_forms(r, scale_form(omega(2), sc(eng_.part("F", "qq"), 1, 3)));
        r = add_forms(r, scale_form(coordinate_differential(base_coords(), "x"),
                                    sc(eng_.part("F", "q"), 1, 3)));
        return r;
    }

    // Conformal-to-flat obstruction 2-forms (meaningful when W = 0).
    std::array<DifferentialForm, 3> cotton() {
        DifferentialForm w1 = omega(1), w2 = omega(2), w3t = omega3_tilde();
        DifferentialForm w12 = wedge(w1, w2), w13 = wedge(w1, w3t), w23 = wedge(w2, w3t);

        Fraction half = fraction_rat(Rational(1, 2));
        Fraction Lqq = eng_.part("L", "qq");
        Fraction Kqqq = eng_.part("K", "qqq");
        // M_q - K_qqq K - 2 K_qq K_q + K_qqy
        Fraction mid = sum4(eng_.part("M", "q"),
                            neg_fraction(mul_fraction(Kqqq, eng_.part("K"))),
                            sc(mul_fraction(eng_.part("K", "qq"), eng_.part("K", "q")), -2, 1),
                            eng_.part("K", "qqy"));
        // (1/2) M_p + (1/6) F_q M_q + (1/6) F_qqq K_y + K_q L_q - (1/6) K^2 F_qqqq
        //   + (1/6) K_q F_qqy - (1/6) F_qqyy - (1/3) F_qqq K_q K + (1/3) F_qqy K
        const Fraction& Kf = eng_.part("K");
        Fraction deep = sum3(sc(eng_.part("M", "p"), 1, 2),
                             sc(mul_fraction(eng_.part("F", "q"), eng_.part("M", "q")), 1, 6),
                             sc(mul_fraction(eng_.part("F", "qqq"), eng_.part("K", "y")), 1, 6));
        deep = add_fraction(deep, mul_fraction(eng_.part("K", "q"), eng_.part("L", "q")));
        deep = add_fraction(deep, sc(mul_fraction(mul_fraction(Kf, Kf), eng_.part("F", "qqqq")), -1, 6));
        deep = add_fraction(deep, sc(mul_fraction(eng_.part("K", "q"), eng_.part("F", "qqy")), 1, 6));
        deep = add_fraction(deep, sc(eng_.part("F", "qqyy"), -1, 6));
        deep = add_fraction(deep, sc(mul_fraction(eng_.part("F", "qqq"),
                                                  mul_fraction(eng_.part("K", "q"), Kf)), -1, 3));
        deep = add_fraction(deep, sc(mul_fraction(eng_.part("F", "qqy"), Kf), 1, 3));

        DifferentialForm dp1 = add_forms(
            add_forms(scale_form(w12, deep), scale_form(w13, mul_fraction(half, mid))),
            scale_form(w23, sc(Lqq, -1, 2)));
        DifferentialForm dp2 = add_forms(
            add_forms(scale_form(w12, mul_fraction(half, mid)), scale_form(w13, neg_fraction(Lqq))),
            scale_form(w23, mul_fraction(half, Kqqq)));
        DifferentialForm dp3 = add_forms(
            add_forms(scale_form(w12, sc(Lqq, -1, 2)), scale_form(w13, mul_fraction(half, Kqqq))),
            scale_form(w23, sc(eng_.part("F", "qqqq"), -1, 6)));
        return {dp1, dp2, dp3};
    }

    // -- five-dimensional reduction (W != 0) --------------------------------

    // (theta^1, theta^2, theta^3, theta^4, Omega) on (x, y, p, q, u).
    std::vector<DifferentialForm> five_dim_coframe() {
        const Fraction& W = eng_.part("W");
        if (W.is_zero())
            throw WunschmannZeroError("the five-dimensional coframe requires W != 0, "
                                      "but W vanishes identically");
        auto coords = scaled_coords();
        Fraction rw = fraction_root(W, 3);            // W^(1/3)
        Fraction rw2 = mul_fraction(rw, rw);          // W^(2/3)
        Fraction uf = symf("u");
        const Fraction& Z = eng_.part("Z");
        const Fraction& Fq = eng_.part("F", "q");
        const Fraction& Wq = eng_.part("W", "q");
        const Fraction& Wp = eng_.part("W", "p");
        Fraction DZ = eng_.Dpart("Z");

        DifferentialForm w1 = omega(1, coords), w2 = omega(2, coords), w3 = omega(3, coords),
                         w4 = omega(4, coords);

        DifferentialForm th1 = scale_form(w1, mul_fraction(rw, uf));

        DifferentialForm th2 = add_forms(scale_form(w1, sc(mul_fraction(Z, uf), 1, 3)),
                                         scale_form(w2, uf));

        Fraction u_over_rw = div_fraction(uf, rw);
        DifferentialForm th3 = scale_form(
            w1, mul_fraction(u_over_rw, add_fraction(eng_.part("K"), sc(mul_fraction(Z, Z), 1, 18))));
        th3 = add_forms(th3, scale_form(w2, sc(mul_fraction(u_over_rw, sub2(Z, Fq)), 1, 3)));
        th3 = add_forms(th3, scale_form(w3, u_over_rw));

        DifferentialForm th4 = scale_form(
            w1, sub2(sc(mul_fraction(div_fraction(Wq, rw2), Z), 1, 9),
                     sc(mul_fraction(rw, eng_.part("Z", "q")), 1, 3)));
        th4 = add_forms(th4, scale_form(w2, sc(div_fraction(Wq, rw2), 1, 3)));
        th4 = add_forms(th4, scale_form(w4, rw));

        Fraction om1coef = sum3(sc(mul_fraction(Wq, DZ), 1, 9),
                                sc(mul_fraction(Wq, mul_fraction(Z, Z)), -1, 27),
                                sc(mul_fraction(Wp, Z), 1, 9));
        om1coef = sum3(div_fraction(om1coef, W),
                       sc(eng_.part("Z", "p"), -1, 3),
                       sc(mul_fraction(Fq, eng_.part("Z", "q")), -1, 9));
        DifferentialForm Om = scale_form(w1, om1coef);
        Om = add_forms(Om, scale_form(w2, sub2(div_fraction(Wp, sc(W, 3, 1)),
                                               sc(eng_.part("Z", "q"), 1, 3))));
        Om = add_forms(Om, scale_form(w3, div_fraction(Wq, sc(W, 3, 1))));
        Om = add_forms(Om, scale_form(w4, sc(Fq, 1, 3)));
        Om = add_forms(Om, scale_form(coordinate_differential(coords, "u"),
                                      div_fraction(fraction_rat(Rational(1)), uf)));

        return {th1, th2, th3, th4, Om};
    }

    FiveDimStructure five_dim_structure() {
        auto cf = five_dim_coframe();
        FiveDimStructure s;
        s.raw = structure_functions(cf, ctx());
        s.a = s.raw.get(1, 0, 3);
        s.b = s.raw.get(2, 0, 1);
        s.c = s.raw.get(2, 0, 2);
        s.e = s.raw.get(2, 1, 2);
        s.f = s.raw.get(3, 0, 1);
        s.g = s.raw.get(3, 0, 2);
        s.h = s.raw.get(3, 0, 3);
        s.k = s.raw.get(3, 1, 2);
        s.l = s.raw.get(4, 0, 1);
        s.m = s.raw.get(4, 0, 3);
        return s;
    }

    // -- the R^2-valued solution-space connection (a5 = mu constant) --------

    // Validates the constancy precondition and returns the 3x3 matrix
    //   [ -Omega, -theta^4, 0; mu theta^4, -Omega, -theta^4;
    //     -theta^4, mu theta^4, -Omega ].
    ConnectionMatrix mu_connection() {
        ExprPtr a5;
        try {
            a5 = to_expr(eng_.invariant(InvariantName::a5));
        } catch (const WunschmannZeroError&) {
            throw NotConstantError("the connection requires a5 to be a constant, "
                                   "but a5 is undefined because W vanishes identically");
        }
        ConstantResult cr = is_constant(a5);
        if (!cr.value)
            throw NotConstantError("the connection requires a5 to be a constant, but a5 = " +
                                   to_string(a5));
        return mu_connection_with(normal_form(*cr.value));
    }

    ConnectionMatrix mu_connection_with(const Fraction& mu) {
        auto cf = five_dim_coframe();
        const DifferentialForm& th4 = cf[3];
        const DifferentialForm& Om = cf[4];
        DifferentialForm mth4 = neg_form(th4);
        DifferentialForm mu_th4 = scale_form(th4, mu);
        DifferentialForm mOm = neg_form(Om);
        ConnectionMatrix c;
        c.algebra = ConnectionAlgebra::r2mu;
        c.forms = matrix_of_forms(3, 1, scaled_coords());
        auto& e = c.forms.entries;
        e[0][0] = mOm;
        e[0][1] = mth4;
        e[1][0] = mu_th4;
        e[1][1] = mOm;
        e[1][2] = mth4;
        e[2][0] = mth4;
        e[2][1] = mu_th4;
        e[2][2] = mOm;
        return c;
    }

    // -- six-dimensional degenerate metric ----------------------------------

    // Variant 'c': 2(Omega1-Omega3) omega^2 - 2 Omega2 omega^1 + 2 omega^4 omega~3
    // with the contact Omega^0 forms; variant 'p': the point-picture version
    // 2(Omega1-Omega3) omega^2 - 2 Omega3 omega^1 + 2 omega~4 omega~3.
    SymTensor2 six_dim_metric(char variant = 'c') {
        if (variant == 'c') {
            auto om = contact_omega0();
            SymTensor2 g = scale_sym(sym_product(sub_forms(om[0], om[2]), omega(2)),
                                     fraction_rat(Rational(2)));
            g = sub_sym(g, scale_sym(sym_product(om[1], omega(1)), fraction_rat(Rational(2))));
            return add_sym(g, scale_sym(sym_product(omega(4), omega3_tilde()),
                                        fraction_rat(Rational(2))));
        }
        if (variant == 'p') {
            auto om = point_omega0();
            SymTensor2 g = scale_sym(sym_product(sub_forms(om[0], om[2]), omega(2)),
                                     fraction_rat(Rational(2)));
            g = sub_sym(g, scale_sym(sym_product(om[2], omega(1)), fraction_rat(Rational(2))));
            return add_sym(g, scale_sym(sym_product(omega4_tilde(), omega3_tilde()),
                                        fraction_rat(Rational(2))));
        }
        throw Error("six_dim_metric variant must be 'c' or 'p'");
    }

    // -- solution-space metric ----------------------------------------------

    // Pull the conformal metric back along c -> (x0, f, f_x, f_xx).
    SymTensor2 solution_space_metric(const ExprPtr& f, const Rational& x0,
                                     const ProbeConfig& cfg = {}) {
        SectionData s = section_data(f, x0, cfg);
        SymTensor2 g = conformal_metric();
        // only the (y,p,q) block survives: x is frozen at x0
        const int jet[3] = {1, 2, 3};
        SymTensor2 r = sym_tensor_zero(solution_coords());
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b) {
                Fraction acc = fraction_rat(Rational(0));
                for (int i = 0; i < 3; ++i)
                    for (int j = 0; j < 3; ++j) {
                        const Fraction& gij = g.m[jet[i]][jet[j]];
                        if (gij.is_zero()) continue;
                        acc = add_fraction(acc,
                                           mul_fraction(compose_section(gij, s),
                                                        mul_fraction(s.J[i][a], s.J[j][b])));
                    }
                r.m[a][b] = std::move(acc);
            }
        return r;
    }

    // Pull the Weyl potential back along the same section.  The dx component
    // is annihilated because x is frozen at x0.
    DifferentialForm solution_space_potential(const ExprPtr& f, const Rational& x0,
                                              const ProbeConfig& cfg = {}) {
        SectionData s = section_data(f, x0, cfg);
        DifferentialForm phi = weyl_potential();
        const int jet[3] = {1, 2, 3};
        DifferentialForm r = zero_form(1, solution_coords());
        for (int a = 0; a < 3; ++a) {
            Fraction acc = fraction_rat(Rational(0));
            for (int i = 0; i < 3; ++i) {
                Fraction comp = form_coefficient(phi, {jet[i]});
                if (comp.is_zero()) continue;
                acc = add_fraction(acc, mul_fraction(compose_section(comp, s), s.J[i][a]));
            }
            add_form_term(r, {a}, acc);
        }
        return r;
    }

    // -- the total-derivative vector field -----------------------------------

    VectorField total_derivative_field() {
        VectorField v;
        v.coords = base_coords();
        v.components["x"] = fraction_rat(Rational(1));
        v.components["y"] = symf("p");
        v.components["p"] = symf("q");
        v.components["q"] = eng_.F();
        return v;
    }

    DiffContext& ctx() { return eng_.ctx(); }

private:
    // Section through the solution space: the jet images (y, p, q) = sigma(c)
    // at the frozen abscissa x0 and their Jacobian over (c1, c2, c3).
    struct SectionData {
        ExprPtr x0e;
        std::array<ExprPtr, 3> sigma;
        std::array<std::array<Fraction, 3>, 3> J;
    };

    SectionData section_data(const ExprPtr& f, const Rational& x0, const ProbeConfig& cfg) {
        std::set<std::string> frees;
        collect_symbols(f, frees);
        for (const auto& s : frees) {
            if (s == "x" || s == "c1" || s == "c2" || s == "c3") continue;
            if (ode().parameters.count(s)) continue;
            throw CoordinateMismatchError("general solution depends on '" + s +
                                          "', expected (x, c1, c2, c3) and declared parameters");
        }
        ExprPtr fx = diff(f, "x");
        ExprPtr fxx = diff(fx, "x");
        ExprPtr fxxx = diff(fxx, "x");

        // residual = f_xxx - F(x, f, f_x, f_xx)
        ExprPtr Fc = substitute(ode().F, {{"y", f}, {"p", fx}, {"q", fxx}});
        ExprPtr residual = sub(fxxx, Fc);
        if (is_zero(residual, cfg) == ZeroVerdict::ProvedNonzero)
            throw NotASolutionError("the candidate does not solve the ODE: residual " +
                                    to_string(residual) + " is provably nonzero");

        SectionData s;
        s.x0e = rat(x0);
        s.sigma = {substitute(f, {{"x", s.x0e}}), substitute(fx, {{"x", s.x0e}}),
                   substitute(fxx, {{"x", s.x0e}})};
        auto cs = solution_coords();
        for (int i = 0; i < 3; ++i)
            for (int a = 0; a < 3; ++a) s.J[i][a] = normal_form(diff(s.sigma[i], cs[a]));
        Fraction det = fraction_rat(Rational(0));
        for (int a = 0; a < 3; ++a) {
            int b = (a + 1) % 3, c = (a + 2) % 3;
            det = add_fraction(det, mul_fraction(s.J[0][a],
                                                 sub2(mul_fraction(s.J[1][b], s.J[2][c]),
                                                      mul_fraction(s.J[1][c], s.J[2][b]))));
        }
        if (is_zero(to_expr(det), cfg) != ZeroVerdict::ProvedNonzero)
            throw DegenerateSectionError("the section map is not an immersion: its Jacobian "
                                         "determinant could not be proved nonzero");
        return s;
    }

    // Compose a jet-space scalar with the section.
    Fraction compose_section(const Fraction& entry, const SectionData& s) {
        ExprPtr e = to_expr(entry);
        e = substitute(e, {{"x", s.x0e}, {"y", s.sigma[0]}, {"p", s.sigma[1]}, {"q", s.sigma[2]}});
        return normal_form(e);
    }

    static Fraction symf(const char* n) { return fraction_of_poly(poly_atom(make_symbol_atom(n))); }
    static Fraction sc(const Fraction& f, long num, long den) {
        return mul_fraction(fraction_rat(Rational(num, den)), f);
    }
    static Fraction sub2(const Fraction& a, const Fraction& b) {
        return add_fraction(a, neg_fraction(b));
    }
    static Fraction sum3(const Fraction& a, const Fraction& b, const Fraction& c) {
        return add_fraction(add_fraction(a, b), c);
    }
    static Fraction sum4(const Fraction& a, const Fraction& b, const Fraction& c,
                         const Fraction& d) {
        return add_fraction(sum3(a, b, c), d);
    }

    std::vector<DifferentialForm> contact_omega0() {
        DifferentialForm w1 = omega(1), w2 = omega(2), w4 = omega(4);
        const Fraction& Kq = eng_.part("K", "q");
        const Fraction& Kqq = eng_.part("K", "qq");

        DifferentialForm o1 = scale_form(w1, neg_fraction(Kq));

        DifferentialForm o2 = scale_form(w1, add_fraction(sc(eng_.part("W", "q"), 1, 3),
                                                          eng_.part("L")));
        o2 = add_forms(o2, scale_form(w2, neg_fraction(Kq)));
        o2 = add_forms(o2, scale_form(w4, neg_fraction(eng_.part("K"))));

        DifferentialForm o3 = scale_form(w1, neg_fraction(Kq));
        o3 = add_forms(o3, scale_form(w2, sc(eng_.part("F", "qq"), 1, 6)));
        o3 = add_forms(o3, scale_form(w4, sc(eng_.part("F", "q"), 1, 3)));

        DifferentialForm o4 = scale_form(w1, neg_fraction(add_fraction(
                                                  sc(eng_.part("W", "qq"), 1, 3),
                                                  eng_.part("L", "q"))));
        o4 = add_forms(o4, scale_form(w2, sc(Kqq, 1, 2)));

        DifferentialForm o5 = scale_form(w1, sc(Kqq, 1, 2));
        o5 = add_forms(o5, scale_form(w2, sc(eng_.part("F", "qqq"), -1, 6)));
        o5 = add_forms(o5, scale_form(w4, sc(eng_.part("F", "qq"), -1, 6)));

        // Omega6^0 coefficient of omega^1:
        //   (1/3) D(W_qq) - (4/3) W_qp - (1/3) F_q W_qq + (1/3) F_qqq W + M
        Fraction c61 = sum4(sc(eng_.Dpart("W", "qq"), 1, 3),
                            sc(eng_.part("W", "qp"), -4, 3),
                            sc(mul_fraction(eng_.part("F", "q"), eng_.part("W", "qq")), -1, 3),
                            sc(mul_fraction(eng_.part("F", "qqq"), eng_.part("W")), 1, 3));
        c61 = add_fraction(c61, eng_.part("M"));
        // coefficient of omega^2: (1/3)(F_qqy - F_qqq K - W_qq)
        Fraction c62 = sc(sum3(eng_.part("F", "qqy"),
                               neg_fraction(mul_fraction(eng_.part("F", "qqq"), eng_.part("K"))),
                               neg_fraction(eng_.part("W", "qq"))),
                          1, 3);
        // coefficient of omega^4: (2/3) F_qy - (1/3) F_qq K - 2L - (4/3) W_q
        Fraction c64 = sum4(sc(eng_.part("F", "qy"), 2, 3),
                            sc(mul_fraction(eng_.part("F", "qq"), eng_.part("K")), -1, 3),
                            sc(eng_.part("L"), -2, 1),
                            sc(eng_.part("W", "q"), -4, 3));
        DifferentialForm o6 = scale_form(w1, c61);
        o6 = add_forms(o6, scale_form(w2, c62));
        o6 = add_forms(o6, scale_form(omega3_tilde(), neg_fraction(Kqq)));
        o6 = add_forms(o6, scale_form(w4, c64));

        return {o1, o2, o3, o4, o5, o6};
    }

    std::vector<DifferentialForm> point_omega0() {
        DifferentialForm w1 = omega(1), w2 = omega(2);
        const Fraction& Kq = eng_.part("K", "q");
        Fraction FqqFq = mul_fraction(eng_.part("F", "qq"), eng_.part("F", "q"));

        DifferentialForm o1 = scale_form(w1, neg_fraction(sum3(sc(Kq, 3, 1), sc(FqqFq, 2, 9),
                                                               sc(eng_.part("F", "qp"), 2, 3))));
        o1 = add_forms(o1, scale_form(w2, sc(eng_.part("F", "qq"), 1, 6)));

        DifferentialForm o2 = scale_form(
            w1, add_fraction(eng_.part("L"),
                             sc(mul_fraction(eng_.part("F", "qq"), eng_.part("K")), 1, 6)));
        o2 = add_forms(o2, scale_form(w2, neg_fraction(sum3(sc(Kq, 2, 1), sc(FqqFq, 1, 9),
                                                            sc(eng_.part("F", "qp"), 1, 3)))));
        o2 = add_forms(o2, scale_form(omega3_tilde(), sc(eng_.part("F", "qq"), 1, 6)));
        o2 = add_forms(o2, scale_form(omega4_tilde(), neg_fraction(eng_.part("K"))));

        DifferentialForm o3 = scale_form(w1, neg_fraction(sum3(sc(Kq, 2, 1), sc(FqqFq, 1, 6),
                                                               sc(eng_.part("F", "qp"), 1, 3))));
        o3 = add_forms(o3, scale_form(w2, sc(eng_.part("F", "qq"), 1, 3)));
        o3 = add_forms(o3, scale_form(omega4_tilde(), sc(eng_.part("F", "q"), 1, 3)));

        return {o1, o2, o3};
    }

    std::vector<DifferentialForm> fibre_omega0() {
        DifferentialForm w1 = omega(1), w2 = omega(2), w4 = omega(4);
        const Fraction& Kq = eng_.part("K", "q");

        DifferentialForm o1 = scale_form(w1, neg_fraction(Kq));
        o1 = add_forms(o1, scale_form(w2, sc(eng_.part("F", "qq"), 1, 3)));

        DifferentialForm o2 = scale_form(w1, eng_.part("L"));
        o2 = add_forms(o2, scale_form(w2, neg_fraction(Kq)));
        o2 = add_forms(o2, scale_form(omega3_tilde(), sc(eng_.part("F", "qq"), 1, 3)));
        o2 = add_forms(o2, scale_form(w4, neg_fraction(eng_.part("K"))));

        DifferentialForm o3 = scale_form(w1, neg_fraction(Kq));
        o3 = add_forms(o3, scale_form(w2, sc(eng_.part("F", "qq"), 1, 3)));
        o3 = add_forms(o3, scale_form(w4, sc(eng_.part("F", "q"), 1, 3)));

        return {o1, o2, o3};
    }

    InvariantEngine eng_;
};

}  // namespace ode3geo
