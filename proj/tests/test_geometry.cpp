// test_geometry.cpp
//
// Adapted coframes, Cartan connections, curvature housings of the named
// invariants, the conformal metric/potential pair, lifted metrics, and
// solution-space pullbacks.

#include <catch2/catch_amalgamated.hpp>

#include "test_support.hpp"

using namespace ts;

namespace {

const std::vector<std::string> XYPQ = {"x", "y", "p", "q"};

DifferentialForm d_of(const std::string& var) {
    return coordinate_differential(XYPQ, var);
}

DifferentialForm times(const Fraction& c, const DifferentialForm& f) {
    return scale_form(f, c);
}

// Coefficient of theta^a ^ theta^b of a 2-form, in the basis dual to `coframe`.
Fraction wedge_coeff(const DifferentialForm& f,
                     const std::vector<DifferentialForm>& coframe, int a, int b) {
    const int n = static_cast<int>(coframe.size());
    std::vector<std::vector<Fraction>> A(n, std::vector<Fraction>(n, fraction_rat(Rational(0))));
    for (int r = 0; r < n; ++r)
        for (int i = 0; i < n; ++i) A[r][i] = form_coefficient(coframe[r], {i});
    auto inv = invert_fraction_matrix(std::move(A));
    Fraction acc = fraction_rat(Rational(0));
    for (const auto& [idx, c] : f.terms) {
        const int i = idx[0], j = idx[1];
        Fraction basis = add_fraction(mul_fraction(inv[i][a], inv[j][b]),
                                      neg_fraction(mul_fraction(inv[i][b], inv[j][a])));
        acc = add_fraction(acc, mul_fraction(c, basis));
    }
    return acc;
}

bool frac_equal(const Fraction& a, const Fraction& b) {
    return add_fraction(a, neg_fraction(b)).is_zero();
}

// The structurally derived fourth point invariant (the w1^w4t curvature slot).
Fraction derived_C1(InvariantEngine& eng) {
    Fraction inner = add_fraction(
        mul_fraction(fraction_rat(Rational(2)), eng.part("K", "q")),
        add_fraction(mul_fraction(fraction_rat(Rational(1, 9)),
                                  mul_fraction(eng.part("F", "qq"), eng.part("F", "q"))),
                     mul_fraction(fraction_rat(Rational(1, 3)), eng.part("F", "qp"))));
    return add_fraction(eng.D(inner),
                        mul_fraction(fraction_rat(Rational(1, 3)), eng.part("F", "qy")));
}

} // namespace

TEST_CASE("adapted coframes match their defining formulas") {
    Ode3 ode = parse_ode("3*q^2/(2*p)");
    GeometryEngine geo(ode);
    InvariantEngine& eng = geo.invariants();

    DifferentialForm w1 = add_forms(d_of("y"), times(neg_fraction(normal_form(P("p"))), d_of("x")));
    DifferentialForm w2 = add_forms(d_of("p"), times(neg_fraction(normal_form(P("q"))), d_of("x")));
    DifferentialForm w3 = add_forms(d_of("q"), times(neg_fraction(eng.F()), d_of("x")));
    DifferentialForm w3t = add_forms(
        w3, add_forms(times(neg_fraction(mul_fraction(fraction_rat(Rational(1, 3)),
                                                      eng.part("F", "q"))),
                            w2),
                      times(eng.part("K"), w1)));
    DifferentialForm w4t =
        add_forms(d_of("x"), times(mul_fraction(fraction_rat(Rational(1, 6)),
                                                eng.part("F", "qq")),
                                   w1));

    auto contact = geo.coframe(Picture::Contact);
    CHECK(forms_equal(contact[0], w1));
    CHECK(forms_equal(contact[1], w2));
    CHECK(forms_equal(contact[2], w3t));
    CHECK(forms_equal(contact[3], d_of("x")));

    auto point = geo.coframe(Picture::Point);
    CHECK(forms_equal(point[2], w3t));
    CHECK(forms_equal(point[3], w4t));

    auto fibre = geo.coframe(Picture::Fibre);
    CHECK(forms_equal(fibre[3], d_of("x")));
}

TEST_CASE("point and fibre fourth forms differ by half the fibre invariant") {
    std::mt19937_64 rng(21);
    for (int i = 0; i < 5; ++i) {
        Ode3 ode = make_ode(random_poly_deg2(rng));
        GeometryEngine geo(ode);
        InvariantEngine& eng = geo.invariants();
        auto point = geo.coframe(Picture::Point);
        auto fibre = geo.coframe(Picture::Fibre);
        DifferentialForm half_b1 =
            times(mul_fraction(fraction_rat(Rational(1, 2)),
                               eng.invariant(InvariantName::B1f)),
                  geo.omega(1));
        CHECK(forms_equal(point[3], add_forms(fibre[3], half_b1)));
    }
}

TEST_CASE("the Weyl potential is the third point connection form") {
    std::mt19937_64 rng(23);
    for (int i = 0; i < 5; ++i) {
        Ode3 ode = make_ode(random_poly_deg2(rng));
        GeometryEngine geo(ode);
        auto omega0 = geo.omega0(Picture::Point);
        CHECK(forms_equal(geo.weyl_potential(), omega0[2]));
    }
}

TEST_CASE("Weyl potential of the negative-Ricci example is dp/p") {
    GeometryEngine geo(parse_ode("3*q^2/(2*p)"));
    DifferentialForm expect = times(normal_form(P("1/p")), d_of("p"));
    CHECK(forms_equal(geo.weyl_potential(), expect));
}

TEST_CASE("conformal metric assembles from the coframe") {
    std::mt19937_64 rng(25);
    for (int i = 0; i < 3; ++i) {
        Ode3 ode = make_ode(random_poly_deg2(rng));
        GeometryEngine geo(ode);
        auto cf = geo.coframe(Picture::Contact);
        SymTensor2 expect = sub_sym(
            scale_sym(sym_product(cf[0], cf[2]), fraction_rat(Rational(2))),
            outer_square(cf[1]));
        CHECK(sym_equal(geo.conformal_metric(), expect));
    }
    // Explicit entries for the trivial equation.
    GeometryEngine flat(parse_ode("0"));
    SymTensor2 g = flat.conformal_metric();
    CHECK(frac_equal(g.m[0][0], normal_form(P("-q^2"))));
    CHECK(frac_equal(g.m[0][3], neg_fraction(normal_form(P("p")))));
    CHECK(frac_equal(g.m[1][3], fraction_rat(Rational(1))));
    CHECK(frac_equal(g.m[2][2], fraction_rat(Rational(-1))));
    CHECK(g.m[0][1].is_zero());
}

TEST_CASE("connection matrices carry the advertised structure") {
    GeometryEngine geo(parse_ode("q^3"));

    ConnectionMatrix contact = geo.connection(Picture::Contact);
    CHECK(contact.algebra == ConnectionAlgebra::sp4);
    ConnectionMatrix point = geo.connection(Picture::Point);
    CHECK(point.algebra == ConnectionAlgebra::co21_semidirect);
    ConnectionMatrix fibre = geo.connection(Picture::Fibre);
    CHECK(fibre.algebra == ConnectionAlgebra::co21_semidirect);

    // Bottom row of every picture: (2 w1, w2, -theta4, -eta) with the
    // picture's own fourth form.
    for (auto pic : {Picture::Contact, Picture::Point, Picture::Fibre}) {
        ConnectionMatrix c = geo.connection(pic);
        auto cf = geo.coframe(pic);
        CHECK(forms_equal(c.forms.entries[3][0], scale_form(cf[0], fraction_rat(Rational(2)))));
        CHECK(forms_equal(c.forms.entries[3][1], cf[1]));
        CHECK(forms_equal(c.forms.entries[3][2], neg_form(cf[3])));
        // Row 2 holds the tautological forms w2, w3t.
        CHECK(forms_equal(c.forms.entries[2][0], cf[1]));
        CHECK(forms_equal(c.forms.entries[2][1], cf[2]));
        // Diagonal pairing of the middle block: entry (2,2) is the negative
        // of entry (1,1) in the algebra's Borel normalization.
        CHECK(forms_equal(c.forms.entries[2][2], neg_form(c.forms.entries[1][1])));
    }
}

TEST_CASE("curvature of the trivial equation vanishes in all pictures") {
    GeometryEngine geo(parse_ode("0"));
    for (auto pic : {Picture::Contact, Picture::Point, Picture::Fibre}) {
        MatrixOfForms k = geo.curvature(geo.connection(pic));
        INFO("picture " << to_string(pic));
        CHECK(k.is_zero());
    }
}

TEST_CASE("contact curvature houses the Wuenschmann invariant") {
    // For the linear family the only surviving slot is K[2][1] = -W w1^w4.
    GeometryEngine geo(parse_ode("-2*mu*p + y", {"mu"}));
    MatrixOfForms k = geo.curvature(geo.connection(Picture::Contact));
    auto cf = geo.coframe(Picture::Contact);
    CHECK(frac_equal(wedge_coeff(k.entries[2][1], cf, 0, 3),
                     neg_fraction(geo.invariants().invariant(InvariantName::W))));
    for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c)
            if (!(r == 2 && c == 1)) CHECK(k.entries[r][c].is_zero());

    // The same slot carries -W for generic equations.
    std::mt19937_64 rng(27);
    for (int i = 0; i < 2; ++i) {
        Ode3 ode = make_ode(random_poly_deg2(rng));
        GeometryEngine g2(ode);
        MatrixOfForms k2 = g2.curvature(g2.connection(Picture::Contact));
        auto cf2 = g2.coframe(Picture::Contact);
        CHECK(frac_equal(wedge_coeff(k2.entries[2][1], cf2, 0, 3),
                         neg_fraction(g2.invariants().invariant(InvariantName::W))));
    }
}

TEST_CASE("point curvature houses the point relative invariants") {
    std::mt19937_64 rng(29);
    std::vector<Ode3> cases;
    cases.push_back(parse_ode("q^3"));
    for (int i = 0; i < 2; ++i) cases.push_back(make_ode(random_poly_deg2(rng)));
    for (auto& ode : cases) {
        GeometryEngine geo(ode);
        InvariantEngine& eng = geo.invariants();
        MatrixOfForms k = geo.curvature(geo.connection(Picture::Point));
        auto cf = geo.coframe(Picture::Point);
        INFO("F = " << to_string(ode.F));
        // Torsion row: K[1][0] = -B1 w1^w2 - B2 w1^w3t.
        CHECK(frac_equal(wedge_coeff(k.entries[1][0], cf, 0, 1),
                         neg_fraction(eng.invariant(InvariantName::B1p))));
        CHECK(frac_equal(wedge_coeff(k.entries[1][0], cf, 0, 2),
                         neg_fraction(eng.invariant(InvariantName::B2p))));
        // Diagonal slot: K[0][0] carries the derived fourth invariant on
        // w1^w4t, shifted by -W_q/2 (the shift vanishes on the flat branch).
        Fraction expected = add_fraction(
            derived_C1(eng),
            neg_fraction(mul_fraction(fraction_rat(Rational(1, 2)), eng.part("W", "q"))));
        CHECK(frac_equal(wedge_coeff(k.entries[0][0], cf, 0, 3), expected));
    }
}

TEST_CASE("lifted six-dimensional metric of the trivial equation") {
    GeometryEngine geo(parse_ode("0"));
    for (char variant : {'c', 'p'}) {
        SymTensor2 g = geo.six_dim_metric(variant);
        INFO("variant " << variant);
        // 2 dx.dq and nothing else.
        CHECK(frac_equal(g.m[0][3], fraction_rat(Rational(1))));
        CHECK(frac_equal(g.m[3][0], fraction_rat(Rational(1))));
        Fraction trace = fraction_rat(Rational(0));
        for (std::size_t i = 0; i < g.m.size(); ++i)
            for (std::size_t j = 0; j < g.m.size(); ++j)
                if (!(i == 0 && j == 3) && !(i == 3 && j == 0))
                    CHECK(g.m[i][j].is_zero());
        (void)trace;
    }
}

TEST_CASE("conformal flatness obstruction two-forms") {
    GeometryEngine flat(parse_ode("0"));
    auto dp_flat = flat.cotton();
    CHECK(dp_flat[0].is_zero());
    CHECK(dp_flat[1].is_zero());
    CHECK(dp_flat[2].is_zero());

    GeometryEngine curved(parse_ode("q^(3/2)"));
    auto dp = curved.cotton();
    CHECK_FALSE((dp[0].is_zero() && dp[1].is_zero() && dp[2].is_zero()));
}

TEST_CASE("solution-space pullback of the trivial equation is flat and exact") {
    GeometryEngine geo(parse_ode("0"));
    std::set<std::string> names = {"x", "c1", "c2", "c3"};
    ExprPtr f = parse_expr("c1 + c2*x + c3*x^2", names);
    SymTensor2 g = geo.solution_space_metric(f, Rational(0), {});
    CHECK(frac_equal(g.m[0][2], fraction_rat(Rational(2))));
    CHECK(frac_equal(g.m[1][1], fraction_rat(Rational(-1))));
    CHECK(g.m[0][0].is_zero());
    CHECK(g.m[0][1].is_zero());
    CHECK(g.m[1][2].is_zero());
    CHECK(g.m[2][2].is_zero());
    CHECK(geo.solution_space_potential(f, Rational(0), {}).is_zero());
}

TEST_CASE("total derivative vector field") {
    GeometryEngine geo(parse_ode("q^(3/2)"));
    VectorField v = geo.total_derivative_field();
    CHECK(frac_equal(v.component("x"), fraction_rat(Rational(1))));
    CHECK(frac_equal(v.component("y"), normal_form(P("p"))));
    CHECK(frac_equal(v.component("p"), normal_form(P("q"))));
    CHECK(frac_equal(v.component("q"), normal_form(P("q^(3/2)"))));
}
