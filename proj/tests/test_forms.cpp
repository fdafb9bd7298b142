// test_forms.cpp
//
// Exterior calculus over the rational-function field: wedge algebra,
// exterior derivative, interior product, Lie derivatives, symmetric tensors
// and structure-function extraction.

#include <catch2/catch_amalgamated.hpp>

#include "test_support.hpp"

using namespace ts;

namespace {

const std::vector<std::string> XYPQ = {"x", "y", "p", "q"};

DifferentialForm d_of(const std::string& var) {
    return coordinate_differential(XYPQ, var);
}

DifferentialForm times(const std::string& coeff, const DifferentialForm& f) {
    return scale_form(f, normal_form(P(coeff)));
}

// Random 1-form with polynomial coefficients.
DifferentialForm random_one_form(std::mt19937_64& rng) {
    DifferentialForm f = zero_form(1, XYPQ);
    for (const auto& v : XYPQ)
        f = add_forms(f, scale_form(d_of(v), normal_form(random_poly_deg2(rng))));
    return f;
}

} // namespace

TEST_CASE("wedge product is graded-antisymmetric") {
    DifferentialForm dx = d_of("x"), dy = d_of("y");
    CHECK(forms_equal(wedge(dx, dy), neg_form(wedge(dy, dx))));
    CHECK(form_zero(wedge(dx, dx)));

    std::mt19937_64 rng(3);
    DifferentialForm a = random_one_form(rng), b = random_one_form(rng);
    CHECK(forms_equal(wedge(a, b), neg_form(wedge(b, a))));
    // Associativity with a 2-form on one side.
    DifferentialForm c = random_one_form(rng);
    CHECK(forms_equal(wedge(wedge(a, b), c), wedge(a, wedge(b, c))));
}

TEST_CASE("exterior derivative squares to zero") {
    std::mt19937_64 rng(5);
    for (int i = 0; i < 4; ++i) {
        DifferentialForm a = random_one_form(rng);
        CHECK(form_zero(exterior_d(exterior_d(a))));
    }
    // And on a 0-form presented as a scalar form.
    DifferentialForm s = scalar_form(XYPQ, normal_form(P("x*q^2 + y*p")));
    CHECK(form_zero(exterior_d(exterior_d(s))));
}

TEST_CASE("exterior derivative of a known form") {
    // d(x*q dy) = q dx^dy + x dq^dy = q dx^dy - x dy^dq
    DifferentialForm f = times("x*q", d_of("y"));
    DifferentialForm expect =
        add_forms(times("q", wedge(d_of("x"), d_of("y"))),
                  neg_form(times("x", wedge(d_of("y"), d_of("q")))));
    CHECK(forms_equal(exterior_d(f), expect));
}

TEST_CASE("interior product contracts the leading slot") {
    VectorField v;
    v.coords = XYPQ;
    v.components["x"] = normal_form(rat(1));
    v.components["y"] = normal_form(P("p"));
    v.components["p"] = normal_form(P("q"));
    // i_v (dx^dp) = v^x dp - v^p dx = dp - q dx
    DifferentialForm f = wedge(d_of("x"), d_of("p"));
    DifferentialForm expect = add_forms(d_of("p"), neg_form(times("q", d_of("x"))));
    CHECK(forms_equal(interior(v, f), expect));
    // i_v of a 1-form yields the scalar pairing.
    DifferentialForm a = add_forms(d_of("y"), neg_form(times("p", d_of("x"))));
    DifferentialForm pairing = interior(v, a);
    CHECK(form_zero(pairing)); // (dy - p dx)(v) = p - p = 0
}

TEST_CASE("Lie derivative of forms against hand computations") {
    VectorField v; // the total derivative field of F = 0
    v.coords = XYPQ;
    v.components["x"] = normal_form(rat(1));
    v.components["y"] = normal_form(P("p"));
    v.components["p"] = normal_form(P("q"));
    // L_v dy = d(v^y) = dp
    CHECK(forms_equal(lie_derivative(v, d_of("y")), d_of("p")));
    // L_v (y dx) = (v . y) dx + y d(v^x) = p dx
    CHECK(forms_equal(lie_derivative(v, times("y", d_of("x"))), times("p", d_of("x"))));
}

TEST_CASE("Lie derivative of symmetric tensors") {
    VectorField v;
    v.coords = XYPQ;
    v.components["x"] = normal_form(P("x"));
    // L_{x dx} (dx^2) = 2 dx^2
    SymTensor2 g = outer_square(d_of("x"));
    CHECK(sym_equal(lie_derivative(v, g), scale_sym(g, fraction_rat(Rational(2)))));
}

TEST_CASE("symmetric products and squares") {
    DifferentialForm a = d_of("x"), b = d_of("q");
    SymTensor2 s = sym_product(a, b);
    // Stored symmetrized: (dx.dq)_{xq} = 1/2, so that 2*dx.dq has coefficient 1.
    CHECK(add_fraction(s.m[0][3], neg_fraction(normal_form(P("1/2")))).is_zero());
    CHECK(add_fraction(s.m[3][0], neg_fraction(normal_form(P("1/2")))).is_zero());
    CHECK(s.m[0][0].is_zero());
    SymTensor2 sq = outer_square(add_forms(a, b));
    // (dx+dq)^2 = dx^2 + 2 dx dq + dq^2, stored with symmetric halves.
    CHECK(add_fraction(sq.m[0][0], neg_fraction(normal_form(rat(1)))).is_zero());
    CHECK(add_fraction(sq.m[0][3], neg_fraction(normal_form(rat(1)))).is_zero());
    CHECK(sym_equal(sq, add_sym(add_sym(outer_square(a),
                                        scale_sym(s, fraction_rat(Rational(2)))),
                                outer_square(b))));
}

TEST_CASE("structure functions of the flat jet coframe") {
    // Coframe (dy - p dx, dp - q dx, dq, dx) for F = 0:
    // d(w1) = -dp^dx = w2^w4 + q? ... extract and compare against direct d.
    std::vector<DifferentialForm> cf = {
        add_forms(d_of("y"), neg_form(times("p", d_of("x")))),
        add_forms(d_of("p"), neg_form(times("q", d_of("x")))),
        d_of("q"),
        d_of("x")};
    StructureFunctions sf = structure_functions(cf);
    // d(theta^a) = sum_{b<c} c^a_{bc} theta^b ^ theta^c must reproduce d exactly.
    for (int a = 0; a < 4; ++a) {
        DifferentialForm rebuilt = zero_form(2, XYPQ);
        for (int b = 0; b < 4; ++b)
            for (int c = b + 1; c < 4; ++c)
                rebuilt = add_forms(rebuilt,
                                    scale_form(wedge(cf[b], cf[c]), sf.get(a, b, c)));
        CHECK(forms_equal(exterior_d(cf[a]), rebuilt));
    }
    // Antisymmetry of the stored coefficients.
    CHECK(add_fraction(sf.get(0, 1, 3), sf.get(0, 3, 1)).is_zero());
}

TEST_CASE("matrix curvature of a closed scalar matrix is zero") {
    MatrixOfForms m = matrix_of_forms(2, 1, XYPQ);
    m.entries[0][1] = d_of("x");
    m.entries[1][0] = d_of("y");
    DiffContext ctx;
    MatrixOfForms k = curvature_of(m, ctx);
    // dA + A^A with constant-coefficient exact entries: dA = 0, A^A survives.
    CHECK(form_zero(k.entries[0][0]) == false);
    CHECK(forms_equal(k.entries[0][0], wedge(d_of("x"), d_of("y"))));
}
