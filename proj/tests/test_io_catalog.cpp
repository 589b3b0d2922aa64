#include <doctest.h>

#include "freespectra/catalog.hpp"
#include "freespectra/expr.hpp"
#include "freespectra/io.hpp"
#include "freespectra/random.hpp"
#include "helpers.hpp"

using namespace freespectra;
using fs_test::mat;
using io::json;

TEST_CASE("expressions: precedence, implicit products and inverses") {
    FreeSeries f = parse_series("2x1 - x2*x1 + (x1 + x2)^2", 2, 3);
    CHECK(f.coeff(Word::letter(0))(0, 0) == cplx(2));
    CHECK(f.coeff(Word({1, 0}))(0, 0) == cplx(0));  // -x2 x1 + x2 x1
    CHECK(f.coeff(Word({0, 1}))(0, 0) == cplx(1));
    FreeSeries g = parse_series("inv(1 - x1)", 1, 4);
    for (int k = 0; k <= 4; ++k) CHECK(g.coeff(Word(std::vector<int>(static_cast<size_t>(k), 0)))(0, 0) == cplx(1));
    CHECK(parse_scalar("1/2 + 3i") == cplx(0.5, 3));
    CHECK(parse_scalar("alpha^2", {{"alpha", cplx(3)}}) == cplx(9));
    CHECK_THROWS_AS(parse_series("x3", 2, 2), InvalidInput);
    CHECK_THROWS_AS(parse_series("x1 +", 2, 2), InvalidInput);
    CHECK_THROWS_AS(parse_scalar("x1"), InvalidInput);
}

TEST_CASE("json round trips") {
    Rng rng(8);
    Mat m = rng.gaussian(2, 3);
    CHECK(max_abs(io::matrix_from_json(io::to_json(m)) - m) == 0.0);
    FreeSeries f = parse_map({"x1*inv(1 - x2)", "x2"}, 2, 4);
    CHECK(coeff_distance(io::series_from_json(io::to_json(f)), f) == 0.0);
    HereditaryPoly h(2, 1, 1);
    h.set(Word::letter(1), Word({0, 0}), mat({{cplx(1, -2)}}));
    HereditaryPoly back = io::hereditary_from_json(io::to_json(h));
    CHECK(back.coeff(Word::letter(1), Word({0, 0}))(0, 0) == cplx(1, -2));
    // real entries and [re, im] pairs are both accepted
    Mat z = io::matrix_from_json(json::parse("[[1, [0, 2]], [3.5, -1]]"));
    CHECK(z(0, 1) == cplx(0, 2));
    CHECK_THROWS_AS(io::matrix_from_json(json::parse("[[1, 2], [3]]")), InvalidInput);
    CHECK_THROWS_AS(io::word_from_json(json::parse("[1, 3]"), 2), VariableMismatch);
}

TEST_CASE("catalog lists all fixtures and generators") {
    auto ids = fs_test::fixture_ids();
    CHECK(ids.size() == 16);
    CHECK(catalog::list().size() == 18);
}

TEST_CASE("every fixture validates against its closed forms") {
    for (const auto& id : fs_test::fixture_ids()) {
        CAPTURE(id);
        auto e = fs_test::entry(id, 6);
        CHECK(e.validation.convexotonic_residual < 1e-12);
        CHECK(e.validation.structure_residual < 1e-12);
        CHECK(e.validation.formula_residual >= 0.0);
        CHECK(e.validation.formula_residual < 1e-12);
        CHECK(static_cast<int>(e.Xi.size()) == e.g);
    }
}

TEST_CASE("catalog parameters are validated") {
    CHECK_THROWS_AS(catalog::get("g9.99"), InvalidInput);
    CHECK_THROWS_AS(catalog::get("../index"), InvalidInput);
    CHECK_THROWS_AS(catalog::get("g3.02"), InvalidInput);
    catalog::EntryParams one;
    one.alpha = 1.0;
    auto a1 = catalog::get("g3.02", one, 3);
    auto alg1 = catalog::get("g3.01", {}, 3);
    for (size_t j = 0; j < 3; ++j) CHECK(max_abs(a1.Xi[j] - alg1.Xi[j]) == 0.0);
    catalog::EntryParams big;
    Vec v(2);
    v << 0.8, 0.7;
    big.v = v;
    CHECK_THROWS_AS(catalog::get("ball", big), InvalidInput);
}

TEST_CASE("ball automorphism moves v to the origin and keeps the ball") {
    Vec v(2);
    v << cplx(0.3, 0.1), cplx(-0.2, 0.4);
    catalog::EntryParams p;
    p.v = v;
    auto e = catalog::get("ball", p, 4);
    CHECK(e.validation.convexotonic_residual < 1e-15);
    MatrixTuple V({mat({{v(0)}}), mat({{v(1)}})});
    CHECK(catalog::ball_automorphism(v, V).max_abs() < 1e-15);
    // interior row contraction stays interior
    Rng rng(9);
    MatrixTuple X = rng.tuple(2, 3);
    Mat rows(3, 6);
    rows << X[0], X[1];
    X = X.scaled(0.5 / opnorm(rows));
    MatrixTuple Y = catalog::ball_automorphism(v, X);
    Mat yrows(3, 6);
    yrows << Y[0], Y[1];
    CHECK(opnorm(yrows) < 1.0);
}
