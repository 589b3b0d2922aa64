#include <doctest.h>

#include "freespectra/nc_core.hpp"
#include "freespectra/random.hpp"
#include "helpers.hpp"

using namespace freespectra;
using fs_test::mat;

TEST_CASE("words are graded lexicographic and indexed consistently") {
    auto ws = words_up_to(2, 3);
    CHECK(ws.size() == 15);
    CHECK(word_count(2, 3) == 15);
    CHECK(word_count(3, 8) == 9841);
    CHECK(ws[0].str() == "1");
    CHECK(ws[1].str() == "x1");
    CHECK(ws[3].str() == "x1*x1");
    CHECK(ws[6].str() == "x2*x2");
    for (size_t i = 0; i < ws.size(); ++i) CHECK(word_index(ws[i], 2) == i);
    for (size_t i = 1; i < ws.size(); ++i) CHECK(ws[i - 1] < ws[i]);
    Word w({0, 1, 1});
    CHECK(w.prefix(1) == Word::letter(0));
    CHECK(w.suffix_from(1) == Word({1, 1}));
}

TEST_CASE("geometric series inverse of 1 - x1 - x2 has all coefficients one") {
    FreeSeries f = FreeSeries::identity(2, 1, 5) - FreeSeries::variable(2, 0, 5) - FreeSeries::variable(2, 1, 5);
    FreeSeries inv = series_inverse(f);
    CHECK(inv.terms().size() == word_count(2, 5));
    for (const auto& [w, c] : inv.terms()) CHECK(std::abs(c(0, 0) - 1.0) < 1e-14);
    FreeSeries one = series_mul(f, inv);
    CHECK(coeff_distance(one, FreeSeries::identity(2, 1, 5)) < 1e-14);
}

TEST_CASE("series evaluation agrees with direct products on a nilpotent point") {
    Rng rng(1);
    MatrixTuple X = rng.tuple(2, 4);
    for (auto& x : X.X) x = Mat(x.triangularView<Eigen::StrictlyUpper>());
    // f = 2 + x1 x2 - 3 x2 x1 x1
    FreeSeries f(2, 1, 1, 3);
    f.set(Word(), mat({{2.0}}));
    f.set(Word({0, 1}), mat({{1.0}}));
    f.set(Word({1, 0, 0}), mat({{-3.0}}));
    Mat direct = 2.0 * Mat::Identity(4, 4) + X[0] * X[1] - 3.0 * X[1] * X[0] * X[0];
    CHECK(max_abs(eval_series(f, X) - direct) < 1e-13);
    CHECK(max_abs(eval_word(Word({1, 0, 0}), X) - X[1] * X[0] * X[0]) < 1e-14);
}

TEST_CASE("Fock shifts separate coefficients of words up to the order") {
    const int N = 3;
    MatrixTuple S = fock_shift_tuple(2, N);
    CHECK(S.n() == static_cast<Eigen::Index>(word_count(2, N)));
    // S^w e_empty is the basis vector of the reversed word
    for (const auto& w : words_up_to(2, N)) {
        Vec v = eval_word(w, S).col(0);
        CHECK(std::abs(v.norm() - 1.0) < 1e-15);
    }
    for (const auto& w : words_of_length(2, N + 1)) CHECK(max_abs(eval_word(w, S)) == 0.0);
    CHECK(joint_spectral_radius(S, N + 1) == 0.0);
}

TEST_CASE("hereditary evaluation matches adjoint products") {
    Rng rng(2);
    MatrixTuple X = rng.tuple(2, 3);
    HereditaryPoly h(2, 1, 1);
    h.set(Word::letter(0), Word::letter(1), mat({{2.0}}));
    h.set(Word(), Word(), mat({{1.0}}));
    Mat expect = Mat::Identity(3, 3) + 2.0 * X[0].adjoint() * X[1];
    CHECK(max_abs(h.eval(X) - expect) < 1e-13);
    CHECK_FALSE(h.is_symmetric(1e-12));
    h.set(Word::letter(1), Word::letter(0), mat({{2.0}}));
    CHECK(h.is_symmetric(1e-12));
    CHECK(h.degree() == 2);
}

TEST_CASE("formal radius of the geometric series is one over g") {
    FreeSeries f = FreeSeries::identity(2, 1, 6) - FreeSeries::variable(2, 0, 6) - FreeSeries::variable(2, 1, 6);
    FreeSeries inv = series_inverse(f);
    CHECK(formal_radius_estimate(inv, 6) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("mismatched series are rejected") {
    FreeSeries a(2, 1, 1, 2), b(3, 1, 1, 2), c(2, 2, 2, 2);
    CHECK_THROWS_AS(series_mul(a, b), VariableMismatch);
    CHECK_THROWS_AS(series_mul(a, c), ShapeMismatch);
    FreeSeries z(1, 1, 1, 2);
    CHECK_THROWS_AS(series_inverse(z), OutsideDomain);
}
