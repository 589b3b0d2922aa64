#include <doctest.h>

#include <numbers>

#include "freespectra/certify.hpp"
#include "freespectra/gallery.hpp"
#include "freespectra/random.hpp"
#include "helpers.hpp"

using namespace freespectra;
using fs_test::mat;

namespace {

struct Built {
    gallery::PairSpec pair;
    Certificate cert;
};

Built built(const std::string& id, int N, std::uint64_t seed) {
    auto e = fs_test::entry(id, 2);
    Mat C = gallery::unitary_with_margin(e.R[0].rows(), 0.1, seed);
    auto pair = gallery::build_pair(e.R, C);
    const auto d = pair.A.d();
    return {pair, build_certificate(pair.A, C, Mat::Identity(d, d), N)};
}

}  // namespace

TEST_CASE("C = -I gives A = -R/2 and a valid certificate") {
    auto e = fs_test::entry("g2.IV", 2);
    const auto d = e.R[0].rows();
    Mat C = -Mat::Identity(d, d);
    auto pair = gallery::build_pair(e.R, C);
    for (size_t j = 0; j < e.R.size(); ++j) {
        CHECK(max_abs(pair.A.A[j] + 0.5 * e.R[j]) < 1e-15);
        CHECK(max_abs(pair.B.A[j] - 0.5 * e.R[j]) < 1e-15);
    }
    Certificate cert = build_certificate(pair.A, C, Mat::Identity(d, d), 4);
    CHECK(verify_relations(cert, 4).passed());
    CHECK(verify_on_nilpotents(cert, 4).passed());
    REQUIRE(cert.Xi.has_value());
    for (size_t j = 0; j < e.Xi.size(); ++j) CHECK(max_abs((*cert.Xi)[j] - e.Xi[j]) < 1e-12);
}

TEST_CASE("certificate relations hold for random pairs") {
    for (std::uint64_t s = 0; s < 4; ++s) {
        auto b = built(s % 2 ? "g3.09" : "g2.II", 4, s);
        auto rel = verify_relations(b.cert, 4);
        CHECK(rel.passed());
        CHECK(verify_recursion(b.cert, 4).max() < 1e-12);
        auto smp = verify_on_samples(b.cert, 20, 0.05, s);
        CHECK(smp.passed());
        CHECK(smp.map_residual >= 0.0);
    }
}

TEST_CASE("a perturbed coefficient is located") {
    auto b = built("g2.I", 3, 11);
    Certificate bad = b.cert;
    Word w({1, 0});
    Mat c = bad.W.coeff(w);
    c(1, 2) += 1e-3;
    bad.W.set(w, c);
    auto rel = verify_relations(bad, 3);
    CHECK_FALSE(rel.passed());
    CHECK(rel.worst.find("x2*x1") != std::string::npos);
    CHECK_FALSE(verify_on_nilpotents(bad, 3).passed());
}

TEST_CASE("Fock order is tied to the certificate degree") {
    auto b = built("g2.I", 3, 12);
    CHECK_THROWS_AS(verify_on_nilpotents(b.cert, 4), InvalidInput);
    CHECK_THROWS_AS(verify_relations(b.cert, 4), InvalidInput);
}

TEST_CASE("input validation") {
    Pencil A({mat({{0, 1}, {0, 0}})});
    CHECK_THROWS_AS(build_certificate(A, mat({{1, 1}, {0, 1}}), Mat::Identity(2, 2), 2), InvalidInput);
    CHECK_THROWS_AS(build_certificate(A, Mat::Identity(3, 3), Mat::Identity(3, 3), 2), ShapeMismatch);
    CHECK_THROWS_AS(build_certificate(A, Mat::Identity(2, 2), 2.0 * Mat::Identity(2, 2), 2), InvalidInput);
}

TEST_CASE("polynomial certificate iff nilpotent R") {
    auto nil = built("g3.03", 2, 13);
    auto r1 = check_polynomial_iff_nilpotent(nil.cert);
    CHECK(r1.r_nilpotent);
    CHECK(r1.w_degree >= 0);
    CHECK(r1.consistent);
    CHECK(r1.order_bounds);
    auto idem = built("g2.III", 2, 14);
    auto r2 = check_polynomial_iff_nilpotent(idem.cert);
    CHECK_FALSE(r2.r_nilpotent);
    CHECK(r2.w_degree == -1);
    CHECK(r2.consistent);
}

TEST_CASE("extraction fails when R is not an algebra over A") {
    Rng rng(15);
    Pencil A({rng.gaussian(3, 3), rng.gaussian(3, 3)});
    Extraction ex = extract_convexotonic(A, rng.unitary(3));
    CHECK_FALSE(ex.ok);
    CHECK_FALSE(ex.reason.empty());
}

TEST_CASE("hereditary certificates: expansion and rejection") {
    Pencil L({mat({{0, 1}, {0, 0}}), mat({{0, 0}, {0.5, 0}})});
    HereditaryCertificate hc{L, L.as_hereditary(), {}, {FreeSeries::identity(2, 2, 0)}};
    auto ok = verify_hereditary(hc);
    CHECK(ok.valid);
    CHECK(ok.max_mismatch == 0.0);
    CHECK(ok.shape == "weights deg <= d");
    // a mismatch in a coefficient that the expansion does not produce
    HereditaryCertificate extra = hc;
    extra.h.set(Word::letter(1), Word::letter(1), mat({{1e-3, 0}, {0, 0}}));
    auto bad = verify_hereditary(extra);
    CHECK_FALSE(bad.valid);
    CHECK(bad.worst_left == Word::letter(1));
    CHECK(bad.worst_right == Word::letter(1));
    // degree d+1 weights are accepted as a shape
    FreeSeries f(2, 2, 2, 3);
    f.set(Word({0, 0, 1}), mat({{1, 0}, {0, 0}}));
    HereditaryCertificate tall{L, expand_hereditary({L, HereditaryPoly(2, 2, 2), {}, {f}}), {}, {f}};
    auto rt = verify_hereditary(tall);
    CHECK(rt.max_mismatch == 0.0);
    CHECK(rt.shape == "weights deg <= d+1");
}
