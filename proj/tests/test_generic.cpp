#include <doctest.h>

#include "freespectra/gallery.hpp"
#include "freespectra/generic.hpp"
#include "freespectra/random.hpp"
#include "helpers.hpp"

using namespace freespectra;
using fs_test::mat;

TEST_CASE("probe of the nilpotent 2x2 pencil") {
    Pencil A({mat({{0, 1}, {0, 0}})});
    auto p = top_singular_probe(A, MatrixTuple({mat({{1.0}})}));
    CHECK(std::abs(std::abs(p.u(1)) - 1.0) < 1e-15);
    CHECK(std::abs(p.u(0)) < 1e-15);
    CHECK(p.gap == doctest::Approx(1.0));
    CHECK(std::abs(p.kernel_eig) < 1e-15);
    CHECK(p.pairing_residual < 1e-15);
}

TEST_CASE("unitary or vanishing Lambda is rejected") {
    Pencil U({mat({{0, 1}, {1, 0}})});
    CHECK_THROWS_AS(top_singular_probe(U, MatrixTuple({mat({{1.0}})})), ProbeRejected);
    CHECK_THROWS_AS(top_singular_probe(U, MatrixTuple({mat({{0.0}})})), ProbeRejected);
}

TEST_CASE("hyperbasis check") {
    Vec e1 = Vec::Unit(2, 0), e2 = Vec::Unit(2, 1);
    CHECK(hyperbasis_check({e1, e2, e1 + e2}).hyperbasis);
    auto r = hyperbasis_check({e1, e2, e1});
    CHECK_FALSE(r.hyperbasis);
    CHECK(r.worst_subset == std::vector<int>{0, 2});
}

TEST_CASE("matrix probes decompose as u = sum u_a (x) e_a") {
    Rng rng(20);
    Pencil A({rng.gaussian(3, 3), rng.gaussian(3, 3)});
    MatrixTuple alpha = rng.tuple(2, 2);
    auto p = top_singular_probe(A, alpha);
    REQUIRE(p.parts.size() == 2);
    Vec rebuilt = Vec::Zero(6);
    for (Eigen::Index a = 0; a < 2; ++a)
        for (Eigen::Index i = 0; i < 3; ++i) rebuilt(i * 2 + a) = p.parts[static_cast<size_t>(a)](i);
    CHECK((rebuilt - p.u).norm() < 1e-15);
    CHECK(p.pairing_residual < 1e-10);
    CHECK(std::abs(p.kernel_eig) < 1e-10);
}

TEST_CASE("sv-genericity of random tuples and its failure for a nilpotent one") {
    Rng rng(21);
    Pencil A({rng.gaussian(3, 3), rng.gaussian(3, 3)});
    auto r = check_sv_generic(A, 500, 1);
    CHECK(r.witnessed);
    CHECK(r.right_witnesses.size() == 4);
    CHECK(r.left_witnesses.size() == 3);
    CHECK(r.max_pairing_residual < 1e-10);
    Pencil N({mat({{0, 1}, {0, 0}})});
    auto n = check_sv_generic(N, 100, 1);
    CHECK_FALSE(n.witnessed);
    CHECK(n.verdict == "not witnessed within budget");
    CHECK(n.explanation.find("u=e_2") != std::string::npos);
    CHECK(n.explanation.find("v=e_1") != std::string::npos);
}

TEST_CASE("a witnessed verdict survives a larger budget") {
    Rng rng(22);
    Pencil A({rng.gaussian(2, 2), rng.gaussian(2, 2)});
    auto small = check_sv_generic(A, 40, 3);
    auto large = check_sv_generic(A, 400, 3);
    if (small.witnessed) CHECK(large.witnessed);
    CHECK(large.probes_used <= 400);
}

TEST_CASE("single probe spanning C^d plus its conjugate by a spreading unitary") {
    auto A = gallery::pq_example().A;
    Rng rng(23);
    MatrixTuple alpha = rng.tuple(2, 4);
    auto r = check_eig_star_generic(A, "eig", {alpha}, 2, 0);
    CHECK(r.witnessed);
    CHECK(r.verdict == "eig-generic witnessed");
    CHECK(r.right_witnesses.size() == 5);
    CHECK(r.explanation.find("second probe") != std::string::npos);
}

TEST_CASE("kernel and range deficient tuples") {
    // upper-left supported entries: rg(A) and ker(A)^perp are one-dimensional
    Pencil A({mat({{1, 0, 0}, {0, 0, 0}, {0, 0, 0}}), mat({{cplx(0, 1), 0, 0}, {0, 0, 0}, {0, 0, 0}})});
    auto star = check_eig_star_generic(A, "star", {}, 50, 4);
    CHECK(star.target_dim == 1);
    CHECK(star.verdict != "*-generic witnessed");
    auto eig = check_eig_star_generic(A, "eig", {}, 50, 4);
    CHECK_FALSE(eig.verdict == "eig-generic witnessed");
    CHECK(eig.explanation.find("ker(A)^perp has dimension 1") != std::string::npos);
    CHECK_THROWS_AS(check_eig_star_generic(A, "eig", {MatrixTuple({mat({{1.0}})})}, 5, 0), VariableMismatch);
}

TEST_CASE("star-genericity of a random tuple") {
    Rng rng(24);
    Pencil A({rng.gaussian(3, 3), rng.gaussian(3, 3)});
    auto r = check_eig_star_generic(A, "star", {}, 20, 5);
    CHECK(r.witnessed);
    CHECK(r.left_witnesses.size() == 3);
}
