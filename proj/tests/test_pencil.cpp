#include <doctest.h>

#include <unsupported/Eigen/KroneckerProduct>

#include "freespectra/pencil.hpp"
#include "freespectra/random.hpp"
#include "helpers.hpp"

using namespace freespectra;
using fs_test::mat;

TEST_CASE("disc pencil: membership and boundary along a ray") {
    // L(x) = [[1, x], [conj x, 1]], so D(1) is the closed unit disc
    Pencil P({mat({{0, 1}, {0, 0}})});
    MatrixTuple inside({mat({{0.5}})}), edge({mat({{cplx(0, 1)}})}), outside({mat({{1.5}})});
    CHECK(membership(P, inside).region == Region::interior);
    CHECK(membership(P, edge).region == Region::boundary);
    CHECK(membership(P, outside).region == Region::outside);
    auto hit = boundary_point(P, MatrixTuple({mat({{cplx(3, 4)}})}));
    CHECK(hit.t == doctest::Approx(0.2).epsilon(1e-11));
    CHECK(std::abs(hit.min_eig) < 1e-10);
}

TEST_CASE("pencil evaluation is the Kronecker sum and is Hermitian") {
    Rng rng(3);
    Pencil P({rng.gaussian(3, 3), rng.gaussian(3, 3)});
    MatrixTuple X = rng.tuple(2, 2);
    Mat L = eval_pencil(P, X);
    CHECK(max_abs(L - L.adjoint()) < 1e-14);
    Mat lam = lambda_eval(P, X);
    Mat K = Eigen::kroneckerProduct(P.A[0], X[0]).eval() + Eigen::kroneckerProduct(P.A[1], X[1]).eval();
    CHECK(max_abs(lam - K) < 1e-14);
}

TEST_CASE("a definite direction proves unboundedness") {
    Pencil P({mat({{1, 0}, {0, 2}})});
    auto r = boundedness_evidence(P, 50, 1);
    CHECK_FALSE(r.passed());
    CHECK(r.counterexample.has_value());
    CHECK_THROWS_AS(boundary_point(P, MatrixTuple({mat({{1.0}})})), UnboundedDirection);
    Pencil disc({mat({{0, 1}, {0, 0}})});
    CHECK(boundedness_evidence(disc, 50, 1).passed());
}

TEST_CASE("affine normalisation conjugates the pencil") {
    Rng rng(4);
    Pencil B({0.3 * rng.gaussian(3, 3), 0.3 * rng.gaussian(3, 3)});
    Vec b(2);
    b << cplx(0.1, 0.05), cplx(-0.2, 0);
    Mat M = Mat::Identity(2, 2) + 0.2 * rng.gaussian(2, 2);
    auto n = affine_normalize(B, b, M, 4, 8);
    CHECK(n.conjugation_residual < 1e-12);
    // ell_inv undoes ell
    MatrixTuple X = rng.tuple(2, 2);
    MatrixTuple back = n.ell_inv.apply(n.ell.apply(X));
    CHECK((back - X).max_abs() < 1e-12);
    CHECK_THROWS_AS(affine_normalize(B, b, Mat::Zero(2, 2)), InvalidInput);
}
