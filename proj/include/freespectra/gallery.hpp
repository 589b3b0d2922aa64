#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "freespectra/certify.hpp"
#include "freespectra/convexotonic.hpp"
#include "freespectra/pencil.hpp"

namespace freespectra::gallery {

struct PairSpec {
    Pencil A;
    Mat C;
    Pencil B;  // C A, or U* C A U when U is given
    Tuple Xi;
    std::string source;
};

// Unitary with every eigenvalue at distance > margin from 1.
Mat unitary_with_margin(Eigen::Index d, double margin, std::uint64_t seed);

// A_j = (C - I)^{-1} R_j; R must span an algebra.
PairSpec build_pair(const Tuple& R, const Mat& C, double margin = 0.1, const std::optional<Mat>& U = std::nullopt,
                    const std::string& source = "");

struct PQFamily {
    Mat Q, P12, P21, P22;
    Pencil A;  // A_1 = [[0, P12], [P21, P22]], A_2 = [[0, 0], [0, Q]]
    BoundednessReport q_bounded;
};

// Validates invertibility, P21 P12 = -2 Q and bounded D_Q(1); errors name the failed constraint.
PQFamily pq_build(const Mat& Q, const Mat& P12, const Mat& P21, const Mat& P22, int bounded_samples = 200,
                  std::uint64_t seed = 0);

// The example matrices: P12 = [[1,1],[1,0]], P21 = [[2,-2],[0,1]], Q = -P21 P12 / 2.
// span_p22 selects P22 = P12* P12 + P21 P21* instead of I.
PQFamily pq_example(bool span_p22 = false);

Mat v_gamma(cplx gamma);

struct PQMap {
    cplx gamma;
    Pencil B;          // V_gamma A
    Tuple Xi;          // Xi_1 = [[0, -2(gamma - 1)], [0, 0]], Xi_2 = 0
    FreeSeries p;      // (x1, x2 + 2(1 - gamma) x1^2)
    double extraction_residual = 0;  // extract_convexotonic(A, V_gamma) vs the formula
    double series_residual = 0;      // map_series(Xi) vs the closed form
};

PQMap pq_map(const PQFamily& fam, cplx gamma);

struct BoundaryTransport {
    int points = 0;
    std::vector<int> levels;
    double max_source_eig = 0;  // |lambda_min L_A(X)| at the sampled boundary points
    double max_image_eig = 0;   // |lambda_min L_B(p(X))|
    bool passed(double tol = 1e-7) const { return points > 0 && max_image_eig < tol; }
};

// Samples boundary points of D_A along random directions and maps them with the row map p.
BoundaryTransport boundary_to_boundary(const Pencil& A, const Pencil& B, const FreeSeries& p, int per_level,
                                       const std::vector<int>& levels, std::uint64_t seed);

struct CCondition {
    bool holds = false;
    std::vector<cplx> candidates;  // c != 0 with P21* + c P12 singular
    std::optional<cplx> witness;   // one with P21 - c P12 invertible
    double witness_sigma = 0;
};

// There is c != 0 with P21* + c P12 singular and P21 - c P12 invertible. Reported, never asserted.
CCondition pq_c_condition(const PQFamily& fam, double tol = 1e-10);

struct SpanCoefficients {
    cplx alpha1;
    cplx alpha3;
    double residual = 0;
};

// P22 = alpha1 Q + alpha3 (P12* P12 + P21 P21*); throws InvalidInput when P22 is outside that span.
SpanCoefficients pq_span(const PQFamily& fam, double tol = 1e-12);

// s_phi as a row series with constant terms.
FreeSeries pq_automorphism(const PQFamily& fam, cplx phi);
FreeSeries s_phi_series(cplx alpha1, cplx alpha3, cplx phi);

struct GroupLawReport {
    int pairs = 0;
    double max_residual = 0;  // s_phi(s_psi(x)) - s_{phi psi}
    double identity_residual = 0;
};

GroupLawReport check_group_law(cplx alpha1, cplx alpha3, int pairs, std::uint64_t seed);

// Linear independence (smallest singular value of the stacked matrices).
double independence_margin(const std::vector<Mat>& mats);

struct AffineSearch {
    int trials = 0;
    double best_residual = 0;  // smallest invariant mismatch found
    bool consistent_with_inequivalence = false;
};

// Evidence only: fits affine changes of variables x -> b + x M that would make
// D_A and D_B unitarily equivalent and reports the smallest mismatch of word traces.
AffineSearch affine_equivalence_search(const Pencil& A, const Pencil& B, int trials, std::uint64_t seed,
                                       int iterations = 200);

// Scalar points of D_A(1) at the boundary along t * dir.
MatrixTuple random_boundary_point(const Pencil& A, int level, std::uint64_t seed, std::uint64_t counter);

}  // namespace freespectra::gallery
