#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "freespectra/nc_core.hpp"

namespace freespectra {

struct Pencil {
    std::vector<Mat> A;

    Pencil() = default;
    explicit Pencil(std::vector<Mat> a);

    int g() const { return static_cast<int>(A.size()); }
    Eigen::Index d() const { return A.empty() ? 0 : A[0].rows(); }
    double max_abs() const;
    // L_A as a hereditary polynomial: I, A_j at (1, x_j), A_j* at (x_j, 1)
    HereditaryPoly as_hereditary() const;
};

// sum_j A_j (x) X_j
Mat lambda_eval(const Pencil& P, const MatrixTuple& X);
// sum_j alpha_j A_j at a scalar point
Mat lambda_eval(const Pencil& P, const Vec& alpha);
Mat eval_pencil(const Pencil& P, const MatrixTuple& X);
double min_eigenvalue(const Mat& hermitian);

enum class Region { interior, boundary, outside };
std::string to_string(Region r);

struct Membership {
    Region region;
    double min_eig;
};

Membership membership(const Pencil& P, const MatrixTuple& X, double tol = 1e-8);

struct BoundaryHit {
    double t;
    MatrixTuple point;
    double min_eig;
};

// Walks the ray t*direction out of D_A; throws UnboundedDirection when the
// ray stays inside up to t_max.
BoundaryHit boundary_point(const Pencil& P, const MatrixTuple& direction, double tol = 1e-8, double t_max = 1e8);

struct BoundednessReport {
    int samples = 0;
    int indefinite = 0;
    // smallest value of min(-lambda_min, lambda_max) seen over the samples
    double worst_margin = 0;
    std::optional<Vec> counterexample;
    bool passed() const { return samples > 0 && indefinite == samples; }
};

// One-sided: a definite Hermitian part proves D_A(1) unbounded, while an
// all-indefinite sample is only evidence of boundedness.
BoundednessReport boundedness_evidence(const Pencil& P, int samples, std::uint64_t seed);

// x -> shift + x * linear, acting on row tuples
struct AffineMap {
    Vec shift;   // length g_out
    Mat linear;  // g_in x g_out

    MatrixTuple apply(const MatrixTuple& X) const;
    AffineMap then(const AffineMap& next) const;  // next(this(x))
    static AffineMap identity(int g);
};

struct AffineNormalization {
    Pencil F;
    Mat H;  // positive square root of L_B(b)
    AffineMap ell;
    AffineMap ell_inv;
    double conjugation_residual = 0;  // sampled check of the congruence identity
};

AffineNormalization affine_normalize(const Pencil& B, const Vec& b, const Mat& M, std::uint64_t seed = 0,
                                     int samples = 8);

}  // namespace freespectra
