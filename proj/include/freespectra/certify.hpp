#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "freespectra/convexotonic.hpp"
#include "freespectra/pencil.hpp"

namespace freespectra {

// One-term certificate L_B(p(x)) = W(x)* L_A(x) W(x) with
// W(x) = (I - Lambda_R(x))^{-1} W0, R = (C - I) A, G(x) = W0* C Lambda_A(x) W(x).
struct Certificate {
    Pencil A;
    Mat C;
    Mat W0;
    int degree = 0;
    Tuple R;
    FreeSeries W;  // d x e
    FreeSeries G;  // e x e
    Tuple B;       // W0* C A_j W0
    std::optional<Tuple> Xi;

    int g() const { return A.g(); }
};

Certificate build_certificate(const Pencil& A, const Mat& C, const Mat& W0, int N, double tol = 1e-12);

struct RelationReport {
    int degree = 0;
    double cross = 0;     // W_b* A_k* W_{x_j a} + W_{x_k b}* A_j W_a + W_{x_k b}* W_{x_j a}
    double linear = 0;    // W_0* (A_k W_a + W_{x_k a}) - G_{x_k a}, plus G_0
    double constant = 0;  // W_0* W_0 - I
    std::string worst;    // location of the largest residual
    double max() const { return std::max(cross, std::max(linear, constant)); }
    bool passed(double tol = 1e-10) const { return max() < tol; }
};

RelationReport verify_relations(const Certificate& cert, int N);

struct NilpotentReport {
    int fock_order = 0;
    Eigen::Index fock_dim = 0;
    double fock_residual = 0;
    double random_residual = 0;
    int random_samples = 0;
    double max() const { return std::max(fock_residual, random_residual); }
    bool passed(double tol = 1e-10) const { return max() < tol; }
};

// Evaluates I + G + G* against W* L_A W on fock_shift_tuple(g, N) and on
// random strictly upper triangular tuples of size N + 1, using the stored series.
NilpotentReport verify_on_nilpotents(const Certificate& cert, int N, std::uint64_t seed = 0, int random_samples = 20);

struct SampleReport {
    int samples = 0;
    int skipped = 0;
    double radius = 0;
    double radius_bound = 0;   // 1 / (max ||R_j|| g)
    double identity_residual = 0;  // I + G + G* - W* L_A W
    double map_residual = -1;      // G(X) - Lambda_B(p(X)), -1 without Xi
    double max() const { return std::max(identity_residual, map_residual); }
    bool passed(double tol = 1e-8) const { return samples > skipped && max() < tol; }
};

SampleReport verify_on_samples(const Certificate& cert, int samples, double radius, std::uint64_t seed,
                               int level = 2);

struct RecursionReport {
    int degree = 0;
    double w_recursion = 0;  // W_{x_j a} - (C - I) A_j W_a
    double w_closed = 0;     // W_a - R^a W0
    double g_formula = 0;    // G_{x_j a} - W0* C A_j R^a W0
    double max() const { return std::max(w_recursion, std::max(w_closed, g_formula)); }
};

RecursionReport verify_recursion(const Certificate& cert, int N);

struct Extraction {
    bool ok = false;
    std::string reason;
    Tuple Xi;
    Tuple B;  // C A
    FreeSeries p;
    double residual = 0;               // least squares residual of A_k (C - I) A_j
    double convexotonic_residual = 0;
    double module_residual = 0;        // A_k R^a - sum_t (Xi^a)_{k,t} A_t, |a| <= 4
};

Extraction extract_convexotonic(const Pencil& A, const Mat& C, double tol = 1e-8, int N = 8);

struct PolynomialReport {
    bool r_nilpotent = false;
    int r_order = 0;
    int w_degree = -1;  // -1: W is not a polynomial
    int g_degree = -1;
    bool xi_known = false;
    bool xi_nilpotent = false;
    int xi_order = 0;
    int p_degree = -1;
    bool consistent = false;    // R nilpotent iff W polynomial iff G polynomial
    bool order_bounds = true;   // nu <= mu <= nu + 1 and deg p = nu
};

PolynomialReport check_polynomial_iff_nilpotent(const Certificate& cert);

struct HereditaryCertificate {
    Pencil L;
    HereditaryPoly h;
    std::vector<FreeSeries> squares;  // h_k, each l x nu
    std::vector<FreeSeries> weights;  // f_j, each d x nu
};

struct HereditaryReport {
    bool valid = false;
    double max_mismatch = 0;
    Word worst_left;
    Word worst_right;
    std::string shape;   // "weights deg <= d" or "weights deg <= d+1"
    double min_sample_eig = 0;
    int samples = 0;
};

// Expands sum h_k* h_k + sum f_j* L f_j and compares with h coefficientwise.
HereditaryReport verify_hereditary(const HereditaryCertificate& hc, double tol = 1e-12, std::uint64_t seed = 0,
                                   int samples = 20);
HereditaryPoly expand_hereditary(const HereditaryCertificate& hc);

}  // namespace freespectra
