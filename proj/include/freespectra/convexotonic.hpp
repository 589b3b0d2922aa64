#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "freespectra/nc_core.hpp"

namespace freespectra {

// A g-tuple of matrices. Used both for structure matrices Xi (g x g) and for
// algebra/module bases R, E (any common shape).
using Tuple = std::vector<Mat>;

struct ResidualCheck {
    bool pass = false;
    double max_residual = 0;
};

ResidualCheck is_convexotonic(const Tuple& Xi, double tol = 1e-10);

struct StructureResult {
    Tuple Xi;
    double residual = 0;      // worst least-squares residual of E_k R_j
    double sigma_ratio = 0;   // sigma_min / sigma_max of the stacked basis
};

// Solves E_k R_j = sum_s (Xi_j)_{k,s} E_s.
StructureResult structure_matrices(const Tuple& E, const Tuple& R, double tol = 1e-8);

// R_j = [[0, e_j^T], [0, Xi_j]] on C + C^g
Tuple embed_tuple(const Tuple& Xi);

// Products in letter order: Xi^{a_1 ... a_m} = Xi_{a_1} ... Xi_{a_m}.
Mat tuple_power(const Tuple& T, const Word& w);

// Maps are stored as row series: 1 x g coefficients.
struct MapSeries {
    FreeSeries p;
    FreeSeries q;
};

MapSeries map_series(const Tuple& Xi, int N);
FreeSeries identity_map(int g, int N);
// y (I - sign * Lambda_Xi(y))^{-1}; sign = +1 gives p, -1 gives q
FreeSeries apply_map(const Tuple& Xi, int sign, const FreeSeries& y);
// outer(inner(x)) for general row maps; exact when outer is polynomial
FreeSeries compose_maps(const FreeSeries& outer, const FreeSeries& inner, int N);
FreeSeries map_coordinate(const FreeSeries& row, int i);

struct MapValue {
    MatrixTuple value;
    double rcond = 0;
};

// Block resolvent evaluation; throws OutsideDomain when the resolvent is singular.
MapValue map_eval(const Tuple& Xi, const MatrixTuple& X, bool inverse = false);

struct InversePairReport {
    double series_pq = 0;  // coefficient residual of p(q(x)) - x
    double series_qp = 0;
    double sample_residual = 0;
    int samples = 0;
    int degree = 0;
    bool passed(double series_tol = 1e-10, double sample_tol = 1e-8) const {
        return series_pq < series_tol && series_qp < series_tol && sample_residual < sample_tol;
    }
};

InversePairReport verify_inverse_pair(const Tuple& Xi, int N, int samples, std::uint64_t seed, int level = 3,
                                      double radius = 0.1);

// Smallest k with every length-k product zero; nullopt if not nilpotent.
std::optional<int> nilpotency_order(const Tuple& T, double tol = 1e-12);

struct NilpotencyReport {
    bool nilpotent = false;
    int order = 0;      // nu when nilpotent
    int degree_p = -1;  // -1 when p is not a polynomial
    bool bound_holds = true;  // nu <= g and deg p = nu
};

NilpotencyReport nilpotency_and_degree(const Tuple& Xi);

Tuple direct_sum(const Tuple& a, const Tuple& b);
Tuple change_basis(const Tuple& Xi, const Mat& M);
// p(yM) M^{-1} from the original tuple, for comparing against change_basis
FreeSeries changed_map_series(const Tuple& Xi, const Mat& M, int N);

struct CompositionReport {
    FreeSeries composite;
    int degree = -1;           // -1: not a polynomial through the truncation
    bool linear_identity = false;
    Tuple Xi_c;                // read off the quadratic coefficients
    double mismatch = 0;       // composite vs map_series(Xi_c)
    bool convexotonic = false;
    std::string verdict;
};

// Probes whether pa(pb(x)) is again convexotonic.
CompositionReport composition_probe(const Tuple& Xa, const Tuple& Xb, int N = 8, double tol = 1e-10);

}  // namespace freespectra
