#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "freespectra/pencil.hpp"

namespace freespectra {

constexpr double kProbeGap = 1e-6;

struct SingularProbe {
    MatrixTuple alpha;       // rescaled so that ||Lambda_A(alpha)|| = 1
    Vec u;                   // unit kernel vector of I - T* T (or of I - T T* for left probes)
    std::vector<Vec> parts;  // u = sum_a parts[a] (x) e_a
    double gap = 0;          // distance from the top eigenvalue of T* T to the next one
    double kernel_eig = 0;   // lambda_min(I - T* T)
    double pairing_residual = 0;  // [[I, T], [T*, I]] applied to (-T u) + u
};

// Right singular probe: kernel of I - T* T with T = Lambda_A(alpha).
// With left = true the kernel of I - T T* is used instead.
// Throws ProbeRejected when Lambda_A(alpha) = 0 or the top singular value is not simple.
SingularProbe top_singular_probe(const Pencil& A, const MatrixTuple& alpha, bool left = false,
                                 double gap_tol = kProbeGap);

struct HyperbasisResult {
    bool hyperbasis = false;
    double min_sigma = 0;           // smallest sigma_min over the d-subsets
    std::vector<int> worst_subset;  // indices attaining it
};

// True iff every dim-subset of vectors has sigma_min > tol; dim defaults to the ambient size.
HyperbasisResult hyperbasis_check(const std::vector<Vec>& vectors, double tol = 1e-8, int dim = -1);

struct ProbeRecord {
    int level = 1;
    bool left = false;
    double gap = 0;
    double kernel_eig = 0;
    double pairing_residual = 0;
    bool accepted = false;
};

struct GenericityReport {
    std::string condition;  // "sv", "eig", "star"
    int budget = 0;
    int probes_used = 0;
    int rejected = 0;
    std::vector<ProbeRecord> probes;     // accepted probes only
    std::vector<Vec> right_witnesses;    // u^j (sv) or the hyperbasis from the decompositions (eig)
    std::vector<Vec> left_witnesses;     // v^k (sv) or spanning mu^j_a (star)
    double right_min_sigma = 0;
    double left_min_sigma = 0;
    int target_dim = 0;                  // d, or dim ker(A)^perp / dim rg(A) for weak variants
    bool weak_only = false;              // witnessed only for the weak variant
    bool witnessed = false;
    std::string verdict;
    std::string explanation;
    double max_pairing_residual = 0;
    double max_kernel_eig = 0;
};

// Intro form: scalar probes alpha, beta in C^g.
GenericityReport check_sv_generic(const Pencil& A, int probe_budget, std::uint64_t seed);

// Matrix-level probes. mode "eig" assembles {u^j_a} and looks for a hyperbasis of ker(A)^perp,
// mode "star" checks that {mu^j_a} spans C^d (or rg(A) for the weak variant).
// Without user probes, random probes at the given levels are drawn.
GenericityReport check_eig_star_generic(const Pencil& A, const std::string& mode,
                                        const std::vector<MatrixTuple>& probes, int probe_budget,
                                        std::uint64_t seed, const std::vector<int>& levels = {});

// Orthonormal basis of ker(A)^perp = rg(A*) and of rg(A).
Mat corange_basis(const Pencil& A, double tol = 1e-10);
Mat range_basis(const Pencil& A, double tol = 1e-10);

}  // namespace freespectra
