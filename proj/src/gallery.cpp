#include "freespectra/gallery.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "freespectra/random.hpp"

namespace freespectra::gallery {

namespace {

double sigma_min(const Mat& M) {
    Eigen::JacobiSVD<Mat> svd(M);
    return svd.singularValues()(svd.singularValues().size() - 1);
}

void require_invertible(const Mat& M, const char* name) {
    if (M.rows() != M.cols()) throw InvalidInput(std::string(name) + " must be square");
    if (!(sigma_min(M) > 1e-12 * std::max(1.0, opnorm(M)))) throw InvalidInput(std::string(name) + " is not invertible");
}

Mat block(const Mat& a, const Mat& b, const Mat& c, const Mat& d) {
    Mat out(a.rows() + c.rows(), a.cols() + b.cols());
    out << a, b, c, d;
    return out;
}

Mat row2(cplx a, cplx b) {
    Mat r(1, 2);
    r << a, b;
    return r;
}

}  // namespace

Mat unitary_with_margin(Eigen::Index d, double margin, std::uint64_t seed) {
    if (margin < 0 || margin >= 2) throw InvalidInput("margin must lie in [0, 2)");
    Rng rng(seed, 0xc0de);
    // |1 - e^{i theta}| = 2 sin(theta / 2)
    const double t0 = 2 * std::asin(std::min(1.0, margin / 2)) + 1e-3;
    const double two_pi = 2 * std::numbers::pi;
    Vec eig(d);
    for (Eigen::Index i = 0; i < d; ++i) eig(i) = std::polar(1.0, rng.uniform(t0, two_pi - t0));
    Mat W = rng.unitary(d);
    return W * eig.asDiagonal() * W.adjoint();
}

PairSpec build_pair(const Tuple& R, const Mat& C, double margin, const std::optional<Mat>& U, const std::string& source) {
    if (R.empty()) throw InvalidInput("build_pair: empty algebra basis");
    const auto d = R[0].rows();
    if (C.rows() != d || C.cols() != d) throw ShapeMismatch("build_pair: C must match the algebra");
    if (max_abs(C.adjoint() * C - Mat::Identity(d, d)) > 1e-12) throw InvalidInput("build_pair: C is not unitary");
    Eigen::ComplexEigenSolver<Mat> es(C, false);
    double gap = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < d; ++i) gap = std::min(gap, std::abs(1.0 - es.eigenvalues()(i)));
    if (!(gap > margin)) {
        std::ostringstream os;
        os << "build_pair: eigenvalue of C within " << gap << " of 1 (margin " << margin << ")";
        throw InvalidInput(os.str());
    }
    PairSpec out;
    try {
        out.Xi = structure_matrices(R, R).Xi;
    } catch (const NotAModule&) {
        throw NotAModule("build_pair: R does not span an algebra");
    }
    const Mat CmIinv = (C - Mat::Identity(d, d)).inverse();
    for (const auto& r : R) {
        out.A.A.push_back(CmIinv * r);
        Mat b = C * out.A.A.back();
        out.B.A.push_back(U ? Mat(U->adjoint() * b * *U) : b);
    }
    out.C = C;
    out.source = source;
    return out;
}

PQFamily pq_build(const Mat& Q, const Mat& P12, const Mat& P21, const Mat& P22, int bounded_samples,
                  std::uint64_t seed) {
    const auto n = Q.rows();
    for (const Mat* m : {&P12, &P21, &P22})
        if (m->rows() != n || m->cols() != n) throw ShapeMismatch("pq_build: P12, P21, P22 must have the size of Q");
    require_invertible(Q, "Q");
    require_invertible(P12, "P12");
    require_invertible(P21, "P21");
    require_invertible(P22, "P22");
    const double mismatch = max_abs(P21 * P12 + 2.0 * Q);
    if (mismatch > 1e-12 * std::max(1.0, max_abs(Q))) {
        std::ostringstream os;
        os << "pq_build: P21 P12 + 2 Q != 0 (residual " << mismatch << ")";
        throw InvalidInput(os.str());
    }
    PQFamily fam{Q, P12, P21, P22, {}, {}};
    fam.q_bounded = boundedness_evidence(Pencil({Q}), bounded_samples, seed);
    if (!fam.q_bounded.passed()) throw InvalidInput("pq_build: D_Q(1) is unbounded (definite direction found)");
    const Mat Z = Mat::Zero(n, n);
    fam.A = Pencil({block(Z, P12, P21, P22), block(Z, Z, Z, Q)});
    return fam;
}

PQFamily pq_example(bool span_p22) {
    Mat P12(2, 2), P21(2, 2);
    P12 << 1, 1, 1, 0;
    P21 << 2, -2, 0, 1;
    Mat Q = -0.5 * P21 * P12;
    Mat P22 = span_p22 ? Mat(P12.adjoint() * P12 + P21 * P21.adjoint()) : Mat(Mat::Identity(2, 2));
    return pq_build(Q, P12, P21, P22);
}

Mat v_gamma(cplx gamma) {
    Mat V = Mat::Identity(4, 4);
    V(0, 0) = gamma;
    V(1, 1) = gamma;
    return V;
}

PQMap pq_map(const PQFamily& fam, cplx gamma) {
    if (std::abs(std::abs(gamma) - 1.0) > 1e-12) throw InvalidInput("pq_map: gamma must be unimodular");
    if (fam.A.d() != 4) throw ShapeMismatch("pq_map: V_gamma is defined for 2 x 2 blocks");
    PQMap out;
    out.gamma = gamma;
    const Mat V = v_gamma(gamma);
    for (const auto& a : fam.A.A) out.B.A.push_back(V * a);
    Mat X1 = Mat::Zero(2, 2);
    X1(0, 1) = -2.0 * (gamma - 1.0);
    out.Xi = {X1, Mat::Zero(2, 2)};

    out.p = FreeSeries(2, 1, 2, 4);
    out.p.set(Word::letter(0), row2(1, 0));
    out.p.set(Word::letter(1), row2(0, 1));
    out.p.set(Word({0, 0}), row2(0, 2.0 * (1.0 - gamma)));
    out.series_residual = coeff_distance(out.p, map_series(out.Xi, 4).p);

    Extraction ex = extract_convexotonic(fam.A, V);
    if (!ex.ok) throw NotAModule("pq_map: extraction failed: " + ex.reason);
    for (int j = 0; j < 2; ++j)
        out.extraction_residual = std::max(out.extraction_residual, max_abs(ex.Xi[static_cast<size_t>(j)] - out.Xi[static_cast<size_t>(j)]));
    return out;
}

MatrixTuple random_boundary_point(const Pencil& A, int level, std::uint64_t seed, std::uint64_t counter) {
    Rng rng(seed, counter);
    MatrixTuple dir = rng.tuple(A.g(), level);
    return boundary_point(A, dir).point;
}

BoundaryTransport boundary_to_boundary(const Pencil& A, const Pencil& B, const FreeSeries& p, int per_level,
                                       const std::vector<int>& levels, std::uint64_t seed) {
    BoundaryTransport rep;
    rep.levels = levels;
    std::vector<FreeSeries> coords;
    for (Eigen::Index i = 0; i < p.cols(); ++i) coords.push_back(map_coordinate(p, static_cast<int>(i)));
    const std::size_t total = levels.size() * static_cast<std::size_t>(per_level);
    std::vector<double> src(total), img(total);
    parallel_for(total, [&](std::size_t k) {
        const int level = levels[k / static_cast<std::size_t>(per_level)];
        MatrixTuple X = random_boundary_point(A, level, seed, k);
        src[k] = std::abs(min_eigenvalue(eval_pencil(A, X)));
        WordPowers powers(X);
        MatrixTuple Y;
        for (const auto& c : coords) Y.X.push_back(eval_series(c, powers, X.n()));
        img[k] = std::abs(min_eigenvalue(eval_pencil(B, Y)));
    });
    rep.points = static_cast<int>(total);
    for (std::size_t k = 0; k < total; ++k) {
        rep.max_source_eig = std::max(rep.max_source_eig, src[k]);
        rep.max_image_eig = std::max(rep.max_image_eig, img[k]);
    }
    return rep;
}

CCondition pq_c_condition(const PQFamily& fam, double tol) {
    CCondition out;
    // det(P21* + c P12) = 0 iff -c is an eigenvalue of P12^{-1} P21*
    Eigen::ComplexEigenSolver<Mat> es(fam.P12.inverse() * fam.P21.adjoint(), false);
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
        const cplx c = -es.eigenvalues()(i);
        if (std::abs(c) <= tol) continue;
        out.candidates.push_back(c);
        const double s = sigma_min(fam.P21 - c * fam.P12);
        if (s > tol && (!out.witness || s > out.witness_sigma)) {
            out.witness = c;
            out.witness_sigma = s;
        }
    }
    out.holds = out.witness.has_value();
    return out;
}

SpanCoefficients pq_span(const PQFamily& fam, double tol) {
    const Mat S = fam.P12.adjoint() * fam.P12 + fam.P21 * fam.P21.adjoint();
    const auto m = fam.Q.size();
    Mat M(m, 2);
    M.col(0) = fam.Q.reshaped();
    M.col(1) = S.reshaped();
    Vec rhs = fam.P22.reshaped();
    Vec c = M.jacobiSvd(Eigen::ComputeThinU | Eigen::ComputeThinV).solve(rhs);
    SpanCoefficients out{c(0), c(1), (M * c - rhs).cwiseAbs().maxCoeff()};
    if (out.residual > tol * std::max(1.0, max_abs(fam.P22)))
        throw InvalidInput("pq_automorphism: P22 is not in the span of Q and P12* P12 + P21 P21*");
    return out;
}

FreeSeries s_phi_series(cplx alpha1, cplx alpha3, cplx phi) {
    if (std::abs(std::abs(phi) - 1.0) > 1e-12) throw InvalidInput("s_phi: phi must be unimodular");
    const cplx a3 = std::conj(alpha3);
    const cplx delta = a3 * (1.0 - phi);
    const cplx eta = -(1.0 - phi) * (4.0 * a3 * phi - alpha1);
    FreeSeries s(2, 1, 2, 4);
    s.set(Word(), row2(delta, -delta * (2.0 * delta + alpha1)));
    s.set(Word::letter(0), row2(phi, eta));
    s.set(Word::letter(1), row2(0, 1));
    s.set(Word({0, 0}), row2(0, 2.0 * (1.0 - phi * phi)));
    s.prune();
    return s;
}

FreeSeries pq_automorphism(const PQFamily& fam, cplx phi) {
    SpanCoefficients c = pq_span(fam);
    return s_phi_series(c.alpha1, c.alpha3, phi);
}

GroupLawReport check_group_law(cplx alpha1, cplx alpha3, int pairs, std::uint64_t seed) {
    GroupLawReport rep;
    rep.pairs = pairs;
    rep.identity_residual = coeff_distance(s_phi_series(alpha1, alpha3, 1.0), identity_map(2, 4));
    for (int k = 0; k < pairs; ++k) {
        Rng rng(seed, 0x5eed + static_cast<std::uint64_t>(k));
        const cplx phi = std::polar(1.0, rng.uniform(0, 2 * std::numbers::pi));
        const cplx psi = std::polar(1.0, rng.uniform(0, 2 * std::numbers::pi));
        FreeSeries lhs = compose_maps(s_phi_series(alpha1, alpha3, phi), s_phi_series(alpha1, alpha3, psi), 4);
        rep.max_residual = std::max(rep.max_residual, coeff_distance(lhs, s_phi_series(alpha1, alpha3, phi * psi)));
    }
    return rep;
}

double independence_margin(const std::vector<Mat>& mats) {
    if (mats.empty()) return 0;
    Mat M(mats[0].size(), static_cast<Eigen::Index>(mats.size()));
    for (size_t i = 0; i < mats.size(); ++i) M.col(static_cast<Eigen::Index>(i)) = mats[i].reshaped().normalized();
    return sigma_min(M);
}

namespace {

// Traces of all words of length <= 3 in F_1..F_g, F_1*..F_g*; unitary invariants.
std::vector<cplx> trace_invariants(const Pencil& F) {
    std::vector<Mat> letters = F.A;
    for (const auto& a : F.A) letters.push_back(a.adjoint());
    std::vector<cplx> out;
    const auto d = F.d();
    std::vector<Mat> layer{Mat::Identity(d, d)};
    for (int len = 1; len <= 3; ++len) {
        std::vector<Mat> next;
        for (const auto& w : layer)
            for (const auto& l : letters) {
                next.push_back(w * l);
                out.push_back(next.back().trace());
            }
        layer = std::move(next);
    }
    return out;
}

double invariant_mismatch(const std::vector<cplx>& a, const std::vector<cplx>& b) {
    double r = 0;
    for (size_t i = 0; i < a.size(); ++i) r = std::max(r, std::abs(a[i] - b[i]) / (1.0 + std::abs(b[i])));
    return r;
}

}  // namespace

AffineSearch affine_equivalence_search(const Pencil& A, const Pencil& B, int trials, std::uint64_t seed,
                                       int iterations) {
    if (A.g() != B.g() || A.d() != B.d()) throw ShapeMismatch("affine_equivalence_search: pencils must match");
    const int g = A.g();
    const auto target = trace_invariants(B);
    auto objective = [&](const Vec& b, const Mat& M) {
        try {
            AffineNormalization n = affine_normalize(A, b, M, 0, 0);
            return invariant_mismatch(trace_invariants(n.F), target);
        } catch (const Error&) {
            return std::numeric_limits<double>::infinity();
        }
    };

    AffineSearch rep;
    rep.trials = trials;
    std::vector<double> best(static_cast<size_t>(trials), std::numeric_limits<double>::infinity());
    parallel_for(best.size(), [&](std::size_t t) {
        Rng rng(seed, 0xaff + t);
        Vec b = 0.1 * rng.gaussian(g, 1).col(0);
        Mat M = Mat::Identity(g, g) + 0.3 * rng.gaussian(g, g);
        double f = objective(b, M);
        double step = 0.1;
        // adaptive random search
        for (int it = 0; it < iterations; ++it) {
            Vec b2 = b + 0.1 * step * rng.gaussian(g, 1).col(0);
            Mat M2 = M + step * rng.gaussian(g, g);
            const double f2 = objective(b2, M2);
            if (f2 < f) {
                f = f2;
                b = b2;
                M = M2;
                step *= 1.2;
            } else {
                step *= 0.95;
            }
        }
        best[t] = f;
    });
    rep.best_residual = *std::min_element(best.begin(), best.end());
    rep.consistent_with_inequivalence = rep.best_residual > 1e-2;
    return rep;
}

}  // namespace freespectra::gallery
