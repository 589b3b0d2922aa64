#include "freespectra/pencil.hpp"

#include <algorithm>
#include <cmath>

#include <unsupported/Eigen/KroneckerProduct>

#include "freespectra/random.hpp"

namespace freespectra {

Pencil::Pencil(std::vector<Mat> a) : A(std::move(a)) {
    for (const auto& m : A)
        if (m.rows() != m.cols() || m.rows() != A[0].rows())
            throw ShapeMismatch("pencil coefficients must be square of a common size");
}

double Pencil::max_abs() const {
    double r = 0;
    for (const auto& m : A) r = std::max(r, freespectra::max_abs(m));
    return r;
}

HereditaryPoly Pencil::as_hereditary() const {
    HereditaryPoly h(g(), d(), d());
    h.set(Word(), Word(), Mat::Identity(d(), d()));
    for (int j = 0; j < g(); ++j) {
        h.add_to(Word(), Word::letter(j), A[static_cast<size_t>(j)]);
        h.add_to(Word::letter(j), Word(), A[static_cast<size_t>(j)].adjoint());
    }
    return h;
}

Mat lambda_eval(const Pencil& P, const MatrixTuple& X) {
    if (P.g() != X.g()) throw VariableMismatch("pencil and tuple disagree on g");
    Mat r = Mat::Zero(P.d() * X.n(), P.d() * X.n());
    for (int j = 0; j < P.g(); ++j) r += Eigen::kroneckerProduct(P.A[static_cast<size_t>(j)], X[j]).eval();
    return r;
}

Mat lambda_eval(const Pencil& P, const Vec& alpha) {
    if (P.g() != alpha.size()) throw VariableMismatch("pencil and point disagree on g");
    Mat r = Mat::Zero(P.d(), P.d());
    for (int j = 0; j < P.g(); ++j) r += alpha(j) * P.A[static_cast<size_t>(j)];
    return r;
}

Mat eval_pencil(const Pencil& P, const MatrixTuple& X) {
    Mat lam = lambda_eval(P, X);
    Mat L = Mat::Identity(lam.rows(), lam.cols()) + lam + lam.adjoint();
    return 0.5 * (L + L.adjoint());
}

double min_eigenvalue(const Mat& hermitian) {
    Mat h = 0.5 * (hermitian + hermitian.adjoint());
    Eigen::SelfAdjointEigenSolver<Mat> es(h, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw Error("Hermitian eigensolver failed");
    return es.eigenvalues()(0);
}

std::string to_string(Region r) {
    switch (r) {
        case Region::interior: return "interior";
        case Region::boundary: return "boundary";
        case Region::outside: return "outside";
    }
    return "?";
}

Membership membership(const Pencil& P, const MatrixTuple& X, double tol) {
    double lam = min_eigenvalue(eval_pencil(P, X));
    Region r = lam > tol ? Region::interior : (lam >= -tol ? Region::boundary : Region::outside);
    return {r, lam};
}

BoundaryHit boundary_point(const Pencil& P, const MatrixTuple& direction, double tol, double t_max) {
    if (direction.max_abs() == 0) throw InvalidInput("boundary_point: zero direction");
    auto lam = [&](double t) { return min_eigenvalue(eval_pencil(P, direction.scaled(t))); };

    double lo = 0, hi = 1;
    while (lam(hi) >= 0) {
        lo = hi;
        hi *= 2;
        if (hi > t_max) throw UnboundedDirection("ray stays inside the spectrahedron up to t_max");
    }
    while (hi - lo > 1e-12 * hi) {
        double mid = 0.5 * (lo + hi);
        if (lam(mid) >= 0)
            lo = mid;
        else
            hi = mid;
    }
    double t = 0.5 * (lo + hi);
    MatrixTuple pt = direction.scaled(t);
    double m = lam(t);
    if (std::abs(m) > tol) throw Error("boundary_point: bisection did not reach the boundary tolerance");
    return {t, pt, m};
}

BoundednessReport boundedness_evidence(const Pencil& P, int samples, std::uint64_t seed) {
    if (samples < 1) throw InvalidInput("boundedness_evidence: need at least one sample");
    std::vector<double> margin(static_cast<size_t>(samples));
    std::vector<Vec> dirs(static_cast<size_t>(samples));
    const double scale = std::max(1.0, P.max_abs());
    parallel_for(static_cast<size_t>(samples), [&](size_t i) {
        Rng rng(seed, i);
        Vec a = rng.unit_vector(P.g());
        Mat lam = lambda_eval(P, a);
        Mat h = lam + lam.adjoint();
        Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (h + h.adjoint()), Eigen::EigenvaluesOnly);
        const auto& ev = es.eigenvalues();
        margin[i] = std::min(-ev(0), ev(ev.size() - 1)) / scale;
        dirs[i] = a;
    });

    BoundednessReport rep;
    rep.samples = samples;
    rep.worst_margin = margin[0];
    for (size_t i = 0; i < margin.size(); ++i) {
        rep.worst_margin = std::min(rep.worst_margin, margin[i]);
        if (margin[i] > 1e-12)
            ++rep.indefinite;
        else if (!rep.counterexample)
            rep.counterexample = dirs[i];
    }
    return rep;
}

MatrixTuple AffineMap::apply(const MatrixTuple& X) const {
    if (X.g() != linear.rows()) throw VariableMismatch("affine map and tuple disagree on g");
    const auto n = X.n();
    MatrixTuple r;
    for (Eigen::Index i = 0; i < linear.cols(); ++i) {
        Mat y = shift(i) * Mat::Identity(n, n);
        for (int j = 0; j < X.g(); ++j) y += linear(j, i) * X[j];
        r.X.push_back(std::move(y));
    }
    return r;
}

AffineMap AffineMap::then(const AffineMap& next) const {
    // next(c + xL) = c' + (c + xL) L'
    return {next.shift + (shift.transpose() * next.linear).transpose(), linear * next.linear};
}

AffineMap AffineMap::identity(int g) {
    return {Vec::Zero(g), Mat::Identity(g, g)};
}

AffineNormalization affine_normalize(const Pencil& B, const Vec& b, const Mat& M, std::uint64_t seed, int samples) {
    const int g = B.g();
    if (b.size() != g || M.rows() != g || M.cols() != g) throw ShapeMismatch("affine_normalize: b and M must match g");
    Eigen::FullPivLU<Mat> lu(M);
    if (!lu.isInvertible()) throw InvalidInput("affine_normalize: M is singular");
    Mat Minv = lu.inverse();

    Mat lam = lambda_eval(B, b);
    Mat Lb = Mat::Identity(B.d(), B.d()) + lam + lam.adjoint();
    Lb = 0.5 * (Lb + Lb.adjoint());
    Eigen::SelfAdjointEigenSolver<Mat> es(Lb);
    if (es.eigenvalues()(0) <= 1e-12) throw OutsideDomain("affine_normalize: L_B(b) is not positive definite");
    Mat H = es.operatorSqrt();
    Mat Hinv = es.operatorInverseSqrt();

    AffineNormalization out;
    out.H = H;
    for (int i = 0; i < g; ++i) {
        Mat s = Mat::Zero(B.d(), B.d());
        for (int j = 0; j < g; ++j) s += M(i, j) * B.A[static_cast<size_t>(j)];
        out.F.A.push_back(Hinv * s * Hinv);
    }
    out.ell = {-(b.transpose() * Minv).transpose(), Minv};
    out.ell_inv = {b, M};

    Rng rng(seed, 0x61ff);
    for (int s = 0; s < samples; ++s) {
        MatrixTuple X = rng.tuple(g, 2);
        Mat lhs = eval_pencil(out.F, out.ell.apply(X));
        Mat K = Eigen::kroneckerProduct(Hinv, Mat::Identity(2, 2)).eval();
        Mat rhs = K * eval_pencil(B, X) * K;
        out.conjugation_residual = std::max(out.conjugation_residual, max_abs(lhs - rhs));
    }
    return out;
}

}  // namespace freespectra
