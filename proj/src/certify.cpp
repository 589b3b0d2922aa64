#include "freespectra/certify.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>

#include <unsupported/Eigen/KroneckerProduct>

#include "freespectra/random.hpp"

namespace freespectra {

namespace {

void require_unitary(const Mat& C, double tol) {
    if (C.rows() != C.cols()) throw InvalidInput("C must be square");
    if (max_abs(C.adjoint() * C - Mat::Identity(C.rows(), C.cols())) > tol)
        throw InvalidInput("C is not unitary within tolerance");
}

Mat kron(const Mat& a, const Mat& b) {
    return Eigen::kroneckerProduct(a, b).eval();
}

}  // namespace

Certificate build_certificate(const Pencil& A, const Mat& C, const Mat& W0, int N, double tol) {
    const auto d = A.d();
    if (C.rows() != d) throw ShapeMismatch("C must be d x d");
    require_unitary(C, tol * std::max(1.0, opnorm(C)));
    if (W0.rows() != d || W0.cols() > d) throw ShapeMismatch("W0 must be d x e with e <= d");
    if (max_abs(W0.adjoint() * W0 - Mat::Identity(W0.cols(), W0.cols())) > tol)
        throw InvalidInput("W0 is not an isometry within tolerance");
    if (N < 0) throw InvalidInput("certificate degree must be nonnegative");

    const int g = A.g();
    const auto e = W0.cols();
    Certificate cert;
    cert.A = A;
    cert.C = C;
    cert.W0 = W0;
    cert.degree = N;
    const Mat CmI = C - Mat::Identity(d, d);
    for (const auto& a : A.A) {
        cert.R.push_back(CmI * a);
        cert.B.push_back(W0.adjoint() * C * a * W0);
    }
    cert.W = FreeSeries(g, d, e, N);
    cert.G = FreeSeries(g, e, e, N);

    // W_{x_j a} = R_j W_a and G_{x_j a} = W0* C A_j W_a
    const Mat W0C = W0.adjoint() * C;
    std::function<void(const Word&, const Mat&)> walk = [&](const Word& a, const Mat& Wa) {
        cert.W.set(a, Wa);
        if (a.size() >= N) return;
        for (int j = 0; j < g; ++j) {
            const Word xa = Word::letter(j) + a;
            cert.G.set(xa, W0C * A.A[static_cast<size_t>(j)] * Wa);
            walk(xa, cert.R[static_cast<size_t>(j)] * Wa);
        }
    };
    walk(Word(), W0);

    Extraction ex = extract_convexotonic(A, C, 1e-8, 2);
    if (ex.ok) cert.Xi = ex.Xi;
    return cert;
}

RelationReport verify_relations(const Certificate& cert, int N) {
    if (N > cert.degree) throw InvalidInput("verify_relations: certificate series are shorter than the requested degree");
    const int g = cert.g();
    const auto d = cert.A.d();
    const auto e = cert.W0.cols();
    RelationReport rep;
    rep.degree = N;

    const Mat W0 = cert.W.coeff(Word());
    rep.constant = max_abs(W0.adjoint() * W0 - Mat::Identity(e, e));
    std::string worst_constant = "W_1* W_1 - I";

    // linear family, including the constant term of G
    std::string worst_linear = "G_1";
    double lin = max_abs(cert.G.coeff(Word()));
    const std::vector<Word> words = N >= 1 ? words_up_to(g, N - 1) : std::vector<Word>{};
    for (const auto& a : words) {
        for (int k = 0; k < g; ++k) {
            const Word xa = Word::letter(k) + a;
            Mat r = W0.adjoint() * (cert.A.A[static_cast<size_t>(k)] * cert.W.coeff(a) + cert.W.coeff(xa)) -
                    cert.G.coeff(xa);
            double v = max_abs(r);
            if (v > lin) {
                lin = v;
                worst_linear = "linear relation at " + xa.str();
            }
        }
    }
    rep.linear = lin;

    // cross family as a single Gram product U* J U with U_{a,j} = [A_j W_a; W_{x_j a}]
    const auto m = static_cast<Eigen::Index>(words.size()) * g;
    Mat U(2 * d, m * e);
    std::vector<std::pair<Word, int>> label;
    Eigen::Index c = 0;
    for (const auto& a : words) {
        for (int j = 0; j < g; ++j) {
            U.block(0, c * e, d, e) = cert.A.A[static_cast<size_t>(j)] * cert.W.coeff(a);
            U.block(d, c * e, d, e) = cert.W.coeff(Word::letter(j) + a);
            label.emplace_back(a, j);
            ++c;
        }
    }
    Mat J = Mat::Zero(2 * d, 2 * d);
    J.topRightCorner(d, d) = Mat::Identity(d, d);
    J.bottomLeftCorner(d, d) = Mat::Identity(d, d);
    J.bottomRightCorner(d, d) = Mat::Identity(d, d);
    const Mat JU = J * U;
    std::string worst_cross;
    double cross = 0;
    const Eigen::Index chunk = 256 * e;
    for (Eigen::Index start = 0; start < m * e; start += chunk) {
        const Eigen::Index width = std::min(chunk, m * e - start);
        Mat block = U.middleCols(start, width).adjoint() * JU;
        Eigen::Index bi = 0, bj = 0;
        double v = block.size() ? block.cwiseAbs().maxCoeff(&bi, &bj) : 0.0;
        if (v > cross) {
            cross = v;
            const auto& lb = label[static_cast<size_t>((start + bi) / e)];
            const auto& la = label[static_cast<size_t>(bj / e)];
            std::ostringstream os;
            os << "cross relation at beta=" << lb.first.str() << " k=" << lb.second + 1 << " alpha=" << la.first.str()
               << " j=" << la.second + 1;
            worst_cross = os.str();
        }
    }
    rep.cross = cross;

    rep.worst = worst_constant;
    double best = rep.constant;
    if (rep.linear > best) {
        best = rep.linear;
        rep.worst = worst_linear;
    }
    if (rep.cross > best) rep.worst = worst_cross;
    return rep;
}

NilpotentReport verify_on_nilpotents(const Certificate& cert, int N, std::uint64_t seed, int random_samples) {
    if (N > cert.degree) throw InvalidInput("verify_on_nilpotents: Fock order exceeds the certificate degree");
    if (N < 1) throw InvalidInput("verify_on_nilpotents: Fock order must be positive");
    const int g = cert.g();
    const auto e = cert.W0.cols();
    const FreeSeries W = cert.W.truncated(N);
    const FreeSeries G = cert.G.truncated(N);

    auto residual = [&](const MatrixTuple& X) {
        WordPowers powers(X);
        const auto n = X.n();
        Mat Wx = eval_series(W, powers, n);
        Mat Gx = eval_series(G, powers, n);
        Mat lhs = Mat::Identity(e * n, e * n) + Gx + Gx.adjoint();
        Mat rhs = Wx.adjoint() * eval_pencil(cert.A, X) * Wx;
        return max_abs(lhs - rhs);
    };

    NilpotentReport rep;
    rep.fock_order = N;
    MatrixTuple S = fock_shift_tuple(g, N);
    rep.fock_dim = S.n();
    rep.fock_residual = residual(S);

    rep.random_samples = random_samples;
    std::vector<double> res(static_cast<size_t>(random_samples), 0.0);
    parallel_for(res.size(), [&](size_t i) {
        Rng rng(seed, 0x4e11 + i);
        MatrixTuple X = rng.tuple(g, N + 1);
        for (auto& x : X.X) x = 0.5 * Mat(x.triangularView<Eigen::StrictlyUpper>());
        res[i] = residual(X);
    });
    for (double r : res) rep.random_residual = std::max(rep.random_residual, r);
    return rep;
}

SampleReport verify_on_samples(const Certificate& cert, int samples, double radius, std::uint64_t seed, int level) {
    const int g = cert.g();
    const auto d = cert.A.d();
    const auto e = cert.W0.cols();
    SampleReport rep;
    rep.samples = samples;
    rep.radius = radius;
    double rn = 0;
    for (const auto& r : cert.R) rn = std::max(rn, opnorm(r));
    rep.radius_bound = rn > 0 ? 1.0 / (rn * g) : std::numeric_limits<double>::infinity();

    std::vector<double> id_res(static_cast<size_t>(samples), 0.0), map_res(static_cast<size_t>(samples), -1.0);
    std::vector<char> skipped(static_cast<size_t>(samples), 0);
    parallel_for(static_cast<size_t>(samples), [&](size_t i) {
        Rng rng(seed, i);
        MatrixTuple X = rng.tuple(g, level);
        double total = 0;
        for (const auto& x : X.X) total += opnorm(x);
        X = X.scaled(radius * rng.uniform(0.5, 1.0) / total);
        const auto n = X.n();

        Mat res = Mat::Identity(d * n, d * n);
        for (int j = 0; j < g; ++j) res -= kron(cert.R[static_cast<size_t>(j)], X[j]);
        Eigen::PartialPivLU<Mat> lu(res);
        if (!(lu.rcond() > 1e-13)) {
            skipped[i] = 1;
            return;
        }
        Mat Wx = lu.solve(kron(cert.W0, Mat::Identity(n, n)));
        Mat Gx = kron(cert.W0.adjoint() * cert.C, Mat::Identity(n, n)) * lambda_eval(cert.A, X) * Wx;
        Mat lhs = Mat::Identity(e * n, e * n) + Gx + Gx.adjoint();
        id_res[i] = max_abs(lhs - Wx.adjoint() * eval_pencil(cert.A, X) * Wx);
        if (cert.Xi) {
            try {
                MatrixTuple p = map_eval(*cert.Xi, X).value;
                map_res[i] = max_abs(Gx - lambda_eval(Pencil(cert.B), p));
            } catch (const OutsideDomain&) {
                skipped[i] = 1;
            }
        }
    });
    for (size_t i = 0; i < id_res.size(); ++i) {
        if (skipped[i]) {
            ++rep.skipped;
            continue;
        }
        rep.identity_residual = std::max(rep.identity_residual, id_res[i]);
        if (cert.Xi) rep.map_residual = std::max(rep.map_residual, map_res[i]);
    }
    return rep;
}

RecursionReport verify_recursion(const Certificate& cert, int N) {
    if (N > cert.degree) throw InvalidInput("verify_recursion: degree exceeds the certificate degree");
    const int g = cert.g();
    const auto d = cert.A.d();
    const Mat CmI = cert.C - Mat::Identity(d, d);
    const Mat W0C = cert.W0.adjoint() * cert.C;
    RecursionReport rep;
    rep.degree = N;
    for (const auto& a : words_up_to(g, N)) {
        const Mat Ra = tuple_power(cert.R, a);
        rep.w_closed = std::max(rep.w_closed, max_abs(cert.W.coeff(a) - Ra * cert.W0));
        if (a.size() >= N) continue;
        for (int j = 0; j < g; ++j) {
            const Word xa = Word::letter(j) + a;
            const Mat& Aj = cert.A.A[static_cast<size_t>(j)];
            rep.w_recursion = std::max(rep.w_recursion, max_abs(cert.W.coeff(xa) - CmI * Aj * cert.W.coeff(a)));
            rep.g_formula = std::max(rep.g_formula, max_abs(cert.G.coeff(xa) - W0C * Aj * Ra * cert.W0));
        }
    }
    return rep;
}

Extraction extract_convexotonic(const Pencil& A, const Mat& C, double tol, int N) {
    const auto d = A.d();
    if (C.rows() != d || C.cols() != d) throw ShapeMismatch("C must be d x d");
    require_unitary(C, 1e-10);
    const int g = A.g();
    Extraction out;
    Tuple R;
    for (const auto& a : A.A) R.push_back((C - Mat::Identity(d, d)) * a);
    StructureResult s;
    try {
        s = structure_matrices(A.A, R, tol);
    } catch (const DependentBasis&) {
        out.reason = "A_1..A_g are linearly dependent";
        return out;
    } catch (const NotAModule& ex) {
        out.reason = std::string("module condition fails: ") + ex.what();
        return out;
    }
    out.ok = true;
    out.Xi = s.Xi;
    out.residual = s.residual;
    out.convexotonic_residual = is_convexotonic(s.Xi, 1.0).max_residual;
    for (const auto& a : A.A) out.B.push_back(C * a);
    out.p = map_series(s.Xi, N).p;
    for (const auto& w : words_up_to(g, 4)) {
        const Mat Xa = tuple_power(s.Xi, w);
        const Mat Ra = tuple_power(R, w);
        for (int k = 0; k < g; ++k) {
            Mat rhs = Mat::Zero(d, d);
            for (int t = 0; t < g; ++t) rhs += Xa(k, t) * A.A[static_cast<size_t>(t)];
            out.module_residual = std::max(out.module_residual, max_abs(A.A[static_cast<size_t>(k)] * Ra - rhs));
        }
    }
    const double scale = std::max(1.0, A.max_abs() * A.max_abs());
    if (out.convexotonic_residual > tol * scale || out.module_residual > tol * scale) {
        out.ok = false;
        out.reason = "extracted tuple fails the convexotonic or module identities";
    }
    return out;
}

PolynomialReport check_polynomial_iff_nilpotent(const Certificate& cert) {
    const auto d = cert.A.d();
    if (cert.W0.cols() != d) throw InvalidInput("check_polynomial_iff_nilpotent: square case (W0 unitary) required");
    PolynomialReport rep;
    auto mu = nilpotency_order(cert.R);
    rep.r_nilpotent = mu.has_value();
    rep.r_order = mu.value_or(0);

    const int top = static_cast<int>(d) + 2;
    Certificate full = build_certificate(cert.A, cert.C, cert.W0, top);
    const double tol = 1e-12 * std::max(1.0, cert.A.max_abs());
    auto poly_degree = [&](const FreeSeries& f) {
        for (const auto& [w, c] : f.terms())
            if (w.size() >= static_cast<int>(d) + 1 && max_abs(c) > tol) return -1;
        return f.degree(tol);
    };
    rep.w_degree = poly_degree(full.W);
    rep.g_degree = poly_degree(full.G);
    rep.consistent = rep.r_nilpotent == (rep.w_degree >= 0) && rep.r_nilpotent == (rep.g_degree >= 0);

    if (cert.Xi) {
        rep.xi_known = true;
        NilpotencyReport nr = nilpotency_and_degree(*cert.Xi);
        rep.xi_nilpotent = nr.nilpotent;
        rep.xi_order = nr.order;
        rep.p_degree = nr.degree_p;
        if (rep.r_nilpotent != rep.xi_nilpotent) rep.consistent = false;
        if (rep.r_nilpotent && rep.xi_nilpotent)
            rep.order_bounds = rep.xi_order <= rep.r_order && rep.r_order <= rep.xi_order + 1 &&
                               rep.p_degree == rep.xi_order;
    }
    return rep;
}

HereditaryPoly expand_hereditary(const HereditaryCertificate& hc) {
    const auto& h = hc.h;
    HereditaryPoly out(h.g(), h.rows(), h.cols());
    for (const auto& s : hc.squares) {
        const HereditaryPoly sq = hermitian_product(s, s);
        for (const auto& [k, m] : sq.terms()) out.add_to(k.first, k.second, m);
    }
    for (const auto& f : hc.weights) {
        // Lambda f has coefficient A_j f_w at x_j w
        FreeSeries lf(f.g(), hc.L.d(), f.cols(), f.max_degree() + 1);
        for (const auto& [w, c] : f.terms())
            for (int j = 0; j < hc.L.g(); ++j) lf.add_to(Word::letter(j) + w, hc.L.A[static_cast<size_t>(j)] * c);
        for (const HereditaryPoly& part : {hermitian_product(f, f), hermitian_product(f, lf), hermitian_product(lf, f)})
            for (const auto& [k, m] : part.terms()) out.add_to(k.first, k.second, m);
    }
    return out;
}

HereditaryReport verify_hereditary(const HereditaryCertificate& hc, double tol, std::uint64_t seed, int samples) {
    const int g = hc.h.g();
    const auto nu = hc.h.rows();
    const int d = static_cast<int>(hc.L.d());
    if (hc.L.g() != g) throw VariableMismatch("hereditary certificate: pencil and h disagree on g");
    if (hc.h.cols() != nu) throw ShapeMismatch("hereditary certificate: h must be square");
    HereditaryReport rep;
    int wdeg = -1;
    for (const auto& s : hc.squares) {
        if (s.g() != g || s.cols() != nu) throw ShapeMismatch("square term does not conform with h");
        if (s.degree() > d + 1) throw InvalidInput("square term exceeds degree d+1");
    }
    for (const auto& f : hc.weights) {
        if (f.g() != g || f.cols() != nu || f.rows() != hc.L.d()) throw ShapeMismatch("weight does not conform with L and h");
        if (f.degree() > d + 1) throw InvalidInput("weight exceeds degree d+1");
        wdeg = std::max(wdeg, f.degree());
    }
    rep.shape = wdeg <= d ? "weights deg <= d" : "weights deg <= d+1";

    HereditaryPoly rhs = expand_hereditary(hc);
    auto check = [&](const Word& v, const Word& w) {
        double diff = max_abs(hc.h.coeff(v, w) - rhs.coeff(v, w));
        if (diff > rep.max_mismatch) {
            rep.max_mismatch = diff;
            rep.worst_left = v;
            rep.worst_right = w;
        }
    };
    for (const auto& [k, m] : hc.h.terms()) check(k.first, k.second);
    for (const auto& [k, m] : rhs.terms()) check(k.first, k.second);

    // sanity layer: h(X) should be positive semidefinite on D_L
    rep.samples = samples;
    rep.min_sample_eig = std::numeric_limits<double>::infinity();
    for (int s = 0; s < samples; ++s) {
        Rng rng(seed, 0x4e7 + static_cast<std::uint64_t>(s));
        MatrixTuple X = rng.tuple(g, 1 + s % 3);
        X = X.scaled(0.5 / std::max(1e-300, X.max_norm()));
        while (membership(hc.L, X).region == Region::outside) X = X.scaled(0.5);
        rep.min_sample_eig = std::min(rep.min_sample_eig, min_eigenvalue(hc.h.eval(X)));
    }
    rep.valid = rep.max_mismatch <= tol && (samples == 0 || rep.min_sample_eig >= -1e-8);
    return rep;
}

}  // namespace freespectra
