#include "freespectra/generic.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "freespectra/random.hpp"

namespace freespectra {

namespace {

// Fixes the phase so the largest entry is real and positive; keeps output deterministic.
Vec normalize_phase(Vec v) {
    Eigen::Index k = 0;
    v.cwiseAbs().maxCoeff(&k);
    if (std::abs(v(k)) > 0) v *= std::conj(v(k)) / std::abs(v(k));
    return v;
}

Mat columns(const std::vector<Vec>& vs) {
    if (vs.empty()) return Mat();
    Mat M(vs[0].size(), static_cast<Eigen::Index>(vs.size()));
    for (size_t i = 0; i < vs.size(); ++i) M.col(static_cast<Eigen::Index>(i)) = vs[i].normalized();
    return M;
}

double sigma_min(const Mat& M) {
    if (M.cols() == 0) return 0;
    Eigen::JacobiSVD<Mat> svd(M);
    const auto& s = svd.singularValues();
    return s.size() < M.cols() ? 0.0 : s(s.size() - 1);
}

int numeric_rank(const std::vector<Vec>& vs, double tol = 1e-8) {
    if (vs.empty()) return 0;
    Eigen::JacobiSVD<Mat> svd(columns(vs));
    int r = 0;
    for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i)
        if (svd.singularValues()(i) > tol) ++r;
    return r;
}

std::string describe(const Vec& v) {
    Eigen::Index k = 0;
    v.cwiseAbs().maxCoeff(&k);
    bool standard = true;
    for (Eigen::Index i = 0; i < v.size(); ++i)
        if (i != k && std::abs(v(i)) > 1e-8) standard = false;
    if (standard) return "e_" + std::to_string(k + 1);
    std::ostringstream os;
    os << "[";
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        if (i) os << ", ";
        os << v(i).real();
        if (std::abs(v(i).imag()) > 1e-12) os << (v(i).imag() < 0 ? "-" : "+") << std::abs(v(i).imag()) << "i";
    }
    os << "]";
    return os.str();
}

// Why a pool of witnesses cannot contain the required configuration.
std::string rank_explanation(const std::vector<Vec>& pool, int need, const char* name, int dim) {
    if (pool.empty()) return std::string("no probe produced a simple top singular value for ") + name;
    const int r = numeric_rank(pool);
    std::ostringstream os;
    if (r == 1)
        os << "all probes share " << name << "=" << describe(normalize_phase(pool.front()).normalized());
    else
        os << "the " << name << " witnesses span only a " << r << "-dimensional subspace";
    os << " (rank " << r << " < " << dim << ", " << need << " vectors in general position are impossible)";
    return os.str();
}

bool general_position(const std::vector<Vec>& vs, int dim, double tol) {
    if (static_cast<int>(vs.size()) <= dim) return sigma_min(columns(vs)) > tol;
    return hyperbasis_check(vs, tol, dim).hyperbasis;
}

Rng probe_rng(std::uint64_t seed, std::uint64_t i) { return Rng(seed, 0x9e0 + i); }

struct Drawn {
    bool ok = false;
    SingularProbe probe;
};

template <class Draw>
std::vector<Drawn> draw_batch(const Pencil& A, std::size_t first, std::size_t count, bool left, Draw draw) {
    std::vector<Drawn> out(count);
    parallel_for(count, [&](std::size_t i) {
        MatrixTuple alpha = draw(first + i);
        try {
            out[i].probe = top_singular_probe(A, alpha, left);
            out[i].ok = true;
        } catch (const ProbeRejected&) {
        }
    });
    return out;
}

ProbeRecord record(const SingularProbe& p, bool left) {
    ProbeRecord r;
    r.level = static_cast<int>(p.alpha.n());
    r.left = left;
    r.gap = p.gap;
    r.kernel_eig = p.kernel_eig;
    r.pairing_residual = p.pairing_residual;
    r.accepted = true;
    return r;
}

void tally(GenericityReport& rep, const SingularProbe& p) {
    rep.max_pairing_residual = std::max(rep.max_pairing_residual, p.pairing_residual);
    rep.max_kernel_eig = std::max(rep.max_kernel_eig, std::abs(p.kernel_eig));
}

// Orthonormal basis of the span of the given columns.
Mat span_basis(const Mat& M, double tol) {
    if (M.cols() == 0) return Mat(M.rows(), 0);
    Eigen::JacobiSVD<Mat> svd(M, Eigen::ComputeThinU);
    const double top = svd.singularValues().size() ? svd.singularValues()(0) : 0.0;
    Eigen::Index r = 0;
    while (r < svd.singularValues().size() && svd.singularValues()(r) > tol * std::max(1.0, top)) ++r;
    return svd.matrixU().leftCols(r);
}

}  // namespace

SingularProbe top_singular_probe(const Pencil& A, const MatrixTuple& alpha, bool left, double gap_tol) {
    if (alpha.g() != A.g()) throw VariableMismatch("probe and pencil disagree on g");
    Mat T = lambda_eval(A, alpha);
    const double s = opnorm(T);
    if (!(s > 1e-14)) throw ProbeRejected("Lambda_A(alpha) vanishes");
    SingularProbe out;
    out.alpha = alpha.scaled(1.0 / s);
    T /= s;
    Mat M = left ? Mat(T * T.adjoint()) : Mat(T.adjoint() * T);
    Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (M + M.adjoint()));
    const auto& ev = es.eigenvalues();
    const Eigen::Index m = ev.size();
    out.gap = m > 1 ? ev(m - 1) - ev(m - 2) : 1.0;
    if (out.gap < gap_tol) throw ProbeRejected("top singular value is not simple");
    out.kernel_eig = 1.0 - ev(m - 1);
    out.u = normalize_phase(es.eigenvectors().col(m - 1));

    const Eigen::Index n = alpha.n();
    const Eigen::Index d = A.d();
    for (Eigen::Index a = 0; a < n; ++a) {
        Vec part(d);
        for (Eigen::Index i = 0; i < d; ++i) part(i) = out.u(i * n + a);
        out.parts.push_back(part);
    }

    // the kernel of [[I, T], [T*, I]] contains (-T u) + u, resp. v + (-T* v)
    const Eigen::Index N = T.rows();
    Mat J(2 * N, 2 * N);
    J << Mat::Identity(N, N), T, T.adjoint(), Mat::Identity(N, N);
    Vec w(2 * N);
    if (left)
        w << out.u, -T.adjoint() * out.u;
    else
        w << -T * out.u, out.u;
    out.pairing_residual = (J * w).cwiseAbs().maxCoeff();
    return out;
}

HyperbasisResult hyperbasis_check(const std::vector<Vec>& vectors, double tol, int dim) {
    HyperbasisResult res;
    if (vectors.empty()) return res;
    const int ambient = static_cast<int>(vectors[0].size());
    const int l = dim < 0 ? ambient : dim;
    const int m = static_cast<int>(vectors.size());
    if (m < l || l <= 0) return res;
    double count = 1;
    for (int i = 0; i < l; ++i) count = count * (m - i) / (i + 1);
    if (count > 1e5) throw InvalidInput("hyperbasis_check: too many subsets");

    res.min_sigma = std::numeric_limits<double>::infinity();
    std::vector<int> idx(static_cast<size_t>(l));
    for (int i = 0; i < l; ++i) idx[static_cast<size_t>(i)] = i;
    while (true) {
        std::vector<Vec> sub;
        for (int i : idx) sub.push_back(vectors[static_cast<size_t>(i)]);
        const double s = sigma_min(columns(sub));
        if (s < res.min_sigma) {
            res.min_sigma = s;
            res.worst_subset = idx;
        }
        int k = l - 1;
        while (k >= 0 && idx[static_cast<size_t>(k)] == m - l + k) --k;
        if (k < 0) break;
        ++idx[static_cast<size_t>(k)];
        for (int i = k + 1; i < l; ++i) idx[static_cast<size_t>(i)] = idx[static_cast<size_t>(i - 1)] + 1;
    }
    res.hyperbasis = res.min_sigma > tol;
    return res;
}

Mat corange_basis(const Pencil& A, double tol) {
    Mat M(A.d(), A.d() * A.g());
    for (int j = 0; j < A.g(); ++j) M.middleCols(j * A.d(), A.d()) = A.A[static_cast<size_t>(j)].adjoint();
    return span_basis(M, tol);
}

Mat range_basis(const Pencil& A, double tol) {
    Mat M(A.d(), A.d() * A.g());
    for (int j = 0; j < A.g(); ++j) M.middleCols(j * A.d(), A.d()) = A.A[static_cast<size_t>(j)];
    return span_basis(M, tol);
}

GenericityReport check_sv_generic(const Pencil& A, int probe_budget, std::uint64_t seed) {
    if (A.g() == 0 || A.max_abs() == 0) throw InvalidInput("check_sv_generic: A must be nonzero");
    const int d = static_cast<int>(A.d());
    const int g = A.g();
    const double tol = 1e-8;
    GenericityReport rep;
    rep.condition = "sv";
    rep.budget = probe_budget;
    rep.target_dim = d;

    auto draw = [&](std::size_t i) {
        Rng rng = probe_rng(seed, i);
        MatrixTuple X;
        for (int j = 0; j < g; ++j) X.X.push_back(Mat::Constant(1, 1, rng.cnormal()));
        return X;
    };

    std::vector<Vec> right_pool, left_pool;
    std::size_t next = 0;
    const std::size_t batch = 32;
    // right witnesses first, then left; probes are consumed in index order
    for (int phase = 0; phase < 2; ++phase) {
        const bool left = phase == 1;
        auto& chosen = left ? rep.left_witnesses : rep.right_witnesses;
        auto& pool = left ? left_pool : right_pool;
        const int need = left ? d : d + 1;
        // the right phase may use half the budget; the left phase gets whatever remains
        const std::size_t limit = left ? static_cast<std::size_t>(probe_budget)
                                       : static_cast<std::size_t>(probe_budget - probe_budget / 2);
        while (static_cast<int>(chosen.size()) < need && next < limit) {
            const std::size_t count = std::min(batch, limit - next);
            auto drawn = draw_batch(A, next, count, left, draw);
            for (std::size_t i = 0; i < drawn.size() && static_cast<int>(chosen.size()) < need; ++i) {
                ++next;
                ++rep.probes_used;
                if (!drawn[i].ok) {
                    ++rep.rejected;
                    continue;
                }
                const auto& p = drawn[i].probe;
                rep.probes.push_back(record(p, left));
                tally(rep, p);
                pool.push_back(p.u);
                std::vector<Vec> trial = chosen;
                trial.push_back(p.u);
                if (general_position(trial, d, tol)) chosen.push_back(p.u);
            }
        }
    }

    const bool right_ok = static_cast<int>(rep.right_witnesses.size()) == d + 1;
    const bool left_ok = static_cast<int>(rep.left_witnesses.size()) == d;
    if (right_ok) rep.right_min_sigma = hyperbasis_check(rep.right_witnesses, tol, d).min_sigma;
    if (left_ok) rep.left_min_sigma = sigma_min(columns(rep.left_witnesses));
    rep.witnessed = right_ok && left_ok;
    rep.verdict = rep.witnessed ? "witnessed" : "not witnessed within budget";
    if (!right_ok) rep.explanation = rank_explanation(right_pool, d + 1, "u", d);
    if (!left_ok) {
        if (!rep.explanation.empty()) rep.explanation += "; ";
        rep.explanation += rank_explanation(left_pool, d, "v", d);
    }
    return rep;
}

namespace {

// Looks for r + 1 vectors in general position in the pool (coordinates in C^r).
std::vector<Vec> find_hyperbasis(const std::vector<Vec>& pool, const std::vector<std::vector<int>>& groups, int r,
                                 double tol) {
    if (static_cast<int>(pool.size()) < r + 1 || r == 0) return {};
    auto attempt = [&](const std::vector<int>& candidates) -> std::vector<Vec> {
        std::vector<Vec> sub;
        for (int i : candidates) sub.push_back(pool[static_cast<size_t>(i)]);
        Mat M = columns(sub);
        Eigen::ColPivHouseholderQR<Mat> qr(M);
        qr.setThreshold(tol);
        if (qr.rank() < r) return {};
        std::vector<int> basis;
        for (int k = 0; k < r; ++k) basis.push_back(candidates[static_cast<size_t>(qr.colsPermutation().indices()(k))]);
        Mat Bm(r, r);
        for (int k = 0; k < r; ++k) Bm.col(k) = pool[static_cast<size_t>(basis[static_cast<size_t>(k)])].normalized();
        Eigen::PartialPivLU<Mat> lu(Bm);
        for (size_t i = 0; i < pool.size(); ++i) {
            if (std::find(basis.begin(), basis.end(), static_cast<int>(i)) != basis.end()) continue;
            Vec c = lu.solve(pool[i].normalized());
            if (c.cwiseAbs().minCoeff() > tol) {
                std::vector<Vec> out;
                for (int b : basis) out.push_back(pool[static_cast<size_t>(b)]);
                out.push_back(pool[i]);
                if (hyperbasis_check(out, tol, r).hyperbasis) return out;
            }
        }
        return {};
    };
    std::vector<int> all(pool.size());
    for (size_t i = 0; i < all.size(); ++i) all[i] = static_cast<int>(i);
    auto hb = attempt(all);
    if (!hb.empty()) return hb;
    for (const auto& grp : groups) {
        hb = attempt(grp);
        if (!hb.empty()) return hb;
    }
    return {};
}

// Unitary T (n x n) whose first row is supported on the given indices with equal weights.
Mat spreading_unitary(Eigen::Index n, const std::vector<int>& support) {
    Vec t = Vec::Zero(n);
    for (int k : support) t(k) = 1.0;
    t.normalize();
    Mat M(n, n);
    M.col(0) = t.conjugate();
    for (Eigen::Index c = 1, e = 0; c < n; ++e)
        if (e != support[0]) M.col(c++) = Vec::Unit(n, e);
    Eigen::HouseholderQR<Mat> qr(M);
    Mat Q = qr.householderQ();
    // Q's first column is conj(t) up to phase, so row one of Q* is t up to phase
    return Q.adjoint();
}

}  // namespace

GenericityReport check_eig_star_generic(const Pencil& A, const std::string& mode, const std::vector<MatrixTuple>& probes,
                                        int probe_budget, std::uint64_t seed, const std::vector<int>& levels) {
    if (mode != "eig" && mode != "star") throw InvalidInput("mode must be eig or star");
    const bool star = mode == "star";
    const int d = static_cast<int>(A.d());
    const int g = A.g();
    const double tol = 1e-8;
    for (const auto& p : probes)
        if (p.g() != g) throw VariableMismatch("probe level mismatch: probe has the wrong number of entries");
    for (const auto& p : probes)
        for (const auto& x : p.X)
            if (x.rows() != p.n() || x.cols() != p.n()) throw ShapeMismatch("probe level mismatch: entries differ in size");
    std::vector<int> lv = levels.empty() ? std::vector<int>{std::max(2, d)} : levels;
    for (int l : lv)
        if (l < 1) throw InvalidInput("probe levels must be positive");

    GenericityReport rep;
    rep.condition = mode;
    rep.budget = probe_budget;
    const Mat basis = star ? range_basis(A) : corange_basis(A);
    const int r = static_cast<int>(basis.cols());
    rep.target_dim = r;

    auto draw = [&](std::size_t i) {
        if (i < probes.size()) return probes[i];
        Rng rng = probe_rng(seed, i);
        return rng.tuple(g, lv[(i - probes.size()) % lv.size()]);
    };

    std::vector<Vec> pool;     // coordinates in the target subspace
    std::vector<Vec> raw;      // the same vectors in C^d
    std::vector<std::vector<int>> groups;
    bool trick_used = false;
    bool done = false;
    std::size_t next = 0;
    auto absorb = [&](const SingularProbe& p) {
        rep.probes.push_back(record(p, star));
        tally(rep, p);
        std::vector<int> grp;
        for (const auto& part : p.parts) {
            if (part.norm() < 1e-10) continue;
            grp.push_back(static_cast<int>(pool.size()));
            pool.push_back(basis.adjoint() * part);
            raw.push_back(part);
        }
        groups.push_back(grp);
    };
    auto satisfied = [&]() {
        if (r == 0) return false;
        if (star) {
            if (numeric_rank(pool, tol) < r) return false;
            Mat M = columns(pool);
            Eigen::ColPivHouseholderQR<Mat> qr(M);
            qr.setThreshold(tol);
            rep.left_witnesses.clear();
            for (int k = 0; k < r; ++k) rep.left_witnesses.push_back(raw[static_cast<size_t>(qr.colsPermutation().indices()(k))]);
            return true;
        }
        auto hb = find_hyperbasis(pool, groups, r, tol);
        if (hb.empty()) return false;
        rep.right_witnesses.clear();
        for (const auto& c : hb) rep.right_witnesses.push_back(basis * c);
        return true;
    };

    const std::size_t batch = 16;
    while (!done && static_cast<int>(next) < probe_budget) {
        const std::size_t count = std::min(batch, static_cast<std::size_t>(probe_budget) - next);
        auto drawn = draw_batch(A, next, count, star, draw);
        for (std::size_t i = 0; i < drawn.size() && !done; ++i) {
            ++next;
            ++rep.probes_used;
            if (!drawn[i].ok) {
                ++rep.rejected;
                continue;
            }
            absorb(drawn[i].probe);
            done = satisfied();
            // single probe spanning the target: conjugate by a spreading unitary
            if (!done && !star && !trick_used && static_cast<int>(next) < probe_budget) {
                const auto& grp = groups.back();
                std::vector<Vec> own;
                for (int k : grp) own.push_back(pool[static_cast<size_t>(k)]);
                if (static_cast<int>(own.size()) >= r && numeric_rank(own, tol) == r) {
                    Mat M = columns(own);
                    Eigen::ColPivHouseholderQR<Mat> qr(M);
                    qr.setThreshold(tol);
                    std::vector<int> support;
                    // indices of the chosen parts within the probe's level
                    std::vector<int> level_index;
                    const auto& pr = drawn[i].probe;
                    for (int a = 0; a < static_cast<int>(pr.parts.size()); ++a)
                        if (pr.parts[static_cast<size_t>(a)].norm() >= 1e-10) level_index.push_back(a);
                    for (int k = 0; k < r; ++k)
                        support.push_back(level_index[static_cast<size_t>(qr.colsPermutation().indices()(k))]);
                    std::sort(support.begin(), support.end());
                    Mat T = spreading_unitary(pr.alpha.n(), support);
                    try {
                        SingularProbe second = top_singular_probe(A, pr.alpha.conjugated(T.adjoint()), false);
                        ++next;
                        ++rep.probes_used;
                        trick_used = true;
                        absorb(second);
                        done = satisfied();
                    } catch (const ProbeRejected&) {
                        ++rep.rejected;
                    }
                }
            }
        }
    }

    rep.witnessed = done;
    rep.weak_only = done && r < d;
    if (star) {
        if (done) rep.left_min_sigma = sigma_min(columns(rep.left_witnesses));
    } else if (done) {
        std::vector<Vec> coords;
        for (const auto& w : rep.right_witnesses) coords.push_back(basis.adjoint() * w);
        rep.right_min_sigma = hyperbasis_check(coords, tol, r).min_sigma;
    }
    const std::string name = star ? "*-generic" : "eig-generic";
    if (!done)
        rep.verdict = "not witnessed within budget";
    else if (rep.weak_only)
        rep.verdict = "weakly " + name + " witnessed";
    else
        rep.verdict = name + " witnessed";
    if (r < d) {
        std::ostringstream os;
        os << (star ? "rg(A)" : "ker(A)^perp") << " has dimension " << r << " < d=" << d << ", so only the weak variant can hold";
        rep.explanation = os.str();
    }
    if (!done) {
        if (!rep.explanation.empty()) rep.explanation += "; ";
        rep.explanation += pool.empty() ? "no probe was accepted"
                                        : rank_explanation(pool, star ? r : r + 1, star ? "mu_a" : "u_a", r);
    }
    if (trick_used && done && !star) rep.explanation += rep.explanation.empty() ? "second probe T alpha T* supplied the extra vector"
                                                                                : "; second probe T alpha T* supplied the extra vector";
    return rep;
}

}  // namespace freespectra
