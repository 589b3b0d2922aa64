#include "freespectra/convexotonic.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>

#include <unsupported/Eigen/KroneckerProduct>

#include "freespectra/random.hpp"

namespace freespectra {

namespace {

void require_square_tuple(const Tuple& Xi) {
    const auto g = static_cast<Eigen::Index>(Xi.size());
    for (const auto& m : Xi)
        if (m.rows() != g || m.cols() != g) throw ShapeMismatch("structure matrices must be g x g");
}

Eigen::Map<const Eigen::VectorXcd> as_vec(const Mat& m) {
    return {m.data(), m.size()};
}

}  // namespace

ResidualCheck is_convexotonic(const Tuple& Xi, double tol) {
    require_square_tuple(Xi);
    const int g = static_cast<int>(Xi.size());
    ResidualCheck r;
    for (int j = 0; j < g; ++j) {
        for (int k = 0; k < g; ++k) {
            Mat rhs = Mat::Zero(g, g);
            for (int s = 0; s < g; ++s) rhs += Xi[j](k, s) * Xi[s];
            r.max_residual = std::max(r.max_residual, max_abs(Xi[k] * Xi[j] - rhs));
        }
    }
    r.pass = r.max_residual <= tol;
    return r;
}

StructureResult structure_matrices(const Tuple& E, const Tuple& R, double tol) {
    if (E.size() != R.size() || E.empty()) throw VariableMismatch("structure_matrices: E and R need the same g");
    const auto g = static_cast<Eigen::Index>(E.size());
    const auto sz = E[0].size();
    for (const auto& e : E)
        if (e.rows() != E[0].rows() || e.cols() != E[0].cols()) throw ShapeMismatch("E entries differ in shape");
    for (const auto& r : R)
        if (r.rows() != E[0].cols() || r.cols() != E[0].cols()) throw ShapeMismatch("R entries do not act on E");

    Mat V(sz, g);
    for (Eigen::Index s = 0; s < g; ++s) V.col(s) = as_vec(E[static_cast<size_t>(s)]);
    Eigen::JacobiSVD<Mat> svd(V, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    StructureResult out;
    out.sigma_ratio = sv(0) > 0 ? sv(g - 1) / sv(0) : 0;
    if (!(out.sigma_ratio > 1e-8)) throw DependentBasis("structure_matrices: E is linearly dependent");

    double scale = 0;
    for (size_t i = 0; i < E.size(); ++i) scale = std::max(scale, opnorm(E[i]) * opnorm(R[i]));
    scale = std::max(1.0, scale);

    out.Xi.assign(static_cast<size_t>(g), Mat::Zero(g, g));
    for (Eigen::Index j = 0; j < g; ++j) {
        for (Eigen::Index k = 0; k < g; ++k) {
            Mat prod = E[static_cast<size_t>(k)] * R[static_cast<size_t>(j)];
            Vec target = as_vec(prod);
            Vec c = svd.solve(target);
            out.residual = std::max(out.residual, (V * c - target).cwiseAbs().maxCoeff());
            out.Xi[static_cast<size_t>(j)].row(k) = c.transpose();
        }
    }
    if (out.residual > tol * scale) {
        std::ostringstream os;
        os << "structure_matrices: product escapes span (residual " << out.residual << ")";
        throw NotAModule(os.str());
    }
    return out;
}

Tuple embed_tuple(const Tuple& Xi) {
    require_square_tuple(Xi);
    const auto g = static_cast<Eigen::Index>(Xi.size());
    Tuple R;
    for (Eigen::Index j = 0; j < g; ++j) {
        Mat r = Mat::Zero(g + 1, g + 1);
        r(0, j + 1) = 1.0;
        r.bottomRightCorner(g, g) = Xi[static_cast<size_t>(j)];
        R.push_back(std::move(r));
    }
    return R;
}

Mat tuple_power(const Tuple& T, const Word& w) {
    if (T.empty()) throw InvalidInput("tuple_power: empty tuple");
    Mat r = Mat::Identity(T[0].rows(), T[0].cols());
    for (int l : w.letters) {
        if (l < 0 || l >= static_cast<int>(T.size())) throw VariableMismatch("word letter outside 1..g");
        r = r * T[static_cast<size_t>(l)];
    }
    return r;
}

FreeSeries identity_map(int g, int N) {
    FreeSeries r(g, 1, g, N);
    for (int j = 0; j < g; ++j) {
        Mat e = Mat::Zero(1, g);
        e(0, j) = 1.0;
        r.set(Word::letter(j), e);
    }
    return r;
}

MapSeries map_series(const Tuple& Xi, int N) {
    require_square_tuple(Xi);
    const int g = static_cast<int>(Xi.size());
    MapSeries out{FreeSeries(g, 1, g, N), FreeSeries(g, 1, g, N)};
    if (N < 1) return out;

    // coefficient of x_j alpha in p^i is (Xi^alpha)_{j,i}
    std::function<void(const Word&, const Mat&)> walk = [&](const Word& alpha, const Mat& power) {
        const double sign = (alpha.size() % 2 == 0) ? 1.0 : -1.0;
        for (int j = 0; j < g; ++j) {
            Mat row = power.row(j);
            if (max_abs(row) == 0) continue;
            Word w = Word::letter(j) + alpha;
            out.p.set(w, row);
            out.q.set(w, sign * row);
        }
        if (alpha.size() + 2 > N) return;
        for (int a = 0; a < g; ++a) {
            Mat next = power * Xi[static_cast<size_t>(a)];
            if (max_abs(next) == 0) continue;
            walk(alpha + Word::letter(a), next);
        }
    };
    walk(Word(), Mat::Identity(g, g));
    return out;
}

FreeSeries apply_map(const Tuple& Xi, int sign, const FreeSeries& y) {
    require_square_tuple(Xi);
    const auto g = static_cast<Eigen::Index>(Xi.size());
    if (y.rows() != 1 || y.cols() != g) throw ShapeMismatch("apply_map: input must be a 1 x g row series");
    FreeSeries lam(y.g(), g, g, y.max_degree());
    for (const auto& [w, c] : y.terms()) {
        Mat m = Mat::Zero(g, g);
        for (Eigen::Index k = 0; k < g; ++k) m += c(0, k) * Xi[static_cast<size_t>(k)];
        lam.set(w, m);
    }
    FreeSeries resolvent = FreeSeries::identity(y.g(), g, y.max_degree()) - lam.scaled(static_cast<double>(sign));
    return series_mul(y, series_inverse(resolvent));
}

FreeSeries map_coordinate(const FreeSeries& row, int i) {
    return row.entry(0, i);
}

FreeSeries compose_maps(const FreeSeries& outer, const FreeSeries& inner, int N) {
    if (outer.rows() != 1 || inner.rows() != 1) throw ShapeMismatch("compose_maps: row series expected");
    if (outer.g() != inner.cols()) throw VariableMismatch("compose_maps: inner map has the wrong arity");
    std::vector<FreeSeries> coords;
    for (Eigen::Index i = 0; i < inner.cols(); ++i) coords.push_back(inner.entry(0, i));
    return substitute(outer, coords, N);
}

MapValue map_eval(const Tuple& Xi, const MatrixTuple& X, bool inverse) {
    require_square_tuple(Xi);
    const auto g = static_cast<Eigen::Index>(Xi.size());
    if (X.g() != g) throw VariableMismatch("map_eval: tuple has the wrong g");
    const auto n = X.n();
    const double s = inverse ? -1.0 : 1.0;

    Mat B = Mat::Identity(g * n, g * n);
    for (Eigen::Index k = 0; k < g; ++k)
        B -= s * Eigen::kroneckerProduct(Xi[static_cast<size_t>(k)], X[static_cast<int>(k)]).eval();
    Mat row(n, g * n);
    for (Eigen::Index j = 0; j < g; ++j) row.middleCols(j * n, n) = X[static_cast<int>(j)];

    Eigen::PartialPivLU<Mat> lu(B.transpose());
    MapValue out;
    out.rcond = lu.rcond();
    if (!(out.rcond > 1e-13)) throw OutsideDomain("map_eval: block resolvent is singular");
    Mat Z = lu.solve(row.transpose()).transpose();
    for (Eigen::Index i = 0; i < g; ++i) out.value.X.push_back(Z.middleCols(i * n, n));
    return out;
}

InversePairReport verify_inverse_pair(const Tuple& Xi, int N, int samples, std::uint64_t seed, int level,
                                      double radius) {
    require_square_tuple(Xi);
    const int g = static_cast<int>(Xi.size());
    InversePairReport rep;
    rep.degree = N;
    rep.samples = samples;
    MapSeries m = map_series(Xi, N);
    FreeSeries id = identity_map(g, N);
    rep.series_pq = coeff_distance(apply_map(Xi, +1, m.q), id);
    rep.series_qp = coeff_distance(apply_map(Xi, -1, m.p), id);

    std::vector<double> res(static_cast<size_t>(samples), 0.0);
    parallel_for(static_cast<size_t>(samples), [&](size_t i) {
        Rng rng(seed, i);
        MatrixTuple X = rng.tuple(g, level);
        for (auto& x : X.X) x *= radius * rng.uniform(0.1, 1.0) / opnorm(x);
        MatrixTuple Y = map_eval(Xi, X).value;
        MatrixTuple back = map_eval(Xi, Y, true).value;
        MatrixTuple Z = map_eval(Xi, X, true).value;
        MatrixTuple fwd = map_eval(Xi, Z).value;
        res[i] = std::max((back - X).max_abs(), (fwd - X).max_abs());
    });
    for (double r : res) rep.sample_residual = std::max(rep.sample_residual, r);
    return rep;
}

std::optional<int> nilpotency_order(const Tuple& T, double tol) {
    if (T.empty()) return 1;
    const auto m = T[0].rows();
    double scale = 0;
    for (const auto& t : T) scale = std::max(scale, opnorm(t));
    if (scale == 0) return 1;

    // orthonormal basis (columns) of span of all products of the current length
    auto orth = [&](const Mat& cols, double ref) -> Mat {
        if (cols.cols() == 0) return cols;
        Eigen::JacobiSVD<Mat> svd(cols, Eigen::ComputeThinU);
        Eigen::Index r = 0;
        for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i)
            if (svd.singularValues()(i) > tol * ref) ++r;
        return svd.matrixU().leftCols(r);
    };
    Mat cols(m * m, static_cast<Eigen::Index>(T.size()));
    for (size_t j = 0; j < T.size(); ++j) cols.col(static_cast<Eigen::Index>(j)) = as_vec(T[j]);
    Mat basis = orth(cols, 1.0);
    for (int len = 1; len <= m + 1; ++len) {
        if (basis.cols() == 0) return len;
        Mat next(m * m, basis.cols() * static_cast<Eigen::Index>(T.size()));
        Eigen::Index c = 0;
        for (Eigen::Index b = 0; b < basis.cols(); ++b) {
            Mat P = Eigen::Map<const Mat>(basis.col(b).data(), m, m);
            for (const auto& t : T) {
                Mat prod = P * t;
                next.col(c++) = as_vec(prod);
            }
        }
        basis = orth(next, scale);
    }
    return std::nullopt;
}

NilpotencyReport nilpotency_and_degree(const Tuple& Xi) {
    require_square_tuple(Xi);
    const int g = static_cast<int>(Xi.size());
    NilpotencyReport rep;
    auto order = nilpotency_order(Xi);
    if (!order) return rep;
    rep.nilpotent = true;
    rep.order = *order;
    MapSeries m = map_series(Xi, *order + 2);
    rep.degree_p = m.p.degree(1e-12);
    rep.bound_holds = rep.order <= std::max(g, 1) && rep.degree_p == rep.order;
    return rep;
}

Tuple direct_sum(const Tuple& a, const Tuple& b) {
    require_square_tuple(a);
    require_square_tuple(b);
    const auto ga = static_cast<Eigen::Index>(a.size()), gb = static_cast<Eigen::Index>(b.size());
    Tuple r;
    for (Eigen::Index j = 0; j < ga + gb; ++j) {
        Mat m = Mat::Zero(ga + gb, ga + gb);
        if (j < ga)
            m.topLeftCorner(ga, ga) = a[static_cast<size_t>(j)];
        else
            m.bottomRightCorner(gb, gb) = b[static_cast<size_t>(j - ga)];
        r.push_back(std::move(m));
    }
    return r;
}

Tuple change_basis(const Tuple& Xi, const Mat& M) {
    require_square_tuple(Xi);
    const auto g = static_cast<Eigen::Index>(Xi.size());
    if (M.rows() != g || M.cols() != g) throw ShapeMismatch("change_basis: M must be g x g");
    Eigen::FullPivLU<Mat> lu(M);
    if (!lu.isInvertible()) throw InvalidInput("change_basis: M is singular");
    Mat Minv = lu.inverse();
    Tuple r;
    for (Eigen::Index j = 0; j < g; ++j) {
        Mat s = Mat::Zero(g, g);
        for (Eigen::Index k = 0; k < g; ++k) s += M(j, k) * Xi[static_cast<size_t>(k)];
        r.push_back(M * s * Minv);
    }
    return r;
}

FreeSeries changed_map_series(const Tuple& Xi, const Mat& M, int N) {
    const int g = static_cast<int>(Xi.size());
    FreeSeries y = identity_map(g, N).right_mul(M);
    return apply_map(Xi, +1, y).right_mul(M.inverse());
}

CompositionReport composition_probe(const Tuple& Xa, const Tuple& Xb, int N, double tol) {
    require_square_tuple(Xa);
    require_square_tuple(Xb);
    if (Xa.size() != Xb.size()) throw VariableMismatch("composition_probe: tuples disagree on g");
    const int g = static_cast<int>(Xa.size());
    CompositionReport rep;
    rep.composite = apply_map(Xa, +1, map_series(Xb, N).p);
    rep.composite.prune(1e-14);

    bool top_layer = false;
    for (const auto& [w, c] : rep.composite.terms())
        if (w.size() == N && max_abs(c) > tol) top_layer = true;
    rep.degree = top_layer ? -1 : rep.composite.degree(tol);

    FreeSeries id = identity_map(g, N);
    double lin = 0;
    for (int j = 0; j < g; ++j) {
        Word w = Word::letter(j);
        lin = std::max(lin, max_abs(rep.composite.coeff(w) - id.coeff(w)));
    }
    lin = std::max(lin, max_abs(rep.composite.coeff(Word())));
    rep.linear_identity = lin <= tol;

    rep.Xi_c.assign(static_cast<size_t>(g), Mat::Zero(g, g));
    for (int j = 0; j < g; ++j)
        for (int k = 0; k < g; ++k)
            rep.Xi_c[static_cast<size_t>(k)].row(j) = rep.composite.coeff(Word({j, k}));
    rep.mismatch = coeff_distance(rep.composite, map_series(rep.Xi_c, N).p);

    std::ostringstream os;
    if (!rep.linear_identity) {
        rep.convexotonic = false;
        os << "not convexotonic, linear part is not the identity";
    } else if (rep.degree > g) {
        rep.convexotonic = false;
        os << "not convexotonic, degree " << rep.degree << " > g=" << g;
    } else if (rep.mismatch > tol || !is_convexotonic(rep.Xi_c, tol).pass) {
        rep.convexotonic = false;
        os << "not convexotonic, composite differs from the map of its quadratic part";
    } else {
        rep.convexotonic = true;
        os << "convexotonic";
    }
    rep.verdict = os.str();
    return rep;
}

}  // namespace freespectra
