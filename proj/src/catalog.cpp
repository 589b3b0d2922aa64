#include "freespectra/catalog.hpp"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "freespectra/io.hpp"

#ifndef FREESPECTRA_CATALOG_DIR
#define FREESPECTRA_CATALOG_DIR "data/catalog/v1"
#endif

namespace freespectra::catalog {

namespace {

void validate(CatalogEntry& e, int N) {
    e.validation.degree = N;
    e.validation.convexotonic_residual = is_convexotonic(e.Xi, 1.0).max_residual;
    StructureResult s = structure_matrices(e.R, e.R);
    double d = 0;
    for (size_t j = 0; j < e.Xi.size(); ++j) d = std::max(d, max_abs(s.Xi[j] - e.Xi[j]));
    e.validation.structure_residual = std::max(d, s.residual);

    MapSeries m = map_series(e.Xi, N);
    if (e.p_formula.empty()) {
        e.p = m.p;
        e.q = m.q;
        e.validation.formula_residual = -1;
    } else {
        e.p = parse_map(e.p_formula, e.g, N, e.params);
        e.q = parse_map(e.q_formula, e.g, N, e.params);
        e.validation.formula_residual = std::max(coeff_distance(e.p, m.p), coeff_distance(e.q, m.q));
    }
    const double scale = std::max(1.0, [&] {
        double r = 0;
        for (const auto& x : e.Xi) r = std::max(r, max_abs(x));
        return r;
    }());
    if (e.validation.convexotonic_residual > 1e-12 * scale || e.validation.structure_residual > 1e-10 * scale ||
        e.validation.formula_residual > 1e-10 * scale)
        throw Error("catalog entry " + e.id + " failed validation");
}

}  // namespace

std::string catalog_dir() {
    if (const char* env = std::getenv("FREESPECTRA_CATALOG_DIR")) return env;
    return FREESPECTRA_CATALOG_DIR;
}

std::vector<ListedEntry> list() {
    io::json idx = io::read_json_file(catalog_dir() + "/index.json");
    std::vector<ListedEntry> out;
    for (const auto& e : idx.at("entries"))
        out.push_back({e.at("id").get<std::string>(), e.at("description").get<std::string>()});
    return out;
}

Tuple ball_tuple(const Vec& v) {
    const auto g = v.size();
    Tuple Xi;
    for (Eigen::Index j = 0; j < g; ++j) {
        Mat m = Mat::Zero(g, g);
        m.col(j) = v.conjugate();
        Xi.push_back(std::move(m));
    }
    return Xi;
}

Pencil ball_pencil(int g) {
    std::vector<Mat> A;
    for (int j = 0; j < g; ++j) {
        Mat m = Mat::Zero(g + 1, g + 1);
        m(0, j + 1) = 1.0;
        A.push_back(std::move(m));
    }
    return Pencil(std::move(A));
}

MatrixTuple ball_automorphism(const Vec& v, const MatrixTuple& X) {
    const auto g = v.size();
    if (X.g() != g) throw VariableMismatch("ball_automorphism: v and X disagree on g");
    const double nv = v.squaredNorm();
    if (!(nv < 1.0)) throw InvalidInput("ball_automorphism: need |v| < 1");
    Mat vv = Mat::Identity(g, g) - v.conjugate() * v.transpose();  // I - v* v
    Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (vv + vv.adjoint()));
    Mat root = es.operatorSqrt();

    MatrixTuple px = map_eval(ball_tuple(v), X).value;  // (1 - X v*)^{-1} X
    const auto n = X.n();
    MatrixTuple out;
    for (Eigen::Index i = 0; i < g; ++i) {
        Mat y = v(i) * Mat::Identity(n, n);
        for (Eigen::Index k = 0; k < g; ++k) y -= std::sqrt(1.0 - nv) * root(k, i) * px[static_cast<int>(k)];
        out.X.push_back(std::move(y));
    }
    return out;
}

Tuple shift_tuple(int g, int size) {
    Mat S = Mat::Zero(size, size);
    for (int i = 0; i + 1 < size; ++i) S(i, i + 1) = 1.0;
    Tuple T;
    Mat P = Mat::Identity(size, size);
    for (int j = 0; j < g; ++j) {
        P = P * S;
        T.push_back(P);
    }
    return T;
}

CatalogEntry get(const std::string& id, const EntryParams& params, int degree) {
    const std::string path = catalog_dir() + "/" + id + ".json";
    if (id.find('/') != std::string::npos || !std::filesystem::exists(path))
        throw InvalidInput("unknown catalog id '" + id + "'");
    io::json j = io::read_json_file(path);

    CatalogEntry e;
    e.id = id;
    e.description = j.value("description", "");

    const std::string gen = j.value("generator", "");
    if (gen == "ball") {
        if (!params.v) throw InvalidInput("catalog 'ball' needs parameter v");
        const Vec& v = *params.v;
        if (v.size() < 1 || !(v.norm() < 1.0)) throw InvalidInput("catalog 'ball': need 0 < g and |v| < 1");
        e.g = static_cast<int>(v.size());
        e.Xi = ball_tuple(v);
        e.R = embed_tuple(e.Xi);
        e.relations = "R_j R_k = conj(v_j) R_k";
        for (Eigen::Index k = 0; k < v.size(); ++k) e.params["v" + std::to_string(k + 1)] = v(k);
    } else if (gen == "shift") {
        const int g = params.size.value_or(3);
        if (g < 1 || g > 8) throw InvalidInput("catalog 'ex6.4': size must lie in 1..8");
        e.g = g;
        e.R = shift_tuple(g, g + 1);
        e.Xi = shift_tuple(g, g);
        e.relations = "R_j R_k = R_{j+k} (zero when j+k > g)";
        e.params["size"] = g;
    } else {
        e.g = j.at("g").get<int>();
        e.relations = j.value("relations", "");
        for (const auto& name : j.value("params", std::vector<std::string>{})) {
            if (name == "alpha") {
                if (!params.alpha) throw InvalidInput("catalog '" + id + "' needs parameter alpha");
                if (!std::isfinite(*params.alpha)) throw InvalidInput("alpha must be a finite real number");
                e.params["alpha"] = *params.alpha;
            }
        }
        auto resolve = [&](const std::string& s) { return parse_scalar(s, e.params); };
        e.Xi = io::tuple_from_json(j.at("Xi"), resolve);
        if (j.at("R").is_string() && j.at("R").get<std::string>() == "embed")
            e.R = embed_tuple(e.Xi);
        else
            e.R = io::tuple_from_json(j.at("R"), resolve);
        e.p_formula = j.at("p").get<std::vector<std::string>>();
        e.q_formula = j.at("q").get<std::vector<std::string>>();
    }
    validate(e, degree);
    return e;
}

}  // namespace freespectra::catalog
