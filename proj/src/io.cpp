#include "freespectra/io.hpp"

#include <fstream>
#include <sstream>

namespace freespectra::io {

json to_json(cplx z) {
    return json::array({z.real(), z.imag()});
}

json to_json(const Mat& m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(to_json(m(i, j)));
        rows.push_back(std::move(row));
    }
    return rows;
}

json to_json(const Tuple& t) {
    json arr = json::array();
    for (const auto& m : t) arr.push_back(to_json(m));
    return arr;
}

json to_json(const MatrixTuple& X) {
    return to_json(X.X);
}

json word_to_json(const Word& w) {
    json arr = json::array();
    for (int l : w.letters) arr.push_back(l + 1);
    return arr;
}

json to_json(const FreeSeries& f) {
    json terms = json::array();
    for (const auto& [w, c] : f.terms()) terms.push_back({{"word", word_to_json(w)}, {"coeff", to_json(c)}});
    return {{"g", f.g()}, {"rows", f.rows()}, {"cols", f.cols()}, {"max_degree", f.max_degree()}, {"terms", terms}};
}

json to_json(const HereditaryPoly& h) {
    json terms = json::array();
    for (const auto& [k, c] : h.terms())
        terms.push_back({{"left", word_to_json(k.first)}, {"right", word_to_json(k.second)}, {"coeff", to_json(c)}});
    return {{"g", h.g()}, {"rows", h.rows()}, {"cols", h.cols()}, {"terms", terms}};
}

json to_json(const Pencil& P) {
    return {{"g", P.g()}, {"d", P.d()}, {"A", to_json(P.A)}};
}

json xi_to_json(const Tuple& Xi) {
    return {{"g", Xi.size()}, {"Xi", to_json(Xi)}};
}

cplx scalar_from_json(const json& j, const ScalarResolver& resolve) {
    if (j.is_number()) return {j.get<double>(), 0.0};
    if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
        return {j[0].get<double>(), j[1].get<double>()};
    if (j.is_string() && resolve) return resolve(j.get<std::string>());
    throw InvalidInput("expected a complex scalar [re, im] or a number, got " + j.dump());
}

Mat matrix_from_json(const json& j, const ScalarResolver& resolve) {
    if (!j.is_array() || j.empty() || !j[0].is_array()) throw InvalidInput("expected a row-major matrix");
    const auto r = static_cast<Eigen::Index>(j.size());
    const auto c = static_cast<Eigen::Index>(j[0].size());
    Mat m(r, c);
    for (Eigen::Index i = 0; i < r; ++i) {
        const auto& row = j[static_cast<size_t>(i)];
        if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != c)
            throw InvalidInput("matrix rows have inconsistent lengths");
        for (Eigen::Index k = 0; k < c; ++k) m(i, k) = scalar_from_json(row[static_cast<size_t>(k)], resolve);
    }
    return m;
}

Tuple tuple_from_json(const json& j, const ScalarResolver& resolve) {
    if (!j.is_array()) throw InvalidInput("expected an array of matrices");
    Tuple t;
    for (const auto& m : j) t.push_back(matrix_from_json(m, resolve));
    return t;
}

MatrixTuple matrix_tuple_from_json(const json& j) {
    const json& arr = j.is_object() && j.contains("X") ? j.at("X") : j;
    return MatrixTuple(tuple_from_json(arr));
}

Vec vector_from_json(const json& j) {
    if (!j.is_array()) throw InvalidInput("expected an array of scalars");
    Vec v(static_cast<Eigen::Index>(j.size()));
    for (size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = scalar_from_json(j[i]);
    return v;
}

Word word_from_json(const json& j, int g) {
    if (!j.is_array()) throw InvalidInput("word must be an array of indices");
    Word w;
    for (const auto& l : j) {
        int v = l.get<int>();
        if (v < 1 || v > g) throw VariableMismatch("word index outside 1..g");
        w.letters.push_back(v - 1);
    }
    return w;
}

FreeSeries series_from_json(const json& j) {
    const int g = j.at("g").get<int>();
    FreeSeries f(g, j.at("rows").get<Eigen::Index>(), j.at("cols").get<Eigen::Index>(), j.at("max_degree").get<int>());
    for (const auto& t : j.at("terms")) f.add_to(word_from_json(t.at("word"), g), matrix_from_json(t.at("coeff")));
    return f;
}

HereditaryPoly hereditary_from_json(const json& j) {
    const int g = j.at("g").get<int>();
    HereditaryPoly h(g, j.at("rows").get<Eigen::Index>(), j.at("cols").get<Eigen::Index>());
    for (const auto& t : j.at("terms"))
        h.add_to(word_from_json(t.at("left"), g), word_from_json(t.at("right"), g), matrix_from_json(t.at("coeff")));
    return h;
}

Pencil pencil_from_json(const json& j) {
    const json& arr = j.is_object() ? j.at("A") : j;
    Pencil P(tuple_from_json(arr));
    if (j.is_object()) {
        if (j.contains("g") && j.at("g").get<int>() != P.g()) throw InvalidInput("pencil: g does not match A");
        if (j.contains("d") && j.at("d").get<Eigen::Index>() != P.d()) throw InvalidInput("pencil: d does not match A");
    }
    return P;
}

Tuple xi_from_json(const json& j) {
    const json& arr = j.is_object() ? j.at("Xi") : j;
    Tuple Xi = tuple_from_json(arr);
    if (j.is_object() && j.contains("g") && j.at("g").get<size_t>() != Xi.size())
        throw InvalidInput("Xi: g does not match the tuple length");
    return Xi;
}

json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidInput("cannot open " + path);
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw InvalidInput(path + ": " + e.what());
    }
}

}  // namespace freespectra::io
