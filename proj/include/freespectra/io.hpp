#pragma once

#include <functional>
#include <string>

#include <json.hpp>

#include "freespectra/convexotonic.hpp"
#include "freespectra/nc_core.hpp"
#include "freespectra/pencil.hpp"

namespace freespectra::io {

using json = nlohmann::json;
// Resolves string-valued matrix entries (e.g. "alpha"); null means strings are rejected.
using ScalarResolver = std::function<cplx(const std::string&)>;

json to_json(cplx z);
json to_json(const Mat& m);
json to_json(const Tuple& t);
json to_json(const MatrixTuple& X);
json to_json(const FreeSeries& f);
json to_json(const HereditaryPoly& h);
json to_json(const Pencil& P);
json xi_to_json(const Tuple& Xi);
json word_to_json(const Word& w);

cplx scalar_from_json(const json& j, const ScalarResolver& resolve = nullptr);
Mat matrix_from_json(const json& j, const ScalarResolver& resolve = nullptr);
Tuple tuple_from_json(const json& j, const ScalarResolver& resolve = nullptr);
MatrixTuple matrix_tuple_from_json(const json& j);
Vec vector_from_json(const json& j);
Word word_from_json(const json& j, int g);
FreeSeries series_from_json(const json& j);
HereditaryPoly hereditary_from_json(const json& j);
// accepts {g, d, A} or a bare array of matrices
Pencil pencil_from_json(const json& j);
// accepts {g, Xi} or a bare array of matrices
Tuple xi_from_json(const json& j);

json read_json_file(const std::string& path);

}  // namespace freespectra::io
