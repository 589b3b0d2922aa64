#pragma once

#include <optional>
#include <string>
#include <vector>

#include "freespectra/convexotonic.hpp"
#include "freespectra/expr.hpp"
#include "freespectra/pencil.hpp"

namespace freespectra::catalog {

struct EntryParams {
    std::optional<double> alpha;  // g3.02
    std::optional<Vec> v;         // ball
    std::optional<int> size;      // ex6.4
};

struct Validation {
    double convexotonic_residual = 0;
    double structure_residual = 0;  // structure_matrices(R, R) vs Xi
    double formula_residual = 0;    // closed forms vs map_series, -1 when none are stored
    int degree = 0;                 // truncation used for the comparison
};

struct CatalogEntry {
    std::string id;
    int g = 0;
    std::string description;
    std::string relations;
    Tuple R;
    Tuple Xi;
    std::vector<std::string> p_formula;
    std::vector<std::string> q_formula;
    FreeSeries p;  // closed forms (or map_series when no closed form is stored)
    FreeSeries q;
    Params params;
    Validation validation;
};

struct ListedEntry {
    std::string id;
    std::string description;
};

// FREESPECTRA_CATALOG_DIR from the environment, else the build-time default.
std::string catalog_dir();
std::vector<ListedEntry> list();
// Throws InvalidInput for unknown ids or bad parameters; re-validates on load.
CatalogEntry get(const std::string& id, const EntryParams& params = {}, int degree = 8);

Tuple ball_tuple(const Vec& v);
Pencil ball_pencil(int g);
// F_v(X) = v - (1 - |v|^2)^{1/2} (1 - X v*)^{-1} X (I - v* v)^{1/2}
MatrixTuple ball_automorphism(const Vec& v, const MatrixTuple& X);
Tuple shift_tuple(int g, int size);

}  // namespace freespectra::catalog
