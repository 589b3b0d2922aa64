#pragma once

#include <doctest.h>

#include "freespectra/catalog.hpp"
#include "freespectra/convexotonic.hpp"

namespace fs_test {

using namespace freespectra;

inline Mat mat(std::initializer_list<std::initializer_list<cplx>> rows) {
    Mat m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.begin()->size()));
    Eigen::Index i = 0;
    for (const auto& r : rows) {
        Eigen::Index j = 0;
        for (cplx v : r) m(i, j++) = v;
        ++i;
    }
    return m;
}

inline catalog::CatalogEntry entry(const std::string& id, int degree = 4) {
    catalog::EntryParams p;
    if (id == "g3.02") p.alpha = 0.5;
    return catalog::get(id, p, degree);
}

inline std::vector<std::string> fixture_ids() {
    std::vector<std::string> ids;
    for (const auto& e : catalog::list())
        if (e.id[0] == 'g') ids.push_back(e.id);
    return ids;
}

}  // namespace fs_test
