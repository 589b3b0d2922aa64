#pragma once

#include <map>
#include <string>
#include <vector>

#include "freespectra/nc_core.hpp"

namespace freespectra {

using Params = std::map<std::string, cplx>;

// Parses closed-form free expressions such as "inv(1 - x3)*x1*inv(1 - x2)"
// into a 1x1 series truncated at N. Variables are x1..xg (y1..yg is an
// alias), "i" is the imaginary unit, other identifiers come from params.
FreeSeries parse_series(const std::string& text, int g, int N, const Params& params = {});
cplx parse_scalar(const std::string& text, const Params& params = {});
// One expression per coordinate; returns the 1 x g row series.
FreeSeries parse_map(const std::vector<std::string>& coords, int g, int N, const Params& params = {});

}  // namespace freespectra
