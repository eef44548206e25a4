#pragma once

// JSON forms of piecewise-constant functions and Haar expansions. Rationals
// are written as "p/q" strings.
//
//   1D: {"breakpoints": ["0", "1/4", "1"], "values": ["1", "-1"]}
//   2D, 3D: {"breakpoints": [[...], [...], [...]], "values": [...]} with
//   values flat in row-major order, axis 0 slowest.
//   Haar: [{"l": 1, "k": 0, "coeff": "1/2"}, ...]

#include <json.hpp>

#include "hcb/haar.hpp"
#include "hcb/pcfun.hpp"

namespace hcb {

template <std::size_t D>
nlohmann::json pcfun_to_json(const PCFun<D>& f);

/// Throws ParseError on malformed input and the PCFun constructor's errors
/// on an inconsistent grid.
template <std::size_t D>
PCFun<D> pcfun_from_json(const nlohmann::json& j);

/// 1 for a flat breakpoint list, otherwise the number of axes.
std::size_t pcfun_json_dimension(const nlohmann::json& j);

nlohmann::json haar_to_json(const HaarExpansion& e);
HaarExpansion haar_from_json(const nlohmann::json& j);

}  // namespace hcb
