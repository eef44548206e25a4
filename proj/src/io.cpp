#include "hcb/io.hpp"

#include "hcb/error.hpp"

namespace hcb {

namespace {

using nlohmann::json;

Rational rational_from(const json& v) {
  if (v.is_string()) return parse_rational(v.get<std::string>());
  if (v.is_number_integer()) return Rational(v.get<long>());
  throw Error(ErrorCode::ParseError, "expected a fraction string, got " + v.dump());
}

std::vector<Rational> rationals_from(const json& v) {
  if (!v.is_array()) throw Error(ErrorCode::ParseError, "expected an array, got " + v.dump());
  std::vector<Rational> out;
  out.reserve(v.size());
  for (const auto& x : v) out.push_back(rational_from(x));
  return out;
}

json strings(const std::vector<Rational>& v) {
  json out = json::array();
  for (const auto& x : v) out.push_back(to_string(x));
  return out;
}

const json& field(const json& j, const char* name) {
  if (!j.is_object() || !j.contains(name)) throw Error(ErrorCode::ParseError, std::string("missing field ") + name);
  return j.at(name);
}

}  // namespace

std::size_t pcfun_json_dimension(const json& j) {
  const json& br = field(j, "breakpoints");
  if (!br.is_array() || br.empty()) throw Error(ErrorCode::ParseError, "breakpoints must be a non-empty array");
  return br.front().is_array() ? br.size() : 1;
}

template <std::size_t D>
json pcfun_to_json(const PCFun<D>& f) {
  json out;
  if constexpr (D == 1) {
    out["breakpoints"] = strings(f.breaks());
  } else {
    out["breakpoints"] = json::array();
    for (std::size_t d = 0; d < D; ++d) out["breakpoints"].push_back(strings(f.breaks(d)));
  }
  out["values"] = strings(f.values());
  return out;
}

template <std::size_t D>
PCFun<D> pcfun_from_json(const json& j) {
  if (pcfun_json_dimension(j) != D) {
    throw Error(ErrorCode::DimensionMismatch, "expected a " + std::to_string(D) + "D function");
  }
  const json& br = field(j, "breakpoints");
  typename PCFun<D>::Grid grid;
  if constexpr (D == 1) {
    grid[0] = rationals_from(br);
  } else {
    for (std::size_t d = 0; d < D; ++d) grid[d] = rationals_from(br[d]);
  }
  return PCFun<D>(std::move(grid), rationals_from(field(j, "values")));
}

json haar_to_json(const HaarExpansion& e) {
  json out = json::array();
  for (const auto& [idx, c] : e) out.push_back({{"l", idx.level}, {"k", idx.k}, {"coeff", to_string(c)}});
  return out;
}

HaarExpansion haar_from_json(const json& j) {
  if (!j.is_array()) throw Error(ErrorCode::ParseError, "expected an array of coefficients");
  HaarExpansion out;
  for (const auto& item : j) {
    const json& l = field(item, "l");
    const json& k = field(item, "k");
    if (!l.is_number_integer() || !k.is_number_integer()) throw Error(ErrorCode::ParseError, "l and k must be integers");
    HaarIndex idx{l.get<int>(), k.get<long>()};
    check_index(idx);
    out[idx] += rational_from(field(item, "coeff"));
  }
  return out;
}

template json pcfun_to_json<1>(const PCFun<1>&);
template json pcfun_to_json<2>(const PCFun<2>&);
template json pcfun_to_json<3>(const PCFun<3>&);
template PCFun<1> pcfun_from_json<1>(const json&);
template PCFun<2> pcfun_from_json<2>(const json&);
template PCFun<3> pcfun_from_json<3>(const json&);

}  // namespace hcb
