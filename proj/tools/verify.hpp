#pragma once

// Invariant suites behind `verify-identities` and `verify-all`.

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "hcb/baker_map.hpp"

namespace hcb::cli {

struct CheckResult {
  std::string name;
  bool pass;
  std::string detail;
};

/// Tensor split, composition formulas and the reduced-operator projection on
/// `count` random functions for n <= n_max.
std::vector<CheckResult> verify_identities(const BakerParams& params, unsigned n_max, unsigned count,
                                           std::uint64_t seed);

/// Every invariant family at reduced sizes.
std::vector<CheckResult> verify_all(std::uint64_t seed, unsigned threads);

nlohmann::json report_json(const std::vector<CheckResult>& checks);

bool all_pass(const std::vector<CheckResult>& checks);

}  // namespace hcb::cli
