#pragma once

#include "rdesplit/convergence.hpp"
#include "rdesplit/model.hpp"

#include <json.hpp>

#include <cstdint>
#include <vector>

namespace rdesplit {

/// {condition, max_ratio, samples, witness: {x, s, u, t[, y]}[, box]}
nlohmann::json to_json(const CheckReport& report);

/// {h, max_ratio, k, m, pairs}
nlohmann::json to_json(const DavieReport& report);

/// {target, slope, norm_kind, seeds, ...}; `slope` is the median over per-seed slopes.
nlohmann::json rate_summary_json(const std::vector<RateReport>& per_seed, const std::vector<std::uint64_t>& seeds);

/// JSON has no infinities; the exact-agreement sentinel is written as the string "exact".
nlohmann::json slope_json(double slope);

/// Median of the values; the mean of the middle two for even counts.
double median(std::vector<double> values);

}  // namespace rdesplit
