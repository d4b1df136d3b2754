#include "rdesplit/reports.hpp"

#include "rdesplit/errors.hpp"

#include <algorithm>

namespace rdesplit {

namespace {

nlohmann::json vector_json(const Vector& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

}  // namespace

nlohmann::json to_json(const CheckReport& report) {
    nlohmann::json witness = {{"x", vector_json(report.witness.x)},
                              {"s", report.witness.s},
                              {"u", report.witness.u},
                              {"t", report.witness.t}};
    if (report.witness.y) witness["y"] = vector_json(*report.witness.y);
    nlohmann::json out = {{"condition", report.condition},
                          {"max_ratio", report.max_ratio},
                          {"samples", report.samples},
                          {"witness", witness}};
    if (report.box_radius) out["box"] = *report.box_radius;
    return out;
}

nlohmann::json to_json(const DavieReport& report) {
    return {{"h", report.h}, {"max_ratio", report.max_ratio}, {"k", report.k}, {"m", report.m}, {"pairs", report.pairs}};
}

nlohmann::json slope_json(double slope) {
    if (is_exact_agreement(slope)) return "exact";
    return slope;
}

double median(std::vector<double> values) {
    require(!values.empty(), "median of an empty set");
    std::sort(values.begin(), values.end());
    const auto mid = values.size() / 2;
    return values.size() % 2 == 1 ? values[mid] : 0.5 * (values[mid - 1] + values[mid]);
}

nlohmann::json rate_summary_json(const std::vector<RateReport>& per_seed, const std::vector<std::uint64_t>& seeds) {
    require(!per_seed.empty() && per_seed.size() == seeds.size(), "rate summary: one report per seed");
    std::vector<double> slopes;
    nlohmann::json slope_list = nlohmann::json::array();
    for (const auto& r : per_seed) {
        slopes.push_back(r.slope);
        slope_list.push_back(slope_json(r.slope));
    }
    const auto& first = per_seed.front();
    nlohmann::json out = {{"target", first.target},
                          {"slope", slope_json(median(slopes))},
                          {"norm_kind", norm_kind_name(first)},
                          {"seeds", seeds},
                          {"slopes", slope_list},
                          {"levels", first.levels},
                          {"sampling", first.sampling}};
    return out;
}

}  // namespace rdesplit
