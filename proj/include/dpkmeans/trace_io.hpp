#pragma once

// JSON serialization of run traces and results.

#include <ostream>

#include <json.hpp>

#include "dpkmeans/dp_kmeans.hpp"

namespace dpkmeans {

inline nlohmann::json trace_entry_to_json(const TraceEntry& e) {
    nlohmann::json j{
        {"iteration", e.iteration}, {"cluster", e.cluster},   {"s_prev", e.s_prev},
        {"s_lloyd", e.s_lloyd},     {"radius", e.radius},     {"zone_size", e.zone_size},
        {"skipped", e.skipped},     {"reason", skip_reason_name(e.reason)},
    };
    if (e.has_sample) {
        j["sampled"] = e.sampled;
        j["invariant_ok"] = e.invariant_ok;
    }
    return j;
}

inline nlohmann::json trace_to_json(std::span<const TraceEntry> trace) {
    nlohmann::json arr = nlohmann::json::array();
    for (const TraceEntry& e : trace) arr.push_back(trace_entry_to_json(e));
    return arr;
}

inline nlohmann::json run_result_to_json(const DpRunResult& res) {
    return nlohmann::json{
        {"seed", res.seed},
        {"cost_dp", res.cost_dp},
        {"budget",
         {{"eps_exp", res.budget.eps_exp},
          {"eps_lap", res.budget.eps_lap},
          {"iterations", res.budget.iterations},
          {"total", total_budget(res.budget)}}},
        {"pre_noise_centroids", res.pre_noise_centroids.values},
        {"final_centroids", res.final_centroids.values},
        {"k", res.final_centroids.k},
        {"n_dims", res.final_centroids.n_dims},
        {"trace", trace_to_json(res.trace)},
    };
}

inline void write_trace(std::ostream& os, const DpRunResult& res) {
    os << run_result_to_json(res).dump(2) << '\n';
}

}  // namespace dpkmeans
