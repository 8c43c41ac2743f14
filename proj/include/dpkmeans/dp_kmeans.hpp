#pragma once

// Differentially private k-means driver: per-iteration Lloyd step, zone
// construction, exponential-mechanism centroid sampling (baseline orientation
// ball or sub-clustering), convergence-invariant bookkeeping, and the final
// Laplace release.

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "dpkmeans/core.hpp"
#include "dpkmeans/dp_mech.hpp"
#include "dpkmeans/zones.hpp"

namespace dpkmeans {

enum class StrategyVariant { baseline_orientation, subcluster };

struct Strategy {
    StrategyVariant variant = StrategyVariant::subcluster;
    std::size_t internal_k = 0;  // sub-clusters per zone; used by subcluster only
};

inline Strategy make_strategy(StrategyVariant variant, std::size_t internal_k = 0) {
    if (variant == StrategyVariant::subcluster && internal_k < 2)
        throw std::invalid_argument("make_strategy: subcluster requires internal_k >= 2");
    return Strategy{variant, internal_k};
}

inline std::string strategy_name(StrategyVariant v) {
    return v == StrategyVariant::baseline_orientation ? "baseline" : "subcluster";
}

enum class SkipReason { none, zero_radius, empty_zone };

inline std::string skip_reason_name(SkipReason r) {
    switch (r) {
        case SkipReason::zero_radius: return "zero_radius";
        case SkipReason::empty_zone: return "empty_zone";
        default: return "none";
    }
}

// One (iteration, cluster) record; `invariant_ok` tracks the convergence
// condition ||sampled - s_lloyd|| < ||s_lloyd - s_prev||.
struct TraceEntry {
    std::size_t iteration = 0;
    std::size_t cluster = 0;
    std::vector<double> s_prev;
    std::vector<double> s_lloyd;
    double radius = 0.0;
    std::size_t zone_size = 0;
    bool has_sample = false;
    std::vector<double> sampled;
    bool invariant_ok = true;
    bool skipped = false;
    SkipReason reason = SkipReason::none;
};

struct IterationOutcome {
    CentroidSet centroids;
    std::vector<TraceEntry> entries;  // one per cluster
};

// One private update pass: assign + recenter gives the Lloyd centroid, the
// convergent zone bounds the perturbation, and the strategy's sampling zone
// feeds the exponential mechanism with the zone radius as score sensitivity.
// Zero-radius or member-less zones keep the Lloyd centroid and are marked
// skipped.
inline IterationOutcome dp_kmeans_iteration(const Dataset& data, const CentroidSet& current,
                                            const Strategy& strategy, double eps_exp,
                                            std::size_t iteration_index, Rng& rng) {
    if (eps_exp <= 0.0) throw std::invalid_argument("dp_kmeans_iteration: eps_exp must be > 0");
    const Assignment asg = assign(data, current);
    const CentroidSet lloyd_cents = recenter(data, asg, current);

    std::vector<Points> cluster_points(current.k);
    for (std::size_t j = 0; j < current.k; ++j) cluster_points[j].n_dims = data.n_dims;
    for (std::size_t i = 0; i < data.n_points; ++i)
        cluster_points[asg.labels[i]].push_back(data.point(i));

    IterationOutcome out;
    out.centroids.k = current.k;
    out.centroids.n_dims = current.n_dims;
    out.centroids.values.resize(current.values.size());
    out.entries.reserve(current.k);

    for (std::size_t j = 0; j < current.k; ++j) {
        TraceEntry entry;
        entry.iteration = iteration_index;
        entry.cluster = j;
        auto s_prev = current.centroid(j);
        auto s_lloyd = lloyd_cents.centroid(j);
        entry.s_prev.assign(s_prev.begin(), s_prev.end());
        entry.s_lloyd.assign(s_lloyd.begin(), s_lloyd.end());
        entry.radius = distance(s_lloyd, s_prev);

        auto keep_lloyd = [&](SkipReason reason) {
            entry.skipped = true;
            entry.reason = reason;
            std::copy(s_lloyd.begin(), s_lloyd.end(), out.centroids.centroid(j).begin());
        };

        if (entry.radius <= 0.0) {
            keep_lloyd(SkipReason::zero_radius);
            out.entries.push_back(std::move(entry));
            continue;
        }
        const ConvergentZone zone = convergent_zone(cluster_points[j], s_lloyd, s_prev);
        entry.zone_size = zone.members.count;
        if (zone.empty()) {
            keep_lloyd(SkipReason::empty_zone);
            out.entries.push_back(std::move(entry));
            continue;
        }

        SamplingZone sampling;
        if (strategy.variant == StrategyVariant::baseline_orientation) {
            const BaselineSamplingBall ball = baseline_orientation(s_lloyd, s_prev, rng);
            sampling = baseline_candidates(zone, ball);
        } else {
            sampling = subcluster_sampling_zone(zone, strategy.internal_k, rng).zone;
        }

        std::vector<double> scores(sampling.candidates.count);
        for (std::size_t c = 0; c < sampling.candidates.count; ++c)
            scores[c] = score_q(sampling.candidates.row(c), s_lloyd);
        const ScoredCandidateSet scored =
            make_scored_candidates(sampling.candidates, std::move(scores), zone.radius);
        const std::size_t pick = exp_mechanism(scored, eps_exp, rng);
        auto sampled = scored.candidates.row(pick);
        entry.has_sample = true;
        entry.sampled.assign(sampled.begin(), sampled.end());
        entry.invariant_ok = distance(sampled, s_lloyd) < entry.radius;
        std::copy(sampled.begin(), sampled.end(), out.centroids.centroid(j).begin());
        out.entries.push_back(std::move(entry));
    }
    return out;
}

// Per-coordinate Laplace noise with the noisy-average sensitivity (d + 1) / n_i
// on [0,1]^d data, then clamping back into the unit cube. Sizes come from the
// final private assignment; a size below 1 is rejected (callers substitute 1
// for empty clusters).
inline CentroidSet finalize_laplace(const CentroidSet& cents,
                                    std::span<const std::size_t> cluster_sizes, double eps_lap,
                                    Rng& rng) {
    if (eps_lap <= 0.0) throw std::invalid_argument("finalize_laplace: eps_lap must be > 0");
    if (cluster_sizes.size() != cents.k)
        throw std::invalid_argument("finalize_laplace: cluster size count mismatch");
    for (std::size_t n : cluster_sizes)
        if (n == 0) throw std::invalid_argument("finalize_laplace: cluster sizes must be >= 1");
    CentroidSet out = cents;
    const double d = static_cast<double>(cents.n_dims);
    for (std::size_t j = 0; j < cents.k; ++j) {
        const double scale = ((d + 1.0) / static_cast<double>(cluster_sizes[j])) / eps_lap;
        auto c = out.centroid(j);
        for (double& v : c) {
            v += laplace_sample(scale, rng);
            v = std::clamp(v, 0.0, 1.0);
        }
    }
    return out;
}

struct DpRunResult {
    CentroidSet final_centroids;      // after the Laplace release
    CentroidSet pre_noise_centroids;  // after the last exponential-mechanism iteration
    std::vector<TraceEntry> trace;    // iterations * k entries
    double cost_dp = 0.0;
    PrivacyBudget budget;
    std::uint64_t seed = 0;
};

// Full private run: uniform centroid seeding, budget.iterations rounds of
// dp_kmeans_iteration, then the Laplace release using the final private
// assignment's cluster sizes (empty clusters are noised at size 1).
inline DpRunResult run_dp_kmeans(const Dataset& data, std::size_t k, const PrivacyBudget& budget,
                                 const Strategy& strategy, std::uint64_t seed) {
    if (!data.normalized)
        throw std::invalid_argument("run_dp_kmeans: data must be normalized to [0,1]^d");
    if (budget.eps_exp <= 0.0 || budget.eps_lap <= 0.0 || budget.iterations == 0)
        throw std::invalid_argument("run_dp_kmeans: invalid budget");
    DpRunResult res;
    res.budget = budget;
    res.seed = seed;
    Rng rng(seed);
    CentroidSet current = init_centroids(data, k, rng);
    res.trace.reserve(budget.iterations * k);
    for (std::size_t t = 0; t < budget.iterations; ++t) {
        IterationOutcome out = dp_kmeans_iteration(data, current, strategy, budget.eps_exp, t, rng);
        current = std::move(out.centroids);
        for (auto& e : out.entries) res.trace.push_back(std::move(e));
    }
    res.pre_noise_centroids = current;
    Assignment final_asg = assign(data, current);
    std::vector<std::size_t> sizes = final_asg.cluster_sizes;
    for (std::size_t& n : sizes)
        if (n == 0) n = 1;
    res.final_centroids = finalize_laplace(current, sizes, budget.eps_lap, rng);
    res.cost_dp = wcss_cost(data, res.final_centroids);
    return res;
}

struct AuditResult {
    bool ok = true;
    std::vector<std::pair<std::size_t, std::size_t>> violations;  // (iteration, cluster)
};

// ok iff every non-skipped entry satisfied the convergence invariant.
inline AuditResult audit_invariant(std::span<const TraceEntry> trace) {
    AuditResult res;
    for (const TraceEntry& e : trace) {
        if (e.skipped) continue;
        if (!e.has_sample || !e.invariant_ok) {
            res.ok = false;
            res.violations.emplace_back(e.iteration, e.cluster);
        }
    }
    return res;
}

}  // namespace dpkmeans
