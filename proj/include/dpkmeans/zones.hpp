#pragma once

// Convergence-zone geometry: the convergent zone around the current Lloyd
// centroid, the hemisphere-constrained orientation ball used by the baseline
// strategy, and the sub-cluster sampling zone.

#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <stdexcept>
#include <vector>

#include "dpkmeans/core.hpp"

namespace dpkmeans {

// Open ball centered on the current Lloyd centroid whose radius is the last
// centroid displacement; members are the cluster points strictly inside it.
struct ConvergentZone {
    std::vector<double> center;  // s_t
    double radius = 0.0;
    Points members;

    bool empty() const { return members.empty(); }
};

inline ConvergentZone convergent_zone(const Points& cluster_points, std::span<const double> s_t,
                                      std::span<const double> s_prev) {
    if (s_t.size() != s_prev.size())
        throw std::invalid_argument("convergent_zone: dimension mismatch");
    if (!cluster_points.empty() && cluster_points.n_dims != s_t.size())
        throw std::invalid_argument("convergent_zone: point dimension mismatch");
    ConvergentZone zone;
    zone.center.assign(s_t.begin(), s_t.end());
    zone.radius = distance(s_t, s_prev);
    zone.members.n_dims = s_t.size();
    if (zone.radius > 0.0) {
        for (std::size_t i = 0; i < cluster_points.count; ++i) {
            auto p = cluster_points.row(i);
            if (distance(p, s_t) < zone.radius) zone.members.push_back(p);
        }
    }
    return zone;
}

// Orientation ball of the baseline strategy: radius r/2, centered halfway
// along a unit direction drawn uniformly from the hemisphere around the
// centroid movement s_t - s_prev (the d-dimensional form of theta in
// [-pi/2, pi/2]).
struct BaselineSamplingBall {
    std::vector<double> direction;  // unit vector
    std::vector<double> center;     // s_t + (r/2) * direction
    double radius = 0.0;
};

inline std::vector<double> sample_unit_vector(std::size_t dims, Rng& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<double> v(dims);
    double norm2 = 0.0;
    do {
        norm2 = 0.0;
        for (double& x : v) {
            x = gauss(rng);
            norm2 += x * x;
        }
    } while (norm2 == 0.0);
    const double inv = 1.0 / std::sqrt(norm2);
    for (double& x : v) x *= inv;
    return v;
}

inline BaselineSamplingBall baseline_orientation(std::span<const double> s_t,
                                                 std::span<const double> s_prev, Rng& rng) {
    if (s_t.size() != s_prev.size())
        throw std::invalid_argument("baseline_orientation: dimension mismatch");
    const double r = distance(s_t, s_prev);
    if (r <= 0.0) throw std::invalid_argument("baseline_orientation: zero radius");
    std::vector<double> movement(s_t.size());
    for (std::size_t d = 0; d < s_t.size(); ++d) movement[d] = s_t[d] - s_prev[d];
    std::vector<double> u = sample_unit_vector(s_t.size(), rng);
    double dot = std::inner_product(u.begin(), u.end(), movement.begin(), 0.0);
    if (dot < 0.0) {  // reflect into the forward hemisphere
        for (double& x : u) x = -x;
    }
    BaselineSamplingBall ball;
    ball.radius = r / 2.0;
    ball.center.resize(s_t.size());
    for (std::size_t d = 0; d < s_t.size(); ++d) ball.center[d] = s_t[d] + ball.radius * u[d];
    ball.direction = std::move(u);
    return ball;
}

struct SamplingZone {
    Points candidates;

    bool empty() const { return candidates.empty(); }
};

// Zone members inside the orientation ball; when the ball captures none, fall
// back to the full member set; an empty zone stays empty (caller skips).
inline SamplingZone baseline_candidates(const ConvergentZone& zone, const BaselineSamplingBall& ball) {
    SamplingZone sz;
    sz.candidates.n_dims = zone.members.n_dims;
    for (std::size_t i = 0; i < zone.members.count; ++i) {
        auto p = zone.members.row(i);
        if (distance(p, ball.center) <= ball.radius) sz.candidates.push_back(p);
    }
    if (sz.candidates.empty()) sz.candidates = zone.members;
    return sz;
}

struct SubClusterPartition {
    CentroidSet sub_centroids;
    std::vector<std::size_t> sub_assignments;  // label per zone member
    std::vector<std::size_t> counts;           // points per sub-cluster
    std::vector<double> probabilities;         // counts / total, empty clusters get 0
};

struct SubClusterDraw {
    SamplingZone zone;
    SubClusterPartition partition;
    std::size_t chosen = 0;  // index of the sampled sub-cluster
};

inline constexpr std::size_t kSubLloydMaxIters = 20;
inline constexpr double kSubLloydTol = 1e-6;

// Lloyd over the zone members with k' = min(internal_k, member count), then a
// categorical draw over sub-clusters weighted by point counts; the drawn
// sub-cluster's members become the sampling zone.
inline SubClusterDraw subcluster_sampling_zone(const ConvergentZone& zone, std::size_t internal_k,
                                               Rng& rng) {
    if (internal_k == 0) throw std::invalid_argument("subcluster_sampling_zone: internal_k must be >= 1");
    if (zone.empty()) throw std::invalid_argument("subcluster_sampling_zone: empty convergent zone");
    const std::size_t k_eff = std::min(internal_k, zone.members.count);
    const Dataset member_data = make_dataset(zone.members.values, zone.members.n_dims);

    SubClusterDraw draw;
    const LloydResult sub = lloyd(member_data, k_eff, kSubLloydMaxIters, kSubLloydTol, rng);
    const Assignment asg = assign(member_data, sub.centroids);
    draw.partition.sub_centroids = sub.centroids;
    draw.partition.sub_assignments = asg.labels;
    draw.partition.counts = asg.cluster_sizes;
    draw.partition.probabilities.resize(k_eff);
    for (std::size_t j = 0; j < k_eff; ++j)
        draw.partition.probabilities[j] =
            static_cast<double>(asg.cluster_sizes[j]) / static_cast<double>(zone.members.count);

    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const double u = unit(rng);
    double acc = 0.0;
    draw.chosen = k_eff;
    for (std::size_t j = 0; j < k_eff; ++j) {
        acc += draw.partition.probabilities[j];
        if (u < acc) {
            draw.chosen = j;
            break;
        }
    }
    if (draw.chosen == k_eff) {  // cumulative rounding: take the last non-empty sub-cluster
        for (std::size_t j = k_eff; j-- > 0;) {
            if (asg.cluster_sizes[j] > 0) {
                draw.chosen = j;
                break;
            }
        }
    }
    draw.zone.candidates.n_dims = zone.members.n_dims;
    for (std::size_t i = 0; i < zone.members.count; ++i)
        if (asg.labels[i] == draw.chosen) draw.zone.candidates.push_back(zone.members.row(i));
    return draw;
}

}  // namespace dpkmeans
