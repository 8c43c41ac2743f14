#pragma once

// Non-private k-means primitives: dataset/centroid containers, nearest-centroid
// assignment, mean recentering, WCSS cost, and seeded Lloyd iteration.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numeric>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace dpkmeans {

using Rng = std::mt19937_64;

// Row-major point buffer shared by clusters, zones and candidate sets.
struct Points {
    std::vector<double> values;
    std::size_t count = 0;
    std::size_t n_dims = 0;

    std::span<const double> row(std::size_t i) const {
        return {values.data() + i * n_dims, n_dims};
    }
    void push_back(std::span<const double> p) {
        if (count == 0 && n_dims == 0) n_dims = p.size();
        if (p.size() != n_dims) throw std::invalid_argument("Points: mixed dimensions");
        values.insert(values.end(), p.begin(), p.end());
        ++count;
    }
    bool empty() const { return count == 0; }
};

struct Dataset {
    std::vector<double> values;  // n_points x n_dims, row-major
    std::size_t n_points = 0;
    std::size_t n_dims = 0;
    bool normalized = false;

    std::span<const double> point(std::size_t i) const {
        return {values.data() + i * n_dims, n_dims};
    }
};

inline Dataset make_dataset(std::vector<double> values, std::size_t n_dims, bool normalized = false) {
    if (n_dims == 0) throw std::invalid_argument("make_dataset: n_dims must be >= 1");
    if (values.empty() || values.size() % n_dims != 0)
        throw std::invalid_argument("make_dataset: value count not a multiple of n_dims");
    for (double v : values)
        if (!std::isfinite(v)) throw std::invalid_argument("make_dataset: non-finite coordinate");
    Dataset d;
    d.n_points = values.size() / n_dims;
    d.n_dims = n_dims;
    d.values = std::move(values);
    d.normalized = normalized;
    if (normalized) {
        for (double v : d.values)
            if (v < 0.0 || v > 1.0)
                throw std::invalid_argument("make_dataset: normalized data outside [0,1]");
    }
    return d;
}

struct CentroidSet {
    std::vector<double> values;  // k x n_dims, row-major
    std::size_t k = 0;
    std::size_t n_dims = 0;

    std::span<const double> centroid(std::size_t i) const {
        return {values.data() + i * n_dims, n_dims};
    }
    std::span<double> centroid(std::size_t i) {
        return {values.data() + i * n_dims, n_dims};
    }
};

inline CentroidSet make_centroid_set(std::vector<double> values, std::size_t n_dims) {
    if (n_dims == 0) throw std::invalid_argument("make_centroid_set: n_dims must be >= 1");
    if (values.empty() || values.size() % n_dims != 0)
        throw std::invalid_argument("make_centroid_set: value count not a multiple of n_dims");
    for (double v : values)
        if (!std::isfinite(v)) throw std::invalid_argument("make_centroid_set: non-finite coordinate");
    CentroidSet c;
    c.k = values.size() / n_dims;
    c.n_dims = n_dims;
    c.values = std::move(values);
    return c;
}

struct Assignment {
    std::vector<std::size_t> labels;         // one per point, in [0, k)
    std::vector<std::size_t> cluster_sizes;  // one per cluster, sums to n_points
};

inline double squared_distance(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double diff = a[i] - b[i];
        s += diff * diff;
    }
    return s;
}

inline double distance(std::span<const double> a, std::span<const double> b) {
    return std::sqrt(squared_distance(a, b));
}

// k distinct rows drawn uniformly without replacement (partial Fisher-Yates).
inline CentroidSet init_centroids(const Dataset& data, std::size_t k, Rng& rng) {
    if (k == 0) throw std::invalid_argument("init_centroids: k must be >= 1");
    if (k > data.n_points) throw std::invalid_argument("init_centroids: k exceeds point count");
    std::vector<std::size_t> idx(data.n_points);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    CentroidSet cents;
    cents.k = k;
    cents.n_dims = data.n_dims;
    cents.values.reserve(k * data.n_dims);
    for (std::size_t i = 0; i < k; ++i) {
        std::uniform_int_distribution<std::size_t> pick(i, data.n_points - 1);
        std::swap(idx[i], idx[pick(rng)]);
        auto p = data.point(idx[i]);
        cents.values.insert(cents.values.end(), p.begin(), p.end());
    }
    return cents;
}

inline std::size_t nearest_centroid(std::span<const double> p, const CentroidSet& cents) {
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < cents.k; ++j) {
        const double d = squared_distance(p, cents.centroid(j));
        if (d < best_d) {  // ties keep the lowest index
            best_d = d;
            best = j;
        }
    }
    return best;
}

inline Assignment assign(const Dataset& data, const CentroidSet& cents) {
    if (data.n_dims != cents.n_dims)
        throw std::invalid_argument("assign: dimension mismatch");
    Assignment asg;
    asg.labels.resize(data.n_points);
    asg.cluster_sizes.assign(cents.k, 0);
    for (std::size_t i = 0; i < data.n_points; ++i) {
        const std::size_t j = nearest_centroid(data.point(i), cents);
        asg.labels[i] = j;
        ++asg.cluster_sizes[j];
    }
    return asg;
}

// Mean of each cluster; an empty cluster keeps its previous centroid.
inline CentroidSet recenter(const Dataset& data, const Assignment& asg, const CentroidSet& prev) {
    if (data.n_dims != prev.n_dims)
        throw std::invalid_argument("recenter: dimension mismatch");
    if (asg.labels.size() != data.n_points || asg.cluster_sizes.size() != prev.k)
        throw std::invalid_argument("recenter: assignment inconsistent with data/centroids");
    CentroidSet next;
    next.k = prev.k;
    next.n_dims = prev.n_dims;
    next.values.assign(prev.k * prev.n_dims, 0.0);
    for (std::size_t i = 0; i < data.n_points; ++i) {
        auto p = data.point(i);
        auto c = next.centroid(asg.labels[i]);
        for (std::size_t d = 0; d < p.size(); ++d) c[d] += p[d];
    }
    for (std::size_t j = 0; j < prev.k; ++j) {
        auto c = next.centroid(j);
        const std::size_t n = asg.cluster_sizes[j];
        if (n == 0) {
            auto keep = prev.centroid(j);
            std::copy(keep.begin(), keep.end(), c.begin());
        } else {
            for (double& v : c) v /= static_cast<double>(n);
        }
    }
    return next;
}

// Within-cluster sum of squared distances under nearest-centroid assignment.
inline double wcss_cost(const Dataset& data, const CentroidSet& cents) {
    if (data.n_dims != cents.n_dims)
        throw std::invalid_argument("wcss_cost: dimension mismatch");
    double cost = 0.0;
    for (std::size_t i = 0; i < data.n_points; ++i) {
        auto p = data.point(i);
        cost += squared_distance(p, cents.centroid(nearest_centroid(p, cents)));
    }
    return cost;
}

struct LloydResult {
    CentroidSet centroids;
    double cost = 0.0;
    std::size_t iterations = 0;
};

// Alternate assign/recenter until the largest centroid displacement is <= tol
// or max_iters is exhausted.
inline LloydResult lloyd(const Dataset& data, std::size_t k, std::size_t max_iters, double tol, Rng& rng) {
    if (max_iters == 0) throw std::invalid_argument("lloyd: max_iters must be >= 1");
    if (tol < 0.0) throw std::invalid_argument("lloyd: tol must be >= 0");
    LloydResult res;
    res.centroids = init_centroids(data, k, rng);
    for (std::size_t it = 0; it < max_iters; ++it) {
        const Assignment asg = assign(data, res.centroids);
        CentroidSet next = recenter(data, asg, res.centroids);
        double max_disp = 0.0;
        for (std::size_t j = 0; j < k; ++j)
            max_disp = std::max(max_disp, distance(next.centroid(j), res.centroids.centroid(j)));
        res.centroids = std::move(next);
        res.iterations = it + 1;
        if (max_disp <= tol) break;
    }
    res.cost = wcss_cost(data, res.centroids);
    return res;
}

// Per-coordinate min-max scaling into [0,1]; a constant coordinate maps to 0.
inline Dataset normalize(const Dataset& data) {
    if (data.n_points == 0) throw std::invalid_argument("normalize: empty dataset");
    std::vector<double> lo(data.n_dims, std::numeric_limits<double>::infinity());
    std::vector<double> hi(data.n_dims, -std::numeric_limits<double>::infinity());
    for (std::size_t i = 0; i < data.n_points; ++i) {
        auto p = data.point(i);
        for (std::size_t d = 0; d < data.n_dims; ++d) {
            lo[d] = std::min(lo[d], p[d]);
            hi[d] = std::max(hi[d], p[d]);
        }
    }
    Dataset out;
    out.n_points = data.n_points;
    out.n_dims = data.n_dims;
    out.normalized = true;
    out.values.resize(data.values.size());
    for (std::size_t i = 0; i < data.n_points; ++i) {
        auto p = data.point(i);
        for (std::size_t d = 0; d < data.n_dims; ++d) {
            const double range = hi[d] - lo[d];
            out.values[i * data.n_dims + d] = range > 0.0 ? (p[d] - lo[d]) / range : 0.0;
        }
    }
    return out;
}

}  // namespace dpkmeans
