#pragma once

// Benchmark dataset catalogue (shape validation for the four UCI sets) and the
// synthetic Gaussian-blob fixture generator.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "dpkmeans/core.hpp"

namespace dpkmeans {

struct DatasetSpec {
    std::string name;
    std::size_t n_points = 0;
    std::size_t n_dims = 0;
    std::size_t k = 0;
    std::size_t default_internal_k = 0;
    std::size_t default_repeats = 30;
};

inline const std::vector<DatasetSpec>& known_datasets() {
    static const std::vector<DatasetSpec> specs{
        {"iris", 150, 4, 3, 2, 30},
        {"wine", 178, 13, 3, 4, 30},
        {"breast_cancer", 569, 30, 2, 4, 30},
        {"digits", 1797, 64, 10, 5, 10},
    };
    return specs;
}

inline std::optional<DatasetSpec> dataset_spec(const std::string& name) {
    for (const auto& s : known_datasets())
        if (s.name == name) return s;
    return std::nullopt;
}

struct DataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Named benchmark sets must match their catalogued shape; wrong files fail
// loudly instead of producing incomparable numbers.
inline void validate_shape(const DatasetSpec& spec, const Dataset& data) {
    if (data.n_points != spec.n_points || data.n_dims != spec.n_dims)
        throw DataError("dataset '" + spec.name + "' has shape " + std::to_string(data.n_points) +
                        "x" + std::to_string(data.n_dims) + ", expected " +
                        std::to_string(spec.n_points) + "x" + std::to_string(spec.n_dims));
}

struct BlobData {
    Dataset data;                     // normalized
    std::vector<std::size_t> labels;  // generating blob per point
};

// Isotropic Gaussian points around each center, concatenated and min-max
// normalized. Labels record the generating blob.
inline BlobData make_blobs(std::size_t n_per_blob, const Points& centers, double spread,
                           std::uint64_t seed) {
    if (centers.empty()) throw std::invalid_argument("make_blobs: need at least one center");
    if (spread <= 0.0) throw std::invalid_argument("make_blobs: spread must be > 0");
    if (n_per_blob == 0) throw std::invalid_argument("make_blobs: n_per_blob must be >= 1");
    Rng rng(seed);
    std::normal_distribution<double> gauss(0.0, spread);
    BlobData out;
    std::vector<double> values;
    values.reserve(n_per_blob * centers.count * centers.n_dims);
    for (std::size_t b = 0; b < centers.count; ++b) {
        auto c = centers.row(b);
        for (std::size_t i = 0; i < n_per_blob; ++i) {
            for (std::size_t d = 0; d < centers.n_dims; ++d) values.push_back(c[d] + gauss(rng));
            out.labels.push_back(b);
        }
    }
    out.data = normalize(make_dataset(std::move(values), centers.n_dims));
    return out;
}

// Random blob layout of a requested shape: n_centers cluster centers drawn
// uniformly in [0.1, 0.9]^d, points spread n_points over them round-robin.
// Used as a synthetic stand-in when a benchmark CSV is not available.
inline BlobData make_random_blobs(std::size_t n_points, std::size_t n_dims, std::size_t n_centers,
                                  double spread, std::uint64_t seed) {
    if (n_centers == 0 || n_points < n_centers)
        throw std::invalid_argument("make_random_blobs: need n_points >= n_centers >= 1");
    Rng rng(seed);
    std::uniform_real_distribution<double> unif(0.1, 0.9);
    Points centers;
    centers.n_dims = n_dims;
    for (std::size_t b = 0; b < n_centers; ++b) {
        std::vector<double> c(n_dims);
        for (double& v : c) v = unif(rng);
        centers.push_back(c);
    }
    std::normal_distribution<double> gauss(0.0, spread);
    BlobData out;
    std::vector<double> values;
    values.reserve(n_points * n_dims);
    for (std::size_t i = 0; i < n_points; ++i) {
        const std::size_t b = i % n_centers;
        auto c = centers.row(b);
        for (std::size_t d = 0; d < n_dims; ++d) values.push_back(c[d] + gauss(rng));
        out.labels.push_back(b);
    }
    out.data = normalize(make_dataset(std::move(values), n_dims));
    return out;
}

}  // namespace dpkmeans
