#pragma once

// Clustering-quality measurement: the normalized cost gap
// |cost_dp - cost_lloyd| / cost_lloyd and its cross-run aggregation.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

namespace dpkmeans {

struct CostGapRecord {
    std::string algorithm;       // "baseline" or "subcluster"
    std::string dataset;
    double epsilon_total = 0.0;
    std::size_t internal_k = 0;  // 0 when not applicable (baseline)
    std::size_t repeat_index = 0;
    std::uint64_t seed = 0;
    double cost_dp = 0.0;
    double cost_lloyd = 0.0;
    double cost_gap = 0.0;
    std::size_t invariant_violations = 0;
};

inline double cost_gap(double cost_dp, double cost_lloyd) {
    if (cost_lloyd <= 0.0) throw std::invalid_argument("cost_gap: cost_lloyd must be > 0");
    return std::abs(cost_dp - cost_lloyd) / cost_lloyd;
}

struct AggregateRow {
    std::string dataset;
    std::string algorithm;
    std::size_t internal_k = 0;
    double epsilon = 0.0;
    std::size_t n = 0;
    double mean_gap = 0.0;
    double std_gap = 0.0;  // sample (n-1) standard deviation; 0 for n = 1
};

// Group by (dataset, algorithm, internal_k, epsilon); rows come back sorted by
// that key so output files are deterministic.
inline std::vector<AggregateRow> aggregate(const std::vector<CostGapRecord>& records) {
    if (records.empty()) throw std::invalid_argument("aggregate: no records");
    std::vector<AggregateRow> rows;
    auto key_of = [](const CostGapRecord& r) {
        return std::tuple<std::string, std::string, std::size_t, double>(r.dataset, r.algorithm,
                                                                         r.internal_k, r.epsilon_total);
    };
    std::vector<const CostGapRecord*> sorted;
    sorted.reserve(records.size());
    for (const auto& r : records) sorted.push_back(&r);
    std::stable_sort(sorted.begin(), sorted.end(),
                     [&](const CostGapRecord* a, const CostGapRecord* b) { return key_of(*a) < key_of(*b); });
    std::size_t i = 0;
    while (i < sorted.size()) {
        std::size_t j = i;
        while (j < sorted.size() && key_of(*sorted[j]) == key_of(*sorted[i])) ++j;
        AggregateRow row;
        row.dataset = sorted[i]->dataset;
        row.algorithm = sorted[i]->algorithm;
        row.internal_k = sorted[i]->internal_k;
        row.epsilon = sorted[i]->epsilon_total;
        row.n = j - i;
        double sum = 0.0;
        for (std::size_t t = i; t < j; ++t) sum += sorted[t]->cost_gap;
        row.mean_gap = sum / static_cast<double>(row.n);
        if (row.n > 1) {
            double ss = 0.0;
            for (std::size_t t = i; t < j; ++t) {
                const double d = sorted[t]->cost_gap - row.mean_gap;
                ss += d * d;
            }
            row.std_gap = std::sqrt(ss / static_cast<double>(row.n - 1));
        }
        rows.push_back(std::move(row));
        i = j;
    }
    return rows;
}

// Ratio of the epsilon-averaged baseline gap to the epsilon-averaged
// subcluster gap; > 1 means subcluster achieves the smaller gap. A zero
// subcluster average reports +infinity.
inline double improvement_ratio(std::span<const double> baseline_means,
                                std::span<const double> subcluster_means) {
    if (baseline_means.empty() || baseline_means.size() != subcluster_means.size())
        throw std::invalid_argument("improvement_ratio: mismatched epsilon grids");
    double base = 0.0, sub = 0.0;
    for (double v : baseline_means) base += v;
    for (double v : subcluster_means) sub += v;
    base /= static_cast<double>(baseline_means.size());
    sub /= static_cast<double>(subcluster_means.size());
    if (sub == 0.0) return std::numeric_limits<double>::infinity();
    return base / sub;
}

}  // namespace dpkmeans
