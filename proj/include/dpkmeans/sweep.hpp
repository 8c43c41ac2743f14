#pragma once

// Experiment sweep: enumerate (algorithm, epsilon, internal_k, repeat) cells,
// run the private algorithm against a seed-matched Lloyd reference, and emit
// raw/aggregate/plot tables as delimited text.

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "dpkmeans/core.hpp"
#include "dpkmeans/csv.hpp"
#include "dpkmeans/datasets.hpp"
#include "dpkmeans/dp_kmeans.hpp"
#include "dpkmeans/metrics.hpp"
#include "dpkmeans/trace_io.hpp"

namespace dpkmeans {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SweepConfig {
    std::string dataset_path;  // CSV path, or "synthetic:n=...,d=...,k=...,spread=...,seed=..."
    std::string dataset_name = "custom";
    std::optional<std::size_t> label_column;
    std::size_t k = 3;
    std::vector<std::string> algorithms{"baseline", "subcluster"};
    std::vector<double> epsilon_grid{0.1, 0.2, 0.4, 0.6, 0.8, 1.0, 1.5, 2.0};
    std::vector<std::size_t> internal_k_grid{2, 3, 4, 5};
    std::size_t repeats = 30;
    std::size_t iterations = 10;  // T, the fixed private iteration count
    double rho = 0.5;             // share of the total budget given to the exponential draws
    std::uint64_t base_seed = 42;
    std::string output_dir = "out";
    std::size_t workers = 1;
    std::size_t lloyd_max_iters = 100;  // reference Lloyd effort
    double lloyd_tol = 1e-6;
    std::string trace_dir;  // when non-empty, per-run trace JSON is written here
};

inline void validate(const SweepConfig& cfg) {
    if (cfg.dataset_path.empty()) throw ConfigError("config: dataset path required");
    if (cfg.k == 0) throw ConfigError("config: k must be >= 1");
    if (cfg.repeats == 0) throw ConfigError("config: repeats must be >= 1");
    if (cfg.iterations == 0) throw ConfigError("config: iterations must be >= 1");
    if (cfg.rho <= 0.0 || cfg.rho >= 1.0) throw ConfigError("config: rho must be in (0,1)");
    if (cfg.algorithms.empty()) throw ConfigError("config: at least one algorithm");
    for (const auto& a : cfg.algorithms)
        if (a != "baseline" && a != "subcluster")
            throw ConfigError("config: unknown algorithm '" + a + "'");
    if (cfg.epsilon_grid.empty()) throw ConfigError("config: epsilon grid empty");
    for (double e : cfg.epsilon_grid)
        if (e <= 0.0) throw ConfigError("config: epsilon values must be > 0");
    if (cfg.internal_k_grid.empty()) throw ConfigError("config: internal_k grid empty");
    for (std::size_t ik : cfg.internal_k_grid)
        if (ik < 2) throw ConfigError("config: internal_k values must be >= 2");
    if (cfg.epsilon_grid.size() > 4096 || cfg.internal_k_grid.size() > 4096 ||
        cfg.repeats > 0xFFFFFFFFull)
        throw ConfigError("config: grid too large for cell seeding");
    if (cfg.workers == 0) throw ConfigError("config: workers must be >= 1");
    if (cfg.lloyd_max_iters == 0) throw ConfigError("config: lloyd_max_iters must be >= 1");
}

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Injective over (algorithm, epsilon, internal_k, repeat) indices for a fixed
// base seed: the packed coordinates differ, so the bijective mix differs.
inline std::uint64_t cell_seed(std::uint64_t base_seed, std::size_t alg_index,
                               std::size_t eps_index, std::size_t internal_k_index,
                               std::size_t repeat_index) {
    const std::uint64_t packed = ((static_cast<std::uint64_t>(alg_index) & 0xF) << 56) |
                                 ((static_cast<std::uint64_t>(eps_index) & 0xFFF) << 44) |
                                 ((static_cast<std::uint64_t>(internal_k_index) & 0xFFF) << 32) |
                                 (static_cast<std::uint64_t>(repeat_index) & 0xFFFFFFFFull);
    return splitmix64(splitmix64(base_seed) + packed);
}

// Synthetic spec: "synthetic:n=600,d=4,k=3,spread=0.05,seed=7" (spread and
// seed optional).
inline BlobData parse_synthetic_spec(const std::string& spec) {
    const std::string body = spec.substr(std::string("synthetic:").size());
    std::size_t n = 0, d = 0, k = 0;
    double spread = 0.05;
    std::uint64_t seed = 1;
    std::stringstream ss(body);
    std::string kv;
    while (std::getline(ss, kv, ',')) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) throw ConfigError("synthetic spec: expected key=value in '" + kv + "'");
        const std::string key = kv.substr(0, eq);
        const std::string val = kv.substr(eq + 1);
        try {
            if (key == "n") n = std::stoul(val);
            else if (key == "d") d = std::stoul(val);
            else if (key == "k") k = std::stoul(val);
            else if (key == "spread") spread = std::stod(val);
            else if (key == "seed") seed = std::stoull(val);
            else throw ConfigError("synthetic spec: unknown key '" + key + "'");
        } catch (const ConfigError&) {
            throw;
        } catch (const std::exception&) {
            throw ConfigError("synthetic spec: bad value for '" + key + "'");
        }
    }
    if (n == 0 || d == 0 || k == 0)
        throw ConfigError("synthetic spec: n, d and k are required");
    return make_random_blobs(n, d, k, spread, seed);
}

// Loads (or generates) the configured dataset, normalized, with shape
// validation for catalogued benchmark names.
inline Dataset load_sweep_dataset(const SweepConfig& cfg) {
    Dataset data;
    if (cfg.dataset_path.rfind("synthetic:", 0) == 0) {
        data = parse_synthetic_spec(cfg.dataset_path).data;
    } else {
        data = normalize(load_csv(cfg.dataset_path, cfg.label_column));
    }
    if (auto spec = dataset_spec(cfg.dataset_name)) validate_shape(*spec, data);
    return data;
}

struct CellFailure {
    std::string cell_id;
    std::string message;
};

struct SweepResult {
    std::vector<CostGapRecord> records;
    std::vector<CellFailure> failures;
};

namespace detail {

struct Cell {
    std::size_t alg_index = 0;
    std::size_t eps_index = 0;
    std::size_t ik_index = 0;  // meaningful for subcluster only
    std::size_t repeat = 0;
    bool subcluster = false;
};

inline std::string cell_id(const SweepConfig& cfg, const Cell& c) {
    std::string id = cfg.algorithms[c.alg_index] + "/eps=" + std::to_string(cfg.epsilon_grid[c.eps_index]);
    if (c.subcluster) id += "/internal_k=" + std::to_string(cfg.internal_k_grid[c.ik_index]);
    return id + "/repeat=" + std::to_string(c.repeat);
}

}  // namespace detail

// Runs every cell; per-cell failures are recorded, not fatal. Records come
// back in enumeration order regardless of the worker count.
inline SweepResult run_sweep(const SweepConfig& cfg, const Dataset& data) {
    validate(cfg);
    if (!data.normalized) throw DataError("run_sweep: dataset must be normalized");
    if (cfg.k > data.n_points) throw DataError("run_sweep: k exceeds dataset size");

    std::vector<detail::Cell> cells;
    for (std::size_t a = 0; a < cfg.algorithms.size(); ++a) {
        const bool sub = cfg.algorithms[a] == "subcluster";
        const std::size_t ik_count = sub ? cfg.internal_k_grid.size() : 1;
        for (std::size_t e = 0; e < cfg.epsilon_grid.size(); ++e)
            for (std::size_t ik = 0; ik < ik_count; ++ik)
                for (std::size_t r = 0; r < cfg.repeats; ++r)
                    cells.push_back({a, e, ik, r, sub});
    }

    std::vector<std::optional<CostGapRecord>> slots(cells.size());
    std::vector<std::optional<CellFailure>> fails(cells.size());

    auto run_cell = [&](std::size_t idx) {
        const detail::Cell& c = cells[idx];
        const double eps_total = cfg.epsilon_grid[c.eps_index];
        const std::size_t internal_k = c.subcluster ? cfg.internal_k_grid[c.ik_index] : 0;
        const std::uint64_t seed =
            cell_seed(cfg.base_seed, c.alg_index, c.eps_index, c.subcluster ? c.ik_index : 0, c.repeat);
        try {
            const PrivacyBudget budget = split_total(eps_total, cfg.iterations, cfg.rho);
            const Strategy strategy =
                c.subcluster ? make_strategy(StrategyVariant::subcluster, internal_k)
                             : make_strategy(StrategyVariant::baseline_orientation);
            const DpRunResult run = run_dp_kmeans(data, cfg.k, budget, strategy, seed);

            Rng lloyd_rng(seed);  // same seed => same initial centroids as the private run
            const LloydResult ref = lloyd(data, cfg.k, cfg.lloyd_max_iters, cfg.lloyd_tol, lloyd_rng);

            CostGapRecord rec;
            rec.algorithm = cfg.algorithms[c.alg_index];
            rec.dataset = cfg.dataset_name;
            rec.epsilon_total = eps_total;
            rec.internal_k = internal_k;
            rec.repeat_index = c.repeat;
            rec.seed = seed;
            rec.cost_dp = run.cost_dp;
            rec.cost_lloyd = ref.cost;
            rec.cost_gap = cost_gap(run.cost_dp, ref.cost);
            rec.invariant_violations = audit_invariant(run.trace).violations.size();
            slots[idx] = std::move(rec);

            if (!cfg.trace_dir.empty()) {
                std::filesystem::create_directories(cfg.trace_dir);
                std::ostringstream name;
                name << "trace_" << cfg.dataset_name << '_' << cfg.algorithms[c.alg_index];
                if (c.subcluster) name << "_k" << internal_k;
                name << "_eps" << c.eps_index << "_rep" << c.repeat << ".json";
                std::ofstream tf(std::filesystem::path(cfg.trace_dir) / name.str());
                write_trace(tf, run);
            }
        } catch (const std::exception& ex) {
            fails[idx] = CellFailure{detail::cell_id(cfg, c), ex.what()};
        }
    };

    const std::size_t workers = std::min(cfg.workers, cells.size());
    if (workers <= 1) {
        for (std::size_t i = 0; i < cells.size(); ++i) run_cell(i);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (std::size_t i = next.fetch_add(1); i < cells.size(); i = next.fetch_add(1))
                    run_cell(i);
            });
        }
        for (auto& t : pool) t.join();
    }

    SweepResult out;
    out.records.reserve(cells.size());
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (slots[i]) out.records.push_back(std::move(*slots[i]));
        if (fails[i]) out.failures.push_back(std::move(*fails[i]));
    }
    return out;
}

inline SweepResult run_sweep(const SweepConfig& cfg) {
    validate(cfg);
    return run_sweep(cfg, load_sweep_dataset(cfg));
}

// Shortest round-trip decimal form; identical inputs give identical bytes.
inline std::string format_double(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    if (ec != std::errc{}) throw std::runtime_error("format_double: conversion failed");
    return std::string(buf, ptr);
}

inline std::string series_label(const std::string& algorithm, std::size_t internal_k) {
    return algorithm == "subcluster" ? "subcluster_k" + std::to_string(internal_k) : algorithm;
}

// Writes raw.csv, agg.csv and one plot_<dataset>.csv per dataset; returns the
// written paths.
inline std::vector<std::string> emit_results(const std::vector<CostGapRecord>& records,
                                             const std::string& output_dir) {
    if (records.empty()) throw std::invalid_argument("emit_results: no records");
    std::filesystem::create_directories(output_dir);
    const std::filesystem::path dir(output_dir);
    std::vector<std::string> written;

    {
        std::ofstream raw(dir / "raw.csv");
        if (!raw) throw std::runtime_error("emit_results: cannot write to '" + output_dir + "'");
        raw << "dataset,algorithm,internal_k,epsilon,repeat,seed,cost_dp,cost_lloyd,cost_gap,"
               "invariant_violations\n";
        for (const auto& r : records) {
            raw << r.dataset << ',' << r.algorithm << ',' << r.internal_k << ','
                << format_double(r.epsilon_total) << ',' << r.repeat_index << ',' << r.seed << ','
                << format_double(r.cost_dp) << ',' << format_double(r.cost_lloyd) << ','
                << format_double(r.cost_gap) << ',' << r.invariant_violations << '\n';
        }
        written.push_back((dir / "raw.csv").string());
    }

    const std::vector<AggregateRow> agg = aggregate(records);
    {
        std::ofstream out(dir / "agg.csv");
        out << "dataset,algorithm,internal_k,epsilon,n,mean_gap,std_gap\n";
        for (const auto& a : agg) {
            out << a.dataset << ',' << a.algorithm << ',' << a.internal_k << ','
                << format_double(a.epsilon) << ',' << a.n << ',' << format_double(a.mean_gap) << ','
                << format_double(a.std_gap) << '\n';
        }
        written.push_back((dir / "agg.csv").string());
    }

    std::set<std::string> datasets;
    for (const auto& a : agg) datasets.insert(a.dataset);
    for (const std::string& ds : datasets) {
        std::vector<const AggregateRow*> rows;
        for (const auto& a : agg)
            if (a.dataset == ds) rows.push_back(&a);
        std::stable_sort(rows.begin(), rows.end(), [](const AggregateRow* x, const AggregateRow* y) {
            if (x->epsilon != y->epsilon) return x->epsilon < y->epsilon;
            return series_label(x->algorithm, x->internal_k) < series_label(y->algorithm, y->internal_k);
        });
        const std::filesystem::path p = dir / ("plot_" + ds + ".csv");
        std::ofstream out(p);
        out << "epsilon,series,mean_gap,std_gap\n";
        for (const AggregateRow* a : rows) {
            out << format_double(a->epsilon) << ',' << series_label(a->algorithm, a->internal_k) << ','
                << format_double(a->mean_gap) << ',' << format_double(a->std_gap) << '\n';
        }
        written.push_back(p.string());
    }
    return written;
}

// Parsers for the emitted tables (round-trip checks and the ratios command).
inline std::vector<CostGapRecord> parse_raw_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw CsvError("parse_raw_csv: cannot open '" + path + "'");
    std::vector<CostGapRecord> records;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (first) {
            first = false;
            continue;  // header
        }
        const auto fields = detail::split_csv_line(line);
        if (fields.size() != 10) throw CsvError("parse_raw_csv: bad row '" + line + "'");
        CostGapRecord r;
        r.dataset = fields[0];
        r.algorithm = fields[1];
        r.internal_k = std::stoul(fields[2]);
        r.epsilon_total = std::stod(fields[3]);
        r.repeat_index = std::stoul(fields[4]);
        r.seed = std::stoull(fields[5]);
        r.cost_dp = std::stod(fields[6]);
        r.cost_lloyd = std::stod(fields[7]);
        r.cost_gap = std::stod(fields[8]);
        r.invariant_violations = std::stoul(fields[9]);
        records.push_back(std::move(r));
    }
    return records;
}

inline std::vector<AggregateRow> parse_agg_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw CsvError("parse_agg_csv: cannot open '" + path + "'");
    std::vector<AggregateRow> rows;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (first) {
            first = false;
            continue;
        }
        const auto fields = detail::split_csv_line(line);
        if (fields.size() != 7) throw CsvError("parse_agg_csv: bad row '" + line + "'");
        AggregateRow a;
        a.dataset = fields[0];
        a.algorithm = fields[1];
        a.internal_k = std::stoul(fields[2]);
        a.epsilon = std::stod(fields[3]);
        a.n = std::stoul(fields[4]);
        a.mean_gap = std::stod(fields[5]);
        a.std_gap = std::stod(fields[6]);
        rows.push_back(std::move(a));
    }
    return rows;
}

// Reference improvement ratios for the four benchmark datasets, shown next to
// measured values in reports.
inline std::optional<double> reference_ratio(const std::string& dataset) {
    if (dataset == "wine") return 4.13;
    if (dataset == "breast_cancer") return 2.83;
    if (dataset == "iris") return 1.1;
    if (dataset == "digits") return 1.0;
    return std::nullopt;
}

struct RatioReport {
    std::string dataset;
    std::size_t internal_k = 0;
    double ratio = 0.0;
};

// Per (dataset, internal_k): ratio of epsilon-averaged baseline mean gap to
// the subcluster mean gap over the shared epsilon grid.
inline std::vector<RatioReport> compute_ratios(const std::vector<AggregateRow>& agg,
                                               std::ostream& warnings) {
    std::set<std::string> datasets;
    for (const auto& a : agg) datasets.insert(a.dataset);
    std::vector<RatioReport> reports;
    for (const std::string& ds : datasets) {
        std::map<double, double> baseline_by_eps;
        std::map<std::size_t, std::map<double, double>> sub_by_ik;
        for (const auto& a : agg) {
            if (a.dataset != ds) continue;
            if (a.algorithm == "baseline") baseline_by_eps[a.epsilon] = a.mean_gap;
            else if (a.algorithm == "subcluster") sub_by_ik[a.internal_k][a.epsilon] = a.mean_gap;
        }
        if (baseline_by_eps.empty() || sub_by_ik.empty()) {
            warnings << "warning: dataset '" << ds << "' lacks "
                     << (baseline_by_eps.empty() ? "baseline" : "subcluster")
                     << " rows; skipping ratio\n";
            continue;
        }
        for (const auto& [ik, sub_by_eps] : sub_by_ik) {
            std::vector<double> base_means, sub_means;
            for (const auto& [eps, mean] : baseline_by_eps) {
                auto it = sub_by_eps.find(eps);
                if (it == sub_by_eps.end()) continue;
                base_means.push_back(mean);
                sub_means.push_back(it->second);
            }
            if (base_means.empty()) {
                warnings << "warning: dataset '" << ds << "' internal_k=" << ik
                         << " shares no epsilon values with baseline; skipping\n";
                continue;
            }
            reports.push_back({ds, ik, improvement_ratio(base_means, sub_means)});
        }
    }
    return reports;
}

inline void report_ratios(const std::vector<AggregateRow>& agg, std::ostream& os) {
    for (const RatioReport& r : compute_ratios(agg, os)) {
        os << r.dataset << " internal_k=" << r.internal_k
           << ": baseline/subcluster mean cost-gap ratio = " << format_double(r.ratio);
        if (auto ref = reference_ratio(r.dataset)) os << " (reference " << format_double(*ref) << ")";
        os << '\n';
    }
}

}  // namespace dpkmeans
