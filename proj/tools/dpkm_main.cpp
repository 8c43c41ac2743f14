// Command-line harness for the differentially private k-means benchmark:
//   dpkm run    -- epsilon/internal-k sweep with repeats, CSV outputs
//   dpkm ratios -- baseline-vs-subcluster ratio report from an agg.csv
//   dpkm blobs  -- synthetic Gaussian blob fixture generation

#include <cstdio>
#include <set>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dpkmeans/dpkmeans.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfigError = 1;
constexpr int kExitDataError = 2;
constexpr int kExitPartialFailures = 3;

// dataset name from the file stem when it matches a catalogued benchmark
std::string infer_dataset_name(const std::string& path) {
    if (path.rfind("synthetic:", 0) == 0) return "synthetic";
    const std::string stem = std::filesystem::path(path).stem().string();
    if (dpkmeans::dataset_spec(stem)) return stem;
    return "custom";
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    const auto e = s.find_last_not_of(" \t\r");
    return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
}

template <typename T>
std::vector<T> parse_list(const std::string& value) {
    std::vector<T> out;
    std::stringstream ss(value);
    std::string field;
    while (std::getline(ss, field, ',')) {
        if constexpr (std::is_same_v<T, double>) out.push_back(std::stod(trim(field)));
        else if constexpr (std::is_same_v<T, std::size_t>) out.push_back(std::stoul(trim(field)));
        else out.push_back(trim(field));
    }
    return out;
}

// Flat key=value config mirroring the sweep fields; keys use the flag
// spellings. Values already set on the command line win. Returns the keys the
// file actually applied.
std::set<std::string> apply_config_file(dpkmeans::SweepConfig& cfg, std::string& dataset_name,
                                        long long& label_col, const std::string& path,
                                        const CLI::App& run) {
    std::ifstream in(path);
    if (!in) throw dpkmeans::ConfigError("config: cannot open '" + path + "'");
    std::set<std::string> applied;
    auto overridden = [&](const std::string& flag) {
        const CLI::Option* opt = run.get_option_no_throw("--" + flag);
        return opt != nullptr && opt->count() > 0;
    };
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string stripped = trim(line);
        if (stripped.empty() || stripped[0] == '#') continue;
        const auto eq = stripped.find('=');
        if (eq == std::string::npos)
            throw dpkmeans::ConfigError("config: expected key=value at line " +
                                        std::to_string(line_no));
        const std::string key = trim(stripped.substr(0, eq));
        const std::string value = trim(stripped.substr(eq + 1));
        if (!overridden(key)) applied.insert(key);
        try {
            if (key == "dataset") { if (!overridden(key)) cfg.dataset_path = value; }
            else if (key == "name") { if (!overridden(key)) dataset_name = value; }
            else if (key == "label-col") { if (!overridden(key)) label_col = std::stoll(value); }
            else if (key == "k") { if (!overridden(key)) cfg.k = std::stoul(value); }
            else if (key == "algorithms") { if (!overridden(key)) cfg.algorithms = parse_list<std::string>(value); }
            else if (key == "eps-grid") { if (!overridden(key)) cfg.epsilon_grid = parse_list<double>(value); }
            else if (key == "internal-k") { if (!overridden(key)) cfg.internal_k_grid = parse_list<std::size_t>(value); }
            else if (key == "repeats") { if (!overridden(key)) cfg.repeats = std::stoul(value); }
            else if (key == "iters") { if (!overridden(key)) cfg.iterations = std::stoul(value); }
            else if (key == "rho") { if (!overridden(key)) cfg.rho = std::stod(value); }
            else if (key == "seed") { if (!overridden(key)) cfg.base_seed = std::stoull(value); }
            else if (key == "out") { if (!overridden(key)) cfg.output_dir = value; }
            else if (key == "workers") { if (!overridden(key)) cfg.workers = std::stoul(value); }
            else if (key == "lloyd-iters") { if (!overridden(key)) cfg.lloyd_max_iters = std::stoul(value); }
            else if (key == "lloyd-tol") { if (!overridden(key)) cfg.lloyd_tol = std::stod(value); }
            else if (key == "trace-dir") { if (!overridden(key)) cfg.trace_dir = value; }
            else throw dpkmeans::ConfigError("config: unknown key '" + key + "' at line " +
                                             std::to_string(line_no));
        } catch (const dpkmeans::ConfigError&) {
            throw;
        } catch (const std::exception&) {
            throw dpkmeans::ConfigError("config: bad value for '" + key + "' at line " +
                                        std::to_string(line_no));
        }
    }
    return applied;
}

int cmd_run(const dpkmeans::SweepConfig& cfg) {
    using namespace dpkmeans;
    Dataset data;
    try {
        validate(cfg);
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitConfigError;
    }
    try {
        data = load_sweep_dataset(cfg);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitDataError;
    }
    std::cout << "dataset " << cfg.dataset_name << ": " << data.n_points << " points, "
              << data.n_dims << " dims, k=" << cfg.k << '\n';

    SweepResult res;
    try {
        res = run_sweep(cfg, data);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitDataError;
    }
    for (const auto& f : res.failures)
        std::cerr << "cell failed: " << f.cell_id << ": " << f.message << '\n';
    if (res.records.empty()) {
        std::cerr << "error: every cell failed\n";
        return kExitDataError;
    }

    const auto written = emit_results(res.records, cfg.output_dir);
    for (const auto& p : written) std::cout << "wrote " << p << '\n';

    std::size_t violations = 0;
    for (const auto& r : res.records) violations += r.invariant_violations;
    std::cout << res.records.size() << " runs, " << violations
              << " convergence-invariant violations\n";
    report_ratios(aggregate(res.records), std::cout);

    return res.failures.empty() ? kExitOk : kExitPartialFailures;
}

int cmd_ratios(const std::string& agg_path) {
    using namespace dpkmeans;
    std::vector<AggregateRow> agg;
    try {
        agg = parse_agg_csv(agg_path);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitDataError;
    }
    if (agg.empty()) {
        std::cerr << "error: no aggregate rows in " << agg_path << '\n';
        return kExitDataError;
    }
    report_ratios(agg, std::cout);
    return kExitOk;
}

int cmd_blobs(const std::string& out_path, std::size_t n_per_blob,
              const std::vector<std::string>& center_specs, double spread, std::uint64_t seed) {
    using namespace dpkmeans;
    Points centers;
    try {
        for (const std::string& spec : center_specs) {
            std::vector<double> c;
            std::stringstream ss(spec);
            std::string field;
            while (std::getline(ss, field, ',')) c.push_back(std::stod(field));
            if (c.empty()) throw std::invalid_argument("empty center spec");
            centers.push_back(c);
        }
    } catch (const std::exception&) {
        std::cerr << "error: centers must be comma-separated numbers, e.g. --center 0.2,0.8\n";
        return kExitConfigError;
    }
    BlobData blobs;
    try {
        blobs = make_blobs(n_per_blob, centers, spread, seed);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitConfigError;
    }
    std::ofstream out(out_path);
    if (!out) {
        std::cerr << "error: cannot write " << out_path << '\n';
        return kExitDataError;
    }
    for (std::size_t i = 0; i < blobs.data.n_points; ++i) {
        auto p = blobs.data.point(i);
        for (std::size_t d = 0; d < p.size(); ++d)
            out << (d ? "," : "") << format_double(p[d]);
        out << '\n';
    }
    std::cout << "wrote " << out_path << " (" << blobs.data.n_points << " x "
              << blobs.data.n_dims << ", normalized)\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Differentially private k-means sub-clustering benchmark"};
    app.require_subcommand(1);

    // run
    auto* run = app.add_subcommand("run", "Run an epsilon sweep and write result tables");
    dpkmeans::SweepConfig cfg;
    cfg.dataset_path.clear();
    std::string dataset_name;
    std::string config_path;
    long long label_col = -1;
    run->add_option("--config", config_path, "Flat key=value config file; flags override file values");
    run->add_option("--dataset", cfg.dataset_path,
                    "Dataset CSV path, or synthetic:n=..,d=..,k=..[,spread=..][,seed=..]");
    run->add_option("--name", dataset_name,
                    "Dataset name for labeling/validation (default: inferred from file stem)");
    run->add_option("--label-col", label_col, "0-based label column to drop (-1: none)");
    run->add_option("--k", cfg.k, "Number of clusters");
    run->add_option("--algorithms", cfg.algorithms, "Algorithms: baseline subcluster")
        ->delimiter(',');
    run->add_option("--eps-grid", cfg.epsilon_grid, "Total epsilon values")->delimiter(',');
    run->add_option("--internal-k", cfg.internal_k_grid, "Sub-cluster counts (subcluster only)")
        ->delimiter(',');
    run->add_option("--repeats", cfg.repeats, "Repeats per cell");
    run->add_option("--iters", cfg.iterations, "Private iterations T");
    run->add_option("--rho", cfg.rho, "Budget share for the exponential steps, in (0,1)");
    run->add_option("--seed", cfg.base_seed, "Base seed for cell derivation");
    run->add_option("--out", cfg.output_dir, "Output directory");
    run->add_option("--workers", cfg.workers, "Concurrent sweep cells");
    run->add_option("--lloyd-iters", cfg.lloyd_max_iters, "Reference Lloyd iteration cap");
    run->add_option("--lloyd-tol", cfg.lloyd_tol, "Reference Lloyd convergence tolerance");
    run->add_option("--trace-dir", cfg.trace_dir, "Write per-run trace JSON into this directory");

    // ratios
    auto* ratios = app.add_subcommand("ratios", "Report improvement ratios from an agg.csv");
    std::string agg_path;
    ratios->add_option("--agg", agg_path, "Path to agg.csv")->required();

    // blobs
    auto* blobs = app.add_subcommand("blobs", "Generate a normalized Gaussian-blob CSV fixture");
    std::string blob_out = "blobs.csv";
    std::size_t n_per_blob = 100;
    std::vector<std::string> center_specs;
    double spread = 0.05;
    std::uint64_t blob_seed = 1;
    blobs->add_option("--out", blob_out, "Output CSV path");
    blobs->add_option("--n-per-blob", n_per_blob, "Points per blob");
    blobs->add_option("--center", center_specs, "Blob center, comma-separated (repeatable)")
        ->required();
    blobs->add_option("--spread", spread, "Gaussian standard deviation");
    blobs->add_option("--seed", blob_seed, "Generator seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) ? kExitConfigError : kExitOk;
    }

    if (run->parsed()) {
        bool k_given = run->count("--k") > 0;
        bool repeats_given = run->count("--repeats") > 0;
        if (!config_path.empty()) {
            try {
                const auto applied = apply_config_file(cfg, dataset_name, label_col, config_path, *run);
                k_given = k_given || applied.count("k");
                repeats_given = repeats_given || applied.count("repeats");
            } catch (const dpkmeans::ConfigError& e) {
                std::cerr << "error: " << e.what() << '\n';
                return kExitConfigError;
            }
        }
        cfg.dataset_name = dataset_name.empty() ? infer_dataset_name(cfg.dataset_path) : dataset_name;
        if (label_col >= 0) cfg.label_column = static_cast<std::size_t>(label_col);
        // catalogued benchmarks supply k and repeat count unless overridden
        if (auto spec = dpkmeans::dataset_spec(cfg.dataset_name)) {
            if (!k_given) cfg.k = spec->k;
            if (!repeats_given) cfg.repeats = spec->default_repeats;
        }
        return cmd_run(cfg);
    }
    if (ratios->parsed()) return cmd_ratios(agg_path);
    return cmd_blobs(blob_out, n_per_blob, center_specs, spread, blob_seed);
}
