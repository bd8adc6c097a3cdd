#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "eqvar/ordering.hpp"
#include "eqvar/simgen.hpp"

namespace eqvar {

struct EstimatorSpec {
    OrderingMode mode = OrderingMode::TopDownFull;
    int q = 0;  // TopDownSubset only

    std::string name() const;
    static EstimatorSpec parse(const std::string& name, int q);
};

struct BenchSetting {
    GraphRecipe recipe;  // recipe.seed is ignored; seeds derive per replicate
    ErrorSpec error;
    long n = 0;
    std::vector<EstimatorSpec> estimators;
    int replicates = 100;
    int full_replicates = 0;  // used under --full when positive
    int folds = 5;
    bool edge_metrics = true;
    std::string label;
};

struct BenchmarkConfig {
    std::vector<BenchSetting> settings;
    std::uint64_t master_seed = 0;
    std::string output;
};

struct MetricSummary {
    std::optional<double> mean;
    std::optional<double> se;
};

struct EstimatorCell {
    std::string estimator;
    int replicates = 0;
    int failures = 0;
    MetricSummary tau, recall, flipped, fdr, hamming;
    double seconds = 0.0;  // wall clock; excluded from default serialization
};

struct SettingReport {
    std::string label;
    std::string family;
    int p = 0;
    long n = 0;
    double pc = 0.0;
    std::vector<EstimatorCell> cells;
};

struct BenchmarkReport {
    std::uint64_t master_seed = 0;
    std::vector<SettingReport> settings;
};

/// Runs every setting x replicate x estimator cell: generate graph,
/// sample data, order, select edges (when enabled), score. Replicates
/// fan out over `threads` workers; per-replicate seeds derive from
/// (master_seed, setting index, replicate index), so results are
/// identical for any thread count and existing cells never move when
/// settings are appended. Estimator failures (exhaustion on p > n data)
/// become missing cells and are counted, never fatal.
BenchmarkReport run_benchmark(const BenchmarkConfig& config, int threads = 1, bool full = false);

bool reports_equal(const BenchmarkReport& a, const BenchmarkReport& b);

std::string report_to_csv(const BenchmarkReport& report, bool include_timing = false);
BenchmarkReport report_from_csv(const std::string& text);
std::string report_to_json(const BenchmarkReport& report, bool include_timing = false);
std::string report_to_markdown(const BenchmarkReport& report);

BenchmarkConfig config_from_json(const std::string& text);
BenchmarkConfig read_config_file(const std::string& path);

}  // namespace eqvar
