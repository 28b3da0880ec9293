#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "moe/em.hpp"
#include "moe/gates.hpp"
#include "moe/metrics.hpp"

namespace moe {

struct ExperimentConfig {
    std::string scenario = "regime1";
    GateTransform gate;
    std::vector<int> k_list{3};
    std::vector<std::size_t> n_grid;
    int replications = 10;
    std::uint64_t master_seed = 20240601;
    FitConfig em;
    McConfig mc;
    std::filesystem::path out_dir;
    int threads = 1;
};

nlohmann::json to_json(const ExperimentConfig& cfg);
/// Missing fields keep their defaults.
ExperimentConfig experiment_config_from_json(const nlohmann::json& j);

/// `count` integers log-spaced on [lo, hi], strictly increasing.
std::vector<std::size_t> log_spaced_grid(std::size_t lo, std::size_t hi, std::size_t count);

/// Desk-scale grid: 8 log-spaced sizes in [1e3, 3e4], 10 replications.
ExperimentConfig desk_config(std::string scenario, GateTransform gate, int k = 3);

enum class ReplicateStatus { ok, failed };

struct ReplicateRecord {
    std::size_t n = 0;
    int replication = 0;
    double loss = 0.0;
    int iterations = 0;
    bool converged = false;
    ReplicateStatus status = ReplicateStatus::ok;
};

struct RatePoint {
    double n = 0.0;
    double mean_loss = 0.0;
    double std_loss = 0.0;
    int replications = 0;
    int status_ok = 0;
    int status_failed = 0;

    bool operator==(const RatePoint&) const = default;
};

struct LogLogFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
};

struct RateReport {
    int k = 0;
    std::vector<RatePoint> points;
    std::optional<LogLogFit> fit;  ///< empty when fewer than 3 sizes have a successful replication
    std::vector<ReplicateRecord> replicates;
};

/// Ordinary least squares of log(value) on log(n).
LogLogFit fit_loglog_slope(const std::vector<std::pair<double, double>>& points);

/// Aggregates replicate records (ordered by n, then replication) and fits the slope.
RateReport summarize_replicates(int k, const std::vector<std::size_t>& n_grid, int replications,
                                std::vector<ReplicateRecord> records);

std::vector<RateReport> run_rate_experiment(const ExperimentConfig& cfg);

struct NllComparison {
    std::vector<GateTransform> gates;
    std::vector<std::vector<double>> trajectories;  ///< per gate, iters + 1 values
};

/// One shared dataset and initialization; exactly `iters` EM iterations per gate.
NllComparison run_nll_comparison(const ExperimentConfig& cfg, const std::vector<GateTransform>& gates,
                                 int iters, std::size_t n = 10000);

/// Columns n,mean_d2,std_d2,replications,status_ok,status_failed.
std::string rate_csv(const RateReport& report);
std::vector<RatePoint> parse_rate_csv(const std::string& text);
std::string replicates_csv(const RateReport& report);
std::string rate_svg(const RateReport& report, const std::string& title);
std::string nll_csv(const NllComparison& cmp);
std::string nll_svg(const NllComparison& cmp, const std::string& title);

void emit_csv(const RateReport& report, const std::filesystem::path& path);
void emit_svg(const RateReport& report, const std::filesystem::path& path, const std::string& title = "");

/// Writes rate/replicate CSVs and SVGs for every report into cfg.out_dir.
void emit_rate_outputs(const ExperimentConfig& cfg, const std::vector<RateReport>& reports);

} // namespace moe
