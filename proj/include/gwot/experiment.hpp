#pragma once

#include "gwot/graph_align.hpp"
#include "gwot/trace.hpp"

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace gwot {

/// Parameters of a benchmark sweep.
struct RunConfig {
    std::vector<Index> sizes{100};
    int seeds = 20;
    double p_edge = 0.2;
    double eta = 0.1;
    std::vector<std::string> methods{"ipg", "cg", "epgd", "ppa", "bapg"};
    std::vector<double> epsilons{1e-3, 1e-2, 1e-1, 1.0};
    long max_iter = 5000;
    double tol = 1e-9;
    double gamma_factor = 1.01;
    double alpha = 3.0;
    std::filesystem::path output_dir = "gw_results";
    int jobs = 1;
    std::uint64_t base_seed = 0;
    bool omit_timing = false;  // write time_s = 0 so result files are reproducible byte for byte

    void validate() const;
};

bool is_entropic(const std::string& method);

/// One (method, epsilon, n, seed) run.
struct RunCell {
    std::string method;
    std::optional<double> epsilon;  // entropic methods only
    Index n = 0;
    int seed = 0;
};

/// Grid order: n, then seed, then method (as configured), then epsilon.
std::vector<RunCell> expand_grid(const RunConfig& config);

std::uint64_t instance_seed(const RunConfig& config, Index n, int seed);
std::filesystem::path instance_path(const RunConfig& config, Index n, int seed);

/// Instance for (n, seed): loaded from output_dir when it was generated
/// before, built in memory otherwise.
AlignmentInstance obtain_instance(const RunConfig& config, Index n, int seed);

struct SolveOutcome {
    Coupling coupling;
    SolverTrace trace;
    double time_s = 0.0;
    bool failed = false;
    std::string error;  // exception text for failed runs
};

/// Runs one solver from Pi0 = p q^T. Wall-clock time covers the solver call only.
SolveOutcome run_method(const RunCell& cell, const AlignmentInstance& instance, const RunConfig& config,
                        bool record_shadow = false);

struct ResultRow {
    RunCell cell;
    MetricsRecord metrics;
    bool failed = false;
};

using RunObserver = std::function<void(const RunCell&, const AlignmentInstance&, const SolveOutcome&)>;

/// Runs the whole grid on `config.jobs` workers. Rows come back in grid
/// order. The observer, if any, is called under a lock as runs finish.
std::vector<ResultRow> run_sweep(const RunConfig& config, const RunObserver& observer = {},
                                 bool record_shadow = false);

inline constexpr char kResultsHeader[] = "method,epsilon,n,seed,loss,sparsity,feasibility,accuracy,time_s,iters,status";

std::string format_double(double x);
std::string format_result_row(const ResultRow& row, bool omit_timing = false);
void write_results(const std::vector<ResultRow>& rows, const std::filesystem::path& path, bool omit_timing = false);
std::vector<ResultRow> read_results(const std::filesystem::path& path);

/// Writes one instance file per (n, seed) under output_dir/instances.
std::vector<std::filesystem::path> cmd_generate(const RunConfig& config);

/// Sweep plus results file output_dir/results.csv; returns its path.
std::filesystem::path cmd_run(const RunConfig& config);

struct SummaryRow {
    std::string method;
    std::optional<double> epsilon;
    Index n = 0;
    long ok = 0;
    long failed = 0;
    // means over ok rows; unset when the group has none
    std::optional<double> loss, sparsity, feasibility, accuracy, time_s, iters;
};

std::vector<SummaryRow> summarize(const std::vector<ResultRow>& rows);
std::string render_summary_csv(const std::vector<SummaryRow>& rows);
std::string render_summary_text(const std::vector<SummaryRow>& rows);

/// Reads a results file and writes summary.csv / summary.txt next to it.
std::vector<SummaryRow> cmd_summarize(const std::filesystem::path& results_file);

} // namespace gwot
