// Command-line front end: `run` simulates one scenario and prints a
// summary; `grid` expands a factorial experiment design and writes CSV.

#include <CLI11.hpp>
#include <iostream>
#include <optional>
#include <string>

#include "lbsim/grid.hpp"
#include "lbsim/simulation.hpp"

namespace {

struct CommonFlags {
    int servers = 5;
    double service_mean = 1.0;
    int queue_break = 200;
    std::uint64_t seed = 1;
    double confidence = 0.95;
    double rel_precision = 0.01;
    long batch_size = 2000;
    int min_batches = 30;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
    cmd->add_option("--servers", f.servers, "Number of servers");
    cmd->add_option("--service-mean", f.service_mean,
                    "Mean service time in seconds");
    cmd->add_option("--queue-break", f.queue_break,
                    "Queue length at which the system is considered broken");
    cmd->add_option("--seed", f.seed, "Master / base seed");
    cmd->add_option("--confidence", f.confidence,
                    "CI confidence level (0.90, 0.95 or 0.99)");
    cmd->add_option("--rel-precision", f.rel_precision,
                    "Relative CI half-width target for run-length control");
    cmd->add_option("--batch-size", f.batch_size, "Jobs per batch");
    cmd->add_option("--min-batches", f.min_batches,
                    "Minimum batches before stopping is allowed");
}

lbsim::PrecisionTarget precision_of(const CommonFlags& f) {
    lbsim::PrecisionTarget p;
    p.confidence = f.confidence;
    p.relative_halfwidth = f.rel_precision;
    p.batch_size = f.batch_size;
    p.min_batches = f.min_batches;
    return p;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Load balancing strategy simulator"};
    app.require_subcommand(1);

    // run
    auto* run_cmd = app.add_subcommand("run", "Simulate a single scenario");
    CommonFlags rf;
    std::string run_strategy = "random";
    double run_workload = 0.5;
    double run_stale = 0.0;
    add_common(run_cmd, rf);
    run_cmd->add_option("--strategy", run_strategy,
                        "random, rr, usq, ssq or hsq");
    run_cmd->add_option("--workload", run_workload, "Offered load in [0, 0.99]");
    run_cmd->add_option("--stale-period", run_stale,
                        "Seconds between snapshots (ssq/hsq)");

    // grid
    auto* grid_cmd =
        app.add_subcommand("grid", "Run a factorial experiment grid to CSV");
    CommonFlags gf;
    std::string config_path, out_path = "results.csv";
    std::vector<std::string> g_strategies;
    std::vector<double> g_workloads, g_stales;
    int g_reps = 1;
    bool g_parallel = false;
    add_common(grid_cmd, gf);
    grid_cmd->add_option("--config", config_path,
                         "key=value config file; flags override it");
    grid_cmd->add_option("--strategy", g_strategies, "Strategy tokens");
    grid_cmd->add_option("--workload", g_workloads, "Workload values");
    grid_cmd->add_option("--stale-period", g_stales, "Stale periods (s)");
    grid_cmd->add_option("--replications", g_reps, "Replications per cell");
    grid_cmd->add_option("--out", out_path, "Output CSV path");
    grid_cmd->add_flag("--parallel", g_parallel,
                       "Run cells concurrently (same output as serial)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run_cmd) {
            if (run_workload < 0.0 || run_workload > 0.99) {
                std::cerr << "error: workload out of range [0, 0.99]\n";
                return 1;
            }
            lbsim::ExperimentGrid grid;
            grid.strategies = {lbsim::parse_strategy(run_strategy)};
            grid.workloads = {run_workload};
            if (run_stale > 0.0) grid.stale_periods_s = {run_stale};
            grid.replications = 1;
            grid.base_seed = rf.seed;
            grid.precision = precision_of(rf);
            grid.n_servers = rf.servers;
            grid.service_mean = rf.service_mean;
            grid.queue_break_threshold = rf.queue_break;
            grid.validate();

            lbsim::GridCell cell{grid.strategies[0], run_workload,
                                 run_stale};
            lbsim::CsvRow row = lbsim::run_cell(grid, cell, 0);
            std::cout << lbsim::kCsvHeader << '\n'
                      << lbsim::format_csv_row(row) << '\n';
            std::cout << "\nmean response  " << row.mean_response_s
                      << " s  (±" << row.ci_halfwidth_s << " at "
                      << rf.confidence * 100 << "% confidence)\n"
                      << "utilization    " << row.mean_utilization << '\n'
                      << "jobs completed " << row.jobs_completed << '\n'
                      << "simulated time " << row.sim_time_s << " s\n";
            if (row.broken) std::cout << "system BROKE during the run\n";
            return 0;
        }

        // grid
        lbsim::ExperimentGrid grid;
        if (!config_path.empty()) {
            grid = lbsim::parse_config_file(config_path);
        } else {
            grid.strategies.clear();
            grid.workloads.clear();
        }
        if (!g_strategies.empty()) {
            grid.strategies.clear();
            for (const auto& tok : g_strategies)
                grid.strategies.push_back(lbsim::parse_strategy(tok));
        }
        if (!g_workloads.empty()) grid.workloads = g_workloads;
        if (!g_stales.empty()) grid.stale_periods_s = g_stales;
        if (grid_cmd->count("--replications")) grid.replications = g_reps;
        if (grid_cmd->count("--seed")) grid.base_seed = gf.seed;
        if (grid_cmd->count("--servers")) grid.n_servers = gf.servers;
        if (grid_cmd->count("--service-mean"))
            grid.service_mean = gf.service_mean;
        if (grid_cmd->count("--queue-break"))
            grid.queue_break_threshold = gf.queue_break;
        if (grid_cmd->count("--confidence"))
            grid.precision.confidence = gf.confidence;
        if (grid_cmd->count("--rel-precision"))
            grid.precision.relative_halfwidth = gf.rel_precision;
        if (grid_cmd->count("--batch-size"))
            grid.precision.batch_size = gf.batch_size;
        if (grid_cmd->count("--min-batches"))
            grid.precision.min_batches = gf.min_batches;
        grid.parallel = g_parallel;
        grid.validate();

        auto rows = lbsim::run_grid(grid);
        lbsim::emit_csv(rows, out_path);
        std::cout << rows.size() << " rows written to " << out_path << '\n';
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
