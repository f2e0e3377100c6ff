#pragma once

#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <future>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "lbsim/rng.hpp"
#include "lbsim/simulation.hpp"
#include "lbsim/stats.hpp"
#include "lbsim/strategies.hpp"

namespace lbsim {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Factorial design: strategy x workload, with a stale-period axis for the
// snapshot-based strategies only.
struct ExperimentGrid {
    std::vector<StrategyKind> strategies;
    std::vector<double> workloads;
    std::vector<double> stale_periods_s;
    int replications = 1;
    std::uint64_t base_seed = 1;
    PrecisionTarget precision;
    int n_servers = 5;
    double service_mean = 1.0;
    int queue_break_threshold = 200;
    bool parallel = false;

    void validate() const {
        if (strategies.empty()) throw ConfigError("no strategies given");
        if (workloads.empty()) throw ConfigError("no workloads given");
        for (double w : workloads)
            if (w < 0.0 || w > 0.99)
                throw ConfigError("workload out of range [0, 0.99]");
        for (double t : stale_periods_s)
            if (t <= 0.0) throw ConfigError("stale period must be positive");
        bool needs_stale = false;
        for (auto s : strategies)
            if (uses_snapshots(s)) needs_stale = true;
        if (needs_stale && stale_periods_s.empty())
            throw ConfigError("stale period required for ssq/hsq");
        if (replications < 1)
            throw ConfigError("replications must be >= 1");
        if (n_servers < 1) throw ConfigError("servers must be >= 1");
        if (service_mean <= 0.0)
            throw ConfigError("service mean must be positive");
        if (queue_break_threshold < 1)
            throw ConfigError("queue break threshold must be >= 1");
        if (precision.confidence != 0.90 && precision.confidence != 0.95 &&
            precision.confidence != 0.99)
            throw ConfigError("confidence must be 0.90, 0.95 or 0.99");
        if (precision.relative_halfwidth <= 0.0)
            throw ConfigError("relative precision must be positive");
        if (precision.batch_size < 1)
            throw ConfigError("batch size must be >= 1");
        if (precision.min_batches < 2)
            throw ConfigError("min batches must be >= 2");
    }
};

struct GridCell {
    StrategyKind strategy;
    double workload;
    double stale_period_s = 0.0;  // 0 = not applicable
};

inline std::vector<GridCell> expand_grid(const ExperimentGrid& grid) {
    std::vector<GridCell> cells;
    for (auto s : grid.strategies) {
        for (double w : grid.workloads) {
            if (uses_snapshots(s)) {
                for (double t : grid.stale_periods_s)
                    cells.push_back({s, w, t});
            } else {
                cells.push_back({s, w, 0.0});
            }
        }
    }
    return cells;
}

// Replication seeds: distinct cells and replications never collide, and
// the mapping is stable across platforms and run orders.
inline std::uint64_t cell_seed(std::uint64_t base_seed, const GridCell& cell,
                               int replication) {
    std::uint64_t h = mix64(static_cast<std::uint64_t>(cell.strategy) + 1);
    std::uint64_t wbits, tbits;
    static_assert(sizeof(double) == sizeof(std::uint64_t));
    std::memcpy(&wbits, &cell.workload, sizeof(wbits));
    std::memcpy(&tbits, &cell.stale_period_s, sizeof(tbits));
    h = mix64(h ^ wbits);
    h = mix64(h ^ tbits);
    h = mix64(h ^ static_cast<std::uint64_t>(replication));
    return base_seed + h;
}

struct CsvRow {
    std::string strategy;
    int n_servers;
    double workload;
    double stale_period_s;  // <= 0 renders as empty
    std::uint64_t seed;
    double mean_response_s;
    double ci_halfwidth_s;
    double mean_utilization;
    std::uint64_t jobs_completed;
    bool broken;
    double sim_time_s;
};

inline constexpr const char* kCsvHeader =
    "strategy,n_servers,workload,stale_period_s,seed,mean_response_s,"
    "ci_halfwidth_s,mean_utilization,jobs_completed,broken,sim_time_s";

namespace detail {

inline std::string fixed6(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6f", v);
    return buf;
}

}  // namespace detail

inline std::string format_csv_row(const CsvRow& r) {
    std::ostringstream out;
    out << r.strategy << ',' << r.n_servers << ','
        << detail::fixed6(r.workload) << ','
        << (r.stale_period_s > 0.0 ? detail::fixed6(r.stale_period_s) : "")
        << ',' << r.seed << ',' << detail::fixed6(r.mean_response_s) << ','
        << detail::fixed6(r.ci_halfwidth_s) << ','
        << detail::fixed6(r.mean_utilization) << ',' << r.jobs_completed
        << ',' << (r.broken ? "true" : "false") << ','
        << detail::fixed6(r.sim_time_s);
    return out.str();
}

inline CsvRow run_cell(const ExperimentGrid& grid, const GridCell& cell,
                       int replication) {
    Scenario sc;
    sc.n_servers = grid.n_servers;
    sc.service_mean = grid.service_mean;
    sc.workload = cell.workload;
    sc.stale_period = cell.stale_period_s;
    sc.queue_break_threshold = grid.queue_break_threshold;
    sc.master_seed = cell_seed(grid.base_seed, cell, replication);
    RunResult res = run(sc, cell.strategy, grid.precision);

    CsvRow row;
    row.strategy = strategy_token(cell.strategy);
    row.n_servers = sc.n_servers;
    row.workload = cell.workload;
    row.stale_period_s = cell.stale_period_s;
    row.seed = sc.master_seed;
    row.mean_response_s = res.mean_response_s;
    row.ci_halfwidth_s = res.ci_halfwidth_s;
    double util = 0.0;
    for (double u : res.per_server_utilization) util += u;
    row.mean_utilization =
        res.per_server_utilization.empty()
            ? 0.0
            : util / static_cast<double>(res.per_server_utilization.size());
    row.jobs_completed = res.jobs_completed;
    row.broken = res.broken;
    row.sim_time_s = res.sim_time_s;
    return row;
}

// All cells x replications, in deterministic (cell, replication) order.
// Parallel execution only changes wall time, never the rows.
inline std::vector<CsvRow> run_grid(const ExperimentGrid& grid) {
    grid.validate();
    auto cells = expand_grid(grid);
    std::vector<CsvRow> rows(cells.size() *
                             static_cast<std::size_t>(grid.replications));
    if (grid.parallel) {
        std::vector<std::future<CsvRow>> futs(rows.size());
        for (std::size_t c = 0; c < cells.size(); ++c)
            for (int r = 0; r < grid.replications; ++r)
                futs[c * grid.replications + r] =
                    std::async(std::launch::async, run_cell, std::cref(grid),
                               cells[c], r);
        for (std::size_t i = 0; i < futs.size(); ++i) rows[i] = futs[i].get();
    } else {
        for (std::size_t c = 0; c < cells.size(); ++c)
            for (int r = 0; r < grid.replications; ++r)
                rows[c * grid.replications + r] = run_cell(grid, cells[c], r);
    }
    return rows;
}

inline void emit_csv(const std::vector<CsvRow>& rows, std::ostream& out) {
    out << kCsvHeader << '\n';
    for (const auto& r : rows) out << format_csv_row(r) << '\n';
}

inline void emit_csv(const std::vector<CsvRow>& rows,
                     const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open output file: " + path);
    emit_csv(rows, out);
    if (!out) throw std::runtime_error("write failed: " + path);
}

// Flat key=value config: comma-separated lists, '#' comments, later keys
// override earlier ones.
inline ExperimentGrid parse_config(std::istream& in) {
    ExperimentGrid grid;
    grid.strategies.clear();
    grid.workloads.clear();

    auto split = [](const std::string& s) {
        std::vector<std::string> parts;
        std::stringstream ss(s);
        std::string item;
        while (std::getline(ss, item, ',')) {
            // trim
            auto b = item.find_first_not_of(" \t");
            auto e = item.find_last_not_of(" \t");
            if (b != std::string::npos)
                parts.push_back(item.substr(b, e - b + 1));
        }
        return parts;
    };
    auto to_double = [](const std::string& s, const char* what) {
        try {
            std::size_t pos;
            double v = std::stod(s, &pos);
            if (pos != s.size()) throw std::invalid_argument(s);
            return v;
        } catch (const std::exception&) {
            throw ConfigError(std::string("bad numeric value for ") + what +
                              ": " + s);
        }
    };

    std::string line;
    while (std::getline(in, line)) {
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        auto eq = line.find('=');
        if (eq == std::string::npos) {
            if (line.find_first_not_of(" \t\r") != std::string::npos)
                throw ConfigError("malformed config line: " + line);
            continue;
        }
        std::string key = line.substr(0, eq);
        std::string val = line.substr(eq + 1);
        auto trim = [](std::string& s) {
            auto b = s.find_first_not_of(" \t\r");
            auto e = s.find_last_not_of(" \t\r");
            s = b == std::string::npos ? "" : s.substr(b, e - b + 1);
        };
        trim(key);
        trim(val);

        if (key == "strategies") {
            grid.strategies.clear();
            for (const auto& tok : split(val)) {
                try {
                    grid.strategies.push_back(parse_strategy(tok));
                } catch (const std::invalid_argument& e) {
                    throw ConfigError(e.what());
                }
            }
        } else if (key == "workloads") {
            grid.workloads.clear();
            for (const auto& tok : split(val))
                grid.workloads.push_back(to_double(tok, "workloads"));
        } else if (key == "stale_periods") {
            grid.stale_periods_s.clear();
            for (const auto& tok : split(val))
                grid.stale_periods_s.push_back(
                    to_double(tok, "stale_periods"));
        } else if (key == "replications") {
            grid.replications =
                static_cast<int>(to_double(val, "replications"));
        } else if (key == "seed") {
            grid.base_seed = std::stoull(val);
        } else if (key == "servers") {
            grid.n_servers = static_cast<int>(to_double(val, "servers"));
        } else if (key == "service_mean") {
            grid.service_mean = to_double(val, "service_mean");
        } else if (key == "queue_break") {
            grid.queue_break_threshold =
                static_cast<int>(to_double(val, "queue_break"));
        } else if (key == "confidence") {
            grid.precision.confidence = to_double(val, "confidence");
        } else if (key == "rel_precision") {
            grid.precision.relative_halfwidth =
                to_double(val, "rel_precision");
        } else if (key == "batch_size") {
            grid.precision.batch_size =
                static_cast<long>(to_double(val, "batch_size"));
        } else if (key == "min_batches") {
            grid.precision.min_batches =
                static_cast<int>(to_double(val, "min_batches"));
        } else {
            throw ConfigError("unknown config key: " + key);
        }
    }
    return grid;
}

inline ExperimentGrid parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file: " + path);
    return parse_config(in);
}

}  // namespace lbsim
