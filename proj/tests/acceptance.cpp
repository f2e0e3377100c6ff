// Acceptance suite: quantitative oracle checks plus the qualitative
// strategy orderings the simulator is expected to reproduce. Prints one
// pass/fail line per criterion; exits nonzero if any fail.

#include <cmath>
#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

#include "lbsim/grid.hpp"
#include "lbsim/oracle.hpp"
#include "lbsim/simulation.hpp"
#include "lbsim/stats.hpp"

using namespace lbsim;

namespace {

int failures = 0;

void report(int criterion, const std::string& what, bool ok,
            const std::string& detail = "") {
    std::printf("criterion %2d %-4s %s%s%s\n", criterion,
                ok ? "PASS" : "FAIL", what.c_str(),
                detail.empty() ? "" : " -- ", detail.c_str());
    std::fflush(stdout);
    if (!ok) ++failures;
}

struct RepStats {
    double mean;       // across replications
    double halfwidth;  // t-based, across replications
    int broken_count;
};

// Replicated runs of one scenario cell; broken runs are excluded from
// the aggregate and counted separately.
RepStats replicate(StrategyKind kind, double workload, double stale_period,
                   int n_servers, int reps, std::uint64_t base_seed,
                   const PrecisionTarget& target) {
    GridCell cell{kind, workload, stale_period};
    std::vector<double> means;
    int broken = 0;
    for (int r = 0; r < reps; ++r) {
        Scenario sc;
        sc.n_servers = n_servers;
        sc.workload = workload;
        sc.stale_period = stale_period;
        sc.master_seed = cell_seed(base_seed, cell, r);
        RunResult res = run(sc, kind, target);
        if (res.broken)
            ++broken;
        else
            means.push_back(res.mean_response_s);
    }
    RepStats out{0.0, 0.0, broken};
    if (means.size() >= 2) {
        auto [m, hw] = ci_halfwidth(means, 0.95);
        out.mean = m;
        out.halfwidth = hw;
    } else if (means.size() == 1) {
        out.mean = means[0];
    }
    return out;
}

bool separated(const RepStats& lo, const RepStats& hi) {
    return lo.mean + lo.halfwidth < hi.mean - hi.halfwidth;
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4f", v);
    return buf;
}

PrecisionTarget target_for(double workload) {
    PrecisionTarget t;
    t.relative_halfwidth = 0.01;
    t.batch_size = workload >= 0.85 ? 10000 : 2000;
    return t;
}

void criterion_1() {
    const double rhos[] = {0.3, 0.5, 0.7, 0.9};
    for (double rho : rhos) {
        Scenario sc;
        sc.workload = rho;
        sc.master_seed = 20240001 + static_cast<std::uint64_t>(rho * 100);
        RunResult r = run(sc, StrategyKind::Random, target_for(rho));
        double w = mm1_mean_response({rho, 1.0});
        bool ok = !r.broken && std::abs(r.mean_response_s - w) / w < 0.02;
        report(1, "random vs M/M/1 at rho=" + fmt(rho), ok,
               "sim " + fmt(r.mean_response_s) + " vs " + fmt(w));
    }
}

void criterion_2() {
    // Frozen CTMC oracle values, N=2, mu=1 (computed before the build).
    struct Point {
        double rho;
        double w_star;
    };
    const Point points[] = {
        {0.3, 1.144025052341}, {0.5, 1.426320751167}, {0.7, 2.108197273963}};
    for (auto [rho, w_star] : points) {
        double w_oracle = jsq_mean_response({2.0 * rho, 1.0, 60});
        bool oracle_ok = std::abs(w_oracle - w_star) < 1e-8;
        Scenario sc;
        sc.n_servers = 2;
        sc.workload = rho;
        sc.master_seed = 20240100 + static_cast<std::uint64_t>(rho * 100);
        RunResult r = run(sc, StrategyKind::Usq, target_for(rho));
        bool ok = oracle_ok && !r.broken &&
                  std::abs(r.mean_response_s - w_star) / w_star < 0.02;
        report(2, "usq vs JSQ CTMC oracle at rho=" + fmt(rho), ok,
               "sim " + fmt(r.mean_response_s) + " vs " + fmt(w_star));
    }
}

void criterion_3() {
    for (double rho : {0.8, 0.9}) {
        auto t = target_for(rho);
        auto usq = replicate(StrategyKind::Usq, rho, 0, 5, 5, 31, t);
        auto rr = replicate(StrategyKind::RoundRobin, rho, 0, 5, 5, 31, t);
        auto rnd = replicate(StrategyKind::Random, rho, 0, 5, 5, 31, t);
        bool ok = usq.mean < rr.mean && rr.mean < rnd.mean &&
                  separated(usq, rnd);
        report(3, "usq < rr < random at rho=" + fmt(rho), ok,
               fmt(usq.mean) + " / " + fmt(rr.mean) + " / " + fmt(rnd.mean));
    }
}

void criterion_4() {
    const double periods[] = {1, 2, 4, 10, 25};
    auto t = target_for(0.8);
    std::vector<RepStats> s;
    for (double T : periods)
        s.push_back(replicate(StrategyKind::Ssq, 0.8, T, 5, 3, 47, t));
    bool mono = true;
    for (std::size_t i = 1; i < s.size(); ++i) {
        // nondecreasing up to CI overlap
        if (s[i].mean + s[i].halfwidth < s[i - 1].mean - s[i - 1].halfwidth)
            mono = false;
    }
    bool strict = separated(s.front(), s.back());
    std::string detail;
    for (const auto& x : s) detail += fmt(x.mean) + " ";
    report(4, "ssq response nondecreasing in stale period at rho=0.8",
           mono && strict, detail);
}

void criterion_5() {
    auto t = target_for(0.9);
    auto ssq4 = replicate(StrategyKind::Ssq, 0.9, 4, 5, 5, 53, t);
    auto ssq2 = replicate(StrategyKind::Ssq, 0.9, 2, 5, 5, 53, t);
    auto rnd = replicate(StrategyKind::Random, 0.9, 0, 5, 5, 53, t);
    auto usq = replicate(StrategyKind::Usq, 0.9, 0, 5, 5, 53, t);
    report(5, "ssq(T=4) worse than random at rho=0.9",
           separated(rnd, ssq4),
           fmt(ssq4.mean) + " vs " + fmt(rnd.mean) +
               (ssq4.broken_count ? " (broken runs excluded)" : ""));
    report(5, "ssq(T=2) better than random at rho=0.9",
           separated(ssq2, rnd), fmt(ssq2.mean) + " vs " + fmt(rnd.mean));
    report(5, "ssq(T=2) still worse than usq at rho=0.9",
           ssq2.mean > usq.mean, fmt(ssq2.mean) + " vs " + fmt(usq.mean));
}

void criterion_6() {
    for (double rho : {0.5, 0.8}) {
        for (double T : {2.0, 4.0, 10.0}) {
            auto t = target_for(rho);
            auto hsq = replicate(StrategyKind::Hsq, rho, T, 5, 3, 61, t);
            auto ssq = replicate(StrategyKind::Ssq, rho, T, 5, 3, 61, t);
            report(6,
                   "hsq < ssq at rho=" + fmt(rho) + " T=" + fmt(T),
                   separated(hsq, ssq),
                   fmt(hsq.mean) + " vs " + fmt(ssq.mean));
        }
    }
}

void criterion_7() {
    for (double rho : {0.5, 0.8}) {
        auto t = target_for(rho);
        auto hsq = replicate(StrategyKind::Hsq, rho, 10000, 5, 5, 71, t);
        auto rr = replicate(StrategyKind::RoundRobin, rho, 0, 5, 5, 71, t);
        double rel = std::abs(hsq.mean - rr.mean) / rr.mean;
        report(7, "hsq(T=10000) within 5% of rr at rho=" + fmt(rho),
               rel < 0.05, fmt(hsq.mean) + " vs " + fmt(rr.mean));
    }
}

void criterion_8() {
    Scenario sc;
    sc.workload = 1.2;
    sc.master_seed = 81;
    PrecisionTarget t;
    RunResult a = run(sc, StrategyKind::Random, t);
    RunResult b = run(sc, StrategyKind::Random, t);
    bool ok = a.broken && a.broken_time_s.has_value() && b.broken &&
              a.broken_time_s == b.broken_time_s &&
              a.jobs_arrived == b.jobs_arrived;
    report(8, "forced instability breaks deterministically", ok,
           a.broken ? "broke at t=" + fmt(*a.broken_time_s) : "did not break");
}

void criterion_9() {
    // Little's law at rho=0.5
    {
        Scenario sc;
        sc.workload = 0.5;
        sc.master_seed = 91;
        PrecisionTarget t;
        RunResult r = run(sc, StrategyKind::Random, t);
        double lw = sc.arrival_rate() * r.mean_response_s;
        report(9, "Little's law within 2% at rho=0.5",
               std::abs(r.time_avg_in_system - lw) / lw < 0.02,
               fmt(r.time_avg_in_system) + " vs " + fmt(lw));
    }
    // determinism
    {
        Scenario sc;
        sc.workload = 0.7;
        sc.stale_period = 2.0;
        sc.master_seed = 92;
        PrecisionTarget t;
        t.batch_size = 500;
        t.min_batches = 10;
        RunResult a = run(sc, StrategyKind::Hsq, t);
        RunResult b = run(sc, StrategyKind::Hsq, t);
        report(9, "repeated run is bit-identical",
               a.mean_response_s == b.mean_response_s &&
                   a.sim_time_s == b.sim_time_s &&
                   a.jobs_completed == b.jobs_completed);
    }
    // HSQ saturation cycling
    {
        bool ok = true;
        RandomStream tb(93, StreamPurpose::TieBreak);
        for (int trial = 0; trial < 1000 && ok; ++trial) {
            DispatcherView view(5);
            bool seen[5] = {};
            for (int i = 0; i < 5; ++i) seen[choose_hsq(view, tb)] = true;
            for (bool s : seen) ok = ok && s;
        }
        report(9, "hsq cycles all servers from an equal view", ok);
    }
    // strategy RNG budgets
    {
        std::vector<int> lengths{1, 0, 2, 0, 1};
        bool ok = true;
        auto budget = [&](StrategyKind k, std::uint64_t want) {
            Strategy st(k, 5);
            RandomStream tb(94, StreamPurpose::TieBreak);
            st.choose(lengths, tb);
            return tb.draw_count() == want;
        };
        ok = budget(StrategyKind::Random, 1) &&
             budget(StrategyKind::RoundRobin, 0) &&
             budget(StrategyKind::Usq, 1) && budget(StrategyKind::Ssq, 1) &&
             budget(StrategyKind::Hsq, 5);
        report(9, "per-decision RNG budgets (1/0/1/1/N)", ok);
    }
    // CI coverage over 200 seeded runs at rho=0.5
    {
        int covered = 0;
        for (int i = 0; i < 200; ++i) {
            Scenario sc;
            sc.workload = 0.5;
            sc.master_seed = 95000 + static_cast<std::uint64_t>(i);
            PrecisionTarget t;
            RunResult r = run(sc, StrategyKind::Random, t);
            if (std::abs(r.mean_response_s - 2.0) <= r.ci_halfwidth_s)
                ++covered;
        }
        report(9, "95% CI covers the analytic mean in >= 180/200 runs",
               covered >= 180, std::to_string(covered) + "/200");
    }
}

void criterion_10() {
    ExperimentGrid g;
    g.strategies = {StrategyKind::Random, StrategyKind::RoundRobin,
                    StrategyKind::Usq, StrategyKind::Ssq, StrategyKind::Hsq};
    g.workloads = {0.3, 0.6};
    g.stale_periods_s = {2.0};
    g.replications = 2;
    g.base_seed = 101;
    g.precision.batch_size = 500;
    g.precision.min_batches = 10;
    g.precision.relative_halfwidth = 0.02;

    g.parallel = false;
    std::ostringstream serial;
    emit_csv(run_grid(g), serial);
    std::ostringstream serial2;
    emit_csv(run_grid(g), serial2);
    g.parallel = true;
    std::ostringstream parallel;
    emit_csv(run_grid(g), parallel);
    report(10, "grid output byte-identical across runs and serial/parallel",
           serial.str() == serial2.str() && serial.str() == parallel.str());
}

}  // namespace

int main() {
    criterion_1();
    criterion_2();
    criterion_3();
    criterion_4();
    criterion_5();
    criterion_6();
    criterion_7();
    criterion_8();
    criterion_9();
    criterion_10();
    if (failures) {
        std::printf("%d criterion check(s) FAILED\n", failures);
        return 1;
    }
    std::printf("all acceptance criteria passed\n");
    return 0;
}
