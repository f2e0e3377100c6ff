#pragma once

#include <cstdint>
#include <deque>
#include <functional>
#include <optional>
#include <stdexcept>
#include <vector>

#include "lbsim/event_queue.hpp"
#include "lbsim/rng.hpp"
#include "lbsim/stats.hpp"
#include "lbsim/strategies.hpp"

namespace lbsim {

// One experiment cell: N identical FCFS servers with exponential service
// behind a zero-cost dispatcher, Poisson arrivals at rate
// workload * N / service_mean.
struct Scenario {
    int n_servers = 5;
    double service_mean = 1.0;  // 1/mu, seconds
    double workload = 0.5;      // rho = lambda / (N * mu)
    double stale_period = 0.0;  // seconds; only read by ssq/hsq
    int queue_break_threshold = 200;
    std::uint64_t master_seed = 0;

    double arrival_rate() const {
        return workload * n_servers / service_mean;
    }

    void validate(StrategyKind strategy) const {
        if (n_servers < 1) throw std::invalid_argument("need >= 1 server");
        if (service_mean <= 0.0)
            throw std::invalid_argument("service mean must be positive");
        if (workload < 0.0)
            throw std::invalid_argument("workload must be nonnegative");
        if (queue_break_threshold < 1)
            throw std::invalid_argument("break threshold must be positive");
        if (uses_snapshots(strategy) && stale_period <= 0.0)
            throw std::invalid_argument(
                "stale period required for ssq/hsq");
    }
};

struct Job {
    std::uint64_t id;
    double arrival_time;
    double service_demand;
    int server_id = -1;
    double start_service_time = -1.0;
};

struct RunResult {
    double mean_response_s = 0.0;
    double ci_halfwidth_s = 0.0;
    std::vector<double> per_server_utilization;
    std::uint64_t jobs_completed = 0;
    std::uint64_t jobs_arrived = 0;
    bool broken = false;
    std::optional<double> broken_time_s;
    double sim_time_s = 0.0;
    double time_avg_in_system = 0.0;  // for Little's-law checks
};

namespace detail {

struct ServerState {
    std::deque<Job> queue;  // waiting jobs only, FCFS
    std::optional<Job> in_service;
    double busy_time_accum = 0.0;
    std::uint64_t completed_count = 0;

    // "queue length" as every strategy observes it: waiting + in service.
    int effective_length() const {
        return static_cast<int>(queue.size()) + (in_service ? 1 : 0);
    }
};

}  // namespace detail

// The event loop. Owns the clock, the servers, the strategy instance and
// the RNG streams for one run; single-threaded by construction.
class Simulation {
public:
    Simulation(const Scenario& scenario, StrategyKind strategy,
               const PrecisionTarget& target)
        : scenario_(scenario),
          target_(target),
          strategy_(strategy, scenario.n_servers),
          interarrival_(scenario.master_seed, StreamPurpose::Interarrival),
          service_(scenario.master_seed, StreamPurpose::Service),
          tiebreak_(scenario.master_seed, StreamPurpose::TieBreak),
          servers_(static_cast<std::size_t>(scenario.n_servers)),
          acc_(target.batch_size) {
        scenario.validate(strategy);
    }

    RunResult run() {
        if (scenario_.arrival_rate() > 0.0) {
            events_.schedule(interarrival_.next_exponential(
                                 1.0 / scenario_.arrival_rate()),
                             EventKind::Arrival, clock_);
        } else {
            // Degenerate no-load case: push a single job through.
            events_.schedule(0.0, EventKind::Arrival, clock_);
        }
        if (uses_snapshots(strategy_.kind()))
            events_.schedule(scenario_.stale_period,
                             EventKind::SnapshotUpdate, clock_);

        while (!events_.empty() && !stop_ && !broken_) {
            Event e = events_.pop();
            area_in_system_ += in_system_ * (e.time - clock_);
            clock_ = e.time;
            switch (e.kind) {
                case EventKind::Arrival: handle_arrival(); break;
                case EventKind::Departure: handle_departure(e.server_id); break;
                case EventKind::SnapshotUpdate: handle_snapshot(); break;
            }
        }
        return finalize();
    }

    // RNG budget introspection for tests.
    const RandomStream& tiebreak_stream() const { return tiebreak_; }

    // Called once per completed job with its completion time.
    void set_job_observer(std::function<void(const Job&, double)> obs) {
        observer_ = std::move(obs);
    }

private:
    void handle_arrival() {
        Job job{next_job_id_++, clock_,
                service_.next_exponential(scenario_.service_mean)};
        job.server_id = strategy_.choose(true_lengths(), tiebreak_);
        enqueue_job(job);
        if (scenario_.arrival_rate() > 0.0 && !broken_)
            events_.schedule(clock_ + interarrival_.next_exponential(
                                          1.0 / scenario_.arrival_rate()),
                             EventKind::Arrival, clock_);
    }

    void enqueue_job(Job job) {
        auto& srv = servers_[static_cast<std::size_t>(job.server_id)];
        if (srv.effective_length() >= scenario_.queue_break_threshold) {
            broken_ = true;
            broken_time_ = clock_;
            return;
        }
        ++arrived_;
        ++in_system_;
        if (srv.in_service) {
            srv.queue.push_back(job);
        } else {
            start_service(srv, job);
        }
    }

    void start_service(detail::ServerState& srv, Job job) {
        job.start_service_time = clock_;
        events_.schedule(clock_ + job.service_demand, EventKind::Departure,
                         clock_, job.server_id);
        srv.in_service = job;
    }

    void handle_departure(int server_id) {
        auto& srv = servers_[static_cast<std::size_t>(server_id)];
        const Job& job = *srv.in_service;
        srv.busy_time_accum += job.service_demand;
        ++srv.completed_count;
        ++completed_;
        --in_system_;
        acc_.record_response(clock_ - job.arrival_time);
        if (observer_) observer_(job, clock_);
        srv.in_service.reset();
        if (!srv.queue.empty()) {
            Job next = srv.queue.front();
            srv.queue.pop_front();
            start_service(srv, next);
        }
        // Run-length control is only worth re-evaluating when a new
        // batch mean has landed.
        if (acc_.batch_means().size() != checked_batches_) {
            checked_batches_ = acc_.batch_means().size();
            if (should_stop(acc_, target_)) stop_ = true;
        }
        if (scenario_.arrival_rate() == 0.0 && in_system_ == 0) stop_ = true;
    }

    void handle_snapshot() {
        strategy_.apply_snapshot(true_lengths());
        events_.schedule(clock_ + scenario_.stale_period,
                         EventKind::SnapshotUpdate, clock_);
    }

    std::vector<int> true_lengths() const {
        std::vector<int> lens;
        lens.reserve(servers_.size());
        for (const auto& s : servers_) lens.push_back(s.effective_length());
        return lens;
    }

    RunResult finalize() {
        RunResult r;
        r.jobs_arrived = arrived_;
        r.jobs_completed = completed_;
        r.broken = broken_;
        r.broken_time_s = broken_time_;
        r.sim_time_s = clock_;
        const auto& means = acc_.batch_means();
        if (means.size() >= 2) {
            auto [mean, hw] = ci_halfwidth(means, target_.confidence);
            r.mean_response_s = mean;
            r.ci_halfwidth_s = hw;
        } else if (acc_.total_count() > 0) {
            // Too short for batch means (broken or degenerate run); fall
            // back to the raw average with no CI.
            r.mean_response_s =
                acc_.total_sum() / static_cast<double>(acc_.total_count());
        }
        for (auto& srv : servers_) {
            double busy = srv.busy_time_accum;
            if (srv.in_service)
                busy += clock_ - srv.in_service->start_service_time;
            r.per_server_utilization.push_back(
                clock_ > 0.0 ? utilization(busy, clock_) : 0.0);
        }
        if (clock_ > 0.0) r.time_avg_in_system = area_in_system_ / clock_;
        return r;
    }

    Scenario scenario_;
    PrecisionTarget target_;
    Strategy strategy_;
    RandomStream interarrival_;
    RandomStream service_;
    RandomStream tiebreak_;
    std::vector<detail::ServerState> servers_;
    BatchAccumulator acc_;
    EventQueue events_;

    double clock_ = 0.0;
    double area_in_system_ = 0.0;
    long in_system_ = 0;
    std::uint64_t next_job_id_ = 0;
    std::uint64_t arrived_ = 0;
    std::uint64_t completed_ = 0;
    std::size_t checked_batches_ = 0;
    bool stop_ = false;
    bool broken_ = false;
    std::optional<double> broken_time_;
    std::function<void(const Job&, double)> observer_;
};

inline RunResult run(const Scenario& scenario, StrategyKind strategy,
                     const PrecisionTarget& target) {
    return Simulation(scenario, strategy, target).run();
}

}  // namespace lbsim
