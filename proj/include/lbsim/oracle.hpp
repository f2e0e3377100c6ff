#pragma once

#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace lbsim {

struct MM1Params {
    double arrival_rate;
    double service_rate;
};

// Mean response time W = 1/(mu - lambda) of a stable M/M/1 queue.
inline double mm1_mean_response(const MM1Params& p) {
    if (!(p.arrival_rate >= 0.0) || !(p.service_rate > 0.0))
        throw std::invalid_argument("rates must be nonnegative / positive");
    if (p.arrival_rate >= p.service_rate)
        throw std::invalid_argument("unstable: arrival rate >= service rate");
    return 1.0 / (p.service_rate - p.arrival_rate);
}

struct JsqCtmcModel {
    double arrival_rate;
    double service_rate;
    int buffer_cap = 60;  // per-server effective-length truncation
};

namespace detail {

struct JsqSolution {
    std::vector<double> pi;  // steady state over (q1, q2), row-major
    int cap;
    double boundary_mass;
};

// Steady state of the two-server join-the-shortest-queue chain over
// states (q1, q2), qi = effective length <= cap. Arrivals join the
// shorter queue, ties split 1/2 each; arrivals to a full pair of queues
// are dropped (truncation). Solves pi * Q = 0 with the normalization
// row replacing one redundant balance equation.
inline JsqSolution solve_jsq_ctmc(const JsqCtmcModel& m) {
    if (!(m.arrival_rate > 0.0) || !(m.service_rate > 0.0))
        throw std::invalid_argument("rates must be positive");
    if (m.buffer_cap < 1)
        throw std::invalid_argument("buffer cap must be >= 1");
    const int cap = m.buffer_cap;
    const int side = cap + 1;
    const int n = side * side;
    const double lam = m.arrival_rate;
    const double mu = m.service_rate;
    auto idx = [side](int q1, int q2) { return q1 * side + q2; };

    // Build Q^T directly (columns of Q become rows of the system).
    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(static_cast<std::size_t>(n) * 5);
    auto rate = [&](int from, int to, double r) {
        trips.emplace_back(to, from, r);    // off-diagonal of Q^T
        trips.emplace_back(from, from, -r); // diagonal accumulates -out
    };
    for (int q1 = 0; q1 < side; ++q1) {
        for (int q2 = 0; q2 < side; ++q2) {
            const int i = idx(q1, q2);
            if (q1 < q2) {
                if (q1 < cap) rate(i, idx(q1 + 1, q2), lam);
            } else if (q2 < q1) {
                if (q2 < cap) rate(i, idx(q1, q2 + 1), lam);
            } else if (q1 < cap) {
                rate(i, idx(q1 + 1, q2), lam / 2.0);
                rate(i, idx(q1, q2 + 1), lam / 2.0);
            }
            if (q1 > 0) rate(i, idx(q1 - 1, q2), mu);
            if (q2 > 0) rate(i, idx(q1, q2 - 1), mu);
        }
    }
    Eigen::SparseMatrix<double> A(n, n);
    A.setFromTriplets(trips.begin(), trips.end());
    // Replace the last equation with sum(pi) = 1.
    for (int j = 0; j < n; ++j) A.coeffRef(n - 1, j) = 1.0;
    A.makeCompressed();

    Eigen::VectorXd b = Eigen::VectorXd::Zero(n);
    b(n - 1) = 1.0;
    Eigen::SparseLU<Eigen::SparseMatrix<double>> solver;
    solver.compute(A);
    if (solver.info() != Eigen::Success)
        throw std::runtime_error("JSQ oracle: singular CTMC solve");
    Eigen::VectorXd pi = solver.solve(b);
    if (solver.info() != Eigen::Success)
        throw std::runtime_error("JSQ oracle: CTMC solve failed");

    JsqSolution sol;
    sol.cap = cap;
    sol.pi.assign(pi.data(), pi.data() + n);
    sol.boundary_mass = 0.0;
    for (int q1 = 0; q1 < side; ++q1)
        for (int q2 = 0; q2 < side; ++q2)
            if (q1 == cap || q2 == cap)
                sol.boundary_mass += sol.pi[static_cast<std::size_t>(idx(q1, q2))];
    return sol;
}

}  // namespace detail

// Mean response time of two-server JSQ via the truncated CTMC and
// Little's law, W = L / lambda.
inline double jsq_mean_response(const JsqCtmcModel& m) {
    auto sol = detail::solve_jsq_ctmc(m);
    if (std::abs(sol.boundary_mass) > 1e-8)
        throw std::runtime_error(
            "JSQ oracle unreliable: truncation boundary mass too high, "
            "raise buffer_cap");
    const int side = sol.cap + 1;
    double L = 0.0;
    for (int q1 = 0; q1 < side; ++q1)
        for (int q2 = 0; q2 < side; ++q2)
            L += sol.pi[static_cast<std::size_t>(q1 * side + q2)] * (q1 + q2);
    return L / m.arrival_rate;
}

}  // namespace lbsim
