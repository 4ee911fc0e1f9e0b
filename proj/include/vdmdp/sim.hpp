#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "vdmdp/discounted.hpp"
#include "vdmdp/model.hpp"
#include "vdmdp/rng.hpp"
#include "vdmdp/schedule.hpp"
#include "vdmdp/util.hpp"

namespace vdmdp {

struct TrajectoryStep {
    int state;
    int action;
    double cost;
};

struct Trajectory {
    int x0 = 0;
    std::uint64_t seed = 0;
    std::vector<TrajectoryStep> steps;
};

namespace detail {

inline int sample_row(const KernelRow& row, SplitMix64& rng) {
    const double u = rng.next_double();
    double cum = 0.0;
    for (const auto& e : row) {
        cum += e.prob;
        if (u < cum) return e.state;
    }
    return row.back().state; // row sums to 1 up to rounding
}

} // namespace detail

/// Rolls out `horizon` steps of the chain induced by a policy. Bit-reproducible:
/// the same (model, policy, x0, horizon, seed) always yields the same steps.
inline Trajectory simulate_trajectory(const MdpModel& model, const Policy& policy,
                                      int x0, long horizon, std::uint64_t seed) {
    if (horizon < 1) throw std::invalid_argument("simulate: horizon must be >= 1");
    if (x0 < 0 || x0 >= model.num_states())
        throw std::invalid_argument("simulate: bad initial state");
    if (first_infeasible_state(model, policy) != -1)
        throw std::invalid_argument("simulate: infeasible policy");
    Trajectory traj;
    traj.x0 = x0;
    traj.seed = seed;
    traj.steps.reserve(horizon);
    SplitMix64 rng(seed);
    int x = x0;
    for (long t = 0; t < horizon; ++t) {
        const int a = policy.action_of[x];
        traj.steps.push_back({x, a, model.cost[x][a]});
        x = detail::sample_row(model.row(x, a), rng);
    }
    return traj;
}

/// Monte Carlo estimate of the average cost per unit time.
struct AverageCostEstimate {
    int x0 = 0;
    long horizon = 0;
    int replications = 0;
    std::uint64_t seed = 0;
    std::vector<double> cesaro;       // final Cesàro average per replication
    std::vector<double> tail_max;     // per replication: max Cesàro checkpoint over the final 10%
    double mean = 0.0;                // mean of `cesaro`
    double std_error = 0.0;           // sample std of `cesaro` / sqrt(replications)
    double limsup_proxy = 0.0;        // mean of `tail_max`
};

/// Cesàro averages of simulated costs. Replication i runs on seed ^ mix64(i), so
/// replications are independent streams and reordering them only reorders the
/// per-replication lists. The limsup proxy is the running max of Cesàro averages
/// over the last 10% of checkpoints (one checkpoint per horizon/100 steps).
inline AverageCostEstimate simulate_average_cost(const MdpModel& model, const Policy& policy,
                                                 int x0, long horizon, int replications,
                                                 std::uint64_t seed, int threads = 1) {
    if (replications < 1) throw std::invalid_argument("simulate: replications must be >= 1");
    if (horizon < 1) throw std::invalid_argument("simulate: horizon must be >= 1");
    if (x0 < 0 || x0 >= model.num_states())
        throw std::invalid_argument("simulate: bad initial state");
    if (first_infeasible_state(model, policy) != -1)
        throw std::invalid_argument("simulate: infeasible policy");

    AverageCostEstimate est;
    est.x0 = x0;
    est.horizon = horizon;
    est.replications = replications;
    est.seed = seed;
    est.cesaro.resize(replications);
    est.tail_max.resize(replications);

    const long checkpoint = std::max<long>(1, horizon / 100);
    parallel_for_indices(replications, threads, [&](int r) {
        SplitMix64 rng(seed ^ mix64(static_cast<std::uint64_t>(r)));
        int x = x0;
        double total = 0.0;
        std::vector<double> checkpoints;
        for (long t = 0; t < horizon; ++t) {
            const int a = policy.action_of[x];
            total += model.cost[x][a];
            if ((t + 1) % checkpoint == 0 || t + 1 == horizon)
                checkpoints.push_back(total / static_cast<double>(t + 1));
            x = detail::sample_row(model.row(x, a), rng);
        }
        est.cesaro[r] = total / static_cast<double>(horizon);
        const std::size_t tail =
            std::max<std::size_t>(1, (checkpoints.size() + 9) / 10);
        double mx = -kInf;
        for (std::size_t i = checkpoints.size() - tail; i < checkpoints.size(); ++i)
            mx = std::max(mx, checkpoints[i]);
        est.tail_max[r] = mx;
    });

    double mean = 0.0;
    for (double c : est.cesaro) mean += c;
    mean /= replications;
    double var = 0.0;
    for (double c : est.cesaro) var += (c - mean) * (c - mean);
    var = replications > 1 ? var / (replications - 1) : 0.0;
    est.mean = mean;
    est.std_error = std::sqrt(var / replications);
    double proxy = 0.0;
    for (double t : est.tail_max) proxy += t;
    est.limsup_proxy = proxy / replications;
    return est;
}

/// Abel-vs-Cesàro cross-check: (1-alpha_n) v_{alpha_n}^pi(x0) should not exceed
/// the simulated average cost, up to 3 standard errors + 1e-6, along the tail of
/// the schedule.
struct TauberianResult {
    std::vector<int> indices;   // schedule indices checked (the tail window)
    std::vector<double> lhs;    // (1-alpha_n) * v^pi_{alpha_n}(x0)
    double rhs_bound = 0.0;     // limsup proxy + 3*std_error + 1e-6
    bool pass = false;
    AverageCostEstimate estimate;
};

inline TauberianResult tauberian_check(const MdpModel& model, const Policy& policy, int x0,
                                       const DiscountSchedule& schedule, long horizon,
                                       int replications = 8, std::uint64_t seed = 1,
                                       int tail_window = -1, int threads = 1) {
    validate_schedule(schedule);
    if (tail_window < 1) tail_window = default_tail_window(schedule.n_max);
    TauberianResult res;
    res.estimate = simulate_average_cost(model, policy, x0, horizon, replications, seed, threads);
    res.rhs_bound = res.estimate.limsup_proxy + 3.0 * res.estimate.std_error + 1e-6;
    res.pass = true;
    for (int n = schedule.size() - tail_window; n < schedule.size(); ++n) {
        const double alpha = schedule.values[n];
        const auto v = policy_discounted_value(model, policy, alpha);
        const double lhs = (1.0 - alpha) * v.values[x0];
        res.indices.push_back(n);
        res.lhs.push_back(lhs);
        if (lhs > res.rhs_bound) res.pass = false;
    }
    return res;
}

} // namespace vdmdp
