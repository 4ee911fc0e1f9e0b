#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "vdmdp/chain.hpp"
#include "vdmdp/discounted.hpp"
#include "vdmdp/model.hpp"
#include "vdmdp/schedule.hpp"
#include "vdmdp/sim.hpp"
#include "vdmdp/util.hpp"

namespace vdmdp {

struct TracePoint {
    double alpha = 0.0;
    double m = 0.0;
    double one_minus_alpha_m = 0.0;
    std::vector<double> u;

    bool operator==(const TracePoint&) const = default;
};

/// Everything the vanishing-discount pipeline produces for one schedule. All
/// liminf/limsup-style quantities are tail-window estimates on the truncated
/// schedule, never claimed to be the true limits; reports must say so.
struct VanishDiagnostics {
    DiscountSchedule schedule;
    double solver_tol = 0.0;
    int tail_window = 0; // number of trailing indices used for limit estimates

    std::vector<TracePoint> trace;
    double w_lower_seq = 0.0; // min of (1-alpha_n) m_{alpha_n} over the tail window
    double w_upper_seq = 0.0; // max of the same

    // Estimates of the all-alpha liminf/limsup over a refinement of schedules;
    // NaN when only a single schedule was run.
    double w_lower = std::numeric_limits<double>::quiet_NaN();
    double w_upper = std::numeric_limits<double>::quiet_NaN();

    ValueFunction u; // limit relative value; meta names the construction

    // Weak-construction intermediates, index m = 0..n_max (empty for pointwise).
    std::vector<std::vector<double>> U_m;
    std::vector<std::vector<double>> u_lower_m;

    std::vector<std::vector<int>> a_star;
    Policy policy;
    double w_star_estimate = std::numeric_limits<double>::quiet_NaN();
    std::string w_star_method;

    int tail_start() const { return schedule.size() - tail_window; }

    // NaN marks an absent estimate; two absent estimates are the same state.
    friend bool operator==(const VanishDiagnostics& a, const VanishDiagnostics& b) {
        const auto same = [](double x, double y) {
            return (std::isnan(x) && std::isnan(y)) || x == y;
        };
        return a.schedule == b.schedule && a.solver_tol == b.solver_tol &&
               a.tail_window == b.tail_window && a.trace == b.trace &&
               a.w_lower_seq == b.w_lower_seq && a.w_upper_seq == b.w_upper_seq &&
               same(a.w_lower, b.w_lower) && same(a.w_upper, b.w_upper) &&
               a.u == b.u && a.U_m == b.U_m && a.u_lower_m == b.u_lower_m &&
               a.a_star == b.a_star && a.policy == b.policy &&
               same(a.w_star_estimate, b.w_star_estimate) &&
               a.w_star_method == b.w_star_method;
    }
};

/// Solves every alpha_n on the schedule (optionally across threads; per-index
/// results land in their own slots, so output is identical to a serial run) and
/// records the trace plus the tail-window estimates of w_lower/w_upper along the
/// sequence. A failed solve aborts with the failing index in the message.
inline VanishDiagnostics sequence_diagnostics(const MdpModel& model,
                                              const DiscountSchedule& schedule, double tol,
                                              int tail_window = -1, int threads = 1) {
    validate_schedule(schedule);
    if (schedule.n_max < 2)
        throw std::invalid_argument("sequence_diagnostics: schedule needs n_max >= 2");
    VanishDiagnostics diag;
    diag.schedule = schedule;
    diag.solver_tol = tol;
    diag.tail_window = tail_window >= 1
                           ? std::min(tail_window, schedule.size())
                           : default_tail_window(schedule.n_max);
    diag.trace.resize(schedule.size());
    parallel_for_indices(schedule.size(), threads, [&](int n) {
        try {
            const auto rv = relative_value(model, schedule.values[n], tol);
            diag.trace[n] = TracePoint{rv.alpha, rv.m, rv.one_minus_alpha_m, rv.u.values};
        } catch (const solver_error& e) {
            throw solver_error("alpha index " + std::to_string(n) + ": " + e.what(),
                               e.last_residual, e.iterations);
        }
    });
    double lo = kInf, hi = -kInf;
    for (int n = diag.tail_start(); n < schedule.size(); ++n) {
        lo = std::min(lo, diag.trace[n].one_minus_alpha_m);
        hi = std::max(hi, diag.trace[n].one_minus_alpha_m);
    }
    diag.w_lower_seq = lo;
    diag.w_upper_seq = hi;
    return diag;
}

/// Refines the single-schedule estimates with additional schedules: the
/// all-alpha liminf (limsup) is estimated by the min (max) of the per-schedule
/// tail estimates. Fills diag.w_lower / diag.w_upper.
inline void refine_limit_estimates(VanishDiagnostics& diag, const MdpModel& model,
                                   const std::vector<DiscountSchedule>& extra_schedules,
                                   int threads = 1) {
    double lo = diag.w_lower_seq, hi = diag.w_upper_seq;
    for (const auto& s : extra_schedules) {
        const auto d = sequence_diagnostics(model, s, diag.solver_tol, -1, threads);
        lo = std::min(lo, d.w_lower_seq);
        hi = std::max(hi, d.w_upper_seq);
    }
    diag.w_lower = lo;
    diag.w_upper = hi;
}

/// Pointwise liminf of u_{alpha_n}, estimated by the min over the tail window.
/// This is the setwise-continuity construction.
inline ValueFunction limit_relative_value_pointwise(const VanishDiagnostics& diag) {
    if (diag.trace.empty())
        throw std::logic_error("limit_relative_value_pointwise: trace not populated");
    const int n_states = static_cast<int>(diag.trace.front().u.size());
    ValueFunction u;
    u.values.assign(n_states, kInf);
    for (int n = diag.tail_start(); n < diag.schedule.size(); ++n)
        for (int x = 0; x < n_states; ++x)
            u.values[x] = std::min(u.values[x], diag.trace[n].u[x]);
    u.meta = "u (setwise construction)";
    return u;
}

/// Default radii for the discrete liminf over space: one value above the metric
/// diameter (the whole space), then every realized positive distance,
/// descending. With strict balls the final radius yields the zero-distance
/// neighborhood of each state, so every ball structure the metric admits is
/// visited.
inline std::vector<double> default_radius_schedule(const MdpModel& model) {
    const auto ds = model.distinct_positive_distances();
    std::vector<double> radii;
    if (ds.empty()) {
        radii.push_back(1.0);
        return radii;
    }
    radii.push_back(std::nextafter(ds.back(), kInf));
    for (auto it = ds.rbegin(); it != ds.rend(); ++it) radii.push_back(*it);
    return radii;
}

struct WeakConstruction {
    ValueFunction u;
    std::vector<std::vector<double>> U_m;       // U_m(x) = min_{n >= m} u_{alpha_n}(x)
    std::vector<std::vector<double>> u_lower_m; // discrete liminf over space of U_m
};

/// The weak-continuity construction: U_m, then the discrete liminf over space
/// u_lower_m(x) = max_R min_{y in B_R(x)} U_m(y) (balls are strict and contain
/// x), then the limit in m. Both outer limits are evaluated at the tail-window
/// start so that the weak and pointwise constructions truncate identically;
/// u_lower_m is nondecreasing in m, so this is also the max over m up to that
/// index. The per-m families are returned in full.
inline WeakConstruction limit_relative_value_weak(const VanishDiagnostics& diag,
                                                  const MdpModel& model,
                                                  std::vector<double> radius_schedule = {}) {
    if (diag.trace.empty())
        throw std::logic_error("limit_relative_value_weak: trace not populated");
    const int n_states = model.num_states();
    const int count = diag.schedule.size();
    if (radius_schedule.empty()) radius_schedule = default_radius_schedule(model);
    for (double r : radius_schedule)
        if (!(r > 0.0))
            throw std::invalid_argument("limit_relative_value_weak: radii must be positive");

    WeakConstruction out;
    out.U_m.assign(count, std::vector<double>(n_states, kInf));
    for (int m = count - 1; m >= 0; --m) {
        for (int x = 0; x < n_states; ++x) {
            double v = diag.trace[m].u[x];
            if (m + 1 < count) v = std::min(v, out.U_m[m + 1][x]);
            out.U_m[m][x] = v;
        }
    }

    // Per state: neighbors ordered by distance, plus the ball size each radius
    // induces, computed once.
    std::vector<std::vector<int>> order(n_states);
    std::vector<std::vector<std::size_t>> ball_size(n_states);
    for (int x = 0; x < n_states; ++x) {
        std::vector<std::pair<double, int>> byd;
        byd.reserve(n_states);
        for (int y = 0; y < n_states; ++y) byd.emplace_back(model.distance(x, y), y);
        std::sort(byd.begin(), byd.end());
        std::vector<double> dist(n_states);
        order[x].resize(n_states);
        for (int i = 0; i < n_states; ++i) {
            dist[i] = byd[i].first;
            order[x][i] = byd[i].second;
        }
        ball_size[x].reserve(radius_schedule.size());
        for (double r : radius_schedule) {
            const auto it = std::lower_bound(dist.begin(), dist.end(), r);
            ball_size[x].push_back(static_cast<std::size_t>(it - dist.begin()));
        }
    }

    out.u_lower_m.assign(count, std::vector<double>(n_states, 0.0));
    std::vector<double> prefix_min(n_states);
    for (int m = 0; m < count; ++m) {
        for (int x = 0; x < n_states; ++x) {
            double run = kInf;
            for (int i = 0; i < n_states; ++i) {
                run = std::min(run, out.U_m[m][order[x][i]]);
                prefix_min[i] = run;
            }
            double best = -kInf;
            for (std::size_t ri = 0; ri < radius_schedule.size(); ++ri) {
                const std::size_t sz = ball_size[x][ri];
                if (sz == 0) continue; // radius below every distance incl. 0: impossible
                best = std::max(best, prefix_min[sz - 1]);
            }
            out.u_lower_m[m][x] = best;
        }
    }

    out.u.values = out.u_lower_m[diag.tail_start()];
    out.u.meta = "u (weak construction)";
    return out;
}

/// Default membership tolerance for A*(x); residuals accumulate solver tolerance
/// across the pipeline, so it scales with the magnitudes involved.
inline double default_astar_tol(double w_ref, const std::vector<double>& u) {
    double umax = 0.0;
    for (double v : u) umax = std::max(umax, std::fabs(v));
    return 1e-7 * (1.0 + std::fabs(w_ref) + umax);
}

/// Tolerance for residual comparisons against tail-window estimates, used by the
/// verification suite, which must accept diagnostics from schedules of any depth.
/// A u built from the tail window carries a per-state truncation error of order
/// (1 - alpha_{m0}) * span(second Laurent coefficient); on shallow schedules that
/// dwarfs the 1e-7 scale, so the budget follows the schedule resolution.
inline double schedule_aware_tol(const VanishDiagnostics& diag, double w_ref,
                                 const std::vector<double>& u) {
    const double resolution = 1.0 - diag.schedule.values[diag.tail_start()];
    double umax = 0.0;
    for (double v : u) umax = std::max(umax, std::fabs(v));
    return std::max(1e-7, 8.0 * resolution) * (1.0 + std::fabs(w_ref) + umax);
}

/// A*(x) = {a in A(x) : c(x,a) + E_u <= w_ref + u(x) + tol}. Pass tol <= 0 to use
/// the default. Empty sets are returned as data; extraction reports them.
inline std::vector<std::vector<int>> optimal_action_set(const MdpModel& model,
                                                        const ValueFunction& u, double w_ref,
                                                        double tol = -1.0) {
    if (!is_finite(w_ref)) throw std::invalid_argument("optimal_action_set: w_ref must be finite");
    if (tol <= 0.0) tol = default_astar_tol(w_ref, u.values);
    std::vector<std::vector<int>> sets(model.num_states());
    for (int x = 0; x < model.num_states(); ++x) {
        for (int a = 0; a < model.num_actions(); ++a) {
            if (!is_finite(model.cost[x][a])) continue;
            const double lhs = model.cost[x][a] + kernel_dot(model, x, a, u.values);
            if (lhs <= w_ref + u.values[x] + tol) sets[x].push_back(a);
        }
    }
    return sets;
}

class extraction_error : public std::runtime_error {
public:
    extraction_error(const std::string& what, int state)
        : std::runtime_error(what), state(state) {}
    int state;
};

/// Deterministic selector from the near-optimal sets: lowest action index wins.
inline Policy extract_policy(const std::vector<std::vector<int>>& a_star) {
    Policy phi;
    phi.action_of.reserve(a_star.size());
    for (std::size_t x = 0; x < a_star.size(); ++x) {
        if (a_star[x].empty())
            throw extraction_error("empty near-optimal action set at state " + std::to_string(x),
                                   static_cast<int>(x));
        phi.action_of.push_back(a_star[x].front());
    }
    return phi;
}

/// Fills diag.w_star_estimate with the average cost of the extracted policy:
/// exact stationary analysis when the induced chain is unichain, otherwise the
/// minimum over initial states of a seeded simulation.
inline void estimate_w_star(VanishDiagnostics& diag, const MdpModel& model, int threads = 1) {
    const auto p = policy_transition_matrix(model, diag.policy);
    if (is_unichain(p)) {
        diag.w_star_estimate = exact_average_cost(model, diag.policy);
        diag.w_star_method = "exact stationary analysis (unichain)";
        return;
    }
    double best = kInf;
    for (int x = 0; x < model.num_states(); ++x) {
        const auto est = simulate_average_cost(model, diag.policy, x, 20000, 4,
                                               0x5eedull, threads);
        best = std::min(best, est.mean);
    }
    diag.w_star_estimate = best;
    diag.w_star_method = "simulation (multichain), horizon 20000 x 4 replications";
}

/// Full pipeline: trace -> limit relative value (chosen construction) -> A*(x)
/// with w_ref = w_upper_seq -> deterministic policy -> average-cost estimate.
inline VanishDiagnostics run_vanish_pipeline(const MdpModel& model,
                                             const DiscountSchedule& schedule, double tol,
                                             const std::string& construction,
                                             int threads = 1, double astar_tol = -1.0) {
    VanishDiagnostics diag = sequence_diagnostics(model, schedule, tol, -1, threads);
    if (construction == "weak") {
        auto weak = limit_relative_value_weak(diag, model);
        diag.u = std::move(weak.u);
        diag.U_m = std::move(weak.U_m);
        diag.u_lower_m = std::move(weak.u_lower_m);
    } else if (construction == "pointwise") {
        diag.u = limit_relative_value_pointwise(diag);
    } else {
        throw std::invalid_argument("construction must be 'pointwise' or 'weak'");
    }
    diag.a_star = optimal_action_set(model, diag.u, diag.w_upper_seq, astar_tol);
    diag.policy = extract_policy(diag.a_star);
    estimate_w_star(diag, model, threads);
    return diag;
}

} // namespace vdmdp
