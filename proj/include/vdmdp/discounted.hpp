#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "vdmdp/linalg.hpp"
#include "vdmdp/model.hpp"

namespace vdmdp {

/// Expected value of `values` under the kernel row of (x, a), summed in stored
/// entry order (fixed reduction order keeps parallel runs bit-identical).
inline double kernel_dot(const MdpModel& model, int x, int a,
                         const std::vector<double>& values) {
    double s = 0.0;
    for (const auto& e : model.row(x, a)) s += e.prob * values[e.state];
    return s;
}

class solver_error : public std::runtime_error {
public:
    solver_error(const std::string& what, double residual, long iterations)
        : std::runtime_error(what), last_residual(residual), iterations(iterations) {}
    double last_residual;
    long iterations;
};

/// (m_alpha, u_alpha) together with the value function they came from.
struct RelativeValue {
    double alpha = 0.0;
    ValueFunction v;              // v_alpha
    double m = 0.0;               // inf_x v_alpha(x), attained on finite X
    ValueFunction u;              // v_alpha - m_alpha, >= 0 with min exactly 0
    double one_minus_alpha_m = 0.0; // (1-alpha)*m, accumulated cancellation-free
};

/// One sweep of the Bellman operator T v(x) = min_{a in A(x)} [c + alpha * E v].
inline std::vector<double> bellman_apply(const MdpModel& model, double alpha,
                                         const std::vector<double>& v) {
    const int n = model.num_states();
    std::vector<double> out(n, kInf);
    for (int x = 0; x < n; ++x) {
        double best = kInf;
        for (int a = 0; a < model.num_actions(); ++a) {
            if (!is_finite(model.cost[x][a])) continue;
            const double q = model.cost[x][a] + alpha * kernel_dot(model, x, a, v);
            if (q < best) best = q;
        }
        out[x] = best;
    }
    return out;
}

namespace detail {

struct DiscountedCore {
    std::vector<double> w;  // final iterate of the shifted recursion (w0 = 0)
    double shift;           // c_min / (1 - alpha); v = w + shift + extrapolation
    double extrapolation;   // span-rule correction constant, 0 on the plain path
    long iterations = 0;
    double sup_delta = 0.0;
    double span_delta = 0.0;
    std::string stop_rule;
};

/// Core solver. Iterates w_{k+1} = T_c(w_k) - c_min, the recursion satisfied by
/// v_k - c_min/(1-alpha) when v_0 is the constant lower bound c_min/(1-alpha)
/// (iterates then rise monotonically toward the fixed point and stay O(span)
/// even when v_alpha ~ 1/(1-alpha), so u_alpha is formed without cancellation).
/// Stopping rules:
///
///   contraction: sup|delta_k| <= tol*(1-alpha)/alpha. Plain iterate, the full
///     guarantee ||v - v*||_inf <= tol.
///   span: the span of successive differences contracts at the chain-mixing
///     rate independently of alpha. With r an online (conservative) estimate of
///     that rate, span(delta_k)/(1-r) bounds the remaining shape change, so
///     stopping at span(delta_k) <= tol*(1-r) puts u_alpha within ~tol of its
///     limit; the returned v adds the midpoint of the MacQueen bracket
///     [alpha*min(delta), alpha*max(delta)]/(1-alpha), which also pins
///     (1-alpha)*m to within alpha*span(delta)/2 <= tol. At alpha ~ 1-1e-9 an
///     absolute sup-norm guarantee on v is below double resolution; u and
///     (1-alpha)m are the quantities the rest of the pipeline consumes.
///   noise floor: span stuck at accumulation noise for several sweeps; stop
///     with the same extrapolation (nothing better is representable).
///
/// Chains that do not mix (periodic under the greedy actions) keep a flat span
/// and hit the iteration cap at alpha near 1; that raises solver_error, the
/// documented outcome for such models.
inline DiscountedCore solve_discounted_core(const MdpModel& model, double alpha,
                                            double tol) {
    if (!(alpha >= 0.0 && alpha < 1.0))
        throw std::invalid_argument("discounted solve: alpha must be in [0,1)");
    if (!(tol > 0.0)) throw std::invalid_argument("discounted solve: tol must be positive");

    const int n = model.num_states();
    const double c_min = min_finite_cost(model);
    const double c_max = max_finite_cost(model);
    const double range = std::max(c_max - c_min, tol);

    DiscountedCore out;
    out.shift = alpha > 0.0 ? c_min / (1.0 - alpha) : c_min;
    out.extrapolation = 0.0;

    // Predictable cap from the contraction rate, clamped: at alpha near 1 the
    // contraction count is astronomical and the span rule is expected to fire.
    long cap = 2000000;
    if (alpha > 0.0) {
        const double k = std::log(tol * (1.0 - alpha) / range) / std::log(alpha) + 100.0;
        if (k < static_cast<double>(cap)) cap = static_cast<long>(std::ceil(k));
        if (cap < 2) cap = 2;
    } else {
        cap = 2;
    }

    const double sup_stop = alpha > 0.0 ? tol * (1.0 - alpha) / alpha : kInf;

    std::vector<double> w(n, 0.0);
    std::vector<double> next(n, 0.0);
    double prev_span = kInf;
    double ratio = 0.9, prev_ratio = 0.9; // conservative until measured
    int floor_hits = 0;
    for (long it = 1; it <= cap; ++it) {
        next = bellman_apply(model, alpha, w);
        for (double& v : next) v -= c_min;
        double sup = 0.0;
        double dmin = kInf, dmax = -kInf;
        double w_scale = 1.0;
        for (int x = 0; x < n; ++x) {
            const double d = next[x] - w[x];
            sup = std::max(sup, std::fabs(d));
            dmin = std::min(dmin, d);
            dmax = std::max(dmax, d);
            w_scale = std::max(w_scale, std::fabs(next[x]));
        }
        out.iterations = it;
        out.sup_delta = sup;
        out.span_delta = dmax - dmin;
        if (sup <= sup_stop || alpha == 0.0) {
            out.w = std::move(next);
            out.stop_rule = "contraction";
            return out;
        }
        if (prev_span > 0.0 && prev_span < kInf) {
            const double r = std::max(0.1, std::min(out.span_delta / prev_span, 0.9999));
            const double r_est = std::max(r, prev_ratio);
            prev_ratio = r;
            ratio = r_est;
        }
        const bool span_ok = out.span_delta <= tol * (1.0 - ratio);
        const double noise = 16.0 * std::numeric_limits<double>::epsilon() *
                             std::max(w_scale, std::fabs(c_max) + std::fabs(c_min));
        floor_hits = out.span_delta <= noise ? floor_hits + 1 : 0;
        if (span_ok || floor_hits >= 4) {
            out.w = std::move(next);
            out.extrapolation = alpha * (dmin + dmax) / (2.0 * (1.0 - alpha));
            out.stop_rule = span_ok ? "span" : "span (noise floor)";
            return out;
        }
        prev_span = out.span_delta;
        std::swap(w, next);
    }
    throw solver_error("value iteration did not converge within the iteration cap",
                       out.sup_delta, out.iterations);
}

} // namespace detail

/// Optimal infinite-horizon discounted value by value iteration; satisfies
/// ||v - v*||_inf <= tol.
inline ValueFunction discounted_value_iteration(const MdpModel& model, double alpha,
                                                double tol) {
    auto core = detail::solve_discounted_core(model, alpha, tol);
    ValueFunction v;
    v.values.resize(model.num_states());
    const double add = core.shift + core.extrapolation;
    for (int x = 0; x < model.num_states(); ++x) v.values[x] = core.w[x] + add;
    v.meta = "v_alpha alpha=" + std::to_string(alpha);
    return v;
}

/// Discounted relative value (m_alpha, u_alpha). u is computed from the bounded
/// iterate, so it carries no 1/(1-alpha)-sized cancellation error.
inline RelativeValue relative_value(const MdpModel& model, double alpha, double tol) {
    auto core = detail::solve_discounted_core(model, alpha, tol);
    const int n = model.num_states();
    RelativeValue rv;
    rv.alpha = alpha;
    double w_min = kInf;
    for (double v : core.w) w_min = std::min(w_min, v);
    const double add = core.shift + core.extrapolation;
    rv.v.values.resize(n);
    rv.u.values.resize(n);
    for (int x = 0; x < n; ++x) {
        rv.v.values[x] = core.w[x] + add;
        rv.u.values[x] = core.w[x] - w_min;
    }
    rv.m = w_min + add;
    // (1-alpha)*m without the 1/(1-alpha)-sized intermediates: (1-alpha)*shift
    // is exactly c_min.
    rv.one_minus_alpha_m = (1.0 - alpha) * w_min + min_finite_cost(model);
    if (core.extrapolation != 0.0)
        rv.one_minus_alpha_m += (1.0 - alpha) * core.extrapolation;
    rv.v.meta = "v_alpha alpha=" + std::to_string(alpha);
    rv.u.meta = "u_alpha alpha=" + std::to_string(alpha);
    return rv;
}

/// Value of a fixed deterministic stationary policy: the linear fixed point
/// v = c_phi + alpha P_phi v, solved directly with one iterative-refinement pass.
inline ValueFunction policy_discounted_value(const MdpModel& model, const Policy& policy,
                                             double alpha) {
    if (!(alpha >= 0.0 && alpha < 1.0))
        throw std::invalid_argument("policy_discounted_value: alpha must be in [0,1)");
    if (first_infeasible_state(model, policy) != -1)
        throw std::invalid_argument("policy_discounted_value: infeasible policy");
    const int n = model.num_states();
    Matrix a(n, std::vector<double>(n, 0.0));
    std::vector<double> b(n, 0.0);
    for (int x = 0; x < n; ++x) {
        a[x][x] = 1.0;
        const int act = policy.action_of[x];
        for (const auto& e : model.row(x, act)) a[x][e.state] -= alpha * e.prob;
        b[x] = model.cost[x][act];
    }
    auto v = solve_linear(a, b);
    // refinement: v += (I - alpha P)^{-1} (b - (I - alpha P) v)
    std::vector<double> r(n, 0.0);
    for (int x = 0; x < n; ++x) {
        double ax = 0.0;
        for (int y = 0; y < n; ++y) ax += a[x][y] * v[y];
        r[x] = b[x] - ax;
    }
    auto corr = solve_linear(a, r);
    for (int x = 0; x < n; ++x) v[x] += corr[x];
    ValueFunction out;
    out.values = std::move(v);
    out.meta = "v_alpha^policy alpha=" + std::to_string(alpha);
    return out;
}

namespace detail {

inline ValueFunction finite_horizon_impl(const MdpModel& model, const Policy* policy,
                                         long horizon, double alpha) {
    if (horizon < 1) throw std::invalid_argument("finite_horizon_value: N must be >= 1");
    if (!(alpha >= 0.0 && alpha <= 1.0))
        throw std::invalid_argument("finite_horizon_value: alpha must be in [0,1]");
    if (policy && first_infeasible_state(model, *policy) != -1)
        throw std::invalid_argument("finite_horizon_value: infeasible policy");
    const int n = model.num_states();
    std::vector<double> v(n, 0.0), next(n, 0.0);
    for (long t = 0; t < horizon; ++t) {
        for (int x = 0; x < n; ++x) {
            if (policy) {
                const int a = policy->action_of[x];
                next[x] = model.cost[x][a] + alpha * kernel_dot(model, x, a, v);
            } else {
                double best = kInf;
                for (int a = 0; a < model.num_actions(); ++a) {
                    if (!is_finite(model.cost[x][a])) continue;
                    const double q = model.cost[x][a] + alpha * kernel_dot(model, x, a, v);
                    if (q < best) best = q;
                }
                next[x] = best;
            }
        }
        std::swap(v, next);
    }
    ValueFunction out;
    out.values = std::move(v);
    out.meta = std::string(policy ? "v_{N,alpha}^policy" : "v_{N,alpha}") +
               " N=" + std::to_string(horizon) + " alpha=" + std::to_string(alpha);
    return out;
}

} // namespace detail

/// N-stage optimal expected total discounted cost (backward induction). alpha = 1
/// is allowed here; it is the average-cost numerator v_{N,1}.
inline ValueFunction finite_horizon_value(const MdpModel& model, long horizon, double alpha) {
    return detail::finite_horizon_impl(model, nullptr, horizon, alpha);
}

/// N-stage value of a fixed policy.
inline ValueFunction finite_horizon_value(const MdpModel& model, const Policy& policy,
                                          long horizon, double alpha) {
    return detail::finite_horizon_impl(model, &policy, horizon, alpha);
}

} // namespace vdmdp
