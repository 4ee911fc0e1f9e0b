#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "vdmdp/linalg.hpp"
#include "vdmdp/rng.hpp"

namespace vdmdp {

/// +inf is the "action unavailable" sentinel in cost tables. It is an exact IEEE
/// infinity, never a large finite number: finite + inf = inf, and minimizations
/// skip infinite entries unless a row is all-infinite.
inline constexpr double kInf = std::numeric_limits<double>::infinity();

inline bool is_finite(double v) { return std::isfinite(v); }

enum class ContinuityClass { WeakStar, SetwiseStar, None };

inline const char* to_string(ContinuityClass c) {
    switch (c) {
        case ContinuityClass::WeakStar: return "W*";
        case ContinuityClass::SetwiseStar: return "S*";
        default: return "none";
    }
}

struct StateRecord {
    int id = 0;
    std::vector<double> coord; // empty = no coordinates
    std::string label;         // free tag, drives catalog cost structure

    bool operator==(const StateRecord&) const = default;
};

/// One sparse transition-kernel entry: probability of landing in `state`.
struct KernelEntry {
    int state = 0;
    double prob = 0.0;

    bool operator==(const KernelEntry&) const = default;
};

using KernelRow = std::vector<KernelEntry>;

/// Finite metric MDP. Rows of `kernel` are indexed x * actions.size() + a and may
/// be empty exactly when cost(x,a) = +inf; such pairs never enter a minimization.
/// Immutable after validation by convention; every operation on it is pure.
struct MdpModel {
    std::vector<StateRecord> states;
    std::vector<std::string> actions;
    Matrix cost;                     // states x actions, entries in [c_min, +inf]
    std::vector<KernelRow> kernel;   // size states*actions
    Matrix metric_matrix;            // explicit metric; empty => euclidean on coord
    ContinuityClass continuity_class = ContinuityClass::None;

    int num_states() const { return static_cast<int>(states.size()); }
    int num_actions() const { return static_cast<int>(actions.size()); }

    bool has_metric_matrix() const { return !metric_matrix.empty(); }

    const KernelRow& row(int x, int a) const {
        return kernel[static_cast<std::size_t>(x) * actions.size() + a];
    }
    KernelRow& row(int x, int a) {
        return kernel[static_cast<std::size_t>(x) * actions.size() + a];
    }

    /// Metric rho(x, y). The explicit matrix wins over coordinates when both are
    /// present, so catalog models can impose label-driven structure.
    double distance(int x, int y) const {
        if (has_metric_matrix()) return metric_matrix[x][y];
        const auto& cx = states[x].coord;
        const auto& cy = states[y].coord;
        if (cx.empty() || cx.size() != cy.size())
            throw std::logic_error("model has no usable metric");
        double s = 0.0;
        for (std::size_t i = 0; i < cx.size(); ++i) {
            const double d = cx[i] - cy[i];
            s += d * d;
        }
        return std::sqrt(s);
    }

    double metric_diameter() const {
        double d = 0.0;
        for (int x = 0; x < num_states(); ++x)
            for (int y = x + 1; y < num_states(); ++y)
                d = std::max(d, distance(x, y));
        return d;
    }

    /// Sorted ascending set of distinct positive pairwise distances. These are the
    /// only radii at which ball membership changes.
    std::vector<double> distinct_positive_distances() const {
        std::set<double> s;
        for (int x = 0; x < num_states(); ++x)
            for (int y = x + 1; y < num_states(); ++y) {
                const double d = distance(x, y);
                if (d > 0.0) s.insert(d);
            }
        return {s.begin(), s.end()};
    }

    /// Minimal distance from x to any other state (0 when a zero-distance twin
    /// exists; +inf for a one-state model).
    double nearest_neighbor_distance(int x) const {
        double d = kInf;
        for (int y = 0; y < num_states(); ++y)
            if (y != x) d = std::min(d, distance(x, y));
        return d;
    }

    bool operator==(const MdpModel&) const = default;
};

/// Deterministic stationary policy: one action index per state.
struct Policy {
    std::vector<int> action_of;

    bool operator==(const Policy&) const = default;
};

/// A vector of values over states plus a free-form tag saying which quantity it
/// is (v_alpha, u, finite-horizon value, ...) and with which parameters.
struct ValueFunction {
    std::vector<double> values;
    std::string meta;

    double operator()(int x) const { return values[x]; }

    bool operator==(const ValueFunction&) const = default;
};

struct ValidationReport {
    std::vector<std::string> violations;
    // Pre-normalization |row sum - 1| per finite-cost (x,a); filled by the loader.
    std::vector<double> row_deviations;

    bool ok() const { return violations.empty(); }
};

/// Actions with finite cost at x. Infinity is a sentinel: no tolerance involved.
inline std::vector<int> effective_action_set(const MdpModel& model, int x) {
    if (x < 0 || x >= model.num_states())
        throw std::invalid_argument("effective_action_set: bad state index");
    std::vector<int> out;
    for (int a = 0; a < model.num_actions(); ++a)
        if (is_finite(model.cost[x][a])) out.push_back(a);
    return out;
}

/// Open metric ball {y : rho(y, x) < radius}; always contains x.
inline std::vector<int> ball(const MdpModel& model, int x, double radius) {
    if (radius <= 0.0) throw std::invalid_argument("ball: radius must be positive");
    std::vector<int> out;
    for (int y = 0; y < model.num_states(); ++y)
        if (model.distance(x, y) < radius) out.push_back(y);
    return out;
}

namespace detail {

constexpr double kRowSumTol = 1e-12;
constexpr double kMetricTol = 1e-12;

inline void check_metric(const MdpModel& m, ValidationReport& rep) {
    const int n = m.num_states();
    if (m.has_metric_matrix()) {
        if (static_cast<int>(m.metric_matrix.size()) != n) {
            rep.violations.push_back("metric matrix dimension != |X|");
            return;
        }
        for (int i = 0; i < n; ++i)
            if (static_cast<int>(m.metric_matrix[i].size()) != n) {
                rep.violations.push_back("metric matrix row " + std::to_string(i) +
                                         " has wrong length");
                return;
            }
        for (int i = 0; i < n; ++i) {
            if (std::fabs(m.metric_matrix[i][i]) > kMetricTol)
                rep.violations.push_back("metric diagonal nonzero at " + std::to_string(i));
            for (int j = 0; j < n; ++j) {
                if (m.metric_matrix[i][j] < 0.0)
                    rep.violations.push_back("negative distance (" + std::to_string(i) +
                                             "," + std::to_string(j) + ")");
                if (std::fabs(m.metric_matrix[i][j] - m.metric_matrix[j][i]) > kMetricTol)
                    rep.violations.push_back("metric asymmetry (" + std::to_string(i) +
                                             "," + std::to_string(j) + ")");
            }
        }
        // Triangle inequality on every triple for small models, on a seeded
        // deterministic sample beyond that.
        auto check_triple = [&](int i, int j, int k) {
            if (m.metric_matrix[i][k] > m.metric_matrix[i][j] + m.metric_matrix[j][k] + kMetricTol)
                rep.violations.push_back("triangle inequality fails at (" + std::to_string(i) +
                                         "," + std::to_string(j) + "," + std::to_string(k) + ")");
        };
        if (static_cast<long long>(n) * n * n <= 300000) {
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    for (int k = 0; k < n; ++k) check_triple(i, j, k);
        } else {
            SplitMix64 rng(0x3ad1e5u);
            for (int t = 0; t < 300000; ++t)
                check_triple(static_cast<int>(rng.next_below(n)),
                             static_cast<int>(rng.next_below(n)),
                             static_cast<int>(rng.next_below(n)));
        }
    } else {
        std::size_t dim = 0;
        bool have = false;
        for (const auto& s : m.states) {
            if (s.coord.empty()) {
                rep.violations.push_back("state " + std::to_string(s.id) +
                                         " lacks coordinates and no metric matrix is given");
                return;
            }
            if (!have) {
                dim = s.coord.size();
                have = true;
            } else if (s.coord.size() != dim) {
                rep.violations.push_back("inconsistent coordinate dimensions");
                return;
            }
        }
    }
}

} // namespace detail

/// Reports every violated model invariant; an empty report means well-formed.
/// Never throws: all failures are data, not exceptions.
inline ValidationReport validate_model(const MdpModel& model) {
    ValidationReport rep;
    const int n = model.num_states();
    const int na = model.num_actions();
    if (n == 0) rep.violations.push_back("empty state set");
    if (na == 0) rep.violations.push_back("empty action set");
    for (int x = 0; x < n; ++x)
        if (model.states[x].id != x)
            rep.violations.push_back("state record " + std::to_string(x) +
                                     " has id " + std::to_string(model.states[x].id));
    if (static_cast<int>(model.cost.size()) != n)
        rep.violations.push_back("cost table has wrong number of rows");
    if (model.kernel.size() != static_cast<std::size_t>(n) * na)
        rep.violations.push_back("kernel has wrong number of rows");
    if (!rep.violations.empty()) return rep;

    bool any_finite = false;
    for (int x = 0; x < n; ++x) {
        if (static_cast<int>(model.cost[x].size()) != na) {
            rep.violations.push_back("cost row " + std::to_string(x) + " has wrong length");
            continue;
        }
        bool x_has_action = false;
        for (int a = 0; a < na; ++a) {
            const double c = model.cost[x][a];
            const std::string xa = "(" + std::to_string(x) + "," + std::to_string(a) + ")";
            if (std::isnan(c) || c == -kInf) {
                rep.violations.push_back("cost not bounded below at " + xa);
                continue;
            }
            const auto& row = model.row(x, a);
            if (!is_finite(c)) {
                if (!row.empty())
                    rep.violations.push_back("kernel row present for infinite-cost " + xa);
                continue;
            }
            any_finite = true;
            x_has_action = true;
            double sum = 0.0;
            for (const auto& e : row) {
                if (e.state < 0 || e.state >= n)
                    rep.violations.push_back("kernel target out of range at " + xa);
                if (e.prob < 0.0)
                    rep.violations.push_back("negative kernel entry at " + xa);
                sum += e.prob;
            }
            if (std::fabs(sum - 1.0) > detail::kRowSumTol)
                rep.violations.push_back("row-stochasticity " + xa);
        }
        if (!x_has_action)
            rep.violations.push_back("empty effective action set at state " + std::to_string(x));
    }
    if (!any_finite) rep.violations.push_back("no finite cost entry in the model");
    detail::check_metric(model, rep);
    return rep;
}

/// Checks action_of(x) in A(x) for all x; returns the offending state or -1.
inline int first_infeasible_state(const MdpModel& model, const Policy& policy) {
    if (static_cast<int>(policy.action_of.size()) != model.num_states()) return 0;
    for (int x = 0; x < model.num_states(); ++x) {
        const int a = policy.action_of[x];
        if (a < 0 || a >= model.num_actions() || !is_finite(model.cost[x][a])) return x;
    }
    return -1;
}

/// Minimum over the finite cost entries; the model's c_min.
inline double min_finite_cost(const MdpModel& model) {
    double m = kInf;
    for (const auto& row : model.cost)
        for (double c : row)
            if (is_finite(c)) m = std::min(m, c);
    return m;
}

inline double max_finite_cost(const MdpModel& model) {
    double m = -kInf;
    for (const auto& row : model.cost)
        for (double c : row)
            if (is_finite(c)) m = std::max(m, c);
    return m;
}

} // namespace vdmdp
