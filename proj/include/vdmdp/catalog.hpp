#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

#include "vdmdp/model.hpp"
#include "vdmdp/rng.hpp"

namespace vdmdp {

/// One action, every state jumps to 0, cost = indicator of being away from 0,
/// on a uniform grid over [0,1]. The discounted value is the cost function
/// itself and the average cost is 0 from everywhere.
inline MdpModel example_indicator(int grid_size) {
    if (grid_size < 2) throw std::invalid_argument("example_indicator: grid_size must be >= 2");
    MdpModel m;
    m.continuity_class = ContinuityClass::WeakStar;
    m.actions = {"a1"};
    const double h = 1.0 / (grid_size - 1);
    m.states.reserve(grid_size);
    m.cost.reserve(grid_size);
    m.kernel.reserve(grid_size);
    for (int k = 0; k < grid_size; ++k) {
        StateRecord s;
        s.id = k;
        s.coord = {k * h};
        m.states.push_back(std::move(s));
        m.cost.push_back({k == 0 ? 0.0 : 1.0});
        m.kernel.push_back({{0, 1.0}});
    }
    return m;
}

/// Dirichlet-cost model: 2*n_pairs + 1 points of [0,1] carrying alternating
/// "rational"/"irrational" labels (state 0 rational), one action, every state
/// jumps to 0, cost 1 exactly on the irrational-labeled states. Rationality is
/// a label, never float arithmetic: the grid points are all rationals, only the
/// labels carry the structure that matters.
inline MdpModel example_dirichlet(int n_pairs) {
    if (n_pairs < 1) throw std::invalid_argument("example_dirichlet: n_pairs must be >= 1");
    MdpModel m;
    m.continuity_class = ContinuityClass::SetwiseStar;
    m.actions = {"a1"};
    const int n = 2 * n_pairs + 1;
    const double h = 1.0 / (n - 1);
    for (int k = 0; k < n; ++k) {
        StateRecord s;
        s.id = k;
        s.coord = {k * h};
        s.label = (k % 2 == 0) ? "rational" : "irrational";
        m.states.push_back(std::move(s));
        m.cost.push_back({k % 2 == 0 ? 0.0 : 1.0});
        m.kernel.push_back({{0, 1.0}});
    }
    return m;
}

/// Seeded random model with strictly positive kernel rows (every stationary
/// policy is unichain and fast-mixing, so the stationary-distribution oracle and
/// the tail-window limit estimates are both well behaved). Costs are uniform on
/// [0,1]; the metric is euclidean on random 1-D coordinates. `sparsity` in [0,1]
/// concentrates kernel mass without ever zeroing an entry: 30% of each row is
/// spread uniformly, the rest follows seeded weights sharpened by sparsity.
inline MdpModel random_finite(int n_states, int n_actions, std::uint64_t seed,
                              double sparsity = 0.5) {
    if (n_states < 1 || n_actions < 1)
        throw std::invalid_argument("random_finite: need at least one state and action");
    if (!(sparsity >= 0.0 && sparsity <= 1.0))
        throw std::invalid_argument("random_finite: sparsity must be in [0,1]");
    SplitMix64 rng(seed);
    MdpModel m;
    m.continuity_class = ContinuityClass::None;
    for (int a = 0; a < n_actions; ++a) m.actions.push_back("a" + std::to_string(a));
    for (int x = 0; x < n_states; ++x) {
        StateRecord s;
        s.id = x;
        s.coord = {rng.next_double()};
        m.states.push_back(std::move(s));
    }
    m.cost.assign(n_states, std::vector<double>(n_actions, 0.0));
    for (int x = 0; x < n_states; ++x)
        for (int a = 0; a < n_actions; ++a) m.cost[x][a] = rng.next_double();
    const double power = 1.0 + 4.0 * sparsity;
    for (int x = 0; x < n_states; ++x)
        for (int a = 0; a < n_actions; ++a) {
            std::vector<double> w(n_states);
            double wsum = 0.0;
            for (int y = 0; y < n_states; ++y) {
                w[y] = std::pow(-std::log(1.0 - rng.next_double()), power);
                wsum += w[y];
            }
            KernelRow row(n_states);
            double total = 0.0;
            for (int y = 0; y < n_states; ++y) {
                row[y] = {y, 0.3 / n_states + 0.7 * w[y] / wsum};
                total += row[y].prob;
            }
            for (auto& e : row) e.prob /= total;
            m.kernel.push_back(std::move(row));
        }
    return m;
}

} // namespace vdmdp
