#pragma once

#include <vector>

#include "vdmdp/linalg.hpp"
#include "vdmdp/model.hpp"

namespace vdmdp {

/// Dense transition matrix of the Markov chain induced by a policy.
inline Matrix policy_transition_matrix(const MdpModel& model, const Policy& policy) {
    const int n = model.num_states();
    Matrix p(n, std::vector<double>(n, 0.0));
    for (int x = 0; x < n; ++x)
        for (const auto& e : model.row(x, policy.action_of[x])) p[x][e.state] += e.prob;
    return p;
}

inline std::vector<double> policy_cost_vector(const MdpModel& model, const Policy& policy) {
    std::vector<double> c(model.num_states());
    for (int x = 0; x < model.num_states(); ++x) c[x] = model.cost[x][policy.action_of[x]];
    return c;
}

namespace detail {

/// Strongly connected components of the support graph (iterative Tarjan);
/// returns component index per node.
inline std::vector<int> scc_components(const Matrix& p, int& count) {
    const int n = static_cast<int>(p.size());
    std::vector<std::vector<int>> adj(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (p[i][j] > 0.0) adj[i].push_back(j);

    std::vector<int> index(n, -1), low(n, 0), comp(n, -1);
    std::vector<bool> on_stack(n, false);
    std::vector<int> stack;
    int next_index = 0;
    count = 0;

    struct Frame { int v; std::size_t child; };
    for (int root = 0; root < n; ++root) {
        if (index[root] != -1) continue;
        std::vector<Frame> call;
        call.push_back({root, 0});
        while (!call.empty()) {
            auto& f = call.back();
            const int v = f.v;
            if (f.child == 0) {
                index[v] = low[v] = next_index++;
                stack.push_back(v);
                on_stack[v] = true;
            }
            bool descended = false;
            while (f.child < adj[v].size()) {
                const int w = adj[v][f.child++];
                if (index[w] == -1) {
                    call.push_back({w, 0});
                    descended = true;
                    break;
                }
                if (on_stack[w]) low[v] = std::min(low[v], index[w]);
            }
            if (descended) continue;
            if (low[v] == index[v]) {
                while (true) {
                    const int w = stack.back();
                    stack.pop_back();
                    on_stack[w] = false;
                    comp[w] = count;
                    if (w == v) break;
                }
                ++count;
            }
            call.pop_back();
            if (!call.empty()) low[call.back().v] = std::min(low[call.back().v], low[v]);
        }
    }
    return comp;
}

} // namespace detail

/// Number of recurrent classes (SCCs with no edge leaving them) of a chain.
inline int recurrent_class_count(const Matrix& p) {
    int n_comp = 0;
    const auto comp = detail::scc_components(p, n_comp);
    std::vector<bool> has_exit(n_comp, false);
    const int n = static_cast<int>(p.size());
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (p[i][j] > 0.0 && comp[i] != comp[j]) has_exit[comp[i]] = true;
    int recurrent = 0;
    for (bool e : has_exit)
        if (!e) ++recurrent;
    return recurrent;
}

inline bool is_unichain(const Matrix& p) { return recurrent_class_count(p) == 1; }

/// Long-run average cost of a policy on a unichain model, via the stationary
/// distribution. The result is the same from every initial state.
inline double exact_average_cost(const MdpModel& model, const Policy& policy) {
    const auto p = policy_transition_matrix(model, policy);
    const auto pi = stationary_distribution(p);
    const auto c = policy_cost_vector(model, policy);
    double g = 0.0;
    for (std::size_t i = 0; i < pi.size(); ++i) g += pi[i] * c[i];
    return g;
}

} // namespace vdmdp
