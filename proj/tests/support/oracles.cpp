#include "support/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <stdexcept>

#include "nsplan/heur/heuristics.hpp"

namespace nsplan::testing {

StateSpace enumerate_states(const GroundTask& task, std::size_t cap) {
    StateSpace sp;
    sp.states.push_back(task.initial);
    sp.index.emplace(task.initial, 0);
    sp.edges.emplace_back();
    for (std::size_t i = 0; i < sp.states.size(); ++i) {
        State s = sp.states[i];
        for (int a : applicable(s, task)) {
            State t = successor(s, a, task);
            auto it = sp.index.find(t);
            int tid;
            if (it == sp.index.end()) {
                tid = static_cast<int>(sp.states.size());
                if (sp.states.size() >= cap)
                    throw std::runtime_error("state space exceeds cap");
                sp.states.push_back(t);
                sp.index.emplace(t, tid);
                sp.edges.emplace_back();
            } else {
                tid = it->second;
            }
            sp.edges[i].push_back({a, tid});
        }
    }
    sp.goal.resize(sp.states.size());
    for (std::size_t i = 0; i < sp.states.size(); ++i)
        sp.goal[i] = is_goal(sp.states[i], task) ? 1 : 0;

    // reverse BFS from all goal states
    std::vector<std::vector<int>> rev(sp.states.size());
    for (std::size_t i = 0; i < sp.states.size(); ++i)
        for (auto [a, t] : sp.edges[i]) rev[t].push_back(static_cast<int>(i));
    sp.dist_to_goal.assign(sp.states.size(), -1);
    std::deque<int> queue;
    for (std::size_t i = 0; i < sp.states.size(); ++i)
        if (sp.goal[i]) {
            sp.dist_to_goal[i] = 0;
            queue.push_back(static_cast<int>(i));
        }
    while (!queue.empty()) {
        int s = queue.front();
        queue.pop_front();
        for (int p : rev[s])
            if (sp.dist_to_goal[p] < 0) {
                sp.dist_to_goal[p] = sp.dist_to_goal[s] + 1;
                queue.push_back(p);
            }
    }
    return sp;
}

int bfs_optimal_cost(const GroundTask& task, std::size_t cap) {
    StateSpace sp = enumerate_states(task, cap);
    return sp.dist_to_goal[0];
}

std::vector<double> hadd_table_oracle(const GroundTask& task, const State& s) {
    std::vector<double> cost(task.num_propositions, kInfinity);
    for (std::size_t p = 0; p < task.num_propositions; ++p)
        if (s.test(p)) cost[p] = 0.0;
    bool changed = true;
    while (changed) {
        changed = false;
        for (const auto& a : task.actions) {
            double total = 1.0;
            bool reachable = true;
            for (int p : a.pre) {
                if (std::isinf(cost[p])) {
                    reachable = false;
                    break;
                }
                total += cost[p];
            }
            if (!reachable) continue;
            for (int q : a.add)
                if (total < cost[q]) {
                    cost[q] = total;
                    changed = true;
                }
        }
    }
    return cost;
}

double hadd_oracle(const GroundTask& task, const State& s, const std::vector<int>& goal) {
    auto cost = hadd_table_oracle(task, s);
    double total = 0.0;
    for (int g : goal) {
        if (std::isinf(cost[g])) return kInfinity;
        total += cost[g];
    }
    return total;
}

bool relaxed_plan_achieves_goal(const GroundTask& task, const State& s,
                                const std::vector<int>& plan,
                                const std::vector<int>& goal) {
    auto cost = hadd_table_oracle(task, s);
    auto trigger = [&](int a) {
        double t = 1.0;
        for (int p : task.actions[a].pre) t += cost[p];
        return t;
    };
    std::vector<int> order = plan;
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        double ta = trigger(a), tb = trigger(b);
        if (ta != tb) return ta < tb;
        return a < b;
    });
    State cur = s;
    for (int a : order) {
        if (!cur.contains_all(task.actions[a].pre)) return false;
        for (int q : task.actions[a].add) cur.set(q);  // deletes ignored
    }
    return cur.contains_all(goal);
}

// ----------------------------------------------------------------------
// Exact tabular solver
// ----------------------------------------------------------------------

namespace {

// Discounted value of following `policy` from `start` until a goal or a
// cycle, computed per state with compensated summation; no value reuse, so
// rounding does not accumulate across states.
long double evaluate_state(const TabularMdp& mdp, const std::vector<int>& policy,
                           long double gamma, const RewardFn& reward,
                           const GoalRewardFn& goal_reward, int start) {
    if (mdp.is_goal[start]) return goal_reward(start) / (1.0L - gamma);

    std::vector<int> path;
    std::vector<int> pos(mdp.num_states, -1);
    int s = start;
    while (!mdp.is_goal[s] && !mdp.succ[s].empty() && pos[s] < 0) {
        pos[s] = static_cast<int>(path.size());
        path.push_back(s);
        s = mdp.succ[s][policy[s]];
    }

    long double tail_value;
    std::size_t tail_len;
    if (mdp.is_goal[s]) {
        tail_value = goal_reward(s) / (1.0L - gamma);
        tail_len = path.size();
    } else if (mdp.succ[s].empty()) {
        // non-goal state with no actions: absorbing self-loop
        tail_value = reward(s, -1, s) / (1.0L - gamma);
        tail_len = path.size();
    } else {
        // cycle of length L beginning at pos[s]
        std::size_t cstart = static_cast<std::size_t>(pos[s]);
        std::size_t clen = path.size() - cstart;
        long double sum = 0.0L, comp = 0.0L, disc = 1.0L;
        for (std::size_t i = 0; i < clen; ++i) {
            int u = path[cstart + i];
            int v = mdp.succ[u][policy[u]];
            long double term = disc * reward(u, policy[u], v);
            long double t = sum + term;  // Neumaier compensation
            if (std::fabs(sum) >= std::fabs(term))
                comp += (sum - t) + term;
            else
                comp += (term - t) + sum;
            sum = t;
            disc *= gamma;
        }
        long double denom = -std::expm1(static_cast<long double>(clen) * std::log(gamma));
        tail_value = (sum + comp) / denom;
        tail_len = cstart;
    }

    long double sum = 0.0L, comp = 0.0L, disc = 1.0L;
    for (std::size_t i = 0; i < tail_len; ++i) {
        int u = path[i];
        int v = mdp.succ[u][policy[u]];
        long double term = disc * reward(u, policy[u], v);
        long double t = sum + term;
        if (std::fabs(sum) >= std::fabs(term))
            comp += (sum - t) + term;
        else
            comp += (term - t) + sum;
        sum = t;
        disc *= gamma;
    }
    return sum + comp + disc * tail_value;
}

}  // namespace

ExactSolution solve_exact(const TabularMdp& mdp, long double gamma, const RewardFn& reward,
                          const GoalRewardFn& goal_reward, long double argmax_tol) {
    std::vector<int> policy(mdp.num_states, 0);
    std::vector<long double> value(mdp.num_states, 0.0L);

    for (int iter = 0; iter < 500; ++iter) {
        for (int s = 0; s < mdp.num_states; ++s)
            value[s] = evaluate_state(mdp, policy, gamma, reward, goal_reward, s);

        bool changed = false;
        for (int s = 0; s < mdp.num_states; ++s) {
            if (mdp.is_goal[s] || mdp.succ[s].empty()) continue;
            long double cur_q = reward(s, policy[s], mdp.succ[s][policy[s]]) +
                                gamma * value[mdp.succ[s][policy[s]]];
            int best = policy[s];
            long double best_q = cur_q;
            for (int e = 0; e < static_cast<int>(mdp.succ[s].size()); ++e) {
                long double q = reward(s, e, mdp.succ[s][e]) + gamma * value[mdp.succ[s][e]];
                // switch only on a clear improvement so fp noise cannot
                // oscillate the policy
                if (q > best_q + 1e-10L + 1e-13L * std::fabs(best_q)) {
                    best_q = q;
                    best = e;
                }
            }
            if (best != policy[s]) {
                policy[s] = best;
                changed = true;
            }
        }
        if (!changed) break;
    }

    for (int s = 0; s < mdp.num_states; ++s)
        value[s] = evaluate_state(mdp, policy, gamma, reward, goal_reward, s);

    ExactSolution sol;
    sol.value = value;
    sol.greedy.resize(mdp.num_states);
    for (int s = 0; s < mdp.num_states; ++s) {
        if (mdp.is_goal[s]) continue;
        long double best = -std::numeric_limits<long double>::infinity();
        std::vector<long double> q(mdp.succ[s].size());
        for (std::size_t e = 0; e < mdp.succ[s].size(); ++e) {
            q[e] = reward(s, static_cast<int>(e), mdp.succ[s][e]) +
                   gamma * value[mdp.succ[s][e]];
            best = std::max(best, q[e]);
        }
        for (std::size_t e = 0; e < mdp.succ[s].size(); ++e)
            if (q[e] >= best - argmax_tol) sol.greedy[s].push_back(static_cast<int>(e));
    }
    return sol;
}

std::vector<int> mdp_goal_distances(const TabularMdp& mdp) {
    std::vector<std::vector<int>> rev(mdp.num_states);
    for (int s = 0; s < mdp.num_states; ++s)
        for (int t : mdp.succ[s]) rev[t].push_back(s);
    std::vector<int> dist(mdp.num_states, -1);
    std::deque<int> queue;
    for (int s = 0; s < mdp.num_states; ++s)
        if (mdp.is_goal[s]) {
            dist[s] = 0;
            queue.push_back(s);
        }
    while (!queue.empty()) {
        int s = queue.front();
        queue.pop_front();
        for (int p : rev[s])
            if (dist[p] < 0 && !mdp.is_goal[p]) {
                dist[p] = dist[s] + 1;
                queue.push_back(p);
            }
    }
    return dist;
}

TabularMdp random_mdp(std::mt19937_64& rng, int num_states, int max_out_degree,
                      int max_diameter) {
    for (int attempt = 0; attempt < 1000; ++attempt) {
        TabularMdp mdp;
        mdp.num_states = num_states;
        mdp.succ.resize(num_states);
        mdp.is_goal.assign(num_states, 0);
        mdp.is_goal[num_states - 1] = 1;
        for (int s = 0; s < num_states; ++s) {
            if (mdp.is_goal[s]) continue;
            int degree = 1 + static_cast<int>(rng() % static_cast<uint64_t>(max_out_degree));
            for (int e = 0; e < degree; ++e)
                mdp.succ[s].push_back(static_cast<int>(rng() % static_cast<uint64_t>(num_states)));
        }
        auto dist = mdp_goal_distances(mdp);
        int dmax = 0;
        int reachable = 0;
        for (int s = 0; s < num_states; ++s)
            if (dist[s] >= 0) {
                dmax = std::max(dmax, dist[s]);
                ++reachable;
            }
        if (dmax <= max_diameter && reachable >= num_states / 2) return mdp;
    }
    throw std::runtime_error("random_mdp: could not satisfy diameter bound");
}

TabularMdp to_tabular(const StateSpace& space) {
    TabularMdp mdp;
    mdp.num_states = static_cast<int>(space.states.size());
    mdp.succ.resize(mdp.num_states);
    mdp.is_goal.assign(mdp.num_states, 0);
    for (int s = 0; s < mdp.num_states; ++s) {
        mdp.is_goal[s] = space.goal[s];
        for (auto [a, t] : space.edges[s]) mdp.succ[s].push_back(t);
    }
    return mdp;
}

}  // namespace nsplan::testing
