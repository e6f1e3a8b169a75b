#include "nsplan/heur/heuristics.hpp"

#include <cmath>
#include <stdexcept>

#include "nsplan/errors.hpp"

namespace nsplan {

double discounted(double h, double gamma) {
    if (!(gamma >= 0.0 && gamma < 1.0))
        throw std::invalid_argument("discounted: gamma must lie in [0, 1), got " +
                                    std::to_string(gamma));
    if (h < 0.0) throw std::invalid_argument("discounted: negative heuristic value");
    if (h == 0.0) return 0.0;
    if (std::isinf(h)) return 1.0 / (1.0 - gamma);
    // (1 - gamma^h) / (1 - gamma), kept accurate for gamma near 1.
    return -std::expm1(h * std::log(gamma)) / (1.0 - gamma);
}

RelaxationEngine::RelaxationEngine(const GroundTask& task) : task_(task) {
    consumers_.resize(task.num_propositions);
    for (std::size_t a = 0; a < task.actions.size(); ++a) {
        const auto& pre = task.actions[a].pre;
        if (pre.empty()) no_pre_actions_.push_back(static_cast<int>(a));
        for (int p : pre) consumers_[p].push_back(static_cast<int>(a));
    }
    cost_.resize(task.num_propositions);
    supporter_.resize(task.num_propositions);
    unsat_.resize(task.actions.size());
    acc_.resize(task.actions.size());
}

void RelaxationEngine::compute(const State& s) {
    std::fill(cost_.begin(), cost_.end(), kInfinity);
    std::fill(supporter_.begin(), supporter_.end(), -1);
    std::fill(acc_.begin(), acc_.end(), 0.0);
    for (std::size_t a = 0; a < task_.actions.size(); ++a)
        unsat_[a] = static_cast<int>(task_.actions[a].pre.size());

    using Entry = std::pair<double, int>;  // (cost, prop)
    std::priority_queue<Entry, std::vector<Entry>, std::greater<Entry>> queue;

    // Supporter update keeps the lowest action id among equal-cost
    // achievers, independent of queue order.
    auto relax = [&](int action) {
        double ca = 1.0 + acc_[action];
        for (int q : task_.actions[action].add) {
            if (ca < cost_[q]) {
                cost_[q] = ca;
                supporter_[q] = action;
                queue.push({ca, q});
            } else if (ca == cost_[q] && (supporter_[q] < 0 || action < supporter_[q])) {
                supporter_[q] = action;
            }
        }
    };

    for (std::size_t p = 0; p < task_.num_propositions; ++p)
        if (s.test(p)) {
            cost_[p] = 0.0;
            queue.push({0.0, static_cast<int>(p)});
        }
    for (int a : no_pre_actions_) relax(a);

    while (!queue.empty()) {
        auto [c, p] = queue.top();
        queue.pop();
        if (c > cost_[p]) continue;  // stale entry
        for (int a : consumers_[p]) {
            acc_[a] += c;
            if (--unsat_[a] == 0) relax(a);
        }
    }
}

double RelaxationEngine::hadd(const State& s, const std::vector<int>& goal) {
    compute(s);
    double total = 0.0;
    for (int g : goal) {
        if (std::isinf(cost_[g])) return kInfinity;
        total += cost_[g];
    }
    return total;
}

std::pair<double, std::vector<int>> RelaxationEngine::hff(
    const State& s, const std::vector<int>& goal) {
    compute(s);
    for (int g : goal)
        if (std::isinf(cost_[g])) return {kInfinity, {}};

    std::vector<char> closed_prop(task_.num_propositions, 0);
    std::vector<char> chosen(task_.actions.size(), 0);
    std::vector<int> open;
    for (int g : goal)
        if (!s.test(g) && !closed_prop[g]) {
            closed_prop[g] = 1;
            open.push_back(g);
        }
    std::vector<int> plan;
    while (!open.empty()) {
        int p = open.back();
        open.pop_back();
        int a = supporter_[p];
        if (!chosen[a]) {
            chosen[a] = 1;
            plan.push_back(a);
        }
        for (int q : task_.actions[a].pre)
            if (!s.test(q) && !closed_prop[q]) {
                closed_prop[q] = 1;
                open.push_back(q);
            }
    }
    std::sort(plan.begin(), plan.end());
    return {static_cast<double>(plan.size()), std::move(plan)};
}

double HAddEvaluator::value(const State& s) {
    auto it = cache_.find(s);
    if (it != cache_.end()) return it->second;
    double v = engine_.hadd(s, task_.goal);
    cache_.emplace(s, v);
    return v;
}

double HFFEvaluator::value(const State& s) {
    auto it = cache_.find(s);
    if (it != cache_.end()) return it->second;
    double v = engine_.hff(s, task_.goal).first;
    cache_.emplace(s, v);
    return v;
}

std::unique_ptr<Evaluator> make_heuristic(const GroundTask& task, const std::string& id) {
    if (id == "blind") return std::make_unique<BlindEvaluator>();
    if (id == "zero") return std::make_unique<ZeroEvaluator>();
    if (id == "hadd") return std::make_unique<HAddEvaluator>(task);
    if (id == "hff") return std::make_unique<HFFEvaluator>(task);
    throw TaskError("unknown heuristic id: " + id);
}

}  // namespace nsplan
