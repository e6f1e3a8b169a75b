#ifndef NSPLAN_HEUR_HEURISTICS_HPP
#define NSPLAN_HEUR_HEURISTICS_HPP

#include <limits>
#include <memory>
#include <queue>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "nsplan/strips/task.hpp"

namespace nsplan {

// Heuristic values are non-negative, with +infinity marking an
// unreachable goal in the delete relaxation.
inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

// Shared h_add machinery: proposition costs and best supporters for one
// state under the delete relaxation, computed by a generalized Dijkstra
// sweep. Scratch buffers are reused across queries; one engine per thread.
class RelaxationEngine {
public:
    explicit RelaxationEngine(const GroundTask& task);

    // Recomputes proposition costs and best supporters from s.
    void compute(const State& s);

    double prop_cost(int prop) const { return cost_[prop]; }
    int best_supporter(int prop) const { return supporter_[prop]; }

    double hadd(const State& s, const std::vector<int>& goal);
    // Relaxed plan (sorted unique action ids) extracted over best
    // supporters. Value is the number of actions (unit costs); an
    // unreachable goal yields (infinity, empty).
    std::pair<double, std::vector<int>> hff(const State& s, const std::vector<int>& goal);

    const GroundTask& task() const { return task_; }

private:
    const GroundTask& task_;
    std::vector<std::vector<int>> consumers_;  // prop -> actions with prop in pre
    std::vector<int> no_pre_actions_;
    std::vector<double> cost_;
    std::vector<int> supporter_;
    std::vector<int> unsat_;
    std::vector<double> acc_;
};

// (1 - gamma^h) / (1 - gamma); 1/(1-gamma) when h is infinite.
// Bounded within [0, 1/(1-gamma)]. Rejects gamma outside [0, 1).
double discounted(double h, double gamma);

// Shaped reward of a non-goal transition under the negative-reward model:
// -1 + gamma*phi(s') - phi(s).
inline double shaped_reward(double gamma, double phi_s, double phi_s2) {
    return -1.0 + gamma * phi_s2 - phi_s;
}

class Evaluator {
public:
    virtual ~Evaluator() = default;
    virtual double value(const State& s) = 0;
    virtual const std::string& id() const = 0;
    // Drops any memoized values; called between episodes/searches.
    virtual void reset_cache() {}
};

class BlindEvaluator final : public Evaluator {
public:
    double value(const State&) override { return 1.0; }
    const std::string& id() const override {
        static const std::string n = "blind";
        return n;
    }
};

// h = 0 everywhere; admissible baseline for optimality tests.
class ZeroEvaluator final : public Evaluator {
public:
    double value(const State&) override { return 0.0; }
    const std::string& id() const override {
        static const std::string n = "zero";
        return n;
    }
};

class HAddEvaluator final : public Evaluator {
public:
    explicit HAddEvaluator(const GroundTask& task) : engine_(task), task_(task) {}
    double value(const State& s) override;
    const std::string& id() const override {
        static const std::string n = "hadd";
        return n;
    }
    void reset_cache() override { cache_.clear(); }

private:
    RelaxationEngine engine_;
    const GroundTask& task_;
    std::unordered_map<State, double, StateHash> cache_;
};

class HFFEvaluator final : public Evaluator {
public:
    explicit HFFEvaluator(const GroundTask& task) : engine_(task), task_(task) {}
    double value(const State& s) override;
    std::pair<double, std::vector<int>> relaxed_plan(const State& s) {
        return engine_.hff(s, task_.goal);
    }
    const std::string& id() const override {
        static const std::string n = "hff";
        return n;
    }
    void reset_cache() override { cache_.clear(); }

private:
    RelaxationEngine engine_;
    const GroundTask& task_;
    std::unordered_map<State, double, StateHash> cache_;
};

// phi(s) = -discounted(h_base(s), gamma); the shaping potential.
class Potential {
public:
    Potential(Evaluator& base, double gamma) : base_(base), gamma_(gamma) {}
    double operator()(const State& s) { return -discounted(base_.value(s), gamma_); }
    double gamma() const { return gamma_; }

private:
    Evaluator& base_;
    double gamma_;
};

// base id: "blind" | "hadd" | "hff" (plus "zero" for tests).
std::unique_ptr<Evaluator> make_heuristic(const GroundTask& task, const std::string& id);

}  // namespace nsplan

#endif
