#ifndef NSPLAN_RL_TRAINER_HPP
#define NSPLAN_RL_TRAINER_HPP

#include <cmath>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "nsplan/heur/heuristics.hpp"
#include "nsplan/nlm/model.hpp"
#include "nsplan/tensor/adam.hpp"
#include "nsplan/rl/replay.hpp"

namespace nsplan {

struct TrainConfig {
    long steps = 50000;            // SGD-step budget
    int episode_cap = 40;          // D
    double gamma = 0.999999;
    int batch = 25;
    double tau = 1.0;
    std::size_t buffer_capacity = 6000;
    std::string shaping = "none";  // none | hadd | hff
    uint64_t seed = 0;
    int max_arity = 3;             // M
    int layers = 6;                // L
    int features = 8;              // Q
    double learning_rate = 1e-3;
    // Non-goal dead-end successors bootstrap from the value function by
    // default; set this to pin them to a fixed pessimistic value instead.
    std::optional<double> dead_end_value;

    void validate() const {
        if (steps < 0 || episode_cap <= 0 || batch <= 0 || buffer_capacity == 0 ||
            tau <= 0 || layers <= 0 || features <= 0)
            throw TaskError("train config: all sizes must be positive");
        if (!(gamma >= 0.0 && gamma < 1.0))
            throw TaskError("train config: gamma must lie in [0, 1)");
        if (shaping != "none" && shaping != "hadd" && shaping != "hff")
            throw TaskError("train config: shaping must be none|hadd|hff, got " + shaping);
    }
};

struct EpisodeRecord {
    long sgd_step = 0;
    long episode = 0;
    std::string instance;
    std::size_t objects = 0;
    int episode_len = 0;
    bool reached_goal = false;
    double loss = 0.0;
    long cumulative_goals = 0;
};

struct EpisodeStats {
    long episodes = 0;
    long cumulative_goals = 0;
    std::vector<int> episode_lengths;
    std::vector<double> step_loss;
    std::map<std::size_t, std::size_t> final_bucket_sizes;
};

using EpisodeCallback = std::function<void(const EpisodeRecord&)>;

namespace rl_detail {

inline std::vector<double> softmax(const std::vector<double>& q, double tau) {
    double m = q[0];
    for (double v : q) m = std::max(m, v);
    std::vector<double> p(q.size());
    double z = 0.0;
    for (std::size_t i = 0; i < q.size(); ++i) {
        p[i] = std::exp((q[i] - m) / tau);
        z += p[i];
    }
    for (double& v : p) v /= z;
    return p;
}

inline std::size_t sample_index(const std::vector<double>& p, std::mt19937_64& rng) {
    double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    double acc = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        acc += p[i];
        if (u < acc) return i;
    }
    return p.size() - 1;
}

}  // namespace rl_detail

// Qhat(s,a) = rhat + gamma * Vhat(s') for each stored action; goal
// successors contribute Vhat = 0, dead ends bootstrap from the backend.
template <typename Backend>
std::vector<double> action_values(const BufferEntry& entry, Backend& backend,
                                  double gamma,
                                  const std::optional<double>& dead_end_value = {}) {
    std::vector<double> q(entry.actions.size());
    for (std::size_t i = 0; i < entry.actions.size(); ++i) {
        double v;
        if (entry.succ_goal[i]) v = 0.0;
        else if (entry.succ_dead[i] && dead_end_value) v = *dead_end_value;
        else v = backend.value(*entry.task, entry.successors[i]);
        q[i] = entry.reward[i] + gamma * v;
    }
    return q;
}

// Expected on-policy target: sum_a pi(a|s) Qhat(s,a), pi = softmax(Qhat/tau).
// Treated as a constant during differentiation.
template <typename Backend>
double td_target(const BufferEntry& entry, Backend& backend, double tau, double gamma,
                 const std::optional<double>& dead_end_value = {}) {
    std::vector<double> q = action_values(entry, backend, gamma, dead_end_value);
    std::vector<double> p = rl_detail::softmax(q, tau);
    double t = 0.0;
    for (std::size_t i = 0; i < q.size(); ++i) t += p[i] * q[i];
    return t;
}

// One environment step: Qhat over the entry's actions with the current
// backend, softmax(Q/tau) sampling. Returns the chosen action index.
template <typename Backend>
std::size_t rollout_choose(const BufferEntry& entry, Backend& backend, double tau,
                           double gamma, std::mt19937_64& rng,
                           const std::optional<double>& dead_end_value = {}) {
    std::vector<double> q = action_values(entry, backend, gamma, dead_end_value);
    std::vector<double> p = rl_detail::softmax(q, tau);
    return rl_detail::sample_index(p, rng);
}

// Potentials bound to one task's goal; phi == 0 when shaping is "none".
class ShapingPotential {
public:
    ShapingPotential(const GroundTask& task, const std::string& shaping, double gamma)
        : gamma_(gamma) {
        if (shaping != "none") base_ = make_heuristic(task, shaping);
    }
    double operator()(const State& s) {
        if (!base_) return 0.0;
        return -discounted(base_->value(s), gamma_);
    }

private:
    std::unique_ptr<Evaluator> base_;
    double gamma_ = 0.999999;
};

inline BufferEntry make_entry(const GroundTask& task, const State& s,
                              ShapingPotential& phi, double gamma) {
    BufferEntry e;
    e.task = &task;
    e.state = s;
    e.actions = applicable(s, task);
    e.phi = phi(s);
    for (int a : e.actions) {
        State t = successor(s, a, task);
        bool goal = is_goal(t, task);
        e.succ_goal.push_back(goal ? 1 : 0);
        e.succ_dead.push_back(!goal && applicable(t, task).empty() ? 1 : 0);
        double phi_t = phi(t);
        e.reward.push_back(shaped_reward(gamma, e.phi, phi_t));
        e.successors.push_back(std::move(t));
    }
    return e;
}

// Approximate RTDP over a pool of instances: sample a task, roll out up to
// episode_cap steps (stopping at goals and dead ends), push each visited
// non-terminal state and take one SGD step per push. Runs exactly
// cfg.steps SGD steps. The Backend supplies state values and batch fits.
template <typename Backend>
EpisodeStats run_rtdp(const std::vector<const GroundTask*>& tasks, const TrainConfig& cfg,
                      Backend& backend, std::mt19937_64& rng,
                      const EpisodeCallback& on_episode = {}) {
    EpisodeStats stats;
    ReplayBuffer buffer(cfg.buffer_capacity);
    std::vector<std::unique_ptr<ShapingPotential>> potentials;
    for (const GroundTask* t : tasks)
        potentials.push_back(
            std::make_unique<ShapingPotential>(*t, cfg.shaping, cfg.gamma));

    long sgd = 0;
    double last_loss = 0.0;
    while (sgd < cfg.steps) {
        std::size_t ti = rng() % tasks.size();
        const GroundTask& task = *tasks[ti];
        State s = task.initial;
        int len = 0;
        bool reached = false;
        for (int t = 0; t < cfg.episode_cap && sgd < cfg.steps; ++t) {
            if (is_goal(s, task)) {
                reached = true;
                break;
            }
            BufferEntry entry = make_entry(task, s, *potentials[ti], cfg.gamma);
            if (entry.actions.empty()) break;  // dead end: reset
            std::size_t choice = rollout_choose(entry, backend, cfg.tau, cfg.gamma, rng,
                                                cfg.dead_end_value);
            State next = entry.successors[choice];
            bool next_goal = entry.succ_goal[choice];
            buffer.push(std::move(entry));

            auto batch = buffer.sample(static_cast<std::size_t>(cfg.batch), rng);
            std::vector<double> targets(batch.size());
            // independent per entry: value lookups read a fixed model, and
            // each target lands in its own slot
            const long nbatch = static_cast<long>(batch.size());
#pragma omp parallel for schedule(dynamic)
            for (long i = 0; i < nbatch; ++i)
                targets[i] = td_target(*batch[i], backend, cfg.tau, cfg.gamma,
                                       cfg.dead_end_value);
            last_loss = backend.train_batch(batch, targets);
            stats.step_loss.push_back(last_loss);
            ++sgd;

            s = std::move(next);
            ++len;
            if (next_goal) {
                reached = true;
                break;
            }
        }
        ++stats.episodes;
        if (reached) ++stats.cumulative_goals;
        stats.episode_lengths.push_back(len);
        if (on_episode) {
            EpisodeRecord rec;
            rec.sgd_step = sgd;
            rec.episode = stats.episodes;
            rec.instance = task.problem_name;
            rec.objects = task.object_count();
            rec.episode_len = len;
            rec.reached_goal = reached;
            rec.loss = last_loss;
            rec.cumulative_goals = stats.cumulative_goals;
            on_episode(rec);
        }
    }
    stats.final_bucket_sizes = buffer.bucket_sizes();
    return stats;
}

// NLM-backed value function with Adam updates.
class NlmBackend {
public:
    NlmBackend(NlmModel<float>& model, double learning_rate) : model_(model) {
        adam_.lr = learning_rate;
        params_ = model_.parameters();
        adam_.init(params_);
    }

    double value(const GroundTask& task, const State& s) {
        Mapr<float> m = encode<float>(s, task.goal, task);
        return static_cast<double>(nlm_value(model_, m));
    }

    double train_batch(const std::vector<const BufferEntry*>& batch,
                       const std::vector<double>& targets) {
        Tape<float> tape;
        NlmParamIds ids = register_params(tape, model_);
        std::vector<int> outputs;
        for (const BufferEntry* e : batch) {
            Mapr<float> m = encode<float>(e->state, e->task->goal, *e->task);
            outputs.push_back(nlm_forward(tape, model_, m, &ids));
        }
        int preds = tape.concat_lastaxis(outputs);
        Tensor<float> target_t({targets.size()});
        for (std::size_t i = 0; i < targets.size(); ++i)
            target_t[i] = static_cast<float>(targets[i]);
        int loss = tape.mse_loss(preds, target_t);

        std::vector<int> wanted;
        for (const auto& row : ids.ids)
            for (auto [w, b] : row) {
                wanted.push_back(w);
                wanted.push_back(b);
            }
        std::vector<Tensor<float>> grads = tape.backward(loss, wanted);
        adam_.update(params_, grads);
        return static_cast<double>(tape.value(loss).data[0]);
    }

    const AdamState<float>& adam() const { return adam_; }
    AdamState<float>& adam() { return adam_; }

private:
    NlmModel<float>& model_;
    std::vector<Tensor<float>*> params_;
    AdamState<float> adam_;
};

// Drops trivial instances (initial state already satisfies the goal) and
// verifies the remainder share one predicate signature.
std::vector<const GroundTask*> prepare_training_pool(
    const std::vector<const GroundTask*>& tasks);

// Filters trivial instances, builds a fresh model from the domain
// signature and runs RTDP for cfg.steps SGD steps.
std::pair<NlmModel<float>, EpisodeStats> train(const std::vector<const GroundTask*>& tasks,
                                               const TrainConfig& cfg,
                                               const EpisodeCallback& on_episode = {});

}  // namespace nsplan

#endif
