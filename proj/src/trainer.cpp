#include "nsplan/rl/trainer.hpp"

namespace nsplan {

std::vector<const GroundTask*> prepare_training_pool(
    const std::vector<const GroundTask*>& tasks) {
    if (tasks.empty()) throw TaskError("train: no instances given");
    std::vector<const GroundTask*> pool;
    for (const GroundTask* t : tasks)
        if (!is_goal(t->initial, *t)) pool.push_back(t);
    if (pool.empty())
        throw TaskError("train: every instance is trivial (initial state satisfies the goal)");
    uint64_t fp = pool[0]->signature_fingerprint();
    for (const GroundTask* t : pool)
        if (t->signature_fingerprint() != fp)
            throw TaskError("train: instances come from different domains");
    return pool;
}

std::pair<NlmModel<float>, EpisodeStats> train(const std::vector<const GroundTask*>& tasks,
                                               const TrainConfig& cfg,
                                               const EpisodeCallback& on_episode) {
    cfg.validate();
    std::vector<const GroundTask*> pool = prepare_training_pool(tasks);

    std::mt19937_64 rng(cfg.seed);
    NlmModel<float> model =
        build_nlm<float>(*pool[0], cfg.max_arity, cfg.layers, cfg.features, cfg.gamma,
                         cfg.tau, cfg.shaping, rng);

    EpisodeStats stats;
    if (cfg.steps > 0) {
        NlmBackend backend(model, cfg.learning_rate);
        stats = run_rtdp(pool, cfg, backend, rng, on_episode);
    }
    return {std::move(model), std::move(stats)};
}

}  // namespace nsplan
