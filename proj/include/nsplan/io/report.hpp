#ifndef NSPLAN_IO_REPORT_HPP
#define NSPLAN_IO_REPORT_HPP

#include <json.hpp>
#include <string>

#include "nsplan/rl/trainer.hpp"
#include "nsplan/search/search.hpp"

namespace nsplan {

inline std::string suite_csv_header() {
    return "instance,objects,algorithm,heuristic,status,evaluations,expansions,"
           "plan_length,seconds";
}

inline std::string suite_csv_row(const SuiteRow& r) {
    std::string s = r.instance + "," + std::to_string(r.objects) + "," + r.algorithm +
                    "," + r.heuristic + "," + search_status_name(r.result.status) + "," +
                    std::to_string(r.result.evaluations) + "," +
                    std::to_string(r.result.expansions) + "," +
                    std::to_string(r.result.plan_length) + "," +
                    std::to_string(r.result.seconds);
    return s;
}

// Training metrics line; keys are emitted sorted, so identical runs produce
// identical bytes.
inline nlohmann::json episode_json(const EpisodeRecord& r) {
    return nlohmann::json{{"sgd_step", r.sgd_step},
                          {"episode", r.episode},
                          {"instance", r.instance},
                          {"objects", r.objects},
                          {"episode_len", r.episode_len},
                          {"reached_goal", r.reached_goal},
                          {"loss", r.loss},
                          {"cumulative_goals", r.cumulative_goals}};
}

inline nlohmann::json train_config_json(const TrainConfig& c) {
    return nlohmann::json{{"steps", c.steps},
                          {"episode_cap", c.episode_cap},
                          {"gamma", c.gamma},
                          {"batch", c.batch},
                          {"tau", c.tau},
                          {"buffer_capacity", c.buffer_capacity},
                          {"shaping", c.shaping},
                          {"seed", c.seed},
                          {"max_arity", c.max_arity},
                          {"layers", c.layers},
                          {"features", c.features},
                          {"learning_rate", c.learning_rate},
                          {"dead_end_value", c.dead_end_value
                                                 ? nlohmann::json(*c.dead_end_value)
                                                 : nlohmann::json(nullptr)}};
}

}  // namespace nsplan

#endif
