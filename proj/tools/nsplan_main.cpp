#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>

#include "nsplan/errors.hpp"
#include "nsplan/gen/generators.hpp"
#include "nsplan/io/checkpoint.hpp"
#include "nsplan/io/report.hpp"
#include "nsplan/io/sha256.hpp"
#include "nsplan/nlm/learned.hpp"
#include "nsplan/rl/trainer.hpp"
#include "nsplan/search/search.hpp"
#include "nsplan/strips/pddl.hpp"

namespace fs = std::filesystem;
using namespace nsplan;

namespace {

constexpr const char* kToolVersion = "0.1.0";

// Exit codes: 0 solved / success, 1 unsolved, 2 usage or input errors.
enum ExitCode { kOk = 0, kUnsolved = 1, kError = 2 };

std::vector<fs::path> list_pddl(const std::string& dir) {
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(dir))
        if (e.is_regular_file() && e.path().extension() == ".pddl")
            files.push_back(e.path());
    std::sort(files.begin(), files.end());
    if (files.empty()) throw IoError("no .pddl files in " + dir);
    return files;
}

struct LoadedProblems {
    std::vector<GroundTask> tasks;
    std::vector<std::string> names;
    std::vector<std::string> files;
    std::vector<std::string> hashes;
};

LoadedProblems load_problems(const std::string& domain_file, const std::string& dir) {
    LoadedProblems out;
    std::string domain_text = read_file(domain_file);
    for (const fs::path& p : list_pddl(dir)) {
        std::string text = read_file(p.string());
        try {
            out.tasks.push_back(ground(parse(domain_text, text)));
        } catch (const std::exception& e) {
            std::cerr << "skipping " << p.string() << ": " << e.what() << "\n";
            continue;
        }
        out.names.push_back(p.stem().string());
        out.files.push_back(p.string());
        out.hashes.push_back(sha256_hex(text));
    }
    if (out.tasks.empty()) throw IoError("no parsable instances in " + dir);
    return out;
}

// "blind" | "hadd" | "hff" | "learned:PATH"
HeuristicSpec heuristic_spec(const std::string& token,
                             std::vector<std::shared_ptr<NlmModel<float>>>& keep) {
    if (token.rfind("learned:", 0) == 0) {
        std::string path = token.substr(8);
        auto model = std::make_shared<NlmModel<float>>(load_checkpoint(path).model);
        keep.push_back(model);
        return {token, [model](const GroundTask& t) {
                    return std::make_unique<LearnedEvaluator>(*model, t);
                }};
    }
    if (token != "blind" && token != "hadd" && token != "hff")
        throw TaskError("unknown heuristic id: " + token);
    return {token, [token](const GroundTask& t) { return make_heuristic(t, token); }};
}

int cmd_plan(const std::string& domain, const std::string& problem,
             const std::string& search, const std::string& heuristic, long eval_limit,
             const std::string& plan_out) {
    GroundTask task = ground(parse_files(domain, problem));
    std::vector<std::shared_ptr<NlmModel<float>>> keep;
    HeuristicSpec spec = heuristic_spec(heuristic, keep);
    auto evaluator = spec.make(task);

    SearchConfig cfg;
    cfg.algo = search_algo_from_string(search);
    cfg.eval_limit = eval_limit;
    SearchResult r = run_search(task, *evaluator, cfg);

    SuiteRow row{task.problem_name, task.object_count(), search, heuristic, r};
    std::cout << suite_csv_header() << "\n" << suite_csv_row(row) << "\n";
    if (r.status == SearchStatus::solved) {
        std::string plan = plan_to_val(task, r.plan);
        if (!plan_out.empty()) {
            std::ofstream out(plan_out);
            out << plan;
        } else {
            std::cout << plan;
        }
        return kOk;
    }
    return kUnsolved;
}

int cmd_train(const std::string& domain, const std::string& problems,
              TrainConfig cfg, const std::string& out, std::string metrics_path,
              std::string manifest_path, long checkpoint_interval, bool save_optimizer) {
    cfg.validate();
    LoadedProblems lp = load_problems(domain, problems);
    std::vector<const GroundTask*> ptrs;
    for (const auto& t : lp.tasks) ptrs.push_back(&t);
    std::vector<const GroundTask*> pool = prepare_training_pool(ptrs);

    if (metrics_path.empty()) metrics_path = out + ".metrics.jsonl";
    if (manifest_path.empty()) manifest_path = out + ".manifest.json";

    // Manifest first: it pins what the run will consume.
    nlohmann::json manifest{{"tool_version", kToolVersion},
                            {"seed", cfg.seed},
                            {"config", train_config_json(cfg)},
                            {"domain_file", domain},
                            {"domain_sha256", sha256_hex(read_file(domain))}};
    nlohmann::json instances = nlohmann::json::array();
    for (std::size_t i = 0; i < lp.files.size(); ++i)
        instances.push_back({{"file", lp.files[i]}, {"sha256", lp.hashes[i]}});
    manifest["instances"] = instances;
    {
        std::ofstream mf(manifest_path);
        if (!mf) throw IoError("cannot write manifest: " + manifest_path);
        mf << manifest.dump(2) << "\n";
    }

    std::ofstream metrics(metrics_path);
    if (!metrics) throw IoError("cannot write metrics: " + metrics_path);

    std::mt19937_64 rng(cfg.seed);
    NlmModel<float> model =
        build_nlm<float>(*pool[0], cfg.max_arity, cfg.layers, cfg.features, cfg.gamma,
                         cfg.tau, cfg.shaping, rng);
    NlmBackend backend(model, cfg.learning_rate);

    long last_saved = 0;
    auto on_episode = [&](const EpisodeRecord& rec) {
        metrics << episode_json(rec).dump() << "\n";
        if (checkpoint_interval > 0 && rec.sgd_step - last_saved >= checkpoint_interval) {
            save_checkpoint(out, model, save_optimizer ? &backend.adam() : nullptr);
            last_saved = rec.sgd_step;
        }
    };
    EpisodeStats stats;
    if (cfg.steps > 0) stats = run_rtdp(pool, cfg, backend, rng, on_episode);
    save_checkpoint(out, model, save_optimizer ? &backend.adam() : nullptr);

    std::cout << "trained " << cfg.steps << " steps over " << pool.size()
              << " instances; episodes=" << stats.episodes
              << " cumulative_goals=" << stats.cumulative_goals << "\n"
              << "checkpoint: " << out << "\nmetrics: " << metrics_path
              << "\nmanifest: " << manifest_path << "\n";
    return kOk;
}

int cmd_eval(const std::string& domain, const std::string& problems,
             const std::vector<std::string>& heuristics,
             const std::vector<std::string>& models, const std::string& search,
             long eval_limit, const std::string& out_csv) {
    LoadedProblems lp = load_problems(domain, problems);
    std::vector<std::shared_ptr<NlmModel<float>>> keep;
    std::vector<HeuristicSpec> specs;
    for (const auto& h : heuristics) specs.push_back(heuristic_spec(h, keep));
    for (const auto& m : models) specs.push_back(heuristic_spec("learned:" + m, keep));
    if (specs.empty()) throw TaskError("eval: no heuristics given");

    std::vector<SuiteTask> tasks;
    for (std::size_t i = 0; i < lp.tasks.size(); ++i)
        tasks.push_back({lp.names[i], &lp.tasks[i]});

    SearchConfig cfg;
    cfg.algo = search_algo_from_string(search);
    cfg.eval_limit = eval_limit;
    std::vector<SuiteRow> rows = evaluate_suite(tasks, specs, cfg);

    std::ofstream csv(out_csv);
    if (!csv) throw IoError("cannot write report: " + out_csv);
    csv << suite_csv_header() << "\n";
    for (const auto& r : rows) csv << suite_csv_row(r) << "\n";

    // coverage per heuristic
    std::cout << "coverage (of " << tasks.size() << "):\n";
    for (const auto& spec : specs) {
        long solved = 0;
        for (const auto& r : rows)
            if (r.heuristic == spec.name && r.result.status == SearchStatus::solved)
                ++solved;
        std::cout << "  " << spec.name << ": " << solved << "\n";
    }
    // pairwise evaluation tallies, ties and double failures excluded
    for (std::size_t i = 0; i < specs.size(); ++i)
        for (std::size_t j = i + 1; j < specs.size(); ++j) {
            PairedTally t = paired_tally(rows, specs[i].name, specs[j].name);
            std::cout << "  fewer evaluations: " << specs[i].name << " "
                      << t.first_better << " vs " << specs[j].name << " "
                      << t.second_better << "\n";
        }
    std::cout << "report: " << out_csv << "\n";
    return kOk;
}

int cmd_generate(const std::string& domain, int size, int size2, int count,
                 uint64_t seed, const std::string& out_dir, bool print_domain) {
    DomainKind kind = domain_kind_from_string(domain);
    if (print_domain) {
        std::cout << domain_pddl(kind);
        return kOk;
    }
    if (out_dir.empty()) {
        std::cout << generate_problem(kind, size, size2, seed);
        return kOk;
    }
    fs::create_directories(out_dir);
    auto batch = generate_batch(kind, {size}, count, seed, size2);
    // the shared domain file sits next to the instances
    {
        std::ofstream df(fs::path(out_dir) / "domain.pddl");
        df << domain_pddl(kind);
    }
    for (const auto& gi : batch) {
        std::ofstream f(fs::path(out_dir) / (gi.name + ".pddl"));
        f << gi.text;
    }
    std::cout << "wrote " << batch.size() << " instances to " << out_dir << "\n";
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"STRIPS planning with learned NLM value functions"};
    app.require_subcommand(1);

    // plan
    auto* plan = app.add_subcommand("plan", "solve one instance");
    std::string domain, problem, search_name = "gbfs", heuristic = "hff", plan_out;
    long eval_limit = 100000;
    plan->add_option("--domain", domain)->required();
    plan->add_option("--problem", problem)->required();
    plan->add_option("--search", search_name)
        ->check(CLI::IsMember({"astar", "gbfs", "gbfls"}));
    plan->add_option("--heuristic", heuristic);
    plan->add_option("--eval-limit", eval_limit);
    plan->add_option("--plan-out", plan_out);

    // train
    auto* tr = app.add_subcommand("train", "learn a value function with RTDP");
    std::string problems, out = "model.ckpt", metrics_path, manifest_path;
    TrainConfig cfg;
    long checkpoint_interval = 0;
    bool save_optimizer = false;
    tr->add_option("--domain", domain)->required();
    tr->add_option("--problems", problems)->required();
    tr->add_option("--shaping", cfg.shaping)
        ->check(CLI::IsMember({"none", "hadd", "hff"}));
    tr->add_option("--steps", cfg.steps);
    tr->add_option("--seed", cfg.seed);
    tr->add_option("--out", out);
    tr->add_option("--gamma", cfg.gamma);
    tr->add_option("--tau", cfg.tau);
    tr->add_option("--layers", cfg.layers);
    tr->add_option("--max-arity", cfg.max_arity);
    tr->add_option("--batch", cfg.batch);
    tr->add_option("--buffer", cfg.buffer_capacity);
    tr->add_option("--episode-cap", cfg.episode_cap);
    tr->add_option("--learning-rate", cfg.learning_rate);
    tr->add_option("--dead-end-value", cfg.dead_end_value,
                   "fixed value for non-goal dead-end successors "
                   "(default: bootstrap from the network)");
    tr->add_option("--metrics", metrics_path);
    tr->add_option("--manifest", manifest_path);
    tr->add_option("--checkpoint-interval", checkpoint_interval);
    tr->add_flag("--save-optimizer", save_optimizer);

    // eval
    auto* ev = app.add_subcommand("eval", "run an evaluation suite");
    std::vector<std::string> heuristics, models;
    std::string out_csv = "report.csv";
    ev->add_option("--domain", domain)->required();
    ev->add_option("--problems", problems)->required();
    ev->add_option("--heuristics", heuristics)->delimiter(',');
    ev->add_option("--model", models);
    ev->add_option("--search", search_name)
        ->check(CLI::IsMember({"astar", "gbfs", "gbfls"}));
    ev->add_option("--eval-limit", eval_limit);
    ev->add_option("--out", out_csv);

    // generate
    auto* gen = app.add_subcommand("generate", "emit PDDL instances");
    int size = 3, size2 = 0, count = 1;
    uint64_t gen_seed = 1;
    std::string out_dir;
    bool print_domain = false;
    gen->add_option("--domain", domain)->required();
    gen->add_option("--size", size);
    gen->add_option("--size2", size2);
    gen->add_option("--count", count);
    gen->add_option("--seed", gen_seed);
    gen->add_option("--out", out_dir);
    gen->add_flag("--print-domain", print_domain);

    try {
        app.parse(argc, argv);
        if (plan->parsed())
            return cmd_plan(domain, problem, search_name, heuristic, eval_limit, plan_out);
        if (tr->parsed())
            return cmd_train(domain, problems, cfg, out, metrics_path, manifest_path,
                             checkpoint_interval, save_optimizer);
        if (ev->parsed())
            return cmd_eval(domain, problems, heuristics, models, search_name,
                            eval_limit, out_csv);
        if (gen->parsed())
            return cmd_generate(domain, size, size2, count, gen_seed, out_dir,
                                print_domain);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? kOk : kError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kError;
    }
    return kError;
}
