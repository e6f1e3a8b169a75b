#ifndef NSPLAN_SEARCH_SEARCH_HPP
#define NSPLAN_SEARCH_SEARCH_HPP

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "nsplan/heur/heuristics.hpp"
#include "nsplan/strips/task.hpp"

namespace nsplan {

enum class SearchAlgo { astar, gbfs, gbfls };

SearchAlgo search_algo_from_string(const std::string& name);
std::string search_algo_name(SearchAlgo a);

struct SearchConfig {
    SearchAlgo algo = SearchAlgo::gbfs;
    long eval_limit = 100000;
    // Test instrumentation: called with each expanded state, in order.
    std::function<void(const State&)> on_expand;
};

enum class SearchStatus { solved, exhausted, limit_reached };

std::string search_status_name(SearchStatus s);

struct SearchResult {
    SearchStatus status = SearchStatus::exhausted;
    std::vector<int> plan;      // ground action ids, valid iff solved
    long evaluations = 0;       // heuristic computations on generated states
    long expansions = 0;
    long plan_length = 0;
    double seconds = 0.0;
    long lookahead_depth_cap = -1;  // gbfls only: 5*h_ff(I), or 50 if infinite
};

SearchResult astar(const GroundTask& task, Evaluator& h, const SearchConfig& cfg);
SearchResult gbfs(const GroundTask& task, Evaluator& h, const SearchConfig& cfg);
SearchResult gbfls(const GroundTask& task, Evaluator& h, const SearchConfig& cfg);

SearchResult run_search(const GroundTask& task, Evaluator& h, const SearchConfig& cfg);

// One row of an evaluation suite.
struct SuiteRow {
    std::string instance;
    std::size_t objects = 0;
    std::string algorithm;
    std::string heuristic;
    SearchResult result;
};

struct HeuristicSpec {
    std::string name;
    std::function<std::unique_ptr<Evaluator>(const GroundTask&)> make;
};

struct SuiteTask {
    std::string name;
    const GroundTask* task;
};

// Runs every (task, heuristic) pair; pairs are independent and may run
// concurrently. Row order is deterministic: tasks outer, heuristics inner.
std::vector<SuiteRow> evaluate_suite(const std::vector<SuiteTask>& tasks,
                                     const std::vector<HeuristicSpec>& heuristics,
                                     const SearchConfig& cfg);

// Instances where `a` needed fewer evaluations than `b` and vice versa,
// excluding ties and instances failed by both. A failed instance counts
// as worse than any solved one.
struct PairedTally {
    long first_better = 0;
    long second_better = 0;
};
PairedTally paired_tally(const std::vector<SuiteRow>& rows, const std::string& a,
                         const std::string& b);

std::string plan_to_val(const GroundTask& task, const std::vector<int>& plan);

}  // namespace nsplan

#endif
