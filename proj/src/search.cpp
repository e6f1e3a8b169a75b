#include "nsplan/search/search.hpp"

#include <chrono>
#include <cmath>
#include <deque>
#include <queue>
#include <unordered_map>

#include "nsplan/errors.hpp"

namespace nsplan {

namespace {

using Clock = std::chrono::steady_clock;

struct NodeRec {
    State state;
    double g = kInfinity;
    double h = 0.0;
    bool closed = false;
    int parent = -1;      // node index
    int parent_action = -1;
};

struct NodeStore {
    std::deque<NodeRec> nodes;
    std::unordered_map<State, int, StateHash> index;

    int find(const State& s) const {
        auto it = index.find(s);
        return it == index.end() ? -1 : it->second;
    }
    int insert(const State& s) {
        int id = static_cast<int>(nodes.size());
        nodes.push_back(NodeRec{s, kInfinity, 0.0, false, -1, -1});
        index.emplace(s, id);
        return id;
    }
};

// Min-heap keyed by (key, insertion sequence): FIFO among equal keys.
struct OpenEntry {
    double key;
    long seq;
    int node;
    bool operator>(const OpenEntry& o) const {
        if (key != o.key) return key > o.key;
        return seq > o.seq;
    }
};
using OpenQueue =
    std::priority_queue<OpenEntry, std::vector<OpenEntry>, std::greater<OpenEntry>>;

std::vector<int> extract_plan(const NodeStore& store, int node) {
    std::vector<int> plan;
    for (int n = node; store.nodes[n].parent >= 0; n = store.nodes[n].parent)
        plan.push_back(store.nodes[n].parent_action);
    std::reverse(plan.begin(), plan.end());
    return plan;
}

void finish(SearchResult& r, Clock::time_point start) {
    r.plan_length = static_cast<long>(r.plan.size());
    r.seconds = std::chrono::duration<double>(Clock::now() - start).count();
}

}  // namespace

SearchResult astar(const GroundTask& task, Evaluator& h, const SearchConfig& cfg) {
    auto start = Clock::now();
    h.reset_cache();
    SearchResult r;
    NodeStore store;
    OpenQueue open;
    long seq = 0;

    int root = store.insert(task.initial);
    store.nodes[root].g = 0.0;
    store.nodes[root].h = h.value(task.initial);
    ++r.evaluations;
    if (r.evaluations >= cfg.eval_limit && !is_goal(task.initial, task)) {
        r.status = SearchStatus::limit_reached;
        finish(r, start);
        return r;
    }
    open.push({store.nodes[root].g + store.nodes[root].h, seq++, root});

    while (!open.empty()) {
        int cur = open.top().node;
        open.pop();
        NodeRec& node = store.nodes[cur];
        if (is_goal(node.state, task)) {
            r.status = SearchStatus::solved;
            r.plan = extract_plan(store, cur);
            finish(r, start);
            return r;
        }
        if (node.closed) continue;
        node.closed = true;
        ++r.expansions;
        if (cfg.on_expand) cfg.on_expand(node.state);

        for (int a : applicable(node.state, task)) {
            State t = successor(node.state, a, task);
            int tid = store.find(t);
            if (tid < 0) {
                tid = store.insert(t);
                store.nodes[tid].h = h.value(store.nodes[tid].state);
                ++r.evaluations;
                if (r.evaluations >= cfg.eval_limit) {
                    r.status = SearchStatus::limit_reached;
                    finish(r, start);
                    return r;
                }
            }
            NodeRec& tn = store.nodes[tid];
            NodeRec& sn = store.nodes[cur];
            if (tn.g > sn.g + 1.0) {
                tn.g = sn.g + 1.0;  // Bellman update
                tn.closed = false;  // reopening
                tn.parent = cur;
                tn.parent_action = a;
                open.push({tn.g + tn.h, seq++, tid});
            }
        }
    }
    r.status = SearchStatus::exhausted;
    finish(r, start);
    return r;
}

SearchResult gbfs(const GroundTask& task, Evaluator& h, const SearchConfig& cfg) {
    auto start = Clock::now();
    h.reset_cache();
    SearchResult r;
    NodeStore store;
    OpenQueue open;
    long seq = 0;

    if (is_goal(task.initial, task)) {
        r.status = SearchStatus::solved;
        finish(r, start);
        return r;
    }
    int root = store.insert(task.initial);
    double h0 = h.value(task.initial);
    ++r.evaluations;
    if (r.evaluations >= cfg.eval_limit) {
        r.status = SearchStatus::limit_reached;
        finish(r, start);
        return r;
    }
    open.push({h0, seq++, root});

    while (!open.empty()) {
        int cur = open.top().node;
        open.pop();
        if (store.nodes[cur].closed) continue;
        store.nodes[cur].closed = true;
        ++r.expansions;
        if (cfg.on_expand) cfg.on_expand(store.nodes[cur].state);

        for (int a : applicable(store.nodes[cur].state, task)) {
            State t = successor(store.nodes[cur].state, a, task);
            // Early goal detection: test before evaluating.
            if (t.contains_all(task.goal)) {
                r.status = SearchStatus::solved;
                r.plan = extract_plan(store, cur);
                r.plan.push_back(a);
                finish(r, start);
                return r;
            }
            int tid = store.find(t);
            if (tid < 0) {
                tid = store.insert(t);
                store.nodes[tid].parent = cur;
                store.nodes[tid].parent_action = a;
            }
            double ht = h.value(store.nodes[tid].state);
            ++r.evaluations;
            open.push({ht, seq++, tid});
            if (r.evaluations >= cfg.eval_limit) {
                r.status = SearchStatus::limit_reached;
                finish(r, start);
                return r;
            }
        }
    }
    r.status = SearchStatus::exhausted;
    finish(r, start);
    return r;
}

SearchResult gbfls(const GroundTask& task, Evaluator& h, const SearchConfig& cfg) {
    auto start = Clock::now();
    h.reset_cache();
    SearchResult r;

    // Lookahead depth cap: 5 * h_ff(I), or 50 when h_ff(I) is infinite.
    {
        HFFEvaluator ff(task);
        double ff0 = ff.value(task.initial);
        r.lookahead_depth_cap =
            std::isinf(ff0) ? 50 : static_cast<long>(5.0 * ff0);
    }

    NodeStore store;
    OpenQueue open;
    long seq = 0;

    if (is_goal(task.initial, task)) {
        r.status = SearchStatus::solved;
        finish(r, start);
        return r;
    }
    int root = store.insert(task.initial);
    double h0 = h.value(task.initial);
    ++r.evaluations;
    if (r.evaluations >= cfg.eval_limit) {
        r.status = SearchStatus::limit_reached;
        finish(r, start);
        return r;
    }
    open.push({h0, seq++, root});

    while (!open.empty()) {
        int cur = open.top().node;
        open.pop();
        if (store.nodes[cur].closed) continue;
        store.nodes[cur].closed = true;
        ++r.expansions;
        if (cfg.on_expand) cfg.on_expand(store.nodes[cur].state);

        // Greedy depth-first lookahead from the expanded node. Only
        // depth-0 successors enter OPEN; all generated nodes are
        // goal-tested and counted as evaluated.
        State lstate = store.nodes[cur].state;
        std::vector<int> lpath;  // actions taken inside the lookahead
        for (long d = 0; d < r.lookahead_depth_cap; ++d) {
            std::vector<int> acts = applicable(lstate, task);
            if (acts.empty()) break;
            double best_h = kInfinity;
            int best_a = -1;
            State best_state;
            for (int a : acts) {
                State t = successor(lstate, a, task);
                if (t.contains_all(task.goal)) {
                    r.status = SearchStatus::solved;
                    r.plan = extract_plan(store, cur);
                    r.plan.insert(r.plan.end(), lpath.begin(), lpath.end());
                    r.plan.push_back(a);
                    finish(r, start);
                    return r;
                }
                double ht = h.value(t);
                ++r.evaluations;
                if (d == 0) {
                    int tid = store.find(t);
                    if (tid < 0) {
                        tid = store.insert(t);
                        store.nodes[tid].parent = cur;
                        store.nodes[tid].parent_action = a;
                    }
                    open.push({ht, seq++, tid});
                }
                if (best_a < 0 || ht < best_h) {  // first wins on ties
                    best_h = ht;
                    best_a = a;
                    best_state = t;
                }
                if (r.evaluations >= cfg.eval_limit) {
                    r.status = SearchStatus::limit_reached;
                    finish(r, start);
                    return r;
                }
            }
            lstate = best_state;
            lpath.push_back(best_a);
        }
    }
    r.status = SearchStatus::exhausted;
    finish(r, start);
    return r;
}

SearchResult run_search(const GroundTask& task, Evaluator& h, const SearchConfig& cfg) {
    switch (cfg.algo) {
        case SearchAlgo::astar: return astar(task, h, cfg);
        case SearchAlgo::gbfs: return gbfs(task, h, cfg);
        case SearchAlgo::gbfls: return gbfls(task, h, cfg);
    }
    throw TaskError("unknown search algorithm");
}

SearchAlgo search_algo_from_string(const std::string& name) {
    if (name == "astar") return SearchAlgo::astar;
    if (name == "gbfs") return SearchAlgo::gbfs;
    if (name == "gbfls") return SearchAlgo::gbfls;
    throw TaskError("unknown search algorithm: " + name);
}

std::string search_algo_name(SearchAlgo a) {
    switch (a) {
        case SearchAlgo::astar: return "astar";
        case SearchAlgo::gbfs: return "gbfs";
        case SearchAlgo::gbfls: return "gbfls";
    }
    return "?";
}

std::string search_status_name(SearchStatus s) {
    switch (s) {
        case SearchStatus::solved: return "solved";
        case SearchStatus::exhausted: return "exhausted";
        case SearchStatus::limit_reached: return "limit_reached";
    }
    return "?";
}

std::vector<SuiteRow> evaluate_suite(const std::vector<SuiteTask>& tasks,
                                     const std::vector<HeuristicSpec>& heuristics,
                                     const SearchConfig& cfg) {
    std::vector<SuiteRow> rows(tasks.size() * heuristics.size());
    const long npairs = static_cast<long>(rows.size());
#pragma omp parallel for schedule(dynamic)
    for (long i = 0; i < npairs; ++i) {
        const SuiteTask& st = tasks[i / heuristics.size()];
        const HeuristicSpec& hs = heuristics[i % heuristics.size()];
        SuiteRow row;
        row.instance = st.name;
        row.objects = st.task->object_count();
        row.algorithm = search_algo_name(cfg.algo);
        row.heuristic = hs.name;
        auto evaluator = hs.make(*st.task);
        row.result = run_search(*st.task, *evaluator, cfg);
        rows[i] = std::move(row);
    }
    return rows;
}

PairedTally paired_tally(const std::vector<SuiteRow>& rows, const std::string& a,
                         const std::string& b) {
    std::unordered_map<std::string, std::pair<double, double>> per_instance;
    for (const auto& row : rows) {
        double score = row.result.status == SearchStatus::solved
                           ? static_cast<double>(row.result.evaluations)
                           : kInfinity;
        auto it = per_instance.try_emplace(row.instance, kInfinity, kInfinity).first;
        if (row.heuristic == a) it->second.first = score;
        else if (row.heuristic == b) it->second.second = score;
    }
    PairedTally t;
    for (const auto& [name, scores] : per_instance) {
        auto [sa, sb] = scores;
        if (std::isinf(sa) && std::isinf(sb)) continue;  // failed by both
        if (sa < sb) ++t.first_better;
        else if (sb < sa) ++t.second_better;
    }
    return t;
}

std::string plan_to_val(const GroundTask& task, const std::vector<int>& plan) {
    std::string out;
    for (int a : plan) {
        out += "(" + task.actions[a].name + ")\n";
    }
    return out;
}

}  // namespace nsplan
