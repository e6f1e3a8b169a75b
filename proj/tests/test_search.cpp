#include <doctest.h>

#include <cmath>

#include "nsplan/gen/generators.hpp"
#include "nsplan/search/search.hpp"
#include "nsplan/strips/pddl.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"

using namespace nsplan;
using namespace nsplan::testing;

namespace {

GroundTask trivial_task() {
    return make_task("(define (domain t) (:predicates (p)))",
                     "(define (problem t-1) (:domain t) (:init (p)) (:goal (p)))");
}

// Counts calls into the wrapped heuristic.
class CountingEvaluator final : public Evaluator {
public:
    explicit CountingEvaluator(Evaluator& inner) : inner_(inner) {}
    double value(const State& s) override {
        ++calls;
        return inner_.value(s);
    }
    const std::string& id() const override { return inner_.id(); }
    long calls = 0;

private:
    Evaluator& inner_;
};

}  // namespace

TEST_CASE("astar: initial state satisfies goal") {
    GroundTask t = trivial_task();
    ZeroEvaluator zero;
    SearchConfig cfg;
    auto r = astar(t, zero, cfg);
    CHECK(r.status == SearchStatus::solved);
    CHECK(r.plan.empty());
    CHECK(r.expansions == 0);
}

TEST_CASE("astar: chain cost matches BFS oracle, blind and zero") {
    GroundTask t = chain_task(5);
    SearchConfig cfg;
    cfg.algo = SearchAlgo::astar;
    int oracle = bfs_optimal_cost(t, 1000);
    REQUIRE(oracle == 5);

    BlindEvaluator blind;
    auto r1 = astar(t, blind, cfg);
    CHECK(r1.status == SearchStatus::solved);
    CHECK(r1.plan_length == oracle);
    CHECK(validate_plan(t, r1.plan));

    ZeroEvaluator zero;
    auto r2 = astar(t, zero, cfg);
    CHECK(r2.plan_length == oracle);
}

TEST_CASE("astar: perfect heuristic expands only one optimal path") {
    GroundTask t = chain_task(8);
    StateSpace sp = enumerate_states(t, 1000);
    // h*(s) from BFS distances
    class Perfect final : public Evaluator {
    public:
        Perfect(const StateSpace& sp) : sp_(sp) {}
        double value(const State& s) override {
            int idx = sp_.index.at(s);
            return sp_.dist_to_goal[idx] < 0 ? kInfinity : sp_.dist_to_goal[idx];
        }
        const std::string& id() const override {
            static const std::string n = "hstar";
            return n;
        }

    private:
        const StateSpace& sp_;
    } hstar(sp);

    SearchConfig cfg;
    auto r = astar(t, hstar, cfg);
    CHECK(r.status == SearchStatus::solved);
    CHECK(r.plan_length == 8);
    CHECK(r.expansions <= 8);  // only states on the optimal path
}

TEST_CASE("astar matches BFS oracle on generated fixtures") {
    for (auto [kind, size, seed] :
         {std::tuple{DomainKind::blocks, 3, uint64_t(1)},
          std::tuple{DomainKind::blocks, 4, uint64_t(2)},
          std::tuple{DomainKind::gripper, 3, uint64_t(3)}}) {
        GroundTask t = ground(
            parse(domain_pddl(kind), generate_problem(kind, size, 0, seed)));
        int oracle = bfs_optimal_cost(t, 2000000);
        REQUIRE(oracle >= 0);
        ZeroEvaluator zero;
        SearchConfig cfg;
        auto r = astar(t, zero, cfg);
        CHECK(r.status == SearchStatus::solved);
        CHECK(r.plan_length == oracle);
        CHECK(validate_plan(t, r.plan));
    }
}

TEST_CASE("gbfs: early goal detection solves goal-initial tasks without evaluating") {
    GroundTask t = trivial_task();
    BlindEvaluator blind;
    SearchConfig cfg;
    auto r = gbfs(t, blind, cfg);
    CHECK(r.status == SearchStatus::solved);
    CHECK(r.evaluations == 0);
}

TEST_CASE("gbfs: chain with h_add evaluates each generated successor") {
    GroundTask t = chain_task(3);
    HAddEvaluator hadd(t);
    SearchConfig cfg;
    auto r = gbfs(t, hadd, cfg);
    CHECK(r.status == SearchStatus::solved);
    CHECK(r.plan_length == 3);
    CHECK(validate_plan(t, r.plan));
    // Each chain state has exactly one successor. Generated: p1, p2;
    // p3 is the goal, detected before evaluation. Plus the initial state.
    CHECK(r.evaluations == 3);
}

TEST_CASE("gbfs: unreachable goal exhausts the space") {
    GroundTask t = unreachable_task();
    BlindEvaluator blind;
    SearchConfig cfg;
    auto r = gbfs(t, blind, cfg);
    CHECK(r.status == SearchStatus::exhausted);
}

TEST_CASE("gbfs: halts exactly at the evaluation limit") {
    GroundTask t = ground(parse(domain_pddl(DomainKind::blocks),
                                generate_problem(DomainKind::blocks, 4, 0, 5)));
    BlindEvaluator blind;
    CountingEvaluator counting(blind);
    SearchConfig cfg;
    cfg.eval_limit = 1;
    auto r = gbfs(t, counting, cfg);
    CHECK(r.status == SearchStatus::limit_reached);
    CHECK(r.evaluations == 1);
    CHECK(counting.calls == 1);

    cfg.eval_limit = 37;
    CountingEvaluator counting2(blind);
    auto r2 = gbfs(t, counting2, cfg);
    CHECK(r2.status == SearchStatus::limit_reached);
    CHECK(r2.evaluations == 37);
    CHECK(counting2.calls == 37);
}

TEST_CASE("astar never exceeds the evaluation limit") {
    GroundTask t = ground(parse(domain_pddl(DomainKind::blocks),
                                generate_problem(DomainKind::blocks, 4, 0, 5)));
    BlindEvaluator blind;
    for (long limit : {1L, 2L, 25L}) {
        SearchConfig cfg;
        cfg.eval_limit = limit;
        auto r = astar(t, blind, cfg);
        CHECK(r.status == SearchStatus::limit_reached);
        CHECK(r.evaluations <= limit);
    }
}

TEST_CASE("gbfs: expansion order invariant under monotone transforms of h") {
    GroundTask t = ground(parse(domain_pddl(DomainKind::blocks),
                                generate_problem(DomainKind::blocks, 3, 0, 9)));
    HAddEvaluator base(t);

    class Affine final : public Evaluator {
    public:
        Affine(const GroundTask& task) : inner_(task) {}
        double value(const State& s) override { return 2.0 * inner_.value(s) + 3.0; }
        const std::string& id() const override {
            static const std::string n = "affine";
            return n;
        }
        void reset_cache() override { inner_.reset_cache(); }

    private:
        HAddEvaluator inner_;
    } affine(t);

    std::vector<uint64_t> order1, order2;
    SearchConfig cfg;
    cfg.on_expand = [&](const State& s) { order1.push_back(s.hash()); };
    auto r1 = gbfs(t, base, cfg);
    cfg.on_expand = [&](const State& s) { order2.push_back(s.hash()); };
    auto r2 = gbfs(t, affine, cfg);
    CHECK(r1.status == SearchStatus::solved);
    CHECK(order1 == order2);
    CHECK(r1.evaluations == r2.evaluations);
}

TEST_CASE("gbfls: lookahead cap follows 5*h_ff(I) and the infinite fallback") {
    GroundTask chain7 = chain_task(7);
    BlindEvaluator blind;
    SearchConfig cfg;
    auto r = gbfls(chain7, blind, cfg);
    CHECK(r.lookahead_depth_cap == 35);
    CHECK(r.status == SearchStatus::solved);

    GroundTask dead = unreachable_task();
    auto r2 = gbfls(dead, blind, cfg);
    CHECK(r2.lookahead_depth_cap == 50);
    CHECK(r2.status == SearchStatus::exhausted);
}

TEST_CASE("gbfls: corridor solved within the first lookahead") {
    GroundTask t = corridor_task(10);
    BlindEvaluator b1, b2;
    SearchConfig cfg;
    auto rl = gbfls(t, b1, cfg);
    CHECK(rl.status == SearchStatus::solved);
    CHECK(rl.expansions == 1);  // goal reached inside the first lookahead
    CHECK(validate_plan(t, rl.plan));
    // lookahead nodes are counted as evaluated
    CHECK(rl.evaluations >= 10);

    auto rg = gbfs(t, b2, cfg);
    CHECK(rg.status == SearchStatus::solved);
    CHECK(rg.expansions > rl.expansions);
}

TEST_CASE("plans from all algorithms validate") {
    GroundTask t = ground(parse(domain_pddl(DomainKind::gripper),
                                generate_problem(DomainKind::gripper, 3, 0, 21)));
    SearchConfig cfg;
    for (auto algo : {SearchAlgo::astar, SearchAlgo::gbfs, SearchAlgo::gbfls}) {
        cfg.algo = algo;
        HFFEvaluator h(t);
        auto r = run_search(t, h, cfg);
        REQUIRE(r.status == SearchStatus::solved);
        CHECK(validate_plan(t, r.plan));
        CHECK(r.plan_length == static_cast<long>(r.plan.size()));
    }
}

TEST_CASE("evaluate_suite produces ordered rows and paired tallies") {
    GroundTask t1 = ground(parse(domain_pddl(DomainKind::blocks),
                                 generate_problem(DomainKind::blocks, 3, 0, 2)));
    GroundTask t2 = ground(parse(domain_pddl(DomainKind::blocks),
                                 generate_problem(DomainKind::blocks, 3, 0, 4)));
    std::vector<SuiteTask> tasks = {{"i1", &t1}, {"i2", &t2}};
    std::vector<HeuristicSpec> specs;
    specs.push_back({"blind", [](const GroundTask& t) { return make_heuristic(t, "blind"); }});
    specs.push_back({"hff", [](const GroundTask& t) { return make_heuristic(t, "hff"); }});
    SearchConfig cfg;
    auto rows = evaluate_suite(tasks, specs, cfg);
    REQUIRE(rows.size() == 4);
    CHECK(rows[0].instance == "i1");
    CHECK(rows[0].heuristic == "blind");
    CHECK(rows[3].instance == "i2");
    CHECK(rows[3].heuristic == "hff");
    long coverage = 0;
    for (const auto& row : rows)
        if (row.result.status == SearchStatus::solved) ++coverage;
    CHECK(coverage == 4);

    auto tally = paired_tally(rows, "hff", "blind");
    CHECK(tally.first_better + tally.second_better <= 2);
}

TEST_CASE("empty heuristic list yields an empty report") {
    GroundTask t = chain_task(2);
    std::vector<SuiteTask> tasks = {{"c", &t}};
    auto rows = evaluate_suite(tasks, {}, SearchConfig{});
    CHECK(rows.empty());
}
