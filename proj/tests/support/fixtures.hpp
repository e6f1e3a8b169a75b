#ifndef NSPLAN_TESTS_FIXTURES_HPP
#define NSPLAN_TESTS_FIXTURES_HPP

#include <cstdint>
#include <random>
#include <string>

#include "nsplan/strips/pddl.hpp"
#include "nsplan/strips/task.hpp"

namespace nsplan::testing {

GroundTask make_task(const std::string& domain, const std::string& problem);

// Chain p0 -> p1 -> ... -> pn via 0-ary actions a1..an. When `with_delete`
// each step deletes the previous proposition, so the reachable state space
// is a path graph. Goal = {pn}.
GroundTask chain_task(int n, bool with_delete = true);

// Corridor c0..ck where each cell also has a dead-end branch; forward
// actions are declared before branch actions so ties favor the corridor.
GroundTask corridor_task(int length);

// Chain whose interior states offer both a forward and a backward action;
// no dead ends, so every state can reach the goal.
GroundTask two_way_chain(int n);

// A task whose goal is unreachable (no achiever for the goal atom).
GroundTask unreachable_task();

// Random STRIPS micro-task over <= `props` nullary predicates and 0-ary
// actions; used against the Bellman-Ford h_add oracle.
struct MicroTask {
    std::string domain;
    std::string problem;
};
MicroTask random_micro_task(std::mt19937_64& rng, int props, int actions);

}  // namespace nsplan::testing

#endif
