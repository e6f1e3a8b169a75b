#include "nsplan/gen/generators.hpp"

#include <random>
#include <sstream>
#include <unordered_set>

#include "nsplan/errors.hpp"
#include "nsplan/heur/heuristics.hpp"
#include "nsplan/io/sha256.hpp"
#include "nsplan/search/search.hpp"
#include "nsplan/strips/pddl.hpp"

namespace nsplan {

namespace {

const std::string kBlocksDomain = R"((define (domain blocksworld)
  (:requirements :strips)
  (:predicates (on ?x ?y) (ontable ?x) (clear ?x) (handempty) (holding ?x))
  (:action pick-up
    :parameters (?x)
    :precondition (and (clear ?x) (ontable ?x) (handempty))
    :effect (and (not (ontable ?x)) (not (clear ?x)) (not (handempty))
                 (holding ?x)))
  (:action put-down
    :parameters (?x)
    :precondition (holding ?x)
    :effect (and (not (holding ?x)) (clear ?x) (handempty) (ontable ?x)))
  (:action stack
    :parameters (?x ?y)
    :precondition (and (holding ?x) (clear ?y))
    :effect (and (not (holding ?x)) (not (clear ?y)) (clear ?x) (handempty)
                 (on ?x ?y)))
  (:action unstack
    :parameters (?x ?y)
    :precondition (and (on ?x ?y) (clear ?x) (handempty))
    :effect (and (holding ?x) (clear ?y) (not (clear ?x)) (not (handempty))
                 (not (on ?x ?y)))))
)";

const std::string kGripperDomain = R"((define (domain gripper)
  (:requirements :strips)
  (:predicates (room ?r) (ball ?b) (gripper ?g) (at-robby ?r) (at ?b ?r)
               (free ?g) (carry ?o ?g))
  (:action move
    :parameters (?from ?to)
    :precondition (and (room ?from) (room ?to) (at-robby ?from))
    :effect (and (at-robby ?to) (not (at-robby ?from))))
  (:action pick
    :parameters (?obj ?room ?gripper)
    :precondition (and (ball ?obj) (room ?room) (gripper ?gripper)
                       (at ?obj ?room) (at-robby ?room) (free ?gripper))
    :effect (and (carry ?obj ?gripper) (not (at ?obj ?room))
                 (not (free ?gripper))))
  (:action drop
    :parameters (?obj ?room ?gripper)
    :precondition (and (ball ?obj) (room ?room) (gripper ?gripper)
                       (carry ?obj ?gripper) (at-robby ?room))
    :effect (and (at ?obj ?room) (free ?gripper)
                 (not (carry ?obj ?gripper)))))
)";

const std::string kFerryDomain = R"((define (domain ferry)
  (:requirements :strips)
  (:predicates (not-eq ?x ?y) (car ?c) (location ?l) (at-ferry ?l) (at ?c ?l)
               (empty-ferry) (on ?c))
  (:action sail
    :parameters (?from ?to)
    :precondition (and (not-eq ?from ?to) (location ?from) (location ?to)
                       (at-ferry ?from))
    :effect (and (at-ferry ?to) (not (at-ferry ?from))))
  (:action board
    :parameters (?car ?loc)
    :precondition (and (car ?car) (location ?loc) (at ?car ?loc)
                       (at-ferry ?loc) (empty-ferry))
    :effect (and (on ?car) (not (at ?car ?loc)) (not (empty-ferry))))
  (:action debark
    :parameters (?car ?loc)
    :precondition (and (car ?car) (location ?loc) (on ?car) (at-ferry ?loc))
    :effect (and (at ?car ?loc) (empty-ferry) (not (on ?car)))))
)";

int uniform_int(std::mt19937_64& rng, int lo, int hi) {
    // Explicit modulo-free draw: stable across standard library versions.
    uint64_t span = static_cast<uint64_t>(hi - lo) + 1;
    uint64_t limit = UINT64_MAX - UINT64_MAX % span;
    uint64_t x;
    do {
        x = rng();
    } while (x >= limit);
    return lo + static_cast<int>(x % span);
}

// Random blocksworld arrangement: each block in turn goes on the table or
// on a previously placed clear block. Returns `below[i]`, -1 = table.
std::vector<int> random_arrangement(int n, std::mt19937_64& rng) {
    std::vector<int> order(n);
    for (int i = 0; i < n; ++i) order[i] = i;
    for (int i = n - 1; i > 0; --i)
        std::swap(order[i], order[uniform_int(rng, 0, i)]);
    std::vector<int> below(n, -1);
    std::vector<int> clear_blocks;
    for (int b : order) {
        int choice = uniform_int(rng, 0, static_cast<int>(clear_blocks.size()));
        if (choice == static_cast<int>(clear_blocks.size())) {
            below[b] = -1;  // table
        } else {
            below[b] = clear_blocks[choice];
            clear_blocks.erase(clear_blocks.begin() + choice);
        }
        clear_blocks.push_back(b);
    }
    return below;
}

std::string blocks_problem(int n, uint64_t seed, std::mt19937_64& rng) {
    auto init = random_arrangement(n, rng);
    std::vector<int> goal;
    do {
        goal = random_arrangement(n, rng);
    } while (goal == init);

    auto name = [](int b) { return "b" + std::to_string(b + 1); };
    std::ostringstream out;
    out << "(define (problem blocks-" << n << "-" << seed << ")\n";
    out << "  (:domain blocksworld)\n  (:objects";
    for (int b = 0; b < n; ++b) out << " " << name(b);
    out << ")\n  (:init (handempty)";
    std::vector<char> covered(n, 0);
    for (int b = 0; b < n; ++b)
        if (init[b] >= 0) covered[init[b]] = 1;
    for (int b = 0; b < n; ++b) {
        if (init[b] < 0) out << " (ontable " << name(b) << ")";
        else out << " (on " << name(b) << " " << name(init[b]) << ")";
        if (!covered[b]) out << " (clear " << name(b) << ")";
    }
    out << ")\n  (:goal (and";
    for (int b = 0; b < n; ++b) {
        if (goal[b] < 0) out << " (ontable " << name(b) << ")";
        else out << " (on " << name(b) << " " << name(goal[b]) << ")";
    }
    out << ")))\n";
    return out.str();
}

std::string gripper_problem(int balls, uint64_t seed, std::mt19937_64& rng) {
    std::vector<int> init(balls), goal(balls);
    bool moved = false;
    for (int i = 0; i < balls; ++i) {
        init[i] = uniform_int(rng, 0, 1);
        goal[i] = uniform_int(rng, 0, 1);
        moved = moved || init[i] != goal[i];
    }
    if (!moved) goal[0] = 1 - goal[0];
    int robby = uniform_int(rng, 0, 1);

    const char* room[] = {"rooma", "roomb"};
    auto name = [](int b) { return "ball" + std::to_string(b + 1); };
    std::ostringstream out;
    out << "(define (problem gripper-" << balls << "-" << seed << ")\n";
    out << "  (:domain gripper)\n  (:objects rooma roomb left right";
    for (int b = 0; b < balls; ++b) out << " " << name(b);
    out << ")\n  (:init (room rooma) (room roomb) (gripper left) (gripper right)\n";
    out << "         (free left) (free right) (at-robby " << room[robby] << ")";
    for (int b = 0; b < balls; ++b)
        out << " (ball " << name(b) << ") (at " << name(b) << " " << room[init[b]] << ")";
    out << ")\n  (:goal (and";
    for (int b = 0; b < balls; ++b)
        out << " (at " << name(b) << " " << room[goal[b]] << ")";
    out << ")))\n";
    return out.str();
}

std::string ferry_problem(int cars, int locations, uint64_t seed,
                          std::mt19937_64& rng) {
    std::vector<int> init(cars), goal(cars);
    bool moved = false;
    for (int i = 0; i < cars; ++i) {
        init[i] = uniform_int(rng, 0, locations - 1);
        goal[i] = uniform_int(rng, 0, locations - 1);
        moved = moved || init[i] != goal[i];
    }
    if (!moved) goal[0] = (goal[0] + 1) % locations;
    int ferry_at = uniform_int(rng, 0, locations - 1);

    auto loc = [](int l) { return "l" + std::to_string(l + 1); };
    auto car = [](int c) { return "c" + std::to_string(c + 1); };
    std::ostringstream out;
    out << "(define (problem ferry-" << cars << "-" << locations << "-" << seed << ")\n";
    out << "  (:domain ferry)\n  (:objects";
    for (int l = 0; l < locations; ++l) out << " " << loc(l);
    for (int c = 0; c < cars; ++c) out << " " << car(c);
    out << ")\n  (:init (empty-ferry) (at-ferry " << loc(ferry_at) << ")";
    for (int l = 0; l < locations; ++l) out << " (location " << loc(l) << ")";
    for (int c = 0; c < cars; ++c)
        out << " (car " << car(c) << ") (at " << car(c) << " " << loc(init[c]) << ")";
    out << "\n        ";
    for (int a = 0; a < locations; ++a)
        for (int b = 0; b < locations; ++b)
            if (a != b) out << " (not-eq " << loc(a) << " " << loc(b) << ")";
    out << ")\n  (:goal (and";
    for (int c = 0; c < cars; ++c)
        out << " (at " << car(c) << " " << loc(goal[c]) << ")";
    out << ")))\n";
    return out.str();
}

}  // namespace

DomainKind domain_kind_from_string(const std::string& name) {
    if (name == "blocks" || name == "blocksworld") return DomainKind::blocks;
    if (name == "gripper") return DomainKind::gripper;
    if (name == "ferry") return DomainKind::ferry;
    throw TaskError("unknown generator domain: " + name);
}

std::string domain_kind_name(DomainKind kind) {
    switch (kind) {
        case DomainKind::blocks: return "blocks";
        case DomainKind::gripper: return "gripper";
        case DomainKind::ferry: return "ferry";
    }
    return "?";
}

const std::string& domain_pddl(DomainKind kind) {
    switch (kind) {
        case DomainKind::blocks: return kBlocksDomain;
        case DomainKind::gripper: return kGripperDomain;
        case DomainKind::ferry: return kFerryDomain;
    }
    throw TaskError("unknown generator domain");
}

GenLimits generator_limits(DomainKind kind) {
    switch (kind) {
        case DomainKind::blocks: return {2, 8};
        case DomainKind::gripper: return {1, 12};
        case DomainKind::ferry: return {1, 8};
    }
    return {0, 0};
}

std::string generate_problem(DomainKind kind, int size, int size2, uint64_t seed) {
    GenLimits lim = generator_limits(kind);
    if (size < lim.min_size || size > lim.max_size)
        throw TaskError("generator size " + std::to_string(size) + " outside [" +
                        std::to_string(lim.min_size) + ", " +
                        std::to_string(lim.max_size) + "] for " +
                        domain_kind_name(kind));
    if (kind == DomainKind::ferry) {
        if (size2 == 0) size2 = std::max(2, size);
        if (size2 < 2 || size2 > lim.max_size)
            throw TaskError("ferry location count " + std::to_string(size2) +
                            " outside [2, " + std::to_string(lim.max_size) + "]");
    }

    // Deterministic per (kind, size, size2, seed); the attempt counter only
    // advances when a candidate fails validation.
    for (uint64_t attempt = 0; attempt < 64; ++attempt) {
        std::mt19937_64 rng(seed * 0x9e3779b97f4a7c15ull + attempt * 0x2545f4914f6cdd1dull +
                            static_cast<uint64_t>(kind) * 131 + static_cast<uint64_t>(size));
        std::string text;
        switch (kind) {
            case DomainKind::blocks: text = blocks_problem(size, seed, rng); break;
            case DomainKind::gripper: text = gripper_problem(size, seed, rng); break;
            case DomainKind::ferry: text = ferry_problem(size, size2, seed, rng); break;
        }
        GroundTask task = ground(parse(domain_pddl(kind), text));
        if (is_goal(task.initial, task)) continue;  // trivial, reroll
        HFFEvaluator ff(task);
        SearchConfig cfg;
        cfg.algo = SearchAlgo::gbfs;
        cfg.eval_limit = 100000;
        SearchResult res = gbfs(task, ff, cfg);
        if (res.status != SearchStatus::solved) {
            ZeroEvaluator zero;
            res = astar(task, zero, cfg);
            if (res.status != SearchStatus::solved) continue;
        }
        return text;
    }
    throw TaskError("failed to generate a solvable non-trivial instance for " +
                    domain_kind_name(kind) + " size " + std::to_string(size));
}

std::vector<GeneratedInstance> generate_batch(DomainKind kind,
                                              const std::vector<int>& sizes,
                                              int per_size, uint64_t seed,
                                              int size2) {
    std::vector<GeneratedInstance> out;
    std::unordered_set<std::string> seen;  // content hashes
    for (int size : sizes) {
        int produced = 0;
        // advance through seeds until per_size distinct instances exist;
        // small sizes collide often
        for (uint64_t s = 0; produced < per_size && s < 64 * uint64_t(per_size) + 64; ++s) {
            uint64_t inst_seed = seed + s;
            std::string text = generate_problem(kind, size, size2, inst_seed);
            if (!seen.insert(sha256_hex(text)).second) continue;
            GeneratedInstance gi;
            gi.name = domain_kind_name(kind) + "-" + std::to_string(size) + "-s" +
                      std::to_string(inst_seed);
            gi.text = std::move(text);
            out.push_back(std::move(gi));
            ++produced;
        }
        if (produced < per_size)
            throw TaskError("could not generate " + std::to_string(per_size) +
                            " distinct instances of " + domain_kind_name(kind) +
                            " size " + std::to_string(size));
    }
    return out;
}

}  // namespace nsplan
