#include "support/fixtures.hpp"

#include <sstream>

namespace nsplan::testing {

GroundTask make_task(const std::string& domain, const std::string& problem) {
    return ground(parse(domain, problem));
}

GroundTask chain_task(int n, bool with_delete) {
    std::ostringstream d;
    d << "(define (domain chain) (:requirements :strips) (:predicates";
    for (int i = 0; i <= n; ++i) d << " (p" << i << ")";
    d << ")";
    for (int i = 1; i <= n; ++i) {
        d << " (:action a" << i << " :parameters () :precondition (p" << i - 1
          << ") :effect (and (p" << i << ")";
        if (with_delete) d << " (not (p" << i - 1 << "))";
        d << "))";
    }
    d << ")";
    std::ostringstream p;
    p << "(define (problem chain-" << n << ") (:domain chain) (:init (p0)) "
      << "(:goal (p" << n << ")))";
    return make_task(d.str(), p.str());
}

GroundTask corridor_task(int length) {
    std::ostringstream d;
    d << "(define (domain corridor) (:requirements :strips) (:predicates";
    for (int i = 0; i <= length; ++i) d << " (c" << i << ")";
    for (int i = 0; i < length; ++i) d << " (b" << i << ")";
    d << ")";
    for (int i = 0; i < length; ++i) {
        d << " (:action fwd" << i << " :parameters () :precondition (c" << i
          << ") :effect (and (c" << i + 1 << ") (not (c" << i << "))))";
        d << " (:action branch" << i << " :parameters () :precondition (c" << i
          << ") :effect (and (b" << i << ") (not (c" << i << "))))";
    }
    d << ")";
    std::ostringstream p;
    p << "(define (problem corridor-" << length << ") (:domain corridor) "
      << "(:init (c0)) (:goal (c" << length << ")))";
    return make_task(d.str(), p.str());
}

GroundTask two_way_chain(int n) {
    std::ostringstream d;
    d << "(define (domain twochain) (:requirements :strips) (:predicates";
    for (int i = 0; i <= n; ++i) d << " (p" << i << ")";
    d << ")";
    for (int i = 1; i <= n; ++i)
        d << " (:action fwd" << i << " :parameters () :precondition (p" << i - 1
          << ") :effect (and (p" << i << ") (not (p" << i - 1 << "))))";
    for (int i = 1; i <= n; ++i)
        d << " (:action back" << i << " :parameters () :precondition (p" << i
          << ") :effect (and (p" << i - 1 << ") (not (p" << i << "))))";
    d << ")";
    std::ostringstream p;
    p << "(define (problem twochain-" << n << ") (:domain twochain) (:init (p0)) "
      << "(:goal (p" << n << ")))";
    return make_task(d.str(), p.str());
}

GroundTask unreachable_task() {
    return make_task(
        "(define (domain dead) (:requirements :strips) (:predicates (p) (q) (r))"
        " (:action a :parameters () :precondition (p) :effect (and (q) (not (p)))))",
        "(define (problem dead-1) (:domain dead) (:init (p)) (:goal (r)))");
}

MicroTask random_micro_task(std::mt19937_64& rng, int props, int actions) {
    auto draw = [&rng](int lo, int hi) {
        return lo + static_cast<int>(rng() % static_cast<uint64_t>(hi - lo + 1));
    };
    auto subset = [&](int max_size) {
        std::vector<int> out;
        int k = draw(0, max_size);
        for (int i = 0; i < k; ++i) out.push_back(draw(0, props - 1));
        std::sort(out.begin(), out.end());
        out.erase(std::unique(out.begin(), out.end()), out.end());
        return out;
    };

    std::ostringstream d;
    d << "(define (domain micro) (:requirements :strips) (:predicates";
    for (int i = 0; i < props; ++i) d << " (p" << i << ")";
    d << ")";
    for (int a = 0; a < actions; ++a) {
        auto pre = subset(3);
        auto add = subset(3);
        auto del = subset(2);
        if (add.empty()) add.push_back(draw(0, props - 1));
        d << " (:action a" << a << " :parameters () :precondition (and";
        for (int p : pre) d << " (p" << p << ")";
        d << ") :effect (and";
        for (int p : add) d << " (p" << p << ")";
        for (int p : del) d << " (not (p" << p << "))";
        d << "))";
    }
    d << ")";

    std::ostringstream p;
    p << "(define (problem micro-1) (:domain micro) (:init";
    auto init = subset(props / 2 + 1);
    for (int i : init) p << " (p" << i << ")";
    p << ") (:goal (and";
    auto goal = subset(3);
    if (goal.empty()) goal.push_back(draw(0, props - 1));
    for (int g : goal) p << " (p" << g << ")";
    p << ")))";
    return {d.str(), p.str()};
}

}  // namespace nsplan::testing
