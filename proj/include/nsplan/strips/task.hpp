#ifndef NSPLAN_STRIPS_TASK_HPP
#define NSPLAN_STRIPS_TASK_HPP

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace nsplan {

struct Predicate {
    std::string name;
    int arity = 0;
};

// Ground atom: predicate id plus object ids.
struct Atom {
    int predicate = -1;
    std::vector<int> args;
};

// Atom inside an action schema. A term >= 0 is a parameter index,
// a term < 0 is a constant object encoded as -(object_id + 1).
struct LiftedAtom {
    int predicate = -1;
    std::vector<int> terms;
};

struct ActionSchema {
    std::string name;
    int param_count = 0;
    std::vector<int> param_types;  // type id per parameter, -1 = any object
    std::vector<LiftedAtom> pre;
    std::vector<LiftedAtom> add;
    std::vector<LiftedAtom> del;
};

// Parsed STRIPS task before grounding. Types have already been compiled
// into static unary predicates appended after the declared ones; the
// corresponding atoms are part of `init`.
struct LiftedTask {
    std::string domain_name;
    std::string problem_name;
    std::vector<std::string> objects;
    std::vector<Predicate> predicates;
    std::vector<ActionSchema> actions;
    std::vector<Atom> init;
    std::vector<Atom> goal;
    // Typing info retained for grounding. type_sets[o] lists the type ids
    // object o belongs to (transitively closed, root "object" excluded).
    std::vector<std::string> type_names;
    std::vector<std::vector<int>> type_sets;

    int max_predicate_arity() const {
        int m = 0;
        for (const auto& p : predicates) m = std::max(m, p.arity);
        return m;
    }
};

// Fixed-width bitset over the ground propositions of one task.
class State {
public:
    State() = default;
    explicit State(std::size_t nbits)
        : nbits_(nbits), words_((nbits + 63) / 64, 0) {}

    std::size_t size() const { return nbits_; }

    bool test(std::size_t i) const {
        return (words_[i >> 6] >> (i & 63)) & 1u;
    }
    void set(std::size_t i) { words_[i >> 6] |= uint64_t(1) << (i & 63); }
    void reset(std::size_t i) { words_[i >> 6] &= ~(uint64_t(1) << (i & 63)); }

    bool contains_all(const std::vector<int>& ids) const {
        for (int id : ids)
            if (!test(static_cast<std::size_t>(id))) return false;
        return true;
    }

    bool operator==(const State& o) const {
        return nbits_ == o.nbits_ && words_ == o.words_;
    }
    bool operator!=(const State& o) const { return !(*this == o); }

    uint64_t hash() const {
        uint64_t h = 0xcbf29ce484222325ull;
        for (uint64_t w : words_) {
            h ^= w;
            h *= 0x100000001b3ull;
        }
        return h;
    }

    const std::vector<uint64_t>& words() const { return words_; }

private:
    std::size_t nbits_ = 0;
    std::vector<uint64_t> words_;
};

struct StateHash {
    std::size_t operator()(const State& s) const {
        return static_cast<std::size_t>(s.hash());
    }
};

struct GroundAction {
    std::string name;  // "schema obj1 obj2"
    std::vector<int> pre;  // sorted, unique proposition ids
    std::vector<int> add;
    std::vector<int> del;
};

// Grounded task. Proposition ids are dense in [0, num_propositions) with
// predicates laid out in declaration order and object tuples row-major,
// so id = pred_offset[p] + ((o1*O + o2)*O + ...) for predicate p.
struct GroundTask {
    std::string domain_name;
    std::string problem_name;
    std::vector<std::string> objects;
    std::vector<Predicate> predicates;
    std::vector<std::size_t> pred_offset;  // size predicates.size() + 1
    std::size_t num_propositions = 0;
    std::vector<GroundAction> actions;
    State initial;
    std::vector<int> goal;  // sorted, unique

    std::size_t object_count() const { return objects.size(); }

    std::size_t prop_id(int predicate, const std::vector<int>& args) const {
        std::size_t idx = 0;
        for (int a : args) idx = idx * objects.size() + static_cast<std::size_t>(a);
        return pred_offset[predicate] + idx;
    }

    // Inverse of prop_id.
    void decode_prop(std::size_t id, int& predicate, std::vector<int>& args) const;
    std::string prop_name(std::size_t id) const;

    // FNV-1a over "name/arity" of every predicate, in order. Identifies the
    // predicate signature a learned model was built for.
    uint64_t signature_fingerprint() const;
};

GroundTask ground(const LiftedTask& task);

std::vector<int> applicable(const State& s, const GroundTask& task);
State successor(const State& s, int action_id, const GroundTask& task);
bool is_goal(const State& s, const GroundTask& task);

// Applies `plan` from the initial state, throwing TaskError on an
// inapplicable step; returns true iff the final state satisfies the goal.
bool validate_plan(const GroundTask& task, const std::vector<int>& plan);

}  // namespace nsplan

#endif
