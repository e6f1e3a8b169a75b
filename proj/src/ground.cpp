#include "nsplan/strips/task.hpp"

#include <limits>
#include <unordered_set>

#include "nsplan/errors.hpp"

namespace nsplan {

namespace {

// O^arity with overflow guard; grounding reports the offending product
// instead of silently wrapping.
std::size_t checked_pow(std::size_t base, int exp, const std::string& pred) {
    std::size_t r = 1;
    for (int i = 0; i < exp; ++i) {
        if (base != 0 && r > std::numeric_limits<std::size_t>::max() / base)
            throw TaskError("proposition table overflow for predicate '" + pred +
                            "': " + std::to_string(base) + "^" + std::to_string(exp));
        r *= base;
    }
    return r;
}

void insert_sorted_unique(std::vector<int>& v, int x) {
    auto it = std::lower_bound(v.begin(), v.end(), x);
    if (it == v.end() || *it != x) v.insert(it, x);
}

}  // namespace

void GroundTask::decode_prop(std::size_t id, int& predicate,
                             std::vector<int>& args) const {
    auto it = std::upper_bound(pred_offset.begin(), pred_offset.end(), id);
    predicate = static_cast<int>(it - pred_offset.begin()) - 1;
    std::size_t rest = id - pred_offset[predicate];
    int ar = predicates[predicate].arity;
    args.assign(ar, 0);
    for (int i = ar - 1; i >= 0; --i) {
        args[i] = static_cast<int>(rest % objects.size());
        rest /= objects.size();
    }
}

std::string GroundTask::prop_name(std::size_t id) const {
    int p;
    std::vector<int> args;
    decode_prop(id, p, args);
    std::string s = predicates[p].name;
    for (int a : args) s += " " + objects[a];
    return s;
}

uint64_t GroundTask::signature_fingerprint() const {
    uint64_t h = 0xcbf29ce484222325ull;
    auto feed = [&h](const std::string& s) {
        for (unsigned char c : s) {
            h ^= c;
            h *= 0x100000001b3ull;
        }
    };
    for (const auto& p : predicates) {
        feed(p.name);
        feed("/" + std::to_string(p.arity) + "\n");
    }
    return h;
}

GroundTask ground(const LiftedTask& task) {
    GroundTask g;
    g.domain_name = task.domain_name;
    g.problem_name = task.problem_name;
    g.objects = task.objects;
    g.predicates = task.predicates;

    const std::size_t nobj = g.objects.size();
    g.pred_offset.resize(g.predicates.size() + 1, 0);
    for (std::size_t p = 0; p < g.predicates.size(); ++p)
        g.pred_offset[p + 1] =
            g.pred_offset[p] + checked_pow(nobj, g.predicates[p].arity,
                                           g.predicates[p].name);
    g.num_propositions = g.pred_offset.back();

    // Static predicates (never added or deleted) let us drop ground actions
    // whose static preconditions do not hold initially. Proposition indexing
    // is unaffected.
    std::vector<char> is_static(g.predicates.size(), 1);
    for (const auto& schema : task.actions) {
        for (const auto& a : schema.add) is_static[a.predicate] = 0;
        for (const auto& a : schema.del) is_static[a.predicate] = 0;
    }

    g.initial = State(g.num_propositions);
    for (const auto& atom : task.init)
        g.initial.set(g.prop_id(atom.predicate, atom.args));

    for (const auto& atom : task.goal)
        insert_sorted_unique(g.goal, static_cast<int>(g.prop_id(atom.predicate, atom.args)));

    std::vector<int> args;  // scratch for instantiation
    auto instantiate = [&](const LiftedAtom& la, const std::vector<int>& binding) {
        args.clear();
        for (int t : la.terms)
            args.push_back(t >= 0 ? binding[t] : -(t + 1));
        return static_cast<int>(g.prop_id(la.predicate, args));
    };

    std::unordered_set<std::string> seen_names;
    for (const auto& schema : task.actions) {
        std::vector<int> binding(schema.param_count, 0);
        bool done = schema.param_count > 0 && nobj == 0;
        while (!done) {
            bool typed_ok = true;
            for (int i = 0; i < schema.param_count && typed_ok; ++i) {
                int t = schema.param_types[i];
                if (t < 0) continue;
                const auto& ts = task.type_sets[binding[i]];
                typed_ok = std::find(ts.begin(), ts.end(), t) != ts.end();
            }
            if (typed_ok) {
                GroundAction ga;
                ga.name = schema.name;
                for (int i = 0; i < schema.param_count; ++i)
                    ga.name += " " + g.objects[binding[i]];
                bool keep = seen_names.insert(ga.name).second;
                if (keep) {
                    for (const auto& la : schema.pre) {
                        int id = instantiate(la, binding);
                        if (is_static[la.predicate] && !g.initial.test(id)) {
                            keep = false;  // statically unsatisfiable
                            break;
                        }
                        insert_sorted_unique(ga.pre, id);
                    }
                }
                if (keep) {
                    for (const auto& la : schema.add)
                        insert_sorted_unique(ga.add, instantiate(la, binding));
                    for (const auto& la : schema.del)
                        insert_sorted_unique(ga.del, instantiate(la, binding));
                    g.actions.push_back(std::move(ga));
                }
            }
            // next tuple, row-major (rightmost parameter fastest)
            int i = schema.param_count - 1;
            for (; i >= 0; --i) {
                if (++binding[i] < static_cast<int>(nobj)) break;
                binding[i] = 0;
            }
            done = i < 0;
        }
    }
    return g;
}

std::vector<int> applicable(const State& s, const GroundTask& task) {
    std::vector<int> out;
    for (std::size_t a = 0; a < task.actions.size(); ++a)
        if (s.contains_all(task.actions[a].pre)) out.push_back(static_cast<int>(a));
    return out;
}

State successor(const State& s, int action_id, const GroundTask& task) {
    const GroundAction& a = task.actions[action_id];
    if (!s.contains_all(a.pre))
        throw TaskError("action '" + a.name + "' is not applicable: precondition not satisfied");
    State t = s;
    for (int p : a.del) t.reset(p);
    for (int p : a.add) t.set(p);
    return t;
}

bool is_goal(const State& s, const GroundTask& task) {
    return s.contains_all(task.goal);
}

bool validate_plan(const GroundTask& task, const std::vector<int>& plan) {
    State s = task.initial;
    for (int a : plan) s = successor(s, a, task);
    return is_goal(s, task);
}

}  // namespace nsplan
