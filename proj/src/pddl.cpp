#include "nsplan/strips/pddl.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <sstream>
#include <unordered_map>

#include "nsplan/errors.hpp"

namespace nsplan {

namespace {

// ---------------------------------------------------------------------
// S-expression reader
// ---------------------------------------------------------------------

struct SExpr {
    bool is_list = false;
    std::string atom;          // lowercased
    std::vector<SExpr> items;
    int line = 0, col = 0;

    bool is_atom() const { return !is_list; }
    const std::string& head() const {
        static const std::string empty;
        if (!is_list || items.empty() || !items[0].is_atom()) return empty;
        return items[0].atom;
    }
};

class Lexer {
public:
    explicit Lexer(const std::string& text) : text_(text) {}

    SExpr read_expr() {
        skip_ws();
        if (eof()) throw ParseError("unexpected end of input", line_, col_);
        SExpr e;
        e.line = line_;
        e.col = col_;
        char c = peek();
        if (c == '(') {
            get();
            e.is_list = true;
            for (;;) {
                skip_ws();
                if (eof()) throw ParseError("missing ')'", e.line, e.col);
                if (peek() == ')') {
                    get();
                    break;
                }
                e.items.push_back(read_expr());
            }
        } else if (c == ')') {
            throw ParseError("unexpected ')'", line_, col_);
        } else {
            while (!eof() && !std::isspace(static_cast<unsigned char>(peek())) &&
                   peek() != '(' && peek() != ')' && peek() != ';')
                e.atom += static_cast<char>(
                    std::tolower(static_cast<unsigned char>(get())));
        }
        return e;
    }

    bool at_end() {
        skip_ws();
        return eof();
    }

private:
    bool eof() const { return pos_ >= text_.size(); }
    char peek() const { return text_[pos_]; }
    char get() {
        char c = text_[pos_++];
        if (c == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        return c;
    }
    void skip_ws() {
        while (!eof()) {
            char c = peek();
            if (c == ';') {
                while (!eof() && peek() != '\n') get();
            } else if (std::isspace(static_cast<unsigned char>(c))) {
                get();
            } else {
                break;
            }
        }
    }

    const std::string& text_;
    std::size_t pos_ = 0;
    int line_ = 1, col_ = 1;
};

// ---------------------------------------------------------------------
// Domain / problem interpretation
// ---------------------------------------------------------------------

struct TypedNames {
    std::vector<std::string> names;
    std::vector<std::string> types;  // "" when untyped
};

// Reads "n1 n2 - t n3 n4 - s n5" lists used by :types, :objects,
// :constants and :parameters.
TypedNames read_typed_list(const std::vector<SExpr>& items, std::size_t begin,
                           const SExpr& ctx) {
    TypedNames out;
    std::vector<std::string> pending;
    for (std::size_t i = begin; i < items.size(); ++i) {
        const SExpr& it = items[i];
        if (!it.is_atom())
            throw ParseError("expected a name in typed list", it.line, it.col);
        if (it.atom == "-") {
            if (i + 1 >= items.size() || !items[i + 1].is_atom())
                throw ParseError("expected a type after '-'", it.line, it.col);
            const std::string& ty = items[i + 1].atom;
            if (ty == "either") throw UnsupportedError("either types");
            for (auto& n : pending) {
                out.names.push_back(n);
                out.types.push_back(ty);
            }
            pending.clear();
            ++i;
        } else {
            pending.push_back(it.atom);
        }
    }
    for (auto& n : pending) {
        out.names.push_back(n);
        out.types.push_back("");
        (void)ctx;
    }
    return out;
}

struct DomainIr {
    std::string name;
    std::vector<Predicate> predicates;
    std::unordered_map<std::string, int> pred_index;
    // typing
    std::vector<std::string> type_names;
    std::unordered_map<std::string, int> type_index;
    std::vector<int> type_parent;  // -1 = root "object"
    // constants declared in the domain
    TypedNames constants;
    // raw action bodies, instantiated once objects are known
    struct ActionIr {
        std::string name;
        TypedNames params;
        SExpr precondition;  // may be empty list
        SExpr effect;
        bool has_precondition = false;
        int line = 0, col = 0;
    };
    std::vector<ActionIr> actions;
};

int intern_type(DomainIr& d, const std::string& name) {
    if (name.empty() || name == "object") return -1;
    auto it = d.type_index.find(name);
    if (it != d.type_index.end()) return it->second;
    int id = static_cast<int>(d.type_names.size());
    d.type_names.push_back(name);
    d.type_index[name] = id;
    d.type_parent.push_back(-1);
    return id;
}

void check_connective(const SExpr& e) {
    const std::string& h = e.head();
    if (h == "not") throw UnsupportedError("negative condition (not ...)");
    if (h == "or" || h == "imply") throw UnsupportedError("disjunctive condition (" + h + " ...)");
    if (h == "forall" || h == "exists")
        throw UnsupportedError("quantified condition (" + h + " ...)");
    if (h == "when") throw UnsupportedError("conditional effect (when ...)");
    if (h == "=") throw UnsupportedError("equality atom");
    if (h == "increase" || h == "decrease" || h == "assign")
        throw UnsupportedError("numeric effect (" + h + " ...)");
}

DomainIr parse_domain(const std::string& text) {
    Lexer lex(text);
    SExpr root = lex.read_expr();
    if (root.head() != "define")
        throw ParseError("expected (define (domain ...))", root.line, root.col);
    if (root.items.size() < 2 || root.items[1].head() != "domain" ||
        root.items[1].items.size() != 2)
        throw ParseError("expected (domain NAME)", root.line, root.col);

    DomainIr d;
    d.name = root.items[1].items[1].atom;

    for (std::size_t i = 2; i < root.items.size(); ++i) {
        const SExpr& sec = root.items[i];
        const std::string& h = sec.head();
        if (h == ":requirements") {
            for (std::size_t j = 1; j < sec.items.size(); ++j) {
                const std::string& r = sec.items[j].atom;
                if (r != ":strips" && r != ":typing")
                    throw UnsupportedError("requirement " + r);
            }
        } else if (h == ":types") {
            TypedNames t = read_typed_list(sec.items, 1, sec);
            for (std::size_t j = 0; j < t.names.size(); ++j) {
                int id = intern_type(d, t.names[j]);
                int parent = intern_type(d, t.types[j]);
                if (id >= 0) d.type_parent[id] = parent;
            }
        } else if (h == ":constants") {
            TypedNames t = read_typed_list(sec.items, 1, sec);
            for (std::size_t j = 0; j < t.names.size(); ++j) {
                d.constants.names.push_back(t.names[j]);
                d.constants.types.push_back(t.types[j]);
                intern_type(d, t.types[j]);
            }
        } else if (h == ":predicates") {
            for (std::size_t j = 1; j < sec.items.size(); ++j) {
                const SExpr& p = sec.items[j];
                if (!p.is_list || p.items.empty() || !p.items[0].is_atom())
                    throw ParseError("malformed predicate declaration", p.line, p.col);
                Predicate pred;
                pred.name = p.items[0].atom;
                TypedNames params = read_typed_list(p.items, 1, p);
                pred.arity = static_cast<int>(params.names.size());
                for (const auto& ty : params.types) intern_type(d, ty);
                if (d.pred_index.count(pred.name))
                    throw ParseError("duplicate predicate '" + pred.name + "'",
                                     p.line, p.col);
                d.pred_index[pred.name] = static_cast<int>(d.predicates.size());
                d.predicates.push_back(pred);
            }
        } else if (h == ":action") {
            DomainIr::ActionIr a;
            a.line = sec.line;
            a.col = sec.col;
            if (sec.items.size() < 2 || !sec.items[1].is_atom())
                throw ParseError("missing action name", sec.line, sec.col);
            a.name = sec.items[1].atom;
            for (std::size_t j = 2; j + 1 < sec.items.size(); j += 2) {
                const std::string& key = sec.items[j].atom;
                const SExpr& val = sec.items[j + 1];
                if (key == ":parameters") {
                    if (!val.is_list)
                        throw ParseError(":parameters expects a list", val.line, val.col);
                    a.params = read_typed_list(val.items, 0, val);
                    for (const auto& ty : a.params.types) intern_type(d, ty);
                } else if (key == ":precondition") {
                    a.precondition = val;
                    a.has_precondition = true;
                } else if (key == ":effect") {
                    a.effect = val;
                } else {
                    throw ParseError("unexpected action keyword '" + key + "'",
                                     sec.items[j].line, sec.items[j].col);
                }
            }
            for (const auto& other : d.actions)
                if (other.name == a.name)
                    throw ParseError("duplicate action '" + a.name + "'", a.line, a.col);
            d.actions.push_back(std::move(a));
        } else if (h == ":functions") {
            throw UnsupportedError("requirement :fluents (:functions section)");
        } else {
            throw ParseError("unexpected domain section '" + h + "'", sec.line, sec.col);
        }
    }
    return d;
}

struct ProblemIr {
    std::string name;
    std::string domain_name;
    TypedNames objects;
    std::vector<SExpr> init;
    std::vector<SExpr> goal;
};

ProblemIr parse_problem(const std::string& text) {
    Lexer lex(text);
    SExpr root = lex.read_expr();
    if (root.head() != "define")
        throw ParseError("expected (define (problem ...))", root.line, root.col);
    if (root.items.size() < 2 || root.items[1].head() != "problem" ||
        root.items[1].items.size() != 2)
        throw ParseError("expected (problem NAME)", root.line, root.col);

    ProblemIr p;
    p.name = root.items[1].items[1].atom;
    for (std::size_t i = 2; i < root.items.size(); ++i) {
        const SExpr& sec = root.items[i];
        const std::string& h = sec.head();
        if (h == ":domain") {
            if (sec.items.size() != 2)
                throw ParseError("expected (:domain NAME)", sec.line, sec.col);
            p.domain_name = sec.items[1].atom;
        } else if (h == ":objects") {
            p.objects = read_typed_list(sec.items, 1, sec);
        } else if (h == ":init") {
            for (std::size_t j = 1; j < sec.items.size(); ++j) p.init.push_back(sec.items[j]);
        } else if (h == ":goal") {
            if (sec.items.size() != 2)
                throw ParseError("expected (:goal CONDITION)", sec.line, sec.col);
            const SExpr& gexp = sec.items[1];
            check_connective(gexp);
            if (gexp.head() == "and") {
                for (std::size_t j = 1; j < gexp.items.size(); ++j) {
                    check_connective(gexp.items[j]);
                    p.goal.push_back(gexp.items[j]);
                }
            } else {
                p.goal.push_back(gexp);
            }
        } else if (h == ":requirements") {
            for (std::size_t j = 1; j < sec.items.size(); ++j) {
                const std::string& r = sec.items[j].atom;
                if (r != ":strips" && r != ":typing")
                    throw UnsupportedError("requirement " + r);
            }
        } else if (h == ":metric") {
            throw UnsupportedError("metric section (:metric)");
        } else {
            throw ParseError("unexpected problem section '" + h + "'", sec.line, sec.col);
        }
    }
    return p;
}

}  // namespace

LiftedTask parse(const std::string& domain_text, const std::string& problem_text) {
    DomainIr dom = parse_domain(domain_text);
    ProblemIr prob = parse_problem(problem_text);
    if (!prob.domain_name.empty() && prob.domain_name != dom.name)
        throw ParseError("problem requires domain '" + prob.domain_name +
                             "' but domain file declares '" + dom.name + "'",
                         1, 1);

    LiftedTask task;
    task.domain_name = dom.name;
    task.problem_name = prob.name;
    task.predicates = dom.predicates;
    task.type_names = dom.type_names;

    // Objects: domain constants first, then problem objects.
    std::unordered_map<std::string, int> obj_index;
    std::vector<int> declared_type;  // direct type id per object, -1 = object
    auto add_object = [&](const std::string& name, const std::string& ty, int line,
                          int col) {
        if (obj_index.count(name))
            throw ParseError("duplicate object '" + name + "'", line, col);
        obj_index[name] = static_cast<int>(task.objects.size());
        task.objects.push_back(name);
        auto it = dom.type_index.find(ty);
        if (!ty.empty() && ty != "object" && it == dom.type_index.end())
            throw ParseError("object '" + name + "' has undeclared type '" + ty + "'",
                             line, col);
        declared_type.push_back(ty.empty() || ty == "object" ? -1 : it->second);
    };
    for (std::size_t i = 0; i < dom.constants.names.size(); ++i)
        add_object(dom.constants.names[i], dom.constants.types[i], 1, 1);
    for (std::size_t i = 0; i < prob.objects.names.size(); ++i)
        add_object(prob.objects.names[i], prob.objects.types[i], 1, 1);

    // Transitive type membership per object.
    task.type_sets.resize(task.objects.size());
    for (std::size_t o = 0; o < task.objects.size(); ++o) {
        int t = declared_type[o];
        int guard = 0;
        while (t >= 0) {
            task.type_sets[o].push_back(t);
            t = dom.type_parent[t];
            if (++guard > static_cast<int>(dom.type_names.size()))
                throw ParseError("cyclic type hierarchy", 1, 1);
        }
    }

    // Compile types into static unary predicates, appended after the
    // declared predicates so declaration order is preserved.
    std::vector<int> type_pred(dom.type_names.size(), -1);
    for (std::size_t t = 0; t < dom.type_names.size(); ++t) {
        if (dom.pred_index.count(dom.type_names[t]))
            throw ParseError("type '" + dom.type_names[t] +
                                 "' collides with a predicate of the same name",
                             1, 1);
        type_pred[t] = static_cast<int>(task.predicates.size());
        task.predicates.push_back(Predicate{dom.type_names[t], 1});
    }
    for (std::size_t o = 0; o < task.objects.size(); ++o)
        for (int t : task.type_sets[o])
            task.init.push_back(Atom{type_pred[t], {static_cast<int>(o)}});

    auto pred_of = [&](const SExpr& e) -> int {
        check_connective(e);
        if (!e.is_list || e.items.empty() || !e.items[0].is_atom())
            throw ParseError("expected an atom", e.line, e.col);
        auto it = dom.pred_index.find(e.items[0].atom);
        if (it == dom.pred_index.end())
            throw ParseError("unknown predicate '" + e.items[0].atom + "'", e.line,
                             e.col);
        if (dom.predicates[it->second].arity !=
            static_cast<int>(e.items.size()) - 1)
            throw ParseError("predicate '" + e.items[0].atom + "' expects " +
                                 std::to_string(dom.predicates[it->second].arity) +
                                 " arguments, got " +
                                 std::to_string(e.items.size() - 1),
                             e.line, e.col);
        return it->second;
    };

    auto ground_atom = [&](const SExpr& e) {
        Atom a;
        a.predicate = pred_of(e);
        for (std::size_t j = 1; j < e.items.size(); ++j) {
            const SExpr& arg = e.items[j];
            if (!arg.is_atom() || arg.atom.empty() || arg.atom[0] == '?')
                throw ParseError("expected an object name", arg.line, arg.col);
            auto it = obj_index.find(arg.atom);
            if (it == obj_index.end())
                throw ParseError("unknown object '" + arg.atom + "'", arg.line, arg.col);
            a.args.push_back(it->second);
        }
        return a;
    };

    for (const auto& e : prob.init) task.init.push_back(ground_atom(e));
    for (const auto& e : prob.goal) task.goal.push_back(ground_atom(e));

    // Action schemas.
    for (const auto& air : dom.actions) {
        ActionSchema schema;
        schema.name = air.name;
        schema.param_count = static_cast<int>(air.params.names.size());
        std::unordered_map<std::string, int> param_index;
        for (int i = 0; i < schema.param_count; ++i) {
            const std::string& pn = air.params.names[i];
            if (pn.empty() || pn[0] != '?')
                throw ParseError("parameter '" + pn + "' must start with '?'",
                                 air.line, air.col);
            if (param_index.count(pn))
                throw ParseError("duplicate parameter '" + pn + "'", air.line, air.col);
            param_index[pn] = i;
            const std::string& ty = air.params.types[i];
            schema.param_types.push_back(
                ty.empty() || ty == "object" ? -1 : dom.type_index.at(ty));
        }

        auto lifted_atom = [&](const SExpr& e) {
            LiftedAtom la;
            la.predicate = pred_of(e);
            for (std::size_t j = 1; j < e.items.size(); ++j) {
                const SExpr& arg = e.items[j];
                if (!arg.is_atom())
                    throw ParseError("expected a term", arg.line, arg.col);
                if (!arg.atom.empty() && arg.atom[0] == '?') {
                    auto it = param_index.find(arg.atom);
                    if (it == param_index.end())
                        throw ParseError("undeclared parameter '" + arg.atom + "'",
                                         arg.line, arg.col);
                    la.terms.push_back(it->second);
                } else {
                    auto it = obj_index.find(arg.atom);
                    if (it == obj_index.end())
                        throw ParseError("unknown constant '" + arg.atom + "'",
                                         arg.line, arg.col);
                    la.terms.push_back(-(it->second + 1));
                }
            }
            return la;
        };

        auto collect_condition = [&](const SExpr& e, std::vector<LiftedAtom>& out) {
            check_connective(e);
            if (e.is_list && e.head() == "and") {
                for (std::size_t j = 1; j < e.items.size(); ++j) {
                    check_connective(e.items[j]);
                    out.push_back(lifted_atom(e.items[j]));
                }
            } else if (e.is_list && e.items.empty()) {
                // empty precondition "()"
            } else {
                out.push_back(lifted_atom(e));
            }
        };

        if (air.has_precondition) collect_condition(air.precondition, schema.pre);

        const SExpr& eff = air.effect;
        auto collect_effect = [&](const SExpr& e) {
            if (e.is_list && e.head() == "not") {
                if (e.items.size() != 2)
                    throw ParseError("(not ...) expects one atom", e.line, e.col);
                check_connective(e.items[1]);
                schema.del.push_back(lifted_atom(e.items[1]));
            } else {
                check_connective(e);
                schema.add.push_back(lifted_atom(e));
            }
        };
        if (eff.is_list && eff.head() == "and") {
            for (std::size_t j = 1; j < eff.items.size(); ++j) collect_effect(eff.items[j]);
        } else if (eff.is_list && !eff.items.empty()) {
            collect_effect(eff);
        } else if (!eff.is_list || !eff.items.empty()) {
            throw ParseError("action '" + schema.name + "' has a malformed effect",
                             air.line, air.col);
        }
        task.actions.push_back(std::move(schema));
    }
    return task;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

LiftedTask parse_files(const std::string& domain_path, const std::string& problem_path) {
    return parse(read_file(domain_path), read_file(problem_path));
}

}  // namespace nsplan
