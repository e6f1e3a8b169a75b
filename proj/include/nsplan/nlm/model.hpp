#ifndef NSPLAN_NLM_MODEL_HPP
#define NSPLAN_NLM_MODEL_HPP

#include <random>
#include <string>
#include <vector>

#include "nsplan/nlm/mapr.hpp"
#include "nsplan/tensor/tape.hpp"

namespace nsplan {

// Layer arities of an NLM: starts at the input arity N, may widen up to M,
// and must shrink to 0 at the last layer, changing by at most one per
// layer. a_l = min(M, N + (l-1), L - l) reproduces (2,3,3,3,2,1,0) for
// (N,M,L) = (2,3,7).
struct AritySchedule {
    int input_arity = 0;   // N
    int max_arity = 0;     // M
    int layers = 0;        // L
    std::vector<int> arity;

    static AritySchedule make(int n, int m, int l) {
        if (!(n <= m && m <= l))
            throw TaskError("arity schedule requires N <= M <= L, got N=" +
                            std::to_string(n) + " M=" + std::to_string(m) +
                            " L=" + std::to_string(l));
        if (l < n + 1)
            throw TaskError("arity schedule requires L >= N + 1 to reach arity 0");
        AritySchedule s;
        s.input_arity = n;
        s.max_arity = m;
        s.layers = l;
        for (int i = 1; i <= l; ++i)
            s.arity.push_back(std::min(std::min(m, n + (i - 1)), l - i));
        return s;
    }
};

template <typename T>
struct NlmUnit {
    Tensor<T> weight;  // (n! * C_in, Q)
    Tensor<T> bias;    // (Q)
};

// Value-function network over MAPRs. Weight shapes depend only on the
// predicate signature and the schedule, never on the object count.
template <typename T>
struct NlmModel {
    AritySchedule schedule;
    int features = 8;  // Q
    std::vector<std::size_t> input_channels;  // per arity 0..N, goal-doubled
    std::vector<std::vector<NlmUnit<T>>> units;  // [layer][arity]
    double gamma = 0.999999;
    double tau = 1.0;
    std::string shaping = "none";  // none | hadd | hff
    std::string perm_order = "lex";
    uint64_t fingerprint = 0;

    std::vector<Tensor<T>*> parameters() {
        std::vector<Tensor<T>*> out;
        for (auto& layer : units)
            for (auto& u : layer) {
                out.push_back(&u.weight);
                out.push_back(&u.bias);
            }
        return out;
    }
};

namespace detail {

inline std::size_t factorial(int n) {
    std::size_t f = 1;
    for (int i = 2; i <= n; ++i) f *= static_cast<std::size_t>(i);
    return f;
}

// Aggregate channel counts per arity before each layer (dense skip
// connections: the encoded input plus every previous layer's outputs).
struct ChannelPlan {
    int max_arity = 0;                              // largest arity ever present
    std::vector<std::vector<std::size_t>> in_ch;    // [layer][arity 0..a_l]
};

inline ChannelPlan channel_plan(const std::vector<std::size_t>& input_channels,
                                const AritySchedule& s, int q) {
    ChannelPlan plan;
    plan.max_arity = static_cast<int>(input_channels.size()) - 1;
    for (int a : s.arity) plan.max_arity = std::max(plan.max_arity, a);
    std::vector<std::size_t> agg(plan.max_arity + 1, 0);
    for (std::size_t n = 0; n < input_channels.size(); ++n) agg[n] = input_channels[n];
    for (int l = 0; l < s.layers; ++l) {
        int top = s.arity[l];
        std::vector<std::size_t> row(top + 1, 0);
        for (int n = 0; n <= top; ++n) {
            std::size_t c = agg[n];
            if (n > 0) c += agg[n - 1];
            if (n + 1 <= plan.max_arity) c += agg[n + 1];
            row[n] = c;
        }
        plan.in_ch.push_back(std::move(row));
        std::size_t out = l + 1 == s.layers ? 1 : static_cast<std::size_t>(q);
        for (int n = 0; n <= top; ++n) agg[n] += out;
    }
    return plan;
}

// Permutations of {0..n-1} in lexicographic one-line order.
inline std::vector<std::vector<std::size_t>> lex_permutations(int n) {
    std::vector<std::size_t> p(n);
    for (int i = 0; i < n; ++i) p[i] = static_cast<std::size_t>(i);
    std::vector<std::vector<std::size_t>> out;
    do {
        out.push_back(p);
    } while (std::next_permutation(p.begin(), p.end()));
    return out;
}

inline double unit_uniform(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace detail

// Builds an initialized model from a predicate signature. Glorot-uniform
// weights, zero biases; the final layer is a single linear feature.
template <typename T>
NlmModel<T> build_nlm(const std::vector<std::size_t>& input_channels,
                      uint64_t fingerprint, int max_arity, int layers, int features,
                      double gamma, double tau, const std::string& shaping,
                      std::mt19937_64& rng) {
    const int n = static_cast<int>(input_channels.size()) - 1;
    NlmModel<T> model;
    model.schedule = AritySchedule::make(n, std::max(n, max_arity), layers);
    model.features = features;
    model.input_channels = input_channels;
    model.gamma = gamma;
    model.tau = tau;
    model.shaping = shaping;
    model.fingerprint = fingerprint;

    detail::ChannelPlan plan = detail::channel_plan(input_channels, model.schedule, features);
    for (int l = 0; l < model.schedule.layers; ++l) {
        const bool last = l + 1 == model.schedule.layers;
        const std::size_t q = last ? 1 : static_cast<std::size_t>(features);
        std::vector<NlmUnit<T>> layer;
        for (int a = 0; a <= model.schedule.arity[l]; ++a) {
            const std::size_t rows = detail::factorial(a) * plan.in_ch[l][a];
            NlmUnit<T> unit;
            unit.weight = Tensor<T>({rows, q});
            unit.bias = Tensor<T>({q});
            const double bound = std::sqrt(6.0 / static_cast<double>(rows + q));
            for (auto& w : unit.weight.data)
                w = T((2.0 * detail::unit_uniform(rng) - 1.0) * bound);
            layer.push_back(std::move(unit));
        }
        model.units.push_back(std::move(layer));
    }
    return model;
}

template <typename T>
NlmModel<T> build_nlm(const GroundTask& task, int max_arity, int layers, int features,
                      double gamma, double tau, const std::string& shaping,
                      std::mt19937_64& rng) {
    return build_nlm<T>(mapr_channels(task), task.signature_fingerprint(), max_arity,
                        layers, features, gamma, tau, shaping, rng);
}

// Tape node ids of the model weights, so a trainer can register them once
// per tape (with gradients) and reuse them across a mini-batch.
struct NlmParamIds {
    std::vector<std::vector<std::pair<int, int>>> ids;  // [layer][arity] -> (w, b)
    bool empty() const { return ids.empty(); }
};

template <typename T>
NlmParamIds register_params(Tape<T>& tape, const NlmModel<T>& model) {
    NlmParamIds out;
    for (const auto& layer : model.units) {
        std::vector<std::pair<int, int>> row;
        for (const auto& u : layer)
            row.push_back({tape.param(u.weight), tape.param(u.bias)});
        out.ids.push_back(std::move(row));
    }
    return out;
}

// Runs the NLM on an encoded state: per layer, compose each arity from its
// neighbors in the running aggregate (expand from below, reduce from
// above), apply Perm and the shared pointwise map, sigmoid except at the
// output. Returns the node id of the scalar (arity-0, 1 channel) output.
template <typename T>
int nlm_forward(Tape<T>& tape, const NlmModel<T>& model, const Mapr<T>& mapr,
                const NlmParamIds* params = nullptr) {
    if (mapr.channel_signature() != model.input_channels)
        throw ShapeError("mapr channel signature does not match the model: task " +
                         shape_str(mapr.channel_signature()) + " vs model " +
                         shape_str(model.input_channels));
    const std::size_t nobj = mapr.object_count;
    detail::ChannelPlan plan =
        detail::channel_plan(model.input_channels, model.schedule, model.features);

    // Aggregate node lists per arity; concatenated lazily per use.
    std::vector<std::vector<int>> agg(plan.max_arity + 1);
    for (std::size_t n = 0; n < mapr.tensors.size(); ++n)
        if (mapr.tensors[n].shape.back() > 0)
            agg[n].push_back(tape.leaf(mapr.tensors[n]));

    auto concat_agg = [&](int n) -> int {
        return tape.concat_lastaxis(agg[n]);  // single-element lists collapse
    };

    int out_node = -1;
    for (int l = 0; l < model.schedule.layers; ++l) {
        const bool last = l + 1 == model.schedule.layers;
        const int top = model.schedule.arity[l];
        std::vector<std::pair<int, int>> produced;  // (arity, node)
        for (int n = 0; n <= top; ++n) {
            std::vector<int> parts;
            if (n > 0 && !agg[n - 1].empty())
                parts.push_back(tape.broadcast_expand(concat_agg(n - 1), n - 1, nobj));
            if (!agg[n].empty()) parts.push_back(concat_agg(n));
            if (n + 1 <= plan.max_arity && !agg[n + 1].empty()) {
                int upper = concat_agg(n + 1);
                if (nobj == 0) {
                    // exists over an empty object set is false
                    std::vector<std::size_t> shape(n, nobj);
                    shape.push_back(tape.value(upper).shape.back());
                    parts.push_back(tape.leaf(Tensor<T>(shape)));
                } else {
                    parts.push_back(tape.max_reduce_axis(upper, n));
                }
            }

            int x;
            if (parts.empty()) {
                // no informative input at this arity yet: bias-only unit
                std::vector<std::size_t> shape(n, nobj);
                shape.push_back(0);
                x = tape.leaf(Tensor<T>(shape));
            } else {
                x = tape.concat_lastaxis(parts);
            }

            if (n >= 2 && tape.value(x).shape.back() > 0) {
                std::vector<int> perms;
                for (const auto& pi : detail::lex_permutations(n)) {
                    std::vector<std::size_t> axes = pi;
                    axes.push_back(static_cast<std::size_t>(n));  // channel axis fixed
                    perms.push_back(tape.permute_axes(x, axes));
                }
                x = tape.concat_lastaxis(perms);
            }

            int w, b;
            if (params) {
                w = params->ids[l][n].first;
                b = params->ids[l][n].second;
            } else {
                w = tape.leaf(model.units[l][n].weight);
                b = tape.leaf(model.units[l][n].bias);
            }
            int y = tape.matmul_lastaxis(x, w, b);
            if (!last) y = tape.sigmoid(y);
            produced.push_back({n, y});
        }
        for (auto [n, y] : produced) agg[n].push_back(y);
        if (last) out_node = produced[0].second;
    }
    return out_node;
}

// Convenience: scalar network output for one state encoding.
template <typename T>
T nlm_value(const NlmModel<T>& model, const Mapr<T>& mapr) {
    Tape<T> tape;
    int out = nlm_forward(tape, model, mapr);
    return tape.value(out).data[0];
}

}  // namespace nsplan

#endif
