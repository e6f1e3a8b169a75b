#ifndef NSPLAN_NLM_MAPR_HPP
#define NSPLAN_NLM_MAPR_HPP

#include <vector>

#include "nsplan/strips/task.hpp"
#include "nsplan/tensor/tensor.hpp"

namespace nsplan {

// Multi-arity predicate representation. tensors[n] has shape
// (O, ..., O, C_n) with n object axes; channels are the arity-n predicates
// in declaration order, state block first, then the equally-shaped goal
// block (so C_n is twice the arity-n predicate count).
template <typename T>
struct Mapr {
    std::size_t object_count = 0;
    std::vector<Tensor<T>> tensors;  // index = arity, 0..max_arity

    std::vector<std::size_t> channel_signature() const {
        std::vector<std::size_t> sig;
        for (const auto& t : tensors) sig.push_back(t.shape.back());
        return sig;
    }
};

// Per-arity channel counts (doubled for the goal block) of a task.
inline std::vector<std::size_t> mapr_channels(const GroundTask& task) {
    int max_ar = 0;
    for (const auto& p : task.predicates) max_ar = std::max(max_ar, p.arity);
    std::vector<std::size_t> counts(max_ar + 1, 0);
    for (const auto& p : task.predicates) counts[p.arity] += 2;
    return counts;
}

template <typename T>
Mapr<T> encode(const State& s, const std::vector<int>& goal, const GroundTask& task) {
    const std::size_t nobj = task.object_count();
    std::vector<std::size_t> channels = mapr_channels(task);
    const int max_ar = static_cast<int>(channels.size()) - 1;

    Mapr<T> m;
    m.object_count = nobj;
    for (int n = 0; n <= max_ar; ++n) {
        std::vector<std::size_t> shape(n, nobj);
        shape.push_back(channels[n]);
        m.tensors.emplace_back(shape);
    }

    std::vector<char> goal_mask(task.num_propositions, 0);
    for (int g : goal) goal_mask[g] = 1;

    // Per-arity channel slot of each predicate, in declaration order.
    std::vector<int> slot(task.predicates.size());
    std::vector<int> used(max_ar + 1, 0);
    for (std::size_t p = 0; p < task.predicates.size(); ++p)
        slot[p] = used[task.predicates[p].arity]++;

    for (std::size_t p = 0; p < task.predicates.size(); ++p) {
        const int n = task.predicates[p].arity;
        const std::size_t c = channels[n];
        const std::size_t state_ch = slot[p];
        const std::size_t goal_ch = state_ch + c / 2;
        std::size_t tuples = 1;
        for (int i = 0; i < n; ++i) tuples *= nobj;
        Tensor<T>& z = m.tensors[n];
        // proposition ids and object tuples share the same row-major order
        for (std::size_t t = 0; t < tuples; ++t) {
            std::size_t prop = task.pred_offset[p] + t;
            if (s.test(prop)) z.data[t * c + state_ch] = T(1);
            if (goal_mask[prop]) z.data[t * c + goal_ch] = T(1);
        }
    }
    return m;
}

// Object-relabeled copy: atom arguments o are renamed to pi[o]. Used by
// the permutation-invariance tests.
template <typename T>
Mapr<T> permute_objects(const Mapr<T>& m, const std::vector<std::size_t>& pi) {
    Mapr<T> out;
    out.object_count = m.object_count;
    const std::size_t nobj = m.object_count;
    for (std::size_t n = 0; n < m.tensors.size(); ++n) {
        const Tensor<T>& src = m.tensors[n];
        Tensor<T> dst(src.shape);
        const std::size_t c = src.shape.back();
        std::size_t tuples = src.size() / std::max<std::size_t>(c, 1);
        for (std::size_t t = 0; t < tuples && c > 0; ++t) {
            // decode tuple, apply pi to every coordinate
            std::size_t rest = t, mapped = 0;
            std::vector<std::size_t> coords(n);
            for (std::size_t i = n; i-- > 0;) {
                coords[i] = rest % nobj;
                rest /= nobj;
            }
            for (std::size_t i = 0; i < n; ++i) mapped = mapped * nobj + pi[coords[i]];
            for (std::size_t ch = 0; ch < c; ++ch)
                dst.data[mapped * c + ch] = src.data[t * c + ch];
        }
        out.tensors.push_back(std::move(dst));
    }
    return out;
}

}  // namespace nsplan

#endif
