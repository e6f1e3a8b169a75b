#ifndef NSPLAN_TENSOR_ADAM_HPP
#define NSPLAN_TENSOR_ADAM_HPP

#include <cmath>
#include <vector>

#include "nsplan/tensor/tensor.hpp"

namespace nsplan {

// Adam with bias correction. Moment tensors are aligned index-for-index
// with the parameter list handed to init().
template <typename T>
struct AdamState {
    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    long step = 0;
    std::vector<Tensor<T>> m;
    std::vector<Tensor<T>> v;

    void init(const std::vector<Tensor<T>*>& params) {
        m.clear();
        v.clear();
        for (const Tensor<T>* p : params) {
            m.emplace_back(p->shape);
            v.emplace_back(p->shape);
        }
        step = 0;
    }

    void update(const std::vector<Tensor<T>*>& params,
                const std::vector<Tensor<T>>& grads) {
        if (params.size() != grads.size() || params.size() != m.size())
            throw ShapeError("adam: parameter/gradient count mismatch");
        ++step;
        const T b1 = T(beta1), b2 = T(beta2);
        const T c1 = T(1) - T(std::pow(beta1, static_cast<double>(step)));
        const T c2 = T(1) - T(std::pow(beta2, static_cast<double>(step)));
        for (std::size_t i = 0; i < params.size(); ++i) {
            Tensor<T>& p = *params[i];
            const Tensor<T>& g = grads[i];
            if (p.shape != g.shape)
                throw ShapeError("adam: parameter " + shape_str(p.shape) +
                                 " vs gradient " + shape_str(g.shape));
            for (std::size_t j = 0; j < p.size(); ++j) {
                m[i][j] = b1 * m[i][j] + (T(1) - b1) * g[j];
                v[i][j] = b2 * v[i][j] + (T(1) - b2) * g[j] * g[j];
                T mhat = m[i][j] / c1;
                T vhat = v[i][j] / c2;
                p[j] -= T(lr) * mhat / (std::sqrt(vhat) + T(eps));
            }
        }
    }
};

}  // namespace nsplan

#endif
