#ifndef NSPLAN_TENSOR_TAPE_HPP
#define NSPLAN_TENSOR_TAPE_HPP

#include <algorithm>
#include <cstring>
#include <utility>
#include <vector>

#include "nsplan/tensor/kernels.hpp"
#include "nsplan/tensor/tensor.hpp"

namespace nsplan {

// Reverse-mode tape. Ops append nodes in creation order, which is already
// topological; backward() walks it once in reverse. A node id is an index
// into the tape and stays valid until clear().
template <typename T>
class Tape {
public:
    enum class Op {
        leaf,
        matmul,      // parents: x, w, b
        concat,      // parents: inputs, concatenated on the last axis
        permute,     // gather map saved in idx
        max_reduce,  // argmax positions saved in idx
        broadcast,   // dims: pre, extent, post
        sigmoid,
        sum_all,
        mse          // saved: target; scalar output
    };

    int leaf(Tensor<T> t, bool requires_grad = false) {
        return push(Op::leaf, {}, std::move(t), requires_grad);
    }
    int param(Tensor<T> t) { return leaf(std::move(t), true); }

    // x: (..., K), w: (K, Q), b: (Q) -> (..., Q)
    int matmul_lastaxis(int x, int w, int b) {
        const Tensor<T>& xv = value(x);
        const Tensor<T>& wv = value(w);
        const Tensor<T>& bv = value(b);
        if (wv.ndim() != 2)
            throw ShapeError("matmul: weight must be 2-d, got " + shape_str(wv.shape));
        std::size_t k = wv.shape[0], q = wv.shape[1];
        if (xv.last_extent() != k)
            throw ShapeError("matmul: input " + shape_str(xv.shape) +
                             " incompatible with weight " + shape_str(wv.shape));
        if (bv.size() != q)
            throw ShapeError("matmul: bias " + shape_str(bv.shape) +
                             " incompatible with weight " + shape_str(wv.shape));
        std::vector<std::size_t> oshape = xv.shape;
        if (oshape.empty()) oshape = {1};
        oshape.back() = q;
        Tensor<T> out(oshape);
        kernels::isize rows = k == 0 ? static_cast<kernels::isize>(out.size() / q)
                                     : static_cast<kernels::isize>(xv.size() / k);
        kernels::matmul_forward(xv.data.data(), rows, static_cast<kernels::isize>(k),
                                wv.data.data(), static_cast<kernels::isize>(q),
                                bv.data.data(), out.data.data());
        int id = push(Op::matmul, {x, w, b}, std::move(out));
        node(id).dims = {rows, static_cast<kernels::isize>(k),
                         static_cast<kernels::isize>(q)};
        return id;
    }

    int concat_lastaxis(const std::vector<int>& xs) {
        if (xs.empty()) throw ShapeError("concat: no inputs");
        if (xs.size() == 1) return xs[0];
        std::vector<std::size_t> lead = value(xs[0]).shape;
        if (lead.empty()) lead = {0};
        lead.pop_back();
        std::size_t channels = 0;
        for (int x : xs) {
            const auto& v = value(x);
            std::vector<std::size_t> l = v.shape;
            if (l.empty())
                throw ShapeError("concat: scalar input");
            l.pop_back();
            if (l != lead)
                throw ShapeError("concat: leading shape mismatch between " +
                                 shape_str(value(xs[0]).shape) + " and " +
                                 shape_str(v.shape));
            channels += v.shape.back();
        }
        std::vector<std::size_t> oshape = value(xs[0]).shape;
        oshape.back() = channels;
        Tensor<T> out(oshape);
        std::size_t rows = channels == 0 ? 0 : out.size() / channels;
        std::size_t off = 0;
        for (int x : xs) {
            const auto& v = value(x);
            std::size_t c = v.shape.back();
            for (std::size_t r = 0; r < rows; ++r)
                std::memcpy(out.data.data() + r * channels + off,
                            v.data.data() + r * c, c * sizeof(T));
            off += c;
        }
        return push(Op::concat, xs, std::move(out));
    }

    // out.shape[j] = in.shape[perm[j]]; out[i0,..] = in[i_perm[0]],...
    int permute_axes(int x, const std::vector<std::size_t>& perm) {
        const Tensor<T>& xv = value(x);
        if (perm.size() != xv.ndim())
            throw ShapeError("permute: order size " + std::to_string(perm.size()) +
                             " vs tensor " + shape_str(xv.shape));
        std::vector<std::size_t> oshape(perm.size());
        for (std::size_t j = 0; j < perm.size(); ++j) oshape[j] = xv.shape[perm[j]];
        std::vector<std::size_t> istr = strides_of(xv.shape);
        std::vector<std::size_t> ostr = strides_of(oshape);
        Tensor<T> out(oshape);
        std::vector<std::size_t> src(out.size());
        for (std::size_t i = 0; i < out.size(); ++i) {
            std::size_t rest = i, s = 0;
            for (std::size_t j = 0; j < perm.size(); ++j) {
                std::size_t coord = rest / ostr[j];
                rest %= ostr[j];
                s += coord * istr[perm[j]];
            }
            src[i] = s;
        }
        kernels::gather(xv.data.data(), src.data(),
                        static_cast<kernels::isize>(out.size()), out.data.data());
        int id = push(Op::permute, {x}, std::move(out));
        node(id).idx = std::move(src);
        return id;
    }

    int max_reduce_axis(int x, int axis) {
        const Tensor<T>& xv = value(x);
        if (axis < 0 || static_cast<std::size_t>(axis) >= xv.ndim())
            throw ShapeError("max_reduce: axis " + std::to_string(axis) +
                             " out of range for " + shape_str(xv.shape));
        std::size_t pre = 1, post = 1;
        for (int j = 0; j < axis; ++j) pre *= xv.shape[j];
        for (std::size_t j = axis + 1; j < xv.ndim(); ++j) post *= xv.shape[j];
        std::size_t m = xv.shape[axis];
        if (m == 0) throw ShapeError("max_reduce over empty axis of " + shape_str(xv.shape));
        std::vector<std::size_t> oshape = xv.shape;
        oshape.erase(oshape.begin() + axis);
        Tensor<T> out(oshape);
        std::vector<std::size_t> argmax(out.size());
        kernels::max_reduce_forward(xv.data.data(), static_cast<kernels::isize>(pre),
                                    static_cast<kernels::isize>(m),
                                    static_cast<kernels::isize>(post),
                                    out.data.data(), argmax.data());
        int id = push(Op::max_reduce, {x}, std::move(out));
        node(id).idx = std::move(argmax);
        return id;
    }

    // Inserts a new axis of the given extent at position `axis`.
    int broadcast_expand(int x, int axis, std::size_t extent) {
        const Tensor<T>& xv = value(x);
        if (axis < 0 || static_cast<std::size_t>(axis) > xv.ndim())
            throw ShapeError("broadcast: axis " + std::to_string(axis) +
                             " out of range for " + shape_str(xv.shape));
        std::size_t pre = 1, post = 1;
        for (int j = 0; j < axis; ++j) pre *= xv.shape[j];
        for (std::size_t j = axis; j < xv.ndim(); ++j) post *= xv.shape[j];
        std::vector<std::size_t> oshape = xv.shape;
        oshape.insert(oshape.begin() + axis, extent);
        Tensor<T> out(oshape);
        kernels::broadcast_forward(xv.data.data(), static_cast<kernels::isize>(pre),
                                   static_cast<kernels::isize>(extent),
                                   static_cast<kernels::isize>(post), out.data.data());
        int id = push(Op::broadcast, {x}, std::move(out));
        node(id).dims = {static_cast<kernels::isize>(pre),
                         static_cast<kernels::isize>(extent),
                         static_cast<kernels::isize>(post)};
        return id;
    }

    int sigmoid(int x) {
        const Tensor<T>& xv = value(x);
        Tensor<T> out(xv.shape);
        kernels::sigmoid_forward(xv.data.data(), static_cast<kernels::isize>(xv.size()),
                                 out.data.data());
        return push(Op::sigmoid, {x}, std::move(out));
    }

    int sum_all(int x) {
        const Tensor<T>& xv = value(x);
        T acc = T(0);
        for (const T& v : xv.data) acc += v;
        Tensor<T> out(std::vector<std::size_t>{}, std::vector<T>{acc});
        return push(Op::sum_all, {x}, std::move(out));
    }

    // Half mean squared error: sum((pred - target)^2) / (2 n).
    int mse_loss(int pred, const Tensor<T>& target) {
        const Tensor<T>& pv = value(pred);
        if (pv.shape != target.shape)
            throw ShapeError("mse: prediction " + shape_str(pv.shape) +
                             " vs target " + shape_str(target.shape));
        if (pv.size() == 0) throw ShapeError("mse: empty prediction");
        T acc = T(0);
        for (std::size_t i = 0; i < pv.size(); ++i) {
            T d = pv.data[i] - target.data[i];
            acc += d * d;
        }
        acc /= T(2) * T(pv.size());
        Tensor<T> out(std::vector<std::size_t>{}, std::vector<T>{acc});
        int id = push(Op::mse, {pred}, std::move(out));
        node(id).saved = target.data;
        return id;
    }

    const Tensor<T>& value(int id) const { return nodes_[id].value; }
    std::size_t size() const { return nodes_.size(); }
    void clear() { nodes_.clear(); }

    // Vector-Jacobian products for `wanted` nodes, seeded with d(loss)=1.
    // The loss must be scalar. Nodes unreachable from the loss get zeros.
    std::vector<Tensor<T>> backward(int loss, const std::vector<int>& wanted) {
        if (value(loss).size() != 1)
            throw ShapeError("backward: loss must be scalar, got " +
                             shape_str(value(loss).shape));
        std::vector<std::vector<T>> grad(nodes_.size());
        grad[loss].assign(1, T(1));

        for (int i = loss; i >= 0; --i) {
            if (grad[i].empty()) continue;
            Node& n = nodes_[i];
            const T* dy = grad[i].data();
            switch (n.op) {
                case Op::leaf:
                    break;
                case Op::matmul: {
                    auto [rows, k, q] = std::tuple(n.dims[0], n.dims[1], n.dims[2]);
                    int x = n.parents[0], w = n.parents[1], b = n.parents[2];
                    if (nodes_[x].needs)
                        kernels::matmul_backward_x(dy, nodes_[w].value.data.data(),
                                                   rows, k, q, grad_buf(grad, x));
                    if (nodes_[w].needs)
                        kernels::matmul_backward_w(nodes_[x].value.data.data(), dy,
                                                   rows, k, q, grad_buf(grad, w));
                    if (nodes_[b].needs)
                        kernels::matmul_backward_b(dy, rows, q, grad_buf(grad, b));
                    break;
                }
                case Op::concat: {
                    std::size_t channels = n.value.shape.back();
                    std::size_t rows = channels == 0 ? 0 : n.value.size() / channels;
                    std::size_t off = 0;
                    for (int p : n.parents) {
                        std::size_t c = nodes_[p].value.shape.back();
                        if (nodes_[p].needs) {
                            T* dx = grad_buf(grad, p);
                            for (std::size_t r = 0; r < rows; ++r)
                                for (std::size_t j = 0; j < c; ++j)
                                    dx[r * c + j] += dy[r * channels + off + j];
                        }
                        off += c;
                    }
                    break;
                }
                case Op::permute: {
                    int x = n.parents[0];
                    if (nodes_[x].needs)
                        kernels::scatter_add(dy, n.idx.data(),
                                             static_cast<kernels::isize>(n.value.size()),
                                             grad_buf(grad, x));
                    break;
                }
                case Op::max_reduce: {
                    int x = n.parents[0];
                    if (nodes_[x].needs) {
                        T* dx = grad_buf(grad, x);
                        for (std::size_t j = 0; j < n.value.size(); ++j)
                            dx[n.idx[j]] += dy[j];
                    }
                    break;
                }
                case Op::broadcast: {
                    int x = n.parents[0];
                    if (nodes_[x].needs)
                        kernels::broadcast_backward(dy, n.dims[0], n.dims[1], n.dims[2],
                                                    grad_buf(grad, x));
                    break;
                }
                case Op::sigmoid: {
                    int x = n.parents[0];
                    if (nodes_[x].needs)
                        kernels::sigmoid_backward(n.value.data.data(), dy,
                                                  static_cast<kernels::isize>(n.value.size()),
                                                  grad_buf(grad, x));
                    break;
                }
                case Op::sum_all: {
                    int x = n.parents[0];
                    if (nodes_[x].needs) {
                        T* dx = grad_buf(grad, x);
                        for (std::size_t j = 0; j < nodes_[x].value.size(); ++j)
                            dx[j] += dy[0];
                    }
                    break;
                }
                case Op::mse: {
                    int x = n.parents[0];
                    if (nodes_[x].needs) {
                        T* dx = grad_buf(grad, x);
                        const auto& pv = nodes_[x].value.data;
                        T scale = dy[0] / T(pv.size());
                        for (std::size_t j = 0; j < pv.size(); ++j)
                            dx[j] += scale * (pv[j] - n.saved[j]);
                    }
                    break;
                }
            }
        }

        std::vector<Tensor<T>> out;
        out.reserve(wanted.size());
        for (int w : wanted) {
            Tensor<T> g(nodes_[w].value.shape);
            if (!grad[w].empty()) g.data = std::move(grad[w]);
            out.push_back(std::move(g));
        }
        return out;
    }

private:
    struct Node {
        Op op;
        std::vector<int> parents;
        Tensor<T> value;
        std::vector<std::size_t> idx;
        std::vector<T> saved;
        std::vector<kernels::isize> dims;
        bool needs = false;
    };

    Node& node(int id) { return nodes_[id]; }

    int push(Op op, std::vector<int> parents, Tensor<T> value, bool requires_grad = false) {
        Node n;
        n.op = op;
        n.parents = std::move(parents);
        n.value = std::move(value);
        n.needs = requires_grad;
        for (int p : n.parents) n.needs = n.needs || nodes_[p].needs;
        nodes_.push_back(std::move(n));
        return static_cast<int>(nodes_.size()) - 1;
    }

    T* grad_buf(std::vector<std::vector<T>>& grad, int id) {
        if (grad[id].empty()) grad[id].assign(nodes_[id].value.size(), T(0));
        return grad[id].data();
    }

    std::vector<Node> nodes_;
};

}  // namespace nsplan

#endif
