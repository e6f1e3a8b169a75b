#ifndef NSPLAN_TENSOR_KERNELS_HPP
#define NSPLAN_TENSOR_KERNELS_HPP

#include <cstddef>
#include <cstdint>
#include <vector>

// Dense kernels behind the tape ops. Every kernel exists twice: a serial
// reference implementation and an OpenMP variant. The parallel loops split
// only across independent output elements, with any reduction kept serial
// inside one iteration, so results are bit-identical to the serial kernels
// for every thread count. The dispatchers pick the OpenMP variant once the
// element work crosses kParGrain.

namespace nsplan::kernels {

inline constexpr std::size_t kParGrain = 16384;

using isize = std::int64_t;

// ---------------------------------------------------------------- serial
namespace serial {

template <typename T>
void matmul_forward(const T* x, isize rows, isize k, const T* w, isize q,
                    const T* b, T* y) {
    for (isize r = 0; r < rows; ++r)
        for (isize j = 0; j < q; ++j) {
            T acc = b[j];
            for (isize i = 0; i < k; ++i) acc += x[r * k + i] * w[i * q + j];
            y[r * q + j] = acc;
        }
}

template <typename T>
void matmul_backward_x(const T* dy, const T* w, isize rows, isize k, isize q,
                       T* dx) {
    for (isize r = 0; r < rows; ++r)
        for (isize i = 0; i < k; ++i) {
            T acc = T(0);
            for (isize j = 0; j < q; ++j) acc += dy[r * q + j] * w[i * q + j];
            dx[r * k + i] += acc;
        }
}

template <typename T>
void matmul_backward_w(const T* x, const T* dy, isize rows, isize k, isize q,
                       T* dw) {
    for (isize i = 0; i < k; ++i)
        for (isize j = 0; j < q; ++j) {
            T acc = T(0);
            for (isize r = 0; r < rows; ++r) acc += x[r * k + i] * dy[r * q + j];
            dw[i * q + j] += acc;
        }
}

template <typename T>
void matmul_backward_b(const T* dy, isize rows, isize q, T* db) {
    for (isize j = 0; j < q; ++j) {
        T acc = T(0);
        for (isize r = 0; r < rows; ++r) acc += dy[r * q + j];
        db[j] += acc;
    }
}

template <typename T>
void sigmoid_forward(const T* x, isize n, T* y);

template <typename T>
void sigmoid_backward(const T* y, const T* dy, isize n, T* dx) {
    for (isize i = 0; i < n; ++i) dx[i] += dy[i] * y[i] * (T(1) - y[i]);
}

// out[pre, post] = max over m of in[pre, m, post]; argmax keeps the first
// (lowest-index) maximum.
template <typename T>
void max_reduce_forward(const T* x, isize pre, isize m, isize post, T* y,
                        std::size_t* argmax) {
    for (isize p = 0; p < pre; ++p)
        for (isize s = 0; s < post; ++s) {
            std::size_t best = static_cast<std::size_t>((p * m) * post + s);
            T bv = x[best];
            for (isize i = 1; i < m; ++i) {
                std::size_t idx = static_cast<std::size_t>((p * m + i) * post + s);
                if (x[idx] > bv) {
                    bv = x[idx];
                    best = idx;
                }
            }
            y[p * post + s] = bv;
            argmax[p * post + s] = best;
        }
}

// out[pre, e, post] = in[pre, post]
template <typename T>
void broadcast_forward(const T* x, isize pre, isize extent, isize post, T* y) {
    for (isize p = 0; p < pre; ++p)
        for (isize e = 0; e < extent; ++e)
            for (isize s = 0; s < post; ++s)
                y[(p * extent + e) * post + s] = x[p * post + s];
}

template <typename T>
void broadcast_backward(const T* dy, isize pre, isize extent, isize post, T* dx) {
    for (isize p = 0; p < pre; ++p)
        for (isize s = 0; s < post; ++s) {
            T acc = T(0);
            for (isize e = 0; e < extent; ++e)
                acc += dy[(p * extent + e) * post + s];
            dx[p * post + s] += acc;
        }
}

// Gathers out[i] = in[src[i]] (used by axis permutation).
template <typename T>
void gather(const T* x, const std::size_t* src, isize n, T* y) {
    for (isize i = 0; i < n; ++i) y[i] = x[src[i]];
}

template <typename T>
void scatter_add(const T* dy, const std::size_t* src, isize n, T* dx) {
    for (isize i = 0; i < n; ++i) dx[src[i]] += dy[i];
}

}  // namespace serial

// ---------------------------------------------------------------- OpenMP
namespace par {

template <typename T>
void matmul_forward(const T* x, isize rows, isize k, const T* w, isize q,
                    const T* b, T* y) {
#pragma omp parallel for schedule(static)
    for (isize r = 0; r < rows; ++r)
        for (isize j = 0; j < q; ++j) {
            T acc = b[j];
            for (isize i = 0; i < k; ++i) acc += x[r * k + i] * w[i * q + j];
            y[r * q + j] = acc;
        }
}

template <typename T>
void matmul_backward_x(const T* dy, const T* w, isize rows, isize k, isize q,
                       T* dx) {
#pragma omp parallel for schedule(static)
    for (isize r = 0; r < rows; ++r)
        for (isize i = 0; i < k; ++i) {
            T acc = T(0);
            for (isize j = 0; j < q; ++j) acc += dy[r * q + j] * w[i * q + j];
            dx[r * k + i] += acc;
        }
}

template <typename T>
void matmul_backward_w(const T* x, const T* dy, isize rows, isize k, isize q,
                       T* dw) {
#pragma omp parallel for schedule(static)
    for (isize i = 0; i < k; ++i)
        for (isize j = 0; j < q; ++j) {
            T acc = T(0);
            for (isize r = 0; r < rows; ++r) acc += x[r * k + i] * dy[r * q + j];
            dw[i * q + j] += acc;
        }
}

template <typename T>
void matmul_backward_b(const T* dy, isize rows, isize q, T* db) {
#pragma omp parallel for schedule(static)
    for (isize j = 0; j < q; ++j) {
        T acc = T(0);
        for (isize r = 0; r < rows; ++r) acc += dy[r * q + j];
        db[j] += acc;
    }
}

template <typename T>
void sigmoid_forward(const T* x, isize n, T* y);

template <typename T>
void sigmoid_backward(const T* y, const T* dy, isize n, T* dx) {
#pragma omp parallel for schedule(static)
    for (isize i = 0; i < n; ++i) dx[i] += dy[i] * y[i] * (T(1) - y[i]);
}

template <typename T>
void max_reduce_forward(const T* x, isize pre, isize m, isize post, T* y,
                        std::size_t* argmax) {
#pragma omp parallel for schedule(static)
    for (isize p = 0; p < pre; ++p)
        for (isize s = 0; s < post; ++s) {
            std::size_t best = static_cast<std::size_t>((p * m) * post + s);
            T bv = x[best];
            for (isize i = 1; i < m; ++i) {
                std::size_t idx = static_cast<std::size_t>((p * m + i) * post + s);
                if (x[idx] > bv) {
                    bv = x[idx];
                    best = idx;
                }
            }
            y[p * post + s] = bv;
            argmax[p * post + s] = best;
        }
}

template <typename T>
void broadcast_forward(const T* x, isize pre, isize extent, isize post, T* y) {
#pragma omp parallel for schedule(static)
    for (isize p = 0; p < pre; ++p)
        for (isize e = 0; e < extent; ++e)
            for (isize s = 0; s < post; ++s)
                y[(p * extent + e) * post + s] = x[p * post + s];
}

template <typename T>
void broadcast_backward(const T* dy, isize pre, isize extent, isize post, T* dx) {
#pragma omp parallel for schedule(static)
    for (isize p = 0; p < pre; ++p)
        for (isize s = 0; s < post; ++s) {
            T acc = T(0);
            for (isize e = 0; e < extent; ++e)
                acc += dy[(p * extent + e) * post + s];
            dx[p * post + s] += acc;
        }
}

template <typename T>
void gather(const T* x, const std::size_t* src, isize n, T* y) {
#pragma omp parallel for schedule(static)
    for (isize i = 0; i < n; ++i) y[i] = x[src[i]];
}

template <typename T>
void scatter_add(const T* dy, const std::size_t* src, isize n, T* dx) {
    // src is a permutation here (targets are distinct), so parallel
    // iterations never collide.
#pragma omp parallel for schedule(static)
    for (isize i = 0; i < n; ++i) dx[src[i]] += dy[i];
}

}  // namespace par

// ------------------------------------------------------------- dispatch

template <typename T>
void matmul_forward(const T* x, isize rows, isize k, const T* w, isize q,
                    const T* b, T* y) {
    if (static_cast<std::size_t>(rows * k * q) >= kParGrain)
        par::matmul_forward(x, rows, k, w, q, b, y);
    else
        serial::matmul_forward(x, rows, k, w, q, b, y);
}

template <typename T>
void matmul_backward_x(const T* dy, const T* w, isize rows, isize k, isize q, T* dx) {
    if (static_cast<std::size_t>(rows * k * q) >= kParGrain)
        par::matmul_backward_x(dy, w, rows, k, q, dx);
    else
        serial::matmul_backward_x(dy, w, rows, k, q, dx);
}

template <typename T>
void matmul_backward_w(const T* x, const T* dy, isize rows, isize k, isize q, T* dw) {
    if (static_cast<std::size_t>(rows * k * q) >= kParGrain)
        par::matmul_backward_w(x, dy, rows, k, q, dw);
    else
        serial::matmul_backward_w(x, dy, rows, k, q, dw);
}

template <typename T>
void matmul_backward_b(const T* dy, isize rows, isize q, T* db) {
    if (static_cast<std::size_t>(rows * q) >= kParGrain)
        par::matmul_backward_b(dy, rows, q, db);
    else
        serial::matmul_backward_b(dy, rows, q, db);
}

template <typename T>
void sigmoid_forward(const T* x, isize n, T* y) {
    if (static_cast<std::size_t>(n) >= kParGrain)
        par::sigmoid_forward(x, n, y);
    else
        serial::sigmoid_forward(x, n, y);
}

template <typename T>
void sigmoid_backward(const T* y, const T* dy, isize n, T* dx) {
    if (static_cast<std::size_t>(n) >= kParGrain)
        par::sigmoid_backward(y, dy, n, dx);
    else
        serial::sigmoid_backward(y, dy, n, dx);
}

template <typename T>
void max_reduce_forward(const T* x, isize pre, isize m, isize post, T* y,
                        std::size_t* argmax) {
    if (static_cast<std::size_t>(pre * m * post) >= kParGrain)
        par::max_reduce_forward(x, pre, m, post, y, argmax);
    else
        serial::max_reduce_forward(x, pre, m, post, y, argmax);
}

template <typename T>
void broadcast_forward(const T* x, isize pre, isize extent, isize post, T* y) {
    if (static_cast<std::size_t>(pre * extent * post) >= kParGrain)
        par::broadcast_forward(x, pre, extent, post, y);
    else
        serial::broadcast_forward(x, pre, extent, post, y);
}

template <typename T>
void broadcast_backward(const T* dy, isize pre, isize extent, isize post, T* dx) {
    if (static_cast<std::size_t>(pre * extent * post) >= kParGrain)
        par::broadcast_backward(dy, pre, extent, post, dx);
    else
        serial::broadcast_backward(dy, pre, extent, post, dx);
}

template <typename T>
void gather(const T* x, const std::size_t* src, isize n, T* y) {
    if (static_cast<std::size_t>(n) >= kParGrain)
        par::gather(x, src, n, y);
    else
        serial::gather(x, src, n, y);
}

template <typename T>
void scatter_add(const T* dy, const std::size_t* src, isize n, T* dx) {
    if (static_cast<std::size_t>(n) >= kParGrain)
        par::scatter_add(dy, src, n, dx);
    else
        serial::scatter_add(dy, src, n, dx);
}

}  // namespace nsplan::kernels

// Out-of-line sigmoid bodies (shared math, distinct loop annotations).
#include <cmath>

namespace nsplan::kernels {

namespace serial {
template <typename T>
void sigmoid_forward(const T* x, isize n, T* y) {
    for (isize i = 0; i < n; ++i) y[i] = T(1) / (T(1) + std::exp(-x[i]));
}
}  // namespace serial

namespace par {
template <typename T>
void sigmoid_forward(const T* x, isize n, T* y) {
#pragma omp parallel for schedule(static)
    for (isize i = 0; i < n; ++i) y[i] = T(1) / (T(1) + std::exp(-x[i]));
}
}  // namespace par

}  // namespace nsplan::kernels

#endif
