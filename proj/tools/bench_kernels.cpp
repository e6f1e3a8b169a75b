// Times the serial reference kernels against their OpenMP counterparts,
// plus a whole-network forward/backward at growing object counts. The two
// code paths must agree bitwise (spot-checked here); speed is the only
// thing allowed to differ.

#include <chrono>
#include <cstdio>
#include <random>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "nsplan/gen/generators.hpp"
#include "nsplan/nlm/model.hpp"
#include "nsplan/strips/pddl.hpp"
#include "nsplan/tensor/kernels.hpp"

using namespace nsplan;
using kernels::isize;

namespace {

using Clock = std::chrono::steady_clock;

double time_ms(const std::function<void()>& fn, int reps) {
    fn();  // warm up
    auto t0 = Clock::now();
    for (int i = 0; i < reps; ++i) fn();
    auto t1 = Clock::now();
    return std::chrono::duration<double, std::milli>(t1 - t0).count() / reps;
}

std::vector<float> random_vec(std::size_t n, std::mt19937_64& rng) {
    std::vector<float> v(n);
    for (auto& x : v) x = float(rng() % 2000) / 1000.0f - 1.0f;
    return v;
}

void bench_matmul() {
    std::printf("%-28s %10s %10s %8s\n", "matmul rows x k x q", "serial ms", "omp ms",
                "speedup");
    std::mt19937_64 rng(1);
    for (auto [rows, k, q] :
         {std::tuple{64, 64, 8}, std::tuple{256, 128, 8}, std::tuple{1024, 256, 8},
          std::tuple{4096, 256, 8}, std::tuple{8000, 384, 8}}) {
        auto x = random_vec(std::size_t(rows) * k, rng);
        auto w = random_vec(std::size_t(k) * q, rng);
        auto b = random_vec(q, rng);
        std::vector<float> y1(std::size_t(rows) * q), y2(y1.size());
        int reps = rows <= 256 ? 200 : 20;
        double ts = time_ms(
            [&] {
                kernels::serial::matmul_forward(x.data(), rows, k, w.data(), q,
                                                b.data(), y1.data());
            },
            reps);
        double tp = time_ms(
            [&] {
                kernels::par::matmul_forward(x.data(), rows, k, w.data(), q, b.data(),
                                             y2.data());
            },
            reps);
        bool same = y1 == y2;
        std::printf("%6d x %4d x %-10d %10.3f %10.3f %7.2fx%s\n", rows, k, q, ts, tp,
                    ts / tp, same ? "" : "  MISMATCH");
    }
}

void bench_sigmoid() {
    std::printf("\n%-28s %10s %10s %8s\n", "sigmoid n", "serial ms", "omp ms", "speedup");
    std::mt19937_64 rng(2);
    for (std::size_t n : {std::size_t(10000), std::size_t(100000), std::size_t(1000000)}) {
        auto x = random_vec(n, rng);
        std::vector<float> y1(n), y2(n);
        double ts = time_ms(
            [&] { kernels::serial::sigmoid_forward(x.data(), isize(n), y1.data()); }, 20);
        double tp = time_ms(
            [&] { kernels::par::sigmoid_forward(x.data(), isize(n), y2.data()); }, 20);
        bool same = y1 == y2;
        std::printf("%-28zu %10.3f %10.3f %7.2fx%s\n", n, ts, tp, ts / tp,
                    same ? "" : "  MISMATCH");
    }
}

std::string flat_blocks_problem(int n) {
    std::string p = "(define (problem bench-" + std::to_string(n) +
                    ") (:domain blocksworld) (:objects";
    for (int i = 1; i <= n; ++i) p += " b" + std::to_string(i);
    p += ") (:init (handempty)";
    for (int i = 1; i <= n; ++i)
        p += " (ontable b" + std::to_string(i) + ") (clear b" + std::to_string(i) + ")";
    p += ") (:goal (and (on b1 b2))))";
    return p;
}

void bench_nlm_forward() {
    std::printf("\n%-28s %10s\n", "nlm forward (blocks, L=6)", "ms/eval");
    for (int n : {5, 10, 20, 30}) {
        GroundTask t =
            ground(parse(domain_pddl(DomainKind::blocks), flat_blocks_problem(n)));
        std::mt19937_64 rng(7);
        auto model = build_nlm<float>(t, 2, 6, 8, 0.999999, 1.0, "none", rng);
        Mapr<float> m = encode<float>(t.initial, t.goal, t);
        double ms = time_ms([&] { (void)nlm_value(model, m); }, 10);
        std::printf("objects=%-21zu %10.3f\n", t.object_count(), ms);
    }
}

}  // namespace

int main() {
#ifdef _OPENMP
    std::printf("OpenMP: %d threads (grain %zu)\n\n", omp_get_max_threads(),
                kernels::kParGrain);
#else
    std::printf("OpenMP: disabled at build time\n\n");
#endif
    bench_matmul();
    bench_sigmoid();
    bench_nlm_forward();
    return 0;
}
