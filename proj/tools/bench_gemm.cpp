// Benchmark: serial reference GEMM vs the OpenMP row-parallel kernel, plus a
// bitwise agreement check between the two.

#include <chrono>
#include <cstdio>
#include <cstring>

#include "gplab/matrix.hpp"
#include "gplab/rng.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

using namespace gplab;

namespace {

double time_ms(const Matrix& a, const Matrix& b, Matrix (*kernel)(const Matrix&, const Matrix&),
               int reps, Matrix& out) {
    auto t0 = std::chrono::steady_clock::now();
    for (int r = 0; r < reps; ++r) out = kernel(a, b);
    auto t1 = std::chrono::steady_clock::now();
    return std::chrono::duration<double, std::milli>(t1 - t0).count() / reps;
}

} // namespace

int main(int argc, char** argv) {
    int reps = argc > 1 ? std::atoi(argv[1]) : 5;
#ifdef _OPENMP
    std::printf("threads: %d\n", omp_get_max_threads());
#else
    std::printf("threads: 1 (no OpenMP)\n");
#endif
    std::printf("%8s %14s %14s %9s %8s\n", "size", "serial (ms)", "parallel (ms)", "speedup",
                "match");
    RngStream rng(7, 0);
    for (std::size_t n : {64, 128, 256, 512, 1024}) {
        Matrix a(n, n), b(n, n);
        for (double& x : a.data()) x = rng.normal();
        for (double& x : b.data()) x = rng.normal();
        Matrix cs, cp;
        double ts = time_ms(a, b, matmul_serial, reps, cs);
        double tp = time_ms(a, b, matmul, reps, cp);
        bool match = cs.data().size() == cp.data().size() &&
                     std::memcmp(cs.data().data(), cp.data().data(),
                                 cs.data().size() * sizeof(double)) == 0;
        std::printf("%8zu %14.3f %14.3f %8.2fx %8s\n", n, ts, tp, ts / tp,
                    match ? "bitwise" : "DIFFERS");
        if (!match) return 1;
    }
    return 0;
}
