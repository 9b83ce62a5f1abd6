// Benchmark of the OpenMP kernel-matrix assembly against the serial
// reference path; both must produce bit-identical matrices.
#include "patchpert/layer_ops.hpp"
#include "patchpert/parallel.hpp"

#include <chrono>
#include <cstdio>

using namespace patchpert;

namespace {

template <class F>
double time_of(F&& f) {
    const auto t0 = std::chrono::steady_clock::now();
    f();
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void bench_op(const char* name, RefGeometry g, int n, bool hyper) {
    KernelMatrix par, ser;
    const double tp = time_of([&] { par = hyper ? op_R1(g, n, true) : op_S1(g, n, true); });
    const double ts = time_of([&] { ser = hyper ? op_R1(g, n, false) : op_S1(g, n, false); });
    const bool identical = (par.K - ser.K).cwiseAbs().maxCoeff() == 0.0;
    std::printf("%-14s n=%5d  serial %8.3fs  openmp %8.3fs  speedup %5.2fx  %s\n",
                name, par.size(), ts, tp, ts / tp,
                identical ? "bit-identical" : "MISMATCH");
}

} // namespace

int main(int argc, char** argv) {
    const int threads = argc > 1 ? std::atoi(argv[1]) : 0;
    set_thread_count(threads);
    std::printf("threads: %d\n", thread_count());
    bench_op("S1 segment", RefGeometry::Segment, 2048, false);
    bench_op("R1 segment", RefGeometry::Segment, 2048, true);
    bench_op("S1 disk", RefGeometry::Disk, 64, false);
    bench_op("R1 disk", RefGeometry::Disk, 64, true);
    return 0;
}
