// Reference vs production kernels at the default radio dimensions.

#include <random>

#include <benchmark/benchmark.h>

#include "mtrp/kernels.hpp"
#include "mtrp/receiver.hpp"

using namespace mtrp;

namespace {

std::vector<PathComponent> paths(int n) {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<PathComponent> out(static_cast<std::size_t>(n));
    for (auto& p : out) {
        p.delay_s = 5e-6 * u(rng);
        p.doppler_hz = 900.0 * (u(rng) - 0.5);
        p.gain = std::polar(u(rng), 2.0 * kPi * u(rng));
        p.aoa = Angles{120.0 * (u(rng) - 0.5), 80.0 * (u(rng) - 0.5)};
    }
    return out;
}

CsiTensor noise_csi(std::size_t n, std::size_t k, std::size_t m) {
    std::mt19937_64 rng(2);
    std::normal_distribution<double> g;
    CsiTensor t(n, k, m);
    for (auto& v : t.data()) v = Complex(g(rng), g(rng));
    return t;
}

ArrayConfig array_of(int side) {
    ArrayConfig a;
    a.n_rows = a.n_cols = side;
    return a;
}

void BM_SynthesisReference(benchmark::State& state) {
    PrsConfig c;
    c.occasions_per_cpi = 16;
    const PrsGrid g = make_prs_grid(c);
    const auto p = paths(static_cast<int>(state.range(0)));
    const ArrayConfig a = array_of(4);
    CsiTensor out;
    for (auto _ : state) {
        kernels::synthesize_csi_reference(p, g, a, out);
        benchmark::DoNotOptimize(out.data().data());
    }
}

void BM_SynthesisParallel(benchmark::State& state) {
    PrsConfig c;
    c.occasions_per_cpi = 16;
    const PrsGrid g = make_prs_grid(c);
    const auto p = paths(static_cast<int>(state.range(0)));
    const ArrayConfig a = array_of(4);
    CsiTensor out;
    for (auto _ : state) {
        kernels::synthesize_csi_parallel(p, g, a, out);
        benchmark::DoNotOptimize(out.data().data());
    }
}

void BM_RangeDopplerReference(benchmark::State& state) {
    const CsiTensor g = noise_csi(1, 1638, 32);
    const auto wr = make_window(WindowType::hann, 1638);
    const auto wd = make_window(WindowType::hann, 32);
    std::vector<Complex> cube;
    for (auto _ : state) {
        kernels::range_doppler_reference(g, wr, wd, 2048, true, cube);
        benchmark::DoNotOptimize(cube.data());
    }
}

void BM_RangeDopplerParallel(benchmark::State& state) {
    const CsiTensor g = noise_csi(1, 1638, 32);
    const auto wr = make_window(WindowType::hann, 1638);
    const auto wd = make_window(WindowType::hann, 32);
    std::vector<Complex> cube;
    for (auto _ : state) {
        kernels::range_doppler_parallel(g, wr, wd, 2048, true, cube);
        benchmark::DoNotOptimize(cube.data());
    }
}

template <bool Reference>
void BM_CfarTraining(benchmark::State& state) {
    std::mt19937_64 rng(3);
    std::exponential_distribution<double> e;
    std::vector<double> p(2048 * 128);
    for (auto& v : p) v = e(rng);
    std::vector<double> sum;
    std::vector<int> count;
    for (auto _ : state) {
        if constexpr (Reference) kernels::cfar_training_reference(p, 2048, 128, kernels::CfarWindow{}, sum, count);
        else kernels::cfar_training_parallel(p, 2048, 128, kernels::CfarWindow{}, sum, count);
        benchmark::DoNotOptimize(sum.data());
    }
}

template <bool Reference>
void BM_BeamScan(benchmark::State& state) {
    const BeamScanner scanner(array_of(8), AngleGrid{});
    std::mt19937_64 rng(4);
    std::normal_distribution<double> g;
    std::vector<Complex> steer(scanner.size() * 64), snap(64);
    for (auto& v : steer) v = Complex(g(rng), g(rng));
    for (auto& v : snap) v = Complex(g(rng), g(rng));
    std::vector<double> power;
    for (auto _ : state) {
        if constexpr (Reference) kernels::beam_scan_reference(steer, snap, power);
        else kernels::beam_scan_parallel(steer, snap, power);
        benchmark::DoNotOptimize(power.data());
    }
}

}  // namespace

BENCHMARK(BM_SynthesisReference)->Arg(1)->Arg(8)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SynthesisParallel)->Arg(1)->Arg(8)->Arg(40)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_RangeDopplerReference)->Unit(benchmark::kMillisecond)->Iterations(2);
BENCHMARK(BM_RangeDopplerParallel)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_CfarTraining<true>)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_CfarTraining<false>)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_BeamScan<true>)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_BeamScan<false>)->Unit(benchmark::kMicrosecond);

BENCHMARK_MAIN();
