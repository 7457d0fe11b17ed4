#include <catch_amalgamated.hpp>

#include <random>

#include <omp.h>

#include "mtrp/kernels.hpp"
#include "mtrp/receiver.hpp"

using namespace mtrp;

namespace {

double max_abs_diff(std::span<const Complex> a, std::span<const Complex> b) {
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
    return d;
}

double max_abs(std::span<const Complex> a) {
    double d = 0.0;
    for (const auto& v : a) d = std::max(d, std::abs(v));
    return d;
}

std::vector<PathComponent> random_paths(std::mt19937_64& rng, int n) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<PathComponent> paths(static_cast<std::size_t>(n));
    for (auto& p : paths) {
        p.delay_s = 5e-6 * u(rng);
        p.doppler_hz = 900.0 * (u(rng) - 0.5);
        p.gain = std::polar(u(rng), 2.0 * kPi * u(rng));
        p.aoa = Angles{120.0 * (u(rng) - 0.5), 80.0 * (u(rng) - 0.5)};
    }
    return paths;
}

CsiTensor random_csi(std::mt19937_64& rng, std::size_t n, std::size_t k, std::size_t m) {
    std::normal_distribution<double> g;
    CsiTensor t(n, k, m);
    for (auto& v : t.data()) v = Complex(g(rng), g(rng));
    return t;
}

}  // namespace

TEST_CASE("parallel CSI synthesis matches the reference") {
    std::mt19937_64 rng(1);
    PrsConfig c;
    c.n_subcarriers = 120;
    c.occasions_per_cpi = 16;
    const PrsGrid g = make_prs_grid(c);
    ArrayConfig arr;
    arr.n_rows = 2;
    arr.n_cols = 4;
    const auto paths = random_paths(rng, 7);
    CsiTensor ref, par;
    kernels::synthesize_csi_reference(paths, g, arr, ref);
    kernels::synthesize_csi_parallel(paths, g, arr, par);
    REQUIRE(ref.data().size() == par.data().size());
    CHECK(max_abs_diff(ref.data(), par.data()) <= 1e-10 * max_abs(ref.data()));
}

TEST_CASE("FFT range-Doppler processing matches the naive DFT") {
    std::mt19937_64 rng(2);
    const CsiTensor g = random_csi(rng, 3, 20, 8);
    const auto wr = make_window(WindowType::hann, 20);
    const auto wd = make_window(WindowType::hann, 8);
    for (bool mean_sub : {false, true}) {
        std::vector<Complex> ref, par;
        kernels::range_doppler_reference(g, wr, wd, 64, mean_sub, ref);
        kernels::range_doppler_parallel(g, wr, wd, 64, mean_sub, par);
        REQUIRE(ref.size() == 3 * 64 * 8);
        REQUIRE(par.size() == ref.size());
        CHECK(max_abs_diff(ref, par) <= 1e-10 * max_abs(ref));
    }
}

TEST_CASE("Parseval holds for rectangular windows without mean removal") {
    std::mt19937_64 rng(3);
    const CsiTensor g = random_csi(rng, 1, 32, 16);
    const std::vector<double> wr(32, 1.0), wd(16, 1.0);
    std::vector<Complex> cube;
    kernels::range_doppler_parallel(g, wr, wd, 32, false, cube);
    double ein = 0.0, eout = 0.0;
    for (const auto& v : g.data()) ein += std::norm(v);
    for (const auto& v : cube) eout += std::norm(v);
    CHECK(eout == Catch::Approx(ein).epsilon(1e-10));
}

TEST_CASE("CFAR training sums match the reference, including edges and wrap") {
    std::mt19937_64 rng(4);
    std::exponential_distribution<double> e(1.0);
    const std::size_t nr = 50, nd = 24;
    std::vector<double> p(nr * nd);
    for (auto& v : p) v = e(rng);
    kernels::CfarWindow w{2, 1, 5, 3};
    std::vector<double> s_ref, s_par;
    std::vector<int> c_ref, c_par;
    kernels::cfar_training_reference(p, nr, nd, w, s_ref, c_ref);
    kernels::cfar_training_parallel(p, nr, nd, w, s_par, c_par);
    CHECK(c_ref == c_par);
    for (std::size_t i = 0; i < p.size(); ++i) CHECK(s_par[i] == Catch::Approx(s_ref[i]).epsilon(1e-12));
    // An interior cell sees the full box minus the guard box.
    CHECK(c_ref[10 * nr + 25] == (2 * 7 + 1) * (2 * 4 + 1) - (2 * 2 + 1) * (2 * 1 + 1));
}

TEST_CASE("beam scan matches the reference") {
    std::mt19937_64 rng(5);
    std::normal_distribution<double> g;
    const std::size_t n_el = 16, n_ang = 301;
    std::vector<Complex> steer(n_el * n_ang), snap(n_el);
    for (auto& v : steer) v = Complex(g(rng), g(rng));
    for (auto& v : snap) v = Complex(g(rng), g(rng));
    std::vector<double> ref, par;
    kernels::beam_scan_reference(steer, snap, ref);
    kernels::beam_scan_parallel(steer, snap, par);
    REQUIRE(ref.size() == n_ang);
    for (std::size_t i = 0; i < n_ang; ++i) CHECK(par[i] == Catch::Approx(ref[i]).epsilon(1e-12));
}

TEST_CASE("parallel kernels are bit-identical across thread counts") {
    std::mt19937_64 rng(6);
    PrsConfig c;
    c.n_subcarriers = 96;
    c.occasions_per_cpi = 32;
    const PrsGrid g = make_prs_grid(c);
    ArrayConfig arr;
    arr.n_rows = 2;
    arr.n_cols = 2;
    const auto paths = random_paths(rng, 5);
    const auto wr = make_window(WindowType::hann, 48);
    const auto wd = make_window(WindowType::hann, 32);

    auto run = [&](int threads) {
        omp_set_num_threads(threads);
        CsiTensor h;
        kernels::synthesize_csi_parallel(paths, g, arr, h);
        std::vector<Complex> cube;
        kernels::range_doppler_parallel(h, wr, wd, 128, true, cube);
        std::vector<double> power, sum;
        std::vector<int> count;
        kernels::noncoherent_power(cube, 4, 128 * 32, power);
        kernels::cfar_training_parallel(power, 128, 32, kernels::CfarWindow{}, sum, count);
        return std::make_pair(cube, sum);
    };
    const auto one = run(1);
    const auto four = run(4);
    omp_set_num_threads(1);
    CHECK(one.first == four.first);
    CHECK(one.second == four.second);
}
