#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "mtrp/errors.hpp"
#include "mtrp/receiver.hpp"
#include "scenes.hpp"

using namespace mtrp;
using Catch::Approx;

namespace {

test::PointScene small_scene() {
    test::PointScene s;
    s.prs.bandwidth_hz = 20e6;
    s.prs.occasions_per_cpi = 32;
    s.array.n_rows = 2;
    s.array.n_cols = 2;
    s.rx.range_doppler.range_fft_size = 512;
    return s;
}

// P(X > (scale / N) S) for X ~ Gamma(L), S ~ Gamma(N L), by simulation.
double simulated_pfa(int n_training, double scale, int looks, int trials, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::gamma_distribution<double> x(looks, 1.0), s(static_cast<double>(n_training) * looks, 1.0);
    int hits = 0;
    for (int i = 0; i < trials; ++i) hits += x(rng) > scale / n_training * s(rng);
    return static_cast<double>(hits) / trials;
}

}  // namespace

TEST_CASE("periodic windows") {
    const auto h = make_window(WindowType::hann, 8);
    CHECK(h[0] == Approx(0.0).margin(1e-15));
    CHECK(h[4] == Approx(1.0));
    CHECK(h[2] == Approx(0.5));
    CHECK(h[1] == Approx(h[7]));
    const auto r = make_window(WindowType::rectangular, 5);
    CHECK(r == std::vector<double>(5, 1.0));
    CHECK(make_window(WindowType::hamming, 4)[0] == Approx(0.08));
    CHECK(make_window(WindowType::blackman, 4)[0] == Approx(0.0).margin(1e-15));
    CHECK(parse_window("hann") == WindowType::hann);
    CHECK_THROWS_AS(parse_window("kaiser"), ConfigError);
}

TEST_CASE("LS estimate recovers the channel without noise") {
    std::mt19937_64 g(1);
    std::normal_distribution<double> n;
    CsiTensor h(3, 10, 4);
    for (auto& v : h.data()) v = Complex(n(g), n(g));
    Rng rng(2);
    const auto s = prs_symbols(10, 4, rng);
    const auto est = ls_channel_estimate(received_signal(h, s, 2.5, 0.0, 7), s, 2.5);
    for (std::size_t i = 0; i < h.data().size(); ++i) CHECK(std::abs(est.data()[i] - h.data()[i]) < 1e-12);
    CHECK_THROWS_AS(ls_channel_estimate(h, std::vector<Complex>(3), 1.0), ContractError);
    CHECK_THROWS_AS(ls_channel_estimate(h, s, 0.0), ContractError);
}

TEST_CASE("received noise has the requested variance and is seed-determined") {
    CsiTensor h(2, 500, 20);
    std::vector<Complex> s(500 * 20, Complex(1.0, 0.0));
    const auto y = received_signal(h, s, 1.0, 3.0, 99);
    double p = 0.0;
    for (const auto& v : y.data()) p += std::norm(v);
    CHECK(p / static_cast<double>(y.data().size()) == Approx(3.0).epsilon(0.02));
    const auto z = received_signal(h, s, 1.0, 3.0, 99);
    CHECK(std::equal(y.data().begin(), y.data().end(), z.data().begin()));
}

TEST_CASE("single-look CFAR scale has the closed form") {
    for (int n : {8, 24, 120, 264}) {
        for (double pfa : {1e-2, 1e-3, 1e-4, 1e-6}) {
            const double a = cfar_scale(n, pfa, 1);
            CHECK(a == Approx(n * (std::pow(pfa, -1.0 / n) - 1.0)));
            CHECK(cfar_false_alarm_probability(n, a, 1) == Approx(pfa).epsilon(1e-9));
        }
    }
    CHECK_THROWS_AS(cfar_scale(0, 1e-3), ContractError);
    CHECK_THROWS_AS(cfar_scale(10, 1.5), ContractError);
}

TEST_CASE("multi-look CFAR scale inverts the exact false-alarm probability") {
    for (int looks : {2, 4, 16, 64}) {
        for (double pfa : {1e-3, 1e-4}) {
            const double a = cfar_scale(264, pfa, looks);
            CHECK(cfar_false_alarm_probability(264, a, looks) == Approx(pfa).epsilon(1e-9));
        }
    }
}

TEST_CASE("exact false-alarm probability agrees with simulation") {
    for (int looks : {1, 4, 16}) {
        const double a = cfar_scale(40, 1e-2, looks);
        const double sim = simulated_pfa(40, a, looks, 400000, 5 + static_cast<std::uint64_t>(looks));
        CHECK(sim == Approx(1e-2).epsilon(0.08));
    }
}

TEST_CASE("CFAR on iid exponential cells meets its design rate") {
    std::mt19937_64 rng(8);
    std::exponential_distribution<double> e(1.0);
    RangeDopplerMap map;
    map.n_range = 1024;
    map.n_doppler = 512;
    map.looks = 1;
    map.power.resize(map.n_range * map.n_doppler);
    for (auto& v : map.power) v = e(rng);
    CfarConfig cfg;
    cfg.pfa = 1e-3;
    const auto cells = cfar_cells(map, cfg);
    std::size_t hits = 0;
    for (auto h : cells.hit) hits += h;
    const double rate = static_cast<double>(hits) / static_cast<double>(cells.hit.size());
    CHECK(rate > 1e-3 / 1.5);
    CHECK(rate < 1e-3 * 1.5);
}

TEST_CASE("an all-zero map yields no detections") {
    RangeDopplerMap map;
    map.n_range = 64;
    map.n_doppler = 16;
    map.power.assign(64 * 16, 0.0);
    CHECK(cfar_detect(map, CfarConfig{}).empty());
}

TEST_CASE("connected CFAR hits merge into one detection at the peak") {
    RangeDopplerMap map;
    map.n_range = 128;
    map.n_doppler = 32;
    map.axes.range_bin_m = 1.0;
    map.axes.doppler_bin_hz = 10.0;
    map.axes.wavelength_m = 0.1;
    map.axes.occasion_period_s = 1e-3;
    map.power.assign(128 * 32, 1.0);
    // A blob straddling the Doppler wrap.
    map.power[0 * 128 + 60] = 1e6;
    map.power[31 * 128 + 60] = 5e5;
    map.power[31 * 128 + 61] = 4e5;
    const auto dets = cfar_detect(map, CfarConfig{});
    REQUIRE(dets.size() == 1);
    CHECK(dets[0].range_bin == 60);
    CHECK(dets[0].doppler_bin == 0);
    CHECK(dets[0].range_m == Approx(60.0));
}

TEST_CASE("two peaks split at a saddle deep enough below the weaker one") {
    RangeDopplerMap map;
    map.n_range = 128;
    map.n_doppler = 32;
    map.axes.range_bin_m = 1.0;
    map.axes.doppler_bin_hz = 10.0;
    map.power.assign(128 * 32, 1.0);
    auto ridge = [&](double saddle_db) {
        map.power[10 * 128 + 50] = 1e6;
        map.power[10 * 128 + 51] = 1e6 * db2lin(saddle_db);
        map.power[10 * 128 + 52] = 8e5;
        return cfar_detect(map, CfarConfig{});
    };
    // The weaker peak sits 0.97 dB below the stronger one.
    CHECK(ridge(-1.5).size() == 1);
    const auto split = ridge(-3.0);
    REQUIRE(split.size() == 2);
    CHECK(split[0].range_bin == 50);
    CHECK(split[1].range_bin == 52);

    CfarConfig merged;
    merged.split_peaks = false;
    map.power[10 * 128 + 51] = 1e3;
    CHECK(cfar_detect(map, merged).size() == 1);
}

TEST_CASE("cells far below the map peak are never declared") {
    RangeDopplerMap map;
    map.n_range = 64;
    map.n_doppler = 32;
    map.power.assign(64 * 32, 0.0);
    std::mt19937_64 rng(4);
    std::exponential_distribution<double> roundoff(1.0);
    for (double& p : map.power) p = 1e-30 * roundoff(rng);
    map.power[12 * 64 + 30] = 1.0;
    const auto dets = cfar_detect(map, CfarConfig{});
    REQUIRE(dets.size() == 1);
    CHECK(dets[0].range_bin == 30);
    CHECK(dets[0].snr_linear == Approx(db2lin(CfarConfig{}.dynamic_range_db)));
}

TEST_CASE("Doppler bins above the midpoint map to negative frequencies") {
    RangeDopplerMap map;
    map.n_doppler = 8;
    map.axes.doppler_bin_hz = 2.0;
    CHECK(map.doppler_hz(0) == 0.0);
    CHECK(map.doppler_hz(3) == 6.0);
    CHECK(map.doppler_hz(4) == 8.0);
    CHECK(map.doppler_hz(5) == -6.0);
    CHECK(map.doppler_hz(7) == -2.0);
}

TEST_CASE("beam scan returns the true direction for an on-grid source") {
    ArrayConfig arr;
    AngleGrid grid;
    const BeamScanner scan(arr, grid);
    for (const Angles a : {Angles{0.0, 0.0}, Angles{-37.0, 12.0}, Angles{55.0, 71.0}, Angles{-60.0, -10.0}}) {
        const auto got = scan.estimate(array_response(arr, a));
        CHECK(got.azimuth_deg == Approx(a.azimuth_deg).margin(1e-9));
        CHECK(got.elevation_deg == Approx(a.elevation_deg).margin(1e-9));
    }
    CHECK_THROWS_AS(scan.estimate(std::vector<Complex>(64)), EstimationError);
    CHECK_THROWS_AS(scan.estimate(std::vector<Complex>(3, Complex(1.0, 0.0))), ContractError);
}

TEST_CASE("noiseless on-grid target is located on its cell") {
    const auto scene = small_scene();
    const RadarAxes axes = scene.axes();
    const Angles aoa{14.0, 22.0};
    const auto out = scene.observe({scene.on_grid_path(37, 5, aoa, 1.0)}, 0.0, 1);
    REQUIRE(out.detections.size() == 1);
    const std::size_t i = 0;
    const auto& d = out.detections[i];
    CHECK(d.range_bin == 37);
    CHECK(d.doppler_bin == 5);
    CHECK(d.range_m == Approx(37.0 * axes.range_bin_m));
    const double v_expect = 5.0 * axes.doppler_bin_hz * axes.wavelength_m / 2.0;
    CHECK(d.radial_velocity_mps == Approx(v_expect));
    const auto& m = out.measurements[i];
    const Vec3 truth = 37.0 * axes.range_bin_m * local_to_global(scene.trp, aoa);
    CHECK((m.position - truth).norm() < 1e-9);
}

TEST_CASE("static clutter 40 dB above the target leaves its SNR unchanged") {
    const auto scene = small_scene();
    const auto target = scene.on_grid_path(60, 6, Angles{5.0, 15.0}, 1.0);
    auto clutter = scene.on_grid_path(20, 0, Angles{-20.0, -5.0}, 1e4);
    clutter.is_clutter = true;
    const double noise = 1e-2;
    const auto clean = scene.observe({target}, noise, 3);
    const auto dirty = scene.observe({target, clutter}, noise, 3);
    const int a = test::detection_at(clean.detections, 60, 6);
    const int b = test::detection_at(dirty.detections, 60, 6);
    REQUIRE(a >= 0);
    REQUIRE(b >= 0);
    const double delta = std::abs(lin2db(dirty.detections[static_cast<std::size_t>(b)].snr_linear) -
                                  lin2db(clean.detections[static_cast<std::size_t>(a)].snr_linear));
    CHECK(delta < 0.5);
    for (const auto& d : dirty.detections) CHECK(d.range_bin != 20);
}

TEST_CASE("a target beyond the unambiguous range aliases onto the modular bin") {
    const auto scene = small_scene();
    const std::size_t n_range = scene.rx.range_doppler.range_fft_size;
    for (std::size_t wraps = 1; wraps <= 2; ++wraps) {
        const auto out = scene.observe({scene.on_grid_path(wraps * n_range + 37, 5, Angles{14.0, 22.0}, 1.0)}, 0.0, 1);
        REQUIRE(out.detections.size() == 1);
        CHECK(out.detections[0].range_bin == 37);
        CHECK(out.detections[0].doppler_bin == 5);
    }
}

TEST_CASE("two equal targets 3 m apart in range give two detections") {
    // Full 100 MHz bandwidth: 3 m is just under three 1.22 m range bins.
    test::PointScene scene;
    scene.array.n_rows = 2;
    scene.array.n_cols = 2;
    scene.prs.occasions_per_cpi = 32;
    const std::size_t sep = static_cast<std::size_t>(std::ceil(3.0 / scene.axes().range_bin_m));
    REQUIRE(sep == 3);
    for (double phase : {0.0, 1.0, 2.0, 3.0}) {
        auto a = scene.on_grid_path(200, 4, Angles{10.0, 20.0}, 1.0);
        auto b = scene.on_grid_path(200 + sep, 4, Angles{10.0, 20.0}, 1.0);
        b.gain = std::polar(1.0, phase);
        const auto out = scene.observe({a, b}, 0.0, 9);
        REQUIRE(out.detections.size() == 2);
        CHECK(test::detection_at(out.detections, 200, 4) >= 0);
        CHECK(test::detection_at(out.detections, 200 + sep, 4) >= 0);
    }
}
