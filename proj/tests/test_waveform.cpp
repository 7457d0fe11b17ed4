#include <catch_amalgamated.hpp>

#include <cmath>

#include "mtrp/errors.hpp"
#include "mtrp/waveform.hpp"

using namespace mtrp;
using Catch::Approx;

namespace {

bool same4(double a, double b) { return std::abs(a - b) <= 5e-5 * std::abs(b); }

}  // namespace

TEST_CASE("overhead for four single-symbol TRPs") {
    const auto r = sensing_overhead(4, 14, 0.128, 0.128);
    CHECK(same4(r.eta_cpi, 4.0 / 14.0));
    CHECK(same4(r.eta_cpi, 0.285714));
    CHECK(same4(r.eta_eff, 0.285714));
    const auto s = sensing_overhead(4, 14, 0.128, 1.0);
    CHECK(same4(s.eta_cpi, 0.285714));
    CHECK(same4(s.eta_eff, 0.0365714));
}

TEST_CASE("overhead never exceeds its CPI share") {
    for (int l = 0; l <= 14; ++l) {
        for (double t : {0.128, 0.2, 0.5, 1.0, 10.0}) {
            const auto r = sensing_overhead(l, 14, 0.128, t);
            CHECK(r.eta_eff <= r.eta_cpi + 1e-15);
            CHECK(r.eta_cpi <= 1.0);
        }
    }
}

TEST_CASE("overhead rejects impossible inputs") {
    CHECK_THROWS_AS(sensing_overhead(15, 14, 0.128, 1.0), ConfigValidationError);
    CHECK_THROWS_AS(sensing_overhead(4, 0, 0.128, 1.0), ConfigValidationError);
    CHECK_THROWS_AS(sensing_overhead(4, 14, 0.128, 0.1), ConfigValidationError);
    CHECK_THROWS_AS(sensing_overhead(4, 14, 0.0, 1.0), ConfigValidationError);
}

TEST_CASE("100 MHz at 30 kHz uses 273 resource blocks and a comb-2 PRS") {
    PrsConfig c;
    CHECK(c.active_subcarriers() == 3276);
    CHECK(c.prs_subcarrier_count() == 1638);
    CHECK(prs_subcarriers(c).size() == 1638);
    c.comb_offset = 1;
    const auto idx = prs_subcarriers(c);
    CHECK(idx.size() == 1638);
    CHECK(idx.front() == 1);
    CHECK(idx.back() == 3275);
}

TEST_CASE("comb count rounds up when the offset lands inside the grid") {
    PrsConfig c;
    c.n_subcarriers = 10;
    c.comb_size = 4;
    c.comb_offset = 1;
    CHECK(c.prs_subcarrier_count() == 3);
    CHECK(prs_subcarriers(c).size() == 3);
    c.comb_offset = 0;
    CHECK(prs_subcarriers(c).size() == 3);
    c.comb_offset = 4;
    CHECK_THROWS_AS(prs_subcarriers(c), ConfigValidationError);
}

TEST_CASE("untabulated bandwidths round down to whole resource blocks") {
    PrsConfig c;
    c.bandwidth_hz = 7e6;
    CHECK(nr_max_resource_blocks(7e6, 30e3) == 0);
    CHECK(c.active_subcarriers() == 228);
    c.bandwidth_hz = 20e6;
    CHECK(c.active_subcarriers() == 612);
}

TEST_CASE("PRS grid frequencies are centred and spaced by the comb") {
    PrsConfig c;
    const auto g = make_prs_grid(c);
    REQUIRE(g.frequencies_hz.size() == 1638);
    CHECK(g.frequencies_hz[1] - g.frequencies_hz[0] == Approx(60e3));
    CHECK(g.frequencies_hz.front() == Approx(-1638.0 * 30e3));
    REQUIRE(g.occasion_times_s.size() == 128);
    CHECK(g.occasion_times_s[5] == Approx(5e-3));
    CHECK(c.cpi_duration_s() == Approx(0.128));
}

TEST_CASE("thermal noise per resource element") {
    PrsConfig c;
    const double expect_dbm = -174.0 + 10.0 * std::log10(30e3) + 9.0;
    CHECK(watt2dbm(noise_power_w(c)) == Approx(expect_dbm));
    CHECK(occasion_noise_variance_w(c) == Approx(noise_power_w(c) / 2.0));
    CHECK(tx_power_per_re_w(c) * 3276.0 == Approx(dbm2watt(52.0)));
}

TEST_CASE("PRS symbols are unit-modulus QPSK and seed-determined") {
    Rng a(5), b(5);
    const auto s = prs_symbols(64, 8, a);
    const auto t = prs_symbols(64, 8, b);
    REQUIRE(s.size() == 512);
    CHECK(s == t);
    for (const auto& v : s) {
        CHECK(std::abs(v) == Approx(1.0));
        CHECK(std::abs(std::abs(v.real()) - std::sqrt(0.5)) < 1e-15);
    }
}
