#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <set>

#include "mtrp/errors.hpp"
#include "mtrp/geometry.hpp"

using namespace mtrp;
using Catch::Approx;

TEST_CASE("seven-site layout has 21 TRPs with site-major ids") {
    const auto trps = build_deployment(7, 500.0, 25.0, ArrayConfig{});
    REQUIRE(trps.size() == 21);
    std::set<int> ids;
    for (const auto& t : trps) {
        ids.insert(t.trp_id);
        CHECK(t.trp_id == 3 * t.site_index + t.sector_index + 1);
        CHECK(t.position.z() == Approx(25.0));
        const double r = std::hypot(t.position.x(), t.position.y());
        if (t.site_index == 0) CHECK(r == Approx(0.0).margin(1e-12));
        else CHECK(r == Approx(500.0));
    }
    CHECK(ids.size() == 21);
    CHECK(*ids.begin() == 1);
    CHECK(*ids.rbegin() == 21);
    CHECK(find_trp(trps, 1).boresight_azimuth_deg == Approx(30.0));
    CHECK(find_trp(trps, 2).boresight_azimuth_deg == Approx(150.0));
    CHECK(find_trp(trps, 3).boresight_azimuth_deg == Approx(-90.0));
}

TEST_CASE("neighbouring sites sit one ISD apart") {
    const auto trps = build_deployment(7, 500.0, 25.0, ArrayConfig{});
    for (int s = 1; s < 7; ++s) {
        const auto& a = trps[static_cast<std::size_t>(3 * s)];
        const auto& b = trps[static_cast<std::size_t>(3 * (s % 6 + 1))];
        CHECK((a.position - b.position).norm() == Approx(500.0));
    }
}

TEST_CASE("unsupported site counts and unknown ids are rejected") {
    CHECK_THROWS_AS(build_deployment(3, 500.0, 25.0, ArrayConfig{}), ConfigValidationError);
    CHECK_THROWS_AS(build_deployment(7, 0.0, 25.0, ArrayConfig{}), ConfigValidationError);
    const auto trps = build_deployment(1, 500.0, 25.0, ArrayConfig{});
    CHECK_THROWS_AS(find_trp(trps, 4), ConfigError);
}

TEST_CASE("line of sight toward a point on boresight") {
    TrpConfig trp;
    trp.position = {10.0, -5.0, 25.0};
    trp.boresight_azimuth_deg = 30.0;
    const Vec3 dir(std::cos(deg2rad(30.0)), std::sin(deg2rad(30.0)), 0.0);
    const auto g = los_geometry(trp, trp.position + 200.0 * dir);
    CHECK(g.range_m == Approx(200.0));
    CHECK(g.angles.azimuth_deg == Approx(0.0).margin(1e-9));
    CHECK(g.angles.elevation_deg == Approx(0.0).margin(1e-9));
    CHECK((g.unit_vector - dir).norm() < 1e-12);
    CHECK_THROWS_AS(los_geometry(trp, trp.position), GeometryError);
}

TEST_CASE("local and global directions round-trip") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> az(-179.0, 179.0), el(-85.0, 85.0), bore(-180.0, 180.0), tilt(-15.0, 15.0);
    for (int i = 0; i < 1000; ++i) {
        TrpConfig trp;
        trp.boresight_azimuth_deg = bore(rng);
        trp.mechanical_downtilt_deg = tilt(rng);
        const Angles a{az(rng), el(rng)};
        const Vec3 g = local_to_global(trp, a);
        CHECK(g.norm() == Approx(1.0));
        const Angles back = global_to_local(trp, g);
        CHECK(back.azimuth_deg == Approx(a.azimuth_deg).margin(1e-8));
        CHECK(back.elevation_deg == Approx(a.elevation_deg).margin(1e-8));
    }
}

TEST_CASE("positive downtilt points the boresight below the horizon") {
    TrpConfig trp;
    trp.mechanical_downtilt_deg = 10.0;
    const Vec3 b = local_to_global(trp, Angles{0.0, 0.0});
    CHECK(b.z() == Approx(-std::sin(deg2rad(10.0))));
}

TEST_CASE("array response phases follow the element grid") {
    ArrayConfig arr;
    arr.n_rows = 3;
    arr.n_cols = 4;
    const Angles a{20.0, 10.0};
    const auto v = array_response(arr, a);
    REQUIRE(v.size() == 12);
    const double u = 0.5 * std::sin(deg2rad(20.0)) * std::cos(deg2rad(10.0));
    const double w = 0.5 * std::sin(deg2rad(10.0));
    for (int q = 0; q < 3; ++q) {
        for (int p = 0; p < 4; ++p) {
            const Complex expect = std::polar(1.0, 2.0 * kPi * (p * u + q * w));
            CHECK(std::abs(v[static_cast<std::size_t>(q * 4 + p)] - expect) < 1e-12);
        }
    }
    for (const auto& x : array_response(arr, Angles{0.0, 0.0})) CHECK(std::abs(x - Complex(1.0, 0.0)) < 1e-15);
}

TEST_CASE("element pattern peaks at boresight and saturates at the floor") {
    const ArrayConfig arr;
    CHECK(element_gain_dbi(arr, Angles{0.0, 0.0}) == Approx(8.0));
    CHECK(element_gain_dbi(arr, Angles{32.5, 0.0}) == Approx(5.0));
    CHECK(element_gain_dbi(arr, Angles{0.0, 32.5}) == Approx(5.0));
    CHECK(element_gain_dbi(arr, Angles{180.0, 0.0}) == Approx(-22.0));
    CHECK(element_gain_dbi(arr, Angles{90.0, 80.0}) == Approx(-22.0));
}

TEST_CASE("azimuth wrapping lands in (-180, 180]") {
    CHECK(wrap_azimuth_deg(180.0) == Approx(180.0));
    CHECK(wrap_azimuth_deg(-180.0) == Approx(180.0));
    CHECK(wrap_azimuth_deg(270.0) == Approx(-90.0));
    CHECK(wrap_azimuth_deg(-725.0) == Approx(-5.0));
}
