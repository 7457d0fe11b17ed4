#pragma once

#include <cmath>
#include <complex>
#include <numbers>

#include <Eigen/Core>

namespace mtrp {

using Complex = std::complex<double>;
using Vec3 = Eigen::Vector3d;

/// Global East-North-Up coordinates in meters.
using Position3D = Vec3;

inline constexpr double kSpeedOfLight = 299'792'458.0;
inline constexpr double kPi = std::numbers::pi;
/// Thermal noise density kT at 290 K.
inline constexpr double kThermalNoiseDbmPerHz = -174.0;

inline double deg2rad(double deg) { return deg * kPi / 180.0; }
inline double rad2deg(double rad) { return rad * 180.0 / kPi; }
inline double db2lin(double db) { return std::pow(10.0, db / 10.0); }
inline double lin2db(double lin) { return 10.0 * std::log10(lin); }
inline double dbm2watt(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }
inline double watt2dbm(double w) { return 10.0 * std::log10(w) + 30.0; }

}  // namespace mtrp
