#include "mtrp/geometry.hpp"

#include <algorithm>
#include <string>

#include <Eigen/Geometry>

#include "mtrp/errors.hpp"

namespace mtrp {

namespace {

constexpr double kSectorBoresights[3] = {30.0, 150.0, 270.0};

// Local frame: x = boresight (after downtilt), y = left, z = up.
Eigen::Matrix3d local_to_global_rotation(const TrpConfig& trp) {
    const Eigen::Matrix3d yaw =
        Eigen::AngleAxisd(deg2rad(trp.boresight_azimuth_deg), Vec3::UnitZ()).toRotationMatrix();
    // Positive downtilt pitches the boresight below the horizon.
    const Eigen::Matrix3d pitch =
        Eigen::AngleAxisd(deg2rad(trp.mechanical_downtilt_deg), Vec3::UnitY()).toRotationMatrix();
    return yaw * pitch;
}

}  // namespace

double wrap_azimuth_deg(double deg) {
    double w = std::fmod(deg, 360.0);
    if (w <= -180.0) w += 360.0;
    if (w > 180.0) w -= 360.0;
    return w;
}

std::vector<TrpConfig> build_deployment(int n_sites, double isd_m, double trp_height_m,
                                        const ArrayConfig& array, double boresight_offset_deg,
                                        double downtilt_deg) {
    if (n_sites != 1 && n_sites != 7) {
        throw ConfigValidationError("deployment.n_sites",
                                    "unsupported site count " + std::to_string(n_sites) + " (expected 1 or 7)");
    }
    if (!(isd_m > 0.0)) throw ConfigValidationError("deployment.isd_m", "must be positive");

    std::vector<TrpConfig> trps;
    trps.reserve(static_cast<std::size_t>(3 * n_sites));
    for (int site = 0; site < n_sites; ++site) {
        Position3D pos(0.0, 0.0, trp_height_m);
        if (site > 0) {
            const double az = deg2rad(60.0 * (site - 1));
            pos.x() = isd_m * std::cos(az);
            pos.y() = isd_m * std::sin(az);
        }
        for (int sector = 0; sector < 3; ++sector) {
            TrpConfig trp;
            trp.site_index = site;
            trp.sector_index = sector;
            trp.trp_id = 3 * site + sector + 1;
            trp.position = pos;
            trp.boresight_azimuth_deg = wrap_azimuth_deg(kSectorBoresights[sector] + boresight_offset_deg);
            trp.mechanical_downtilt_deg = downtilt_deg;
            trp.array = array;
            trps.push_back(trp);
        }
    }
    return trps;
}

const TrpConfig& find_trp(std::span<const TrpConfig> trps, int trp_id) {
    auto it = std::find_if(trps.begin(), trps.end(), [&](const TrpConfig& t) { return t.trp_id == trp_id; });
    if (it == trps.end()) throw ConfigError("unknown trp_id " + std::to_string(trp_id));
    return *it;
}

Vec3 local_to_global(const TrpConfig& trp, const Angles& angles) {
    const double az = deg2rad(angles.azimuth_deg);
    const double el = deg2rad(angles.elevation_deg);
    const Vec3 local(std::cos(el) * std::cos(az), std::cos(el) * std::sin(az), std::sin(el));
    return local_to_global_rotation(trp) * local;
}

Angles global_to_local(const TrpConfig& trp, const Vec3& direction) {
    const Vec3 local = local_to_global_rotation(trp).transpose() * direction.normalized();
    const double horiz = std::hypot(local.x(), local.y());
    Angles a;
    a.elevation_deg = rad2deg(std::atan2(local.z(), horiz));
    a.azimuth_deg = horiz > 0.0 ? wrap_azimuth_deg(rad2deg(std::atan2(local.y(), local.x()))) : 0.0;
    return a;
}

LosGeometry los_geometry(const TrpConfig& trp, const Position3D& point) {
    const Vec3 delta = point - trp.position;
    const double range = delta.norm();
    if (!(range > 0.0)) throw GeometryError("los_geometry: point coincides with TRP " + std::to_string(trp.trp_id));
    LosGeometry g;
    g.unit_vector = delta / range;
    g.range_m = range;
    g.angles = global_to_local(trp, delta);
    return g;
}

std::vector<Complex> array_response(const ArrayConfig& array, const Angles& angles) {
    const double az = deg2rad(angles.azimuth_deg);
    const double el = deg2rad(angles.elevation_deg);
    const double u = array.d_h * std::sin(az) * std::cos(el);
    const double v = array.d_v * std::sin(el);
    std::vector<Complex> a(array.size());
    for (int q = 0; q < array.n_rows; ++q) {
        for (int p = 0; p < array.n_cols; ++p) {
            const double phase = 2.0 * kPi * (p * u + q * v);
            a[static_cast<std::size_t>(q * array.n_cols + p)] = std::polar(1.0, phase);
        }
    }
    return a;
}

double element_gain_dbi(const ArrayConfig& array, const Angles& angles) {
    const ElementPattern& e = array.element;
    const double horiz = std::min(12.0 * std::pow(angles.azimuth_deg / e.hpbw_deg, 2), e.front_to_back_db);
    const double vert = std::min(12.0 * std::pow(angles.elevation_deg / e.hpbw_deg, 2), e.side_lobe_db);
    return e.max_gain_dbi - std::min(horiz + vert, e.front_to_back_db);
}

}  // namespace mtrp
