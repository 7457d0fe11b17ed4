#pragma once

#include <span>
#include <vector>

#include "mtrp/common.hpp"

namespace mtrp {

/// 3GPP TR 38.901 single-element parabolic pattern parameters.
struct ElementPattern {
    double max_gain_dbi = 8.0;
    double hpbw_deg = 65.0;          ///< half-power beamwidth, both planes
    double front_to_back_db = 30.0;  ///< A_m
    double side_lobe_db = 30.0;      ///< SLA_v

    bool operator==(const ElementPattern&) const = default;
};

/// Uniform rectangular array. Element spacings are in carrier wavelengths.
///
/// Element indexing: element n sits at column p (horizontal, along the local
/// +y axis) and row q (vertical, along local +z) with n = q * n_cols + p.
struct ArrayConfig {
    int n_rows = 8;
    int n_cols = 8;
    double d_h = 0.5;
    double d_v = 0.5;
    ElementPattern element;

    std::size_t size() const { return static_cast<std::size_t>(n_rows) * static_cast<std::size_t>(n_cols); }
    bool operator==(const ArrayConfig&) const = default;
};

/// Direction in a TRP local frame: azimuth in (-180, 180] from boresight
/// (positive toward local +y), elevation in [-90, 90] above the horizon.
struct Angles {
    double azimuth_deg = 0.0;
    double elevation_deg = 0.0;

    bool operator==(const Angles&) const = default;
};

struct TrpConfig {
    int site_index = 0;
    int sector_index = 0;
    int trp_id = 1;
    Position3D position = Position3D::Zero();
    double boresight_azimuth_deg = 0.0;  ///< ENU, counter-clockwise from East
    double mechanical_downtilt_deg = 0.0;
    ArrayConfig array;
};

struct LosGeometry {
    Vec3 unit_vector;
    double range_m = 0.0;
    Angles angles;
};

/// Hexagonal layout: site 0 at the origin, for seven sites six neighbors on a
/// ring of radius `isd_m`. Three sectors per site with boresights
/// {30, 150, 270} + `boresight_offset_deg`. trp_id = 3 * site + sector + 1.
std::vector<TrpConfig> build_deployment(int n_sites, double isd_m, double trp_height_m,
                                        const ArrayConfig& array,
                                        double boresight_offset_deg = 0.0,
                                        double downtilt_deg = 0.0);

const TrpConfig& find_trp(std::span<const TrpConfig> trps, int trp_id);

LosGeometry los_geometry(const TrpConfig& trp, const Position3D& point);

/// Unit vector in the global frame for a direction given in the TRP local frame.
Vec3 local_to_global(const TrpConfig& trp, const Angles& angles);

/// Local-frame angles of a global direction (need not be normalized).
Angles global_to_local(const TrpConfig& trp, const Vec3& direction);

std::vector<Complex> array_response(const ArrayConfig& array, const Angles& angles);

double element_gain_dbi(const ArrayConfig& array, const Angles& angles);

/// Wraps to (-180, 180].
double wrap_azimuth_deg(double deg);

}  // namespace mtrp
