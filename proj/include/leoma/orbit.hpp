#pragma once

// Walker-Delta constellation kinematics in a geocentric Cartesian frame:
// circular orbits at a common altitude and inclination, J equally phased
// planes with K satellites each, plus the rotating ground station and the
// ascending-segment visibility rule.

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace leoma {

using Vec3 = Eigen::Vector3d;

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

// WGS-84 gravitational parameter, m^3/s^2.
inline constexpr double kEarthMu = 3.986004418e14;

struct ConfigError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Constellation shell geometry. Angles in radians, lengths in meters.
struct ShellConfig {
    int orbit_count = 0;        // J
    int sats_per_orbit = 0;     // K
    double earth_radius_m = 6371e3;
    double altitude_m = 550e3;
    double inclination_rad = 65.0 * std::numbers::pi / 180.0;
    double mu = kEarthMu;
    double earth_period_s = 0.0;  // T_E; see default_earth_period()

    void validate() const {
        if (orbit_count < 1) throw ConfigError("ShellConfig: J must be >= 1");
        if (sats_per_orbit < 2) throw ConfigError("ShellConfig: K must be >= 2");
        if (altitude_m <= 0.0) throw ConfigError("ShellConfig: H must be > 0");
        if (earth_radius_m <= 0.0) throw ConfigError("ShellConfig: R must be > 0");
        if (!(inclination_rad > 0.0 && inclination_rad < std::numbers::pi))
            throw ConfigError("ShellConfig: beta must lie in (0, pi)");
        if (mu <= 0.0) throw ConfigError("ShellConfig: mu must be > 0");
        if (earth_period_s <= 0.0) throw ConfigError("ShellConfig: earth_period must be > 0");
    }
};

struct SatelliteId {
    int orbit = 1;     // j in 1..J
    int index = 1;     // k in 1..K

    friend bool operator==(const SatelliteId&, const SatelliteId&) = default;
    friend auto operator<=>(const SatelliteId&, const SatelliteId&) = default;
};

// Ground-station placement on the (spherical) earth surface.
struct GroundTrack {
    double latitude_rad = 0.0;   // Theta_u
    double azimuth0_rad = 0.0;   // Phi_u at t = 0
};

inline double orbital_period(const ShellConfig& cfg) {
    const double a = cfg.earth_radius_m + cfg.altitude_m;
    return kTwoPi * std::sqrt(a * a * a / cfg.mu);
}

// Simulated earth rotation period: 15 orbital periods.
inline double default_earth_period(const ShellConfig& cfg) {
    return 15.0 * orbital_period(cfg);
}

// Wrap an angle into (-pi, pi].
inline double wrap_angle(double a) {
    a = std::remainder(a, kTwoPi);
    if (a <= -std::numbers::pi) a += kTwoPi;
    return a;
}

// Geocentric angle between the ascending node and the satellite at time t.
inline double anomaly(const ShellConfig& cfg, SatelliteId sat, double t) {
    if (cfg.sats_per_orbit < 2)
        throw ConfigError("anomaly: K must be >= 2 for in-orbit phasing");
    const double alpha0 = -std::numbers::pi / 2.0 +
        std::numbers::pi * double(sat.index - 1) / double(cfg.sats_per_orbit - 1);
    return kTwoPi * t / orbital_period(cfg) + alpha0;
}

// Satellite position in the geocentric Cartesian frame.
// Azimuth uses atan2(cos(beta) sin(alpha), cos(alpha)) so the track stays
// continuous where tan(alpha) blows up.
inline Vec3 satellite_ecef(const ShellConfig& cfg, SatelliteId sat, double t) {
    const double alpha = anomaly(cfg, sat, t);
    const double radius = cfg.earth_radius_m + cfg.altitude_m;
    const double elev = std::asin(std::sin(cfg.inclination_rad) * std::sin(alpha));
    const double azim = wrap_angle(
        std::atan2(std::cos(cfg.inclination_rad) * std::sin(alpha), std::cos(alpha)) +
        kTwoPi * double(sat.orbit) / double(cfg.orbit_count));
    return {radius * std::cos(elev) * std::cos(azim),
            radius * std::cos(elev) * std::sin(azim),
            radius * std::sin(elev)};
}

inline double station_azimuth(const ShellConfig& cfg, const GroundTrack& track, double t) {
    return wrap_angle(kTwoPi * t / cfg.earth_period_s + track.azimuth0_rad);
}

inline Vec3 ground_station_ecef(const ShellConfig& cfg, const GroundTrack& track, double t) {
    const double azim = station_azimuth(cfg, track, t);
    const double lat = track.latitude_rad;
    return {cfg.earth_radius_m * std::cos(lat) * std::cos(azim),
            cfg.earth_radius_m * std::cos(lat) * std::sin(azim),
            cfg.earth_radius_m * std::sin(lat)};
}

// Satellites on the ascending segment (cos(alpha) > 0) whose slant range
// satisfies ||R_u - R_jk||^2 <= (R+H)^2 - R^2, ordered by (j, k).
inline std::vector<SatelliteId> visible_ascending_set(const ShellConfig& cfg,
                                                      const GroundTrack& track,
                                                      double t) {
    const double radius = cfg.earth_radius_m + cfg.altitude_m;
    const double range2_max = radius * radius - cfg.earth_radius_m * cfg.earth_radius_m;
    const Vec3 station = ground_station_ecef(cfg, track, t);

    std::vector<SatelliteId> out;
    for (int j = 1; j <= cfg.orbit_count; ++j) {
        for (int k = 1; k <= cfg.sats_per_orbit; ++k) {
            const SatelliteId sat{j, k};
            if (std::cos(anomaly(cfg, sat, t)) <= 0.0) continue;
            if ((station - satellite_ecef(cfg, sat, t)).squaredNorm() <= range2_max)
                out.push_back(sat);
        }
    }
    return out;
}

// Observation window (0, T_E/J] split into M equal slots, represented by
// their midpoints.
struct TimeGrid {
    double window_s = 0.0;
    int slot_count = 0;
    std::vector<double> midpoints;
    // False when the window is not an integer multiple of the in-orbit
    // spacing period T/K; slot alignment is then only approximate.
    bool spacing_aligned = true;
};

inline TimeGrid make_time_grid(const ShellConfig& cfg, int slot_count) {
    cfg.validate();
    if (slot_count < 1) throw ConfigError("make_time_grid: M must be >= 1");

    TimeGrid grid;
    grid.window_s = cfg.earth_period_s / double(cfg.orbit_count);
    grid.slot_count = slot_count;
    grid.midpoints.reserve(size_t(slot_count));
    for (int m = 1; m <= slot_count; ++m)
        grid.midpoints.push_back((double(m) - 0.5) * grid.window_s / double(slot_count));

    const double spacing_period = orbital_period(cfg) / double(cfg.sats_per_orbit);
    const double ratio = grid.window_s / spacing_period;
    grid.spacing_aligned = std::abs(ratio - std::round(ratio)) < 1e-6 * ratio;
    return grid;
}

}  // namespace leoma
