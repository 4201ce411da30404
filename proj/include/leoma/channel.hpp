#pragma once

// Per-slot channel quantities for the ground-station array: station-frame
// wave vectors, satellite aperture gain, path gain, steering vectors, SINR,
// achievable rate, and beam-pattern sampling.

#include <algorithm>
#include <complex>
#include <limits>
#include <vector>

#include <Eigen/Dense>

#include "leoma/orbit.hpp"

namespace leoma {

using Complex = std::complex<double>;
using CVec = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;

// Ground-station receiver and link-budget parameters. All powers in watts,
// all lengths in meters.
struct StationConfig {
    int antenna_count = 16;            // N
    double wavelength_m = 0.0;         // lambda
    double region_side_m = 0.0;        // movement region A = [0, side]^2
    double min_spacing_m = 0.0;        // d_min
    double noise_power_w = 1e-15;      // sigma^2 (-120 dBm)
    double tx_power_w = 1000.0;        // P_s (30 dBW)
    double aperture_radius_m = 0.0;    // satellite dish radius r
    double aperture_efficiency = 0.5;  // eta
    double pathloss_exponent = 2.0;    // gamma_pl
    double ref_path_gain = 0.0;        // rho_0 at 1 m; default Friis (lambda/4pi)^2
    // Squared J1(x)/x aperture pattern (3GPP TR 38.811) instead of the
    // amplitude form; see antenna_gain().
    bool squared_aperture_pattern = false;

    void apply_wavelength_defaults() {
        if (region_side_m <= 0.0) region_side_m = 3.0 * wavelength_m;
        if (min_spacing_m <= 0.0) min_spacing_m = 0.5 * wavelength_m;
        if (aperture_radius_m <= 0.0) aperture_radius_m = 3.0 * wavelength_m;
        if (ref_path_gain <= 0.0) {
            const double f = wavelength_m / (4.0 * std::numbers::pi);
            ref_path_gain = f * f;
        }
    }

    void validate() const {
        if (antenna_count < 1) throw ConfigError("StationConfig: N must be >= 1");
        if (wavelength_m <= 0.0) throw ConfigError("StationConfig: lambda must be > 0");
        if (region_side_m <= 0.0) throw ConfigError("StationConfig: region side must be > 0");
        if (min_spacing_m < 0.0) throw ConfigError("StationConfig: d_min must be >= 0");
        if (noise_power_w <= 0.0) throw ConfigError("StationConfig: sigma2 must be > 0");
        if (tx_power_w <= 0.0) throw ConfigError("StationConfig: P_s must be > 0");
        if (aperture_radius_m <= 0.0) throw ConfigError("StationConfig: r must be > 0");
        if (!(aperture_efficiency > 0.0 && aperture_efficiency <= 1.0))
            throw ConfigError("StationConfig: eta must lie in (0, 1]");
        if (pathloss_exponent <= 0.0) throw ConfigError("StationConfig: gamma_pl must be > 0");
        if (ref_path_gain <= 0.0) throw ConfigError("StationConfig: rho0 must be > 0");
    }
};

// Antenna position vector: antenna n at (coords[2n], coords[2n+1]) in the
// station x-y plane.
struct ArrayLayout {
    Eigen::VectorXd coords;

    ArrayLayout() = default;
    explicit ArrayLayout(int antennas) : coords(Eigen::VectorXd::Zero(2 * antennas)) {}

    int size() const { return int(coords.size()) / 2; }
    Eigen::Vector2d antenna(int n) const { return coords.segment<2>(2 * n); }
    void set_antenna(int n, const Eigen::Vector2d& p) { coords.segment<2>(2 * n) = p; }

    bool inside_region(double side, double tol = 0.0) const {
        return (coords.array() >= -tol).all() && (coords.array() <= side + tol).all();
    }
    double min_pair_distance() const {
        double best = std::numeric_limits<double>::infinity();
        for (int n = 0; n < size(); ++n)
            for (int m = n + 1; m < size(); ++m)
                best = std::min(best, (antenna(n) - antenna(m)).norm());
        return best;
    }
};

// One satellite-to-station link at a slot midpoint.
struct SlotLink {
    SatelliteId sat;
    Eigen::Vector2d wave = Eigen::Vector2d::Zero();  // effective 2D wave vector, rad/m
    double d_bar = 0.0;   // combined gain D(tau) * rho
    double phase = 0.0;   // common carrier phase (2pi/lambda)*range
};

struct SlotGeometry {
    double t_mid = 0.0;
    bool servable = false;
    SlotLink serving;
    std::vector<SlotLink> interferers;

    // serving + interferers, serving first
    template <typename F>
    void for_each_link(F&& f) const {
        f(serving);
        for (const auto& l : interferers) f(l);
    }
};

struct BeamWeights {
    std::vector<CVec> w;  // one N-vector per slot
};

// Geocentric-to-station rotation: rows of T(t)^T map GCCS vectors into the
// station frame. The azimuth-row sign is chosen so the matrix is orthogonal
// for every latitude.
inline Eigen::Matrix3d sccs_basis(const ShellConfig& cfg, const GroundTrack& track, double t) {
    const double phi = station_azimuth(cfg, track, t);
    const double theta = track.latitude_rad;
    const double sp = std::sin(phi), cp = std::cos(phi);
    const double st = std::sin(theta), ct = std::cos(theta);
    Eigen::Matrix3d basis;
    basis << sp, -cp * st, -cp * ct,
            -cp, -sp * st, -sp * ct,
             0.0,      ct,      -st;
    return basis;
}

// Effective 2D wave vector in the station plane. Antennas lie at z = 0, so
// only the x-y components contribute to array phases.
inline Eigen::Vector2d effective_wave_vector(const ShellConfig& cfg, const GroundTrack& track,
                                             SatelliteId sat, double t, double wavelength) {
    const Vec3 a_bar = ground_station_ecef(cfg, track, t) - satellite_ecef(cfg, sat, t);
    const double range = a_bar.norm();
    if (range <= 0.0) throw std::runtime_error("effective_wave_vector: degenerate geometry");
    const Vec3 wave = (kTwoPi / wavelength) * (a_bar / range);
    const Vec3 local = sccs_basis(cfg, track, t).transpose() * wave;
    return local.head<2>();
}

// Satellite aperture gain at boresight offset tau. The default is the
// amplitude pattern 4 D0 |J1(x)/x|; the squared variant follows 3GPP
// TR 38.811. Outside the modeled hemisphere the gain is zero.
inline double antenna_gain(double tau, const StationConfig& station) {
    if (std::abs(tau) > std::numbers::pi / 2.0) return 0.0;
    const double d0 = station.aperture_efficiency *
        std::pow(kTwoPi * station.aperture_radius_m / station.wavelength_m, 2);
    if (tau == 0.0) return d0;
    const double x = kTwoPi / station.wavelength_m * station.aperture_radius_m *
                     std::sin(std::abs(tau));
    const double core = std::abs(std::cyl_bessel_j(1.0, x) / x);
    return station.squared_aperture_pattern ? 4.0 * d0 * core * core : 4.0 * d0 * core;
}

struct LinkGain {
    double d_bar = 0.0;
    double phase = 0.0;
};

// Combined link gain D(tau) * rho and the common carrier phase. tau is the
// angle between the downlink direction and the satellite nadir.
inline LinkGain link_gain(const ShellConfig& cfg, const GroundTrack& track, SatelliteId sat,
                          double t, const StationConfig& station) {
    const Vec3 sat_pos = satellite_ecef(cfg, sat, t);
    const Vec3 a_bar = ground_station_ecef(cfg, track, t) - sat_pos;
    const double range = a_bar.norm();
    if (range <= 0.0) throw std::runtime_error("link_gain: degenerate geometry");
    const Vec3 nadir = -sat_pos.normalized();
    const double cos_tau = std::clamp(a_bar.dot(nadir) / range, -1.0, 1.0);
    const double tau = std::acos(cos_tau);
    const double rho = station.ref_path_gain * std::pow(range, -station.pathloss_exponent);
    return {antenna_gain(tau, station) * rho, kTwoPi / station.wavelength_m * range};
}

// Entry n is exp(i * wave . c_n); unit modulus by construction.
inline CVec steering_vector(const Eigen::Vector2d& wave, const ArrayLayout& layout) {
    CVec s(layout.size());
    for (int n = 0; n < layout.size(); ++n)
        s[n] = std::polar(1.0, wave.dot(layout.antenna(n)));
    return s;
}

// Snapshot of a slot: the visible ascending satellites with the strongest
// combined gain chosen as the serving link (ties broken by lowest (j, k)).
inline SlotGeometry build_slot_geometry(const ShellConfig& cfg, const GroundTrack& track,
                                        double t_mid, const StationConfig& station) {
    SlotGeometry slot;
    slot.t_mid = t_mid;
    const auto visible = visible_ascending_set(cfg, track, t_mid);
    if (visible.empty()) return slot;

    std::vector<SlotLink> links;
    links.reserve(visible.size());
    for (const SatelliteId sat : visible) {
        const LinkGain g = link_gain(cfg, track, sat, t_mid, station);
        links.push_back({sat, effective_wave_vector(cfg, track, sat, t_mid, station.wavelength_m),
                         g.d_bar, g.phase});
    }
    const auto best = std::max_element(links.begin(), links.end(),
        [](const SlotLink& a, const SlotLink& b) {
            if (a.d_bar != b.d_bar) return a.d_bar < b.d_bar;
            return b.sat < a.sat;  // prefer the lower id on ties
        });
    slot.servable = true;
    slot.serving = *best;
    for (auto it = links.begin(); it != links.end(); ++it)
        if (it != best) slot.interferers.push_back(*it);
    return slot;
}

// SINR of one slot for weights w: the common carrier phase cancels, so only
// steering vectors and combined gains enter.
inline double sinr(const SlotGeometry& slot, const ArrayLayout& layout, const CVec& w,
                   const StationConfig& station) {
    if (w.squaredNorm() == 0.0) throw std::invalid_argument("sinr: zero beam weights");
    if (!slot.servable) return 0.0;
    const Complex proj = steering_vector(slot.serving.wave, layout).dot(w);  // s^H w
    const double numerator = slot.serving.d_bar * std::norm(proj);
    double denom = station.noise_power_w / station.tx_power_w * w.squaredNorm();
    for (const SlotLink& l : slot.interferers)
        denom += l.d_bar * std::norm(steering_vector(l.wave, layout).dot(w));
    return numerator / denom;
}

// Average achievable rate over the window, bits/s/Hz. Unservable slots
// contribute zero.
inline double average_rate(const std::vector<SlotGeometry>& slots, const ArrayLayout& layout,
                           const BeamWeights& weights, const StationConfig& station) {
    if (weights.w.size() != slots.size())
        throw std::invalid_argument("average_rate: weights/slots size mismatch");
    double sum = 0.0;
    for (size_t m = 0; m < slots.size(); ++m) {
        if (!slots[m].servable) continue;
        sum += std::log2(1.0 + sinr(slots[m], layout, weights.w[m], station));
    }
    return sum / double(slots.size());
}

struct BeamPatternSample {
    double elevation_deg = 0.0;  // from the station plane toward zenith
    double azimuth_deg = 0.0;
    double gain = 0.0;           // |s(a)^H w|^2
    std::string marker;          // "", "serving", or "interferer j.k"
};

// Samples |s^H w|^2 over an elevation/azimuth grid at the station, with the
// slot's satellite directions appended as marker rows.
inline std::vector<BeamPatternSample> beam_pattern(const SlotGeometry& slot,
                                                   const ArrayLayout& layout, const CVec& w,
                                                   const StationConfig& station,
                                                   int elevation_steps = 45,
                                                   int azimuth_steps = 90) {
    if (w.squaredNorm() == 0.0) throw std::invalid_argument("beam_pattern: zero beam weights");
    std::vector<BeamPatternSample> out;
    const double k0 = kTwoPi / station.wavelength_m;
    const double deg = std::numbers::pi / 180.0;
    auto gain_at = [&](double elev_rad, double azim_rad) {
        // Incoming wave from (elev, azim): horizontal component k0*cos(elev).
        const Eigen::Vector2d wave{k0 * std::cos(elev_rad) * std::cos(azim_rad),
                                   k0 * std::cos(elev_rad) * std::sin(azim_rad)};
        return std::norm(steering_vector(wave, layout).dot(w));
    };
    for (int e = 0; e <= elevation_steps; ++e) {
        const double elev = 90.0 * double(e) / double(elevation_steps);
        for (int a = 0; a < azimuth_steps; ++a) {
            const double azim = -180.0 + 360.0 * double(a) / double(azimuth_steps);
            out.push_back({elev, azim, gain_at(elev * deg, azim * deg), ""});
        }
    }
    auto marker_row = [&](const SlotLink& l, std::string tag) {
        const double horiz = l.wave.norm();
        const double elev = std::acos(std::clamp(horiz / k0, 0.0, 1.0)) / deg;
        const double azim = std::atan2(l.wave.y(), l.wave.x()) / deg;
        out.push_back({elev, azim, std::norm(steering_vector(l.wave, layout).dot(w)),
                       std::move(tag)});
    };
    if (slot.servable) {
        marker_row(slot.serving, "serving");
        for (const SlotLink& l : slot.interferers)
            marker_row(l, "interferer " + std::to_string(l.sat.orbit) + "." +
                              std::to_string(l.sat.index));
    }
    return out;
}

}  // namespace leoma
