#pragma once

// Shared fixtures for the test suites: canonical simulation parameters,
// deterministic random slot geometries, and random layouts.

#include <random>

#include "leoma/leoma.hpp"

namespace leoma::testing {

inline StationConfig table1_station(int antennas = 16) {
    StationConfig station;
    station.antenna_count = antennas;
    station.wavelength_m = 299792458.0 / 14e9;
    station.apply_wavelength_defaults();
    return station;
}

inline ShellConfig table1_shell(int sats_per_orbit, int orbit_count) {
    ShellConfig shell;
    shell.sats_per_orbit = sats_per_orbit;
    shell.orbit_count = orbit_count;
    shell.earth_period_s = default_earth_period(shell);
    return shell;
}

// K=24, J=12, N=8, M=50 with the canonical parameters otherwise. The
// station sits at 25 deg latitude, where the serving/interference geometry
// keeps all three schemes clearly separated at this scale.
inline Scenario desk_scenario() {
    Scenario scenario;
    scenario.shell = table1_shell(24, 12);
    scenario.station = table1_station(8);
    scenario.track.latitude_rad = 25.0 * std::numbers::pi / 180.0;
    scenario.slot_count = 50;
    return scenario;
}

inline ArrayLayout random_layout(std::mt19937_64& rng, int antennas, double side) {
    std::uniform_real_distribution<double> coord(0.0, side);
    ArrayLayout layout(antennas);
    for (int i = 0; i < 2 * antennas; ++i) layout.coords[i] = coord(rng);
    return layout;
}

inline CVec random_weights(std::mt19937_64& rng, int antennas) {
    std::normal_distribution<double> normal(0.0, 1.0);
    CVec w(antennas);
    for (int i = 0; i < antennas; ++i) w[i] = Complex{normal(rng), normal(rng)};
    return w;
}

// Synthetic slot with one serving link and `interferers` others. Wave
// vectors are drawn inside the disc of radius 2*pi/lambda and combined
// gains near the canonical link-budget scale.
inline SlotGeometry random_slot(std::mt19937_64& rng, const StationConfig& station,
                                int interferers = 2) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_real_distribution<double> angle(-std::numbers::pi, std::numbers::pi);
    const double k0 = kTwoPi / station.wavelength_m;
    auto random_link = [&](int j, int k) {
        SlotLink link;
        link.sat = {j, k};
        const double radius = k0 * std::sqrt(unit(rng));
        const double phi = angle(rng);
        link.wave = radius * Eigen::Vector2d{std::cos(phi), std::sin(phi)};
        link.d_bar = 1.7e-15 * (0.1 + unit(rng));
        link.phase = angle(rng);
        return link;
    };
    SlotGeometry slot;
    slot.servable = true;
    slot.serving = random_link(1, 1);
    for (int i = 0; i < interferers; ++i) slot.interferers.push_back(random_link(2, i + 1));
    return slot;
}

inline std::vector<SlotGeometry> random_slots(std::mt19937_64& rng, const StationConfig& station,
                                              int count, int interferers = 2) {
    std::vector<SlotGeometry> slots;
    for (int m = 0; m < count; ++m) {
        slots.push_back(random_slot(rng, station, interferers));
        slots.back().t_mid = double(m);
    }
    return slots;
}

// Single overhead satellite, no interference: a_eff = 0 and the canonical
// combined gain at 550 km range.
inline SlotGeometry overhead_slot(const StationConfig& station, double range_m = 550e3) {
    SlotGeometry slot;
    slot.servable = true;
    slot.serving.sat = {1, 1};
    slot.serving.wave = Eigen::Vector2d::Zero();
    const double d0 = station.aperture_efficiency *
        std::pow(kTwoPi * station.aperture_radius_m / station.wavelength_m, 2);
    slot.serving.d_bar =
        d0 * station.ref_path_gain * std::pow(range_m, -station.pathloss_exponent);
    slot.serving.phase = kTwoPi / station.wavelength_m * range_m;
    return slot;
}

}  // namespace leoma::testing
