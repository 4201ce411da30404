#pragma once

// Scenario files (JSON in), result export (CSV out), and the sweep driver.
// Field names follow the simulation-parameter table: J, K, R, H, beta, M,
// fc, d_min, sigma2, N, P_s, r, eta. Angles are degrees in files and
// radians internally; powers accept "dBm"/"dBW"/"W" suffixes and are stored
// in watts.

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <set>
#include <iostream>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "leoma/solver.hpp"

namespace leoma {

using json = nlohmann::json;

inline constexpr double kDegToRad = std::numbers::pi / 180.0;
inline constexpr double kSpeedOfLight = 299792458.0;

struct ScenarioSpec {
    Scenario base;
    double carrier_frequency_hz = 14e9;
    std::vector<Scheme> schemes = {Scheme::MovableAntenna, Scheme::SparseFixed,
                                   Scheme::DenseFixed};
    SolverConfig solver;

    // Optional sweep axes.
    std::vector<int> sweep_antennas;
    std::vector<double> sweep_tx_power_w;
    std::vector<double> sweep_latitude_rad;
    std::vector<std::pair<int, int>> sweep_constellation;  // (K, J)

    bool has_sweep() const {
        return !(sweep_antennas.empty() && sweep_tx_power_w.empty() &&
                 sweep_latitude_rad.empty() && sweep_constellation.empty());
    }
};

inline double parse_power_field(const json& value, const std::string& key) {
    if (value.is_number()) return value.get<double>();
    if (value.is_string()) {
        const std::string text = value.get<std::string>();
        std::istringstream in(text);
        double v = 0.0;
        std::string unit;
        in >> v >> unit;
        if (!in.fail()) {
            if (unit == "dBm") return std::pow(10.0, (v - 30.0) / 10.0);
            if (unit == "dBW") return std::pow(10.0, v / 10.0);
            if (unit == "W") return v;
            if (unit == "mW") return v * 1e-3;
        }
        throw ConfigError("power field '" + key + "' needs a unit (W, mW, dBm, dBW): " + text);
    }
    throw ConfigError("power field '" + key + "' must be a number or unit string");
}

inline Scheme parse_scheme(const std::string& name) {
    if (name == "MA") return Scheme::MovableAntenna;
    if (name == "SFPA") return Scheme::SparseFixed;
    if (name == "DFPA") return Scheme::DenseFixed;
    throw ConfigError("unknown scheme '" + name + "' (expected MA, SFPA, or DFPA)");
}

inline ScenarioSpec scenario_from_json(const json& doc) {
    static const std::set<std::string> known = {
        "J", "K", "R", "H", "beta", "mu", "earth_period", "N", "fc", "region_side_lambda",
        "d_min_lambda", "r_lambda", "eta", "sigma2", "P_s", "gamma_pl", "rho0",
        "squared_pattern", "theta_u", "phi_u0", "M", "schemes", "solver", "sweep"};
    if (!doc.is_object()) throw ConfigError("scenario file must hold a JSON object");
    for (const auto& [key, _] : doc.items())
        if (!known.contains(key)) throw ConfigError("unknown scenario key '" + key + "'");

    ScenarioSpec spec;
    auto& shell = spec.base.shell;
    auto& station = spec.base.station;

    if (!doc.contains("J") || !doc.contains("K"))
        throw ConfigError("scenario keys 'J' and 'K' are required");
    shell.orbit_count = doc.at("J").get<int>();
    shell.sats_per_orbit = doc.at("K").get<int>();
    shell.earth_radius_m = doc.value("R", 6371e3);
    shell.altitude_m = doc.value("H", 550e3);
    const double beta_deg = doc.value("beta", 65.0);
    if (!(beta_deg > 0.0 && beta_deg < 180.0))
        throw ConfigError("key 'beta' must lie in (0, 180) degrees");
    shell.inclination_rad = beta_deg * kDegToRad;
    shell.mu = doc.value("mu", kEarthMu);
    shell.earth_period_s = doc.contains("earth_period")
        ? doc.at("earth_period").get<double>()
        : default_earth_period(shell);
    shell.validate();

    spec.carrier_frequency_hz = doc.value("fc", 14e9);
    if (spec.carrier_frequency_hz <= 0.0) throw ConfigError("key 'fc' must be > 0");
    station.wavelength_m = kSpeedOfLight / spec.carrier_frequency_hz;
    station.antenna_count = doc.value("N", 16);
    station.region_side_m = doc.value("region_side_lambda", 3.0) * station.wavelength_m;
    station.min_spacing_m = doc.value("d_min_lambda", 0.5) * station.wavelength_m;
    station.aperture_radius_m = doc.value("r_lambda", 3.0) * station.wavelength_m;
    station.aperture_efficiency = doc.value("eta", 0.5);
    station.noise_power_w =
        doc.contains("sigma2") ? parse_power_field(doc.at("sigma2"), "sigma2") : 1e-15;
    station.tx_power_w = doc.contains("P_s") ? parse_power_field(doc.at("P_s"), "P_s") : 1000.0;
    station.pathloss_exponent = doc.value("gamma_pl", 2.0);
    if (doc.contains("rho0")) station.ref_path_gain = doc.at("rho0").get<double>();
    station.squared_aperture_pattern = doc.value("squared_pattern", false);
    station.apply_wavelength_defaults();
    station.validate();

    const double theta_deg = doc.value("theta_u", 0.0);
    if (std::abs(theta_deg) > 90.0)
        throw ConfigError("key 'theta_u' must lie in [-90, 90] degrees");
    spec.base.track.latitude_rad = theta_deg * kDegToRad;
    spec.base.track.azimuth0_rad = doc.value("phi_u0", 0.0) * kDegToRad;

    spec.base.slot_count = doc.value("M", 500);
    if (spec.base.slot_count < 1) throw ConfigError("key 'M' must be >= 1");

    if (doc.contains("schemes")) {
        spec.schemes.clear();
        for (const auto& name : doc.at("schemes"))
            spec.schemes.push_back(parse_scheme(name.get<std::string>()));
        if (spec.schemes.empty()) throw ConfigError("key 'schemes' must not be empty");
    }

    if (doc.contains("solver")) {
        const json& s = doc.at("solver");
        for (const auto& [key, _] : s.items())
            if (key != "epsilon" && key != "i_max")
                throw ConfigError("unknown solver key '" + key + "'");
        spec.solver.epsilon = s.value("epsilon", 1e-4);
        spec.solver.max_iterations = s.value("i_max", 100);
        spec.solver.validate();
    }

    if (doc.contains("sweep")) {
        const json& s = doc.at("sweep");
        for (const auto& [key, _] : s.items())
            if (key != "N" && key != "P_s" && key != "theta_u" && key != "constellation")
                throw ConfigError("unknown sweep key '" + key + "'");
        if (s.contains("N")) spec.sweep_antennas = s.at("N").get<std::vector<int>>();
        if (s.contains("P_s"))
            for (const auto& v : s.at("P_s"))
                spec.sweep_tx_power_w.push_back(parse_power_field(v, "sweep.P_s"));
        if (s.contains("theta_u"))
            for (double deg : s.at("theta_u").get<std::vector<double>>())
                spec.sweep_latitude_rad.push_back(deg * kDegToRad);
        if (s.contains("constellation"))
            for (const auto& pair : s.at("constellation"))
                spec.sweep_constellation.emplace_back(pair.at(0).get<int>(),
                                                      pair.at(1).get<int>());
        for (const auto& axis : {s.contains("N") && spec.sweep_antennas.empty(),
                                 s.contains("P_s") && spec.sweep_tx_power_w.empty(),
                                 s.contains("theta_u") && spec.sweep_latitude_rad.empty(),
                                 s.contains("constellation") && spec.sweep_constellation.empty()})
            if (axis) throw ConfigError("sweep axes must not be empty");
    }
    return spec;
}

inline ScenarioSpec parse_scenario(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open scenario file " + path.string());
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("scenario file " + path.string() + ": " + e.what());
    }
    return scenario_from_json(doc);
}

inline json scenario_to_json(const ScenarioSpec& spec) {
    json doc;
    doc["J"] = spec.base.shell.orbit_count;
    doc["K"] = spec.base.shell.sats_per_orbit;
    doc["R"] = spec.base.shell.earth_radius_m;
    doc["H"] = spec.base.shell.altitude_m;
    doc["beta"] = spec.base.shell.inclination_rad / kDegToRad;
    doc["mu"] = spec.base.shell.mu;
    doc["earth_period"] = spec.base.shell.earth_period_s;
    doc["fc"] = spec.carrier_frequency_hz;
    doc["N"] = spec.base.station.antenna_count;
    doc["region_side_lambda"] = spec.base.station.region_side_m / spec.base.station.wavelength_m;
    doc["d_min_lambda"] = spec.base.station.min_spacing_m / spec.base.station.wavelength_m;
    doc["r_lambda"] = spec.base.station.aperture_radius_m / spec.base.station.wavelength_m;
    doc["eta"] = spec.base.station.aperture_efficiency;
    doc["sigma2"] = spec.base.station.noise_power_w;
    doc["P_s"] = spec.base.station.tx_power_w;
    doc["gamma_pl"] = spec.base.station.pathloss_exponent;
    doc["rho0"] = spec.base.station.ref_path_gain;
    doc["squared_pattern"] = spec.base.station.squared_aperture_pattern;
    doc["theta_u"] = spec.base.track.latitude_rad / kDegToRad;
    doc["phi_u0"] = spec.base.track.azimuth0_rad / kDegToRad;
    doc["M"] = spec.base.slot_count;
    doc["schemes"] = json::array();
    for (Scheme s : spec.schemes) doc["schemes"].push_back(scheme_name(s));
    doc["solver"] = {{"epsilon", spec.solver.epsilon}, {"i_max", spec.solver.max_iterations}};
    json sweep = json::object();
    if (!spec.sweep_antennas.empty()) sweep["N"] = spec.sweep_antennas;
    if (!spec.sweep_tx_power_w.empty()) sweep["P_s"] = spec.sweep_tx_power_w;
    if (!spec.sweep_latitude_rad.empty()) {
        sweep["theta_u"] = json::array();
        for (double rad : spec.sweep_latitude_rad) sweep["theta_u"].push_back(rad / kDegToRad);
    }
    if (!spec.sweep_constellation.empty()) {
        sweep["constellation"] = json::array();
        for (auto [k, j] : spec.sweep_constellation)
            sweep["constellation"].push_back(json::array({k, j}));
    }
    if (!sweep.empty()) doc["sweep"] = sweep;
    return doc;
}

// FNV-1a over the canonical serialization; stable across platforms.
inline std::uint64_t spec_hash(const ScenarioSpec& spec) {
    const std::string text = scenario_to_json(spec).dump();
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char ch : text) {
        h ^= ch;
        h *= 1099511628211ull;
    }
    return h;
}

struct ResultBundle {
    std::uint64_t hash = 0;
    std::vector<SolveResult> results;   // one per scheme, in spec order
    std::vector<std::string> warnings;  // scenario-level (e.g. slot alignment)
};

inline ResultBundle run_scenario(const ScenarioSpec& spec) {
    ResultBundle bundle;
    bundle.hash = spec_hash(spec);
    const TimeGrid grid = make_time_grid(spec.base.shell, spec.base.slot_count);
    if (!grid.spacing_aligned)
        bundle.warnings.push_back(
            "observation window is not an integer multiple of the in-orbit spacing period");
    const auto slots = build_slots(spec.base);
    for (Scheme scheme : spec.schemes) {
        SolverConfig cfg = spec.solver;
        cfg.scheme = scheme;
        bundle.results.push_back(optimize(spec.base, slots, cfg));
    }
    return bundle;
}

namespace detail {

inline std::string fmt(double v) {
    std::ostringstream out;
    out << std::setprecision(17) << v;
    return out.str();
}

inline std::ofstream open_csv(const std::filesystem::path& dir, const std::string& name,
                              const std::string& header) {
    std::filesystem::create_directories(dir);
    std::ofstream out(dir / name);
    if (!out) throw std::runtime_error("cannot write " + (dir / name).string());
    out << header << "\n";
    return out;
}

}  // namespace detail

// Writes rates.csv, trace.csv, layout.csv, gains.csv for one bundle.
inline void write_bundle_csv(const ScenarioSpec& spec, const ResultBundle& bundle,
                             const std::filesystem::path& dir) {
    using detail::fmt;
    const TimeGrid grid = make_time_grid(spec.base.shell, spec.base.slot_count);

    // Scheme key ordered lexicographically for diff stability.
    std::vector<size_t> order(bundle.results.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
        return std::string(scheme_name(bundle.results[a].scheme)) <
               std::string(scheme_name(bundle.results[b].scheme));
    });

    auto rates = detail::open_csv(dir, "rates.csv", "slot_index,t_m,scheme,rate_bpshz");
    for (size_t m = 0; m < grid.midpoints.size(); ++m)
        for (size_t i : order)
            rates << m + 1 << "," << fmt(grid.midpoints[m]) << ","
                  << scheme_name(bundle.results[i].scheme) << ","
                  << fmt(bundle.results[i].per_slot_rates[m]) << "\n";

    auto trace = detail::open_csv(dir, "trace.csv", "iteration,scheme,avg_rate");
    size_t longest = 0;
    for (const auto& r : bundle.results) longest = std::max(longest, r.trace.size());
    for (size_t it = 0; it < longest; ++it)
        for (size_t i : order)
            if (it < bundle.results[i].trace.size())
                trace << it << "," << scheme_name(bundle.results[i].scheme) << ","
                      << fmt(bundle.results[i].trace[it]) << "\n";

    auto layout = detail::open_csv(dir, "layout.csv", "scheme,antenna,x_over_lambda,y_over_lambda");
    for (size_t i : order) {
        const auto& r = bundle.results[i];
        for (int n = 0; n < r.layout.size(); ++n)
            layout << scheme_name(r.scheme) << "," << n + 1 << ","
                   << fmt(r.layout.antenna(n).x() / spec.base.station.wavelength_m) << ","
                   << fmt(r.layout.antenna(n).y() / spec.base.station.wavelength_m) << "\n";
    }

    auto to_db = [](double v) -> std::string {
        return v > 0.0 ? detail::fmt(10.0 * std::log10(v)) : "-inf";
    };
    auto gains = detail::open_csv(dir, "gains.csv", "scheme,desired_db,interference_db");
    for (size_t i : order)
        gains << scheme_name(bundle.results[i].scheme) << ","
              << to_db(bundle.results[i].desired_gain) << ","
              << to_db(bundle.results[i].interference_gain) << "\n";
}

// Beam-pattern CSVs for the requested 1-based slot indices, one file per
// scheme and slot.
inline void write_beam_patterns(const ScenarioSpec& spec, const std::vector<int>& slot_indices,
                                const std::filesystem::path& dir) {
    for (int idx : slot_indices)
        if (idx < 1 || idx > spec.base.slot_count)
            throw ConfigError("slot index " + std::to_string(idx) + " outside 1.." +
                              std::to_string(spec.base.slot_count));
    const auto slots = build_slots(spec.base);
    for (Scheme scheme : spec.schemes) {
        SolverConfig cfg = spec.solver;
        cfg.scheme = scheme;
        const SolveResult result = optimize(spec.base, slots, cfg);
        for (int idx : slot_indices) {
            const SlotGeometry& slot = slots[size_t(idx - 1)];
            const CVec& w = result.weights.w[size_t(idx - 1)];
            if (!slot.servable || w.norm() == 0.0) {
                std::cerr << "warning: slot " << idx
                          << " has no serving satellite, beam pattern skipped\n";
                continue;
            }
            auto out = detail::open_csv(
                dir,
                std::string("beampattern_") + scheme_name(scheme) + "_slot" +
                    std::to_string(idx) + ".csv",
                "elev_deg,azim_deg,gain_linear,gain_db,marker");
            for (const BeamPatternSample& s :
                 beam_pattern(slot, result.layout, w, spec.base.station))
                out << detail::fmt(s.elevation_deg) << "," << detail::fmt(s.azimuth_deg) << ","
                    << detail::fmt(s.gain) << ","
                    << (s.gain > 0.0 ? detail::fmt(10.0 * std::log10(s.gain)) : "-inf") << ","
                    << s.marker << "\n";
        }
    }
}

// Satellite ephemeris dump for debugging: every satellite at every slot
// midpoint with visibility and serving flags.
inline void write_ephemeris(const ScenarioSpec& spec, const std::filesystem::path& dir) {
    const TimeGrid grid = make_time_grid(spec.base.shell, spec.base.slot_count);
    auto out = detail::open_csv(dir, "ephemeris.csv", "slot_index,t_m,j,k,x_m,y_m,z_m,role");
    for (size_t m = 0; m < grid.midpoints.size(); ++m) {
        const double t = grid.midpoints[m];
        const SlotGeometry slot =
            build_slot_geometry(spec.base.shell, spec.base.track, t, spec.base.station);
        for (int j = 1; j <= spec.base.shell.orbit_count; ++j) {
            for (int k = 1; k <= spec.base.shell.sats_per_orbit; ++k) {
                const SatelliteId sat{j, k};
                std::string role = "hidden";
                if (slot.servable && slot.serving.sat == sat) {
                    role = "serving";
                } else {
                    for (const SlotLink& l : slot.interferers)
                        if (l.sat == sat) role = "interferer";
                }
                const Vec3 p = satellite_ecef(spec.base.shell, sat, t);
                out << m + 1 << "," << detail::fmt(t) << "," << j << "," << k << ","
                    << detail::fmt(p.x()) << "," << detail::fmt(p.y()) << ","
                    << detail::fmt(p.z()) << "," << role << "\n";
            }
        }
    }
}

struct SweepPoint {
    int antennas;
    double tx_power_w;
    double latitude_rad;
    int sats_per_orbit;
    int orbit_count;
    Scheme scheme;
    double avg_rate = 0.0;
};

// Cartesian product over the configured sweep axes; axes absent from the
// spec are pinned to the base value.
inline std::vector<SweepPoint> run_sweep(const ScenarioSpec& spec, int workers = 1) {
    if (!spec.has_sweep()) throw ConfigError("sweep requested but no sweep axes configured");
    auto antennas = spec.sweep_antennas;
    if (antennas.empty()) antennas = {spec.base.station.antenna_count};
    auto powers = spec.sweep_tx_power_w;
    if (powers.empty()) powers = {spec.base.station.tx_power_w};
    auto latitudes = spec.sweep_latitude_rad;
    if (latitudes.empty()) latitudes = {spec.base.track.latitude_rad};
    auto shells = spec.sweep_constellation;
    if (shells.empty())
        shells = {{spec.base.shell.sats_per_orbit, spec.base.shell.orbit_count}};

    std::vector<SweepPoint> points;
    for (auto [k, j] : shells)
        for (double lat : latitudes)
            for (int n : antennas)
                for (double p : powers)
                    for (Scheme scheme : spec.schemes)
                        points.push_back({n, p, lat, k, j, scheme});

    auto evaluate = [&](SweepPoint& pt) {
        Scenario scenario = spec.base;
        scenario.shell.sats_per_orbit = pt.sats_per_orbit;
        scenario.shell.orbit_count = pt.orbit_count;
        scenario.station.antenna_count = pt.antennas;
        scenario.station.tx_power_w = pt.tx_power_w;
        scenario.track.latitude_rad = pt.latitude_rad;
        SolverConfig cfg = spec.solver;
        cfg.scheme = pt.scheme;
        pt.avg_rate = optimize(scenario, cfg).avg_rate;
    };

    workers = std::max(1, workers);
    if (workers == 1) {
        for (SweepPoint& pt : points) evaluate(pt);
    } else {
        std::atomic<size_t> next{0};
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w)
            pool.emplace_back([&] {
                for (size_t i = next.fetch_add(1); i < points.size(); i = next.fetch_add(1))
                    evaluate(points[i]);
            });
        for (auto& th : pool) th.join();
    }
    return points;
}

inline void write_sweep_csv(const std::vector<SweepPoint>& points,
                            const std::filesystem::path& dir) {
    auto out = detail::open_csv(dir, "sweep.csv",
                                "K,J,theta_u_deg,N,P_s_w,scheme,avg_rate");
    for (const SweepPoint& pt : points)
        out << pt.sats_per_orbit << "," << pt.orbit_count << ","
            << detail::fmt(pt.latitude_rad / kDegToRad) << "," << pt.antennas << ","
            << detail::fmt(pt.tx_power_w) << "," << scheme_name(pt.scheme) << ","
            << detail::fmt(pt.avg_rate) << "\n";
}

}  // namespace leoma
