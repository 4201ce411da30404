#pragma once

// Block-coordinate-descent driver: auxiliary refresh, closed-form per-slot
// beam weights, optional antenna-placement step, convergence on the average
// rate, and the fixed-grid baseline layouts.

#include "leoma/beamformer.hpp"
#include "leoma/placement.hpp"

namespace leoma {

enum class Scheme {
    MovableAntenna,  // joint layout + weights (MA)
    SparseFixed,     // lambda-spaced grid, weights only (SFPA)
    DenseFixed,      // 0.5 lambda-spaced grid, weights only (DFPA)
};

inline const char* scheme_name(Scheme s) {
    switch (s) {
        case Scheme::MovableAntenna: return "MA";
        case Scheme::SparseFixed: return "SFPA";
        case Scheme::DenseFixed: return "DFPA";
    }
    return "?";
}

struct SolverConfig {
    double epsilon = 1e-4;    // convergence threshold on the average rate
    int max_iterations = 100;
    Scheme scheme = Scheme::MovableAntenna;

    void validate() const {
        if (epsilon <= 0.0) throw ConfigError("SolverConfig: epsilon must be > 0");
        if (max_iterations < 1) throw ConfigError("SolverConfig: i_max must be >= 1");
    }
};

struct Scenario {
    ShellConfig shell;
    StationConfig station;
    GroundTrack track;
    int slot_count = 500;
};

inline std::vector<SlotGeometry> build_slots(const Scenario& scenario) {
    const TimeGrid grid = make_time_grid(scenario.shell, scenario.slot_count);
    std::vector<SlotGeometry> slots;
    slots.reserve(grid.midpoints.size());
    for (double t : grid.midpoints)
        slots.push_back(build_slot_geometry(scenario.shell, scenario.track, t, scenario.station));
    return slots;
}

// Initial layouts. MA and SFPA start from a uniform grid spanning the whole
// region; DFPA packs the same grid shape at the minimum spacing. Non-square
// N fills ceil(sqrt(N)) columns row-major over the same extents.
inline ArrayLayout init_layout(Scheme scheme, const StationConfig& station) {
    const int n = station.antenna_count;
    const int cols = int(std::ceil(std::sqrt(double(n))));
    const int rows = (n + cols - 1) / cols;
    ArrayLayout layout(n);
    for (int i = 0; i < n; ++i) {
        const int col = i % cols;
        const int row = i / cols;
        Eigen::Vector2d p;
        if (scheme == Scheme::DenseFixed) {
            p = {0.5 * station.wavelength_m * col, 0.5 * station.wavelength_m * row};
        } else {
            p = {cols > 1 ? station.region_side_m * col / double(cols - 1)
                          : 0.5 * station.region_side_m,
                 rows > 1 ? station.region_side_m * row / double(rows - 1)
                          : 0.5 * station.region_side_m};
        }
        layout.set_antenna(i, p);
    }
    if (!layout.inside_region(station.region_side_m, 1e-12))
        throw ConfigError("init_layout: grid exceeds the movement region");
    if (n > 1 && layout.min_pair_distance() < station.min_spacing_m - 1e-12)
        throw ConfigError("init_layout: grid violates the minimum antenna spacing");
    return layout;
}

// w(0)[m] = h_serving / ||h_serving||: the steering vector with the common
// carrier phase attached, normalized. Unservable slots get a zero vector.
inline BeamWeights init_weights(const ArrayLayout& layout,
                                const std::vector<SlotGeometry>& slots,
                                const StationConfig& station) {
    BeamWeights weights;
    weights.w.reserve(slots.size());
    for (const SlotGeometry& slot : slots) {
        if (!slot.servable) {
            weights.w.push_back(CVec::Zero(layout.size()));
            continue;
        }
        CVec h = std::polar(1.0, slot.serving.phase) *
                 steering_vector(slot.serving.wave, layout);
        weights.w.push_back(h / h.norm());
    }
    return weights;
}

struct SolveResult {
    Scheme scheme = Scheme::MovableAntenna;
    ArrayLayout layout;
    BeamWeights weights;
    std::vector<double> per_slot_rates;
    double avg_rate = 0.0;
    std::vector<double> trace;       // average rate per outer iteration
    std::vector<double> fp_trace;    // transformed objective per outer iteration
    double desired_gain = 0.0;       // (1/M) sum Ps dbar_serv |s^H w|^2
    double interference_gain = 0.0;  // (1/M) sum Ps sum_l dbar_l |s_l^H w|^2
    int unservable_slots = 0;
    std::vector<std::string> warnings;
};

inline void power_gain_metrics(SolveResult& result, const std::vector<SlotGeometry>& slots,
                               const StationConfig& station) {
    double desired = 0.0, interference = 0.0;
    for (size_t m = 0; m < slots.size(); ++m) {
        if (!slots[m].servable) continue;
        const CVec& w = result.weights.w[m];
        desired += station.tx_power_w * slots[m].serving.d_bar *
                   std::norm(steering_vector(slots[m].serving.wave, result.layout).dot(w));
        for (const SlotLink& l : slots[m].interferers)
            interference += station.tx_power_w * l.d_bar *
                            std::norm(steering_vector(l.wave, result.layout).dot(w));
    }
    result.desired_gain = desired / double(slots.size());
    result.interference_gain = interference / double(slots.size());
}

inline SolveResult optimize(const Scenario& scenario, const std::vector<SlotGeometry>& slots,
                            const SolverConfig& cfg) {
    cfg.validate();
    const StationConfig& station = scenario.station;
    const int slot_count = int(slots.size());

    SolveResult result;
    result.scheme = cfg.scheme;
    result.layout = init_layout(cfg.scheme, station);
    result.weights = init_weights(result.layout, slots, station);
    for (const SlotGeometry& slot : slots)
        if (!slot.servable) ++result.unservable_slots;
    if (result.unservable_slots > 0)
        result.warnings.push_back(std::to_string(result.unservable_slots) +
                                  " slot(s) have no visible ascending satellite");

    AuxState aux(slot_count);
    double prev_rate = average_rate(slots, result.layout, result.weights, station);
    result.trace.push_back(prev_rate);

    for (int iter = 0; iter < cfg.max_iterations; ++iter) {
        // Auxiliary refresh at the current point, then the closed-form
        // weight update per slot.
        for (int m = 0; m < slot_count; ++m) {
            if (!slots[m].servable) continue;
            const double gamma = sinr(slots[m], result.layout, result.weights.w[m], station);
            const SignalTerms terms =
                signal_terms(slots[m], result.layout, result.weights.w[m], station);
            std::tie(aux.alpha[m], aux.beta[m]) = update_aux(gamma, terms.a, terms.b);
        }
        for (int m = 0; m < slot_count; ++m) {
            if (!slots[m].servable) continue;
            if (aux.beta[m] == Complex{0.0, 0.0}) {
                // Serving signal nulled at the current point: restart from
                // the matched filter so the SINR stays defined.
                const CVec s = steering_vector(slots[m].serving.wave, result.layout);
                result.weights.w[m] = s / s.norm();
                result.warnings.push_back("slot " + std::to_string(m) +
                                          ": degenerate beta, weights reset to matched filter");
                continue;
            }
            const NormalEquations ne = assemble_normal_equations(
                slots[m], result.layout, aux.alpha[m], aux.beta[m], station);
            result.weights.w[m] = solve_weights(ne, &result.warnings);
        }
        if (cfg.scheme == Scheme::MovableAntenna)
            result.layout = sca_step(slots, result.weights, aux, result.layout, station,
                                     &result.warnings);

        const double rate = average_rate(slots, result.layout, result.weights, station);
        result.trace.push_back(rate);
        result.fp_trace.push_back(fp_objective(result.layout, result.weights, aux, slots, station));
        if (std::abs(rate - prev_rate) <= cfg.epsilon) break;
        prev_rate = rate;
    }

    result.per_slot_rates.resize(size_t(slot_count), 0.0);
    for (int m = 0; m < slot_count; ++m)
        if (slots[m].servable)
            result.per_slot_rates[size_t(m)] =
                std::log2(1.0 + sinr(slots[m], result.layout, result.weights.w[m], station));
    result.avg_rate = result.trace.back();
    power_gain_metrics(result, slots, station);
    return result;
}

inline SolveResult optimize(const Scenario& scenario, const SolverConfig& cfg) {
    return optimize(scenario, build_slots(scenario), cfg);
}

}  // namespace leoma
