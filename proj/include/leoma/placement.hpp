#pragma once

// Successive convex approximation of the antenna-position subproblem: an
// isotropic quadratic majorizer of the reduced objective, linearized
// minimum-spacing constraints, and the resulting projection-type QP.

#include <optional>

#include "leoma/fp.hpp"

namespace leoma {

// Reduced objective (to be minimized): the beta-weighted quadratic and
// linear terms of the transformed objective that depend on the layout.
//   f~(c) = sum_m |beta_m|^2 Ps sum_l dbar_l |s_l^H w|^2
//           - 2 sqrt(Ps dbar_serv (1+alpha_m)) Re(beta_m w^H s_serv)
inline double reduced_objective(const std::vector<SlotGeometry>& slots,
                                const BeamWeights& weights, const AuxState& aux,
                                const ArrayLayout& layout, const StationConfig& station) {
    double total = 0.0;
    for (size_t m = 0; m < slots.size(); ++m) {
        if (!slots[m].servable) continue;
        const CVec& w = weights.w[m];
        const double b2 = std::norm(aux.beta[m]);
        slots[m].for_each_link([&](const SlotLink& l) {
            total += b2 * station.tx_power_w * l.d_bar *
                     std::norm(steering_vector(l.wave, layout).dot(w));
        });
        const Complex proj = w.dot(steering_vector(slots[m].serving.wave, layout));  // w^H s
        total -= 2.0 *
                 std::sqrt(station.tx_power_w * slots[m].serving.d_bar * (1.0 + aux.alpha[m])) *
                 std::real(aux.beta[m] * proj);
    }
    return total;
}

// Linearization coefficients of one slot at the current layout:
//   z_l = 2 |beta|^2 dbar_l Ps (W - ||w||^2 I) s_l(c0)   per visible link,
//   z   = 2 conj(beta) sqrt((1+alpha) dbar_serv Ps) w    for the serving term.
// (W - ||w||^2 I) is negative semidefinite, which makes the remaining
// quadratic form in s constant and the bound exact at c0.
struct SurrogateVectors {
    std::vector<CVec> links;  // serving first, matching SlotGeometry order
    CVec serving;
};

inline SurrogateVectors surrogate_vectors(const SlotGeometry& slot, const CVec& w, double alpha,
                                          Complex beta, const ArrayLayout& layout0,
                                          const StationConfig& station) {
    SurrogateVectors out;
    if (!slot.servable) {
        out.serving = CVec::Zero(layout0.size());
        return out;
    }
    const double w2 = w.squaredNorm();
    const double b2 = std::norm(beta);
    slot.for_each_link([&](const SlotLink& l) {
        const CVec s0 = steering_vector(l.wave, layout0);
        out.links.push_back(2.0 * b2 * l.d_bar * station.tx_power_w *
                            (w * w.dot(s0) - w2 * s0));
    });
    out.serving = 2.0 * std::conj(beta) *
                  std::sqrt((1.0 + alpha) * slot.serving.d_bar * station.tx_power_w) * w;
    return out;
}

// Gradient of g(c) = Re(b^H s(c)) at layout c0, stacked per antenna:
// component (n, d) = -a_d |b_n| sin(a . c_n - arg(b_n)).
inline Eigen::VectorXd linear_term_gradient(const CVec& b, const Eigen::Vector2d& wave,
                                            const ArrayLayout& c0) {
    Eigen::VectorXd grad(2 * c0.size());
    for (int n = 0; n < c0.size(); ++n) {
        const double mag = std::abs(b[n]);
        const double s = mag == 0.0
            ? 0.0
            : mag * std::sin(wave.dot(c0.antenna(n)) - std::arg(b[n]));
        grad[2 * n] = -wave.x() * s;
        grad[2 * n + 1] = -wave.y() * s;
    }
    return grad;
}

// Isotropic quadratic majorizer of the reduced objective:
//   fbar(c) = (kappa/2) ||c||^2 + q^T c + constant,  fbar(c0) = f~(c0).
struct SurrogateModel {
    double kappa = 0.0;
    Eigen::VectorXd q;
    Eigen::VectorXd c0;
    double constant = 0.0;

    double value(const Eigen::VectorXd& c) const {
        return 0.5 * kappa * c.squaredNorm() + q.dot(c) + constant;
    }
};

inline SurrogateModel build_surrogate(const std::vector<SlotGeometry>& slots,
                                      const BeamWeights& weights, const AuxState& aux,
                                      const ArrayLayout& layout0,
                                      const StationConfig& station) {
    SurrogateModel model;
    model.c0 = layout0.coords;
    model.q = Eigen::VectorXd::Zero(2 * layout0.size());
    for (size_t m = 0; m < slots.size(); ++m) {
        if (!slots[m].servable) continue;
        const SurrogateVectors sv =
            surrogate_vectors(slots[m], weights.w[m], aux.alpha[m], aux.beta[m], layout0, station);
        size_t idx = 0;
        slots[m].for_each_link([&](const SlotLink& l) {
            const CVec& z = sv.links[idx++];
            const double curvature = l.wave.squaredNorm() * z.norm();
            model.kappa += curvature;
            model.q += linear_term_gradient(z, l.wave, layout0) - curvature * layout0.coords;
        });
        const double curvature = slots[m].serving.wave.squaredNorm() * sv.serving.norm();
        model.kappa += curvature;
        model.q -= linear_term_gradient(sv.serving, slots[m].serving.wave, layout0) +
                   curvature * layout0.coords;
    }
    model.constant = reduced_objective(slots, weights, aux, layout0, station) -
                     0.5 * model.kappa * model.c0.squaredNorm() - model.q.dot(model.c0);
    return model;
}

// One linearized spacing constraint per unordered antenna pair:
// dir^T (c_n - c_m) >= d_min, with dir the unit separation at the iterate.
// Satisfying it implies the true distance constraint by Cauchy-Schwarz.
struct Halfspace {
    int first = 0;
    int second = 0;
    Eigen::Vector2d dir = Eigen::Vector2d::UnitX();
};

inline std::vector<Halfspace> distance_halfspaces(const ArrayLayout& layout0, double d_min,
                                                  std::vector<std::string>* warnings = nullptr) {
    std::vector<Halfspace> out;
    for (int n = 0; n < layout0.size(); ++n) {
        for (int m = n + 1; m < layout0.size(); ++m) {
            Eigen::Vector2d sep = layout0.antenna(n) - layout0.antenna(m);
            if (sep.norm() == 0.0) {
                const double angle = kTwoPi * double(n) / double(layout0.size());
                sep = 2e-3 * d_min * Eigen::Vector2d{std::cos(angle), std::sin(angle)};
                if (warnings)
                    warnings->push_back("distance_halfspaces: coincident antennas " +
                                        std::to_string(n) + "," + std::to_string(m) +
                                        " perturbed");
            }
            out.push_back({n, m, sep.normalized()});
        }
    }
    return out;
}

// Minimizes the isotropic surrogate over box [0, side]^2N intersected with
// the spacing half-spaces. Since the Hessian is kappa*I this is the
// Euclidean projection of -q/kappa, computed by dual coordinate ascent
// (Hildreth's method) over the stacked inequality rows.
inline ArrayLayout solve_qp(const SurrogateModel& model, double region_side,
                            const std::vector<Halfspace>& halfspaces, double d_min,
                            std::vector<std::string>* warnings = nullptr) {
    const int dim = int(model.c0.size());
    const int antennas = dim / 2;
    const Eigen::VectorXd target = -model.q / model.kappa;

    // Rows a_i^T c <= b_i: upper box, lower box, then spacing.
    struct Row {
        int n1, n2;              // antenna indices; n2 < 0 for box rows
        Eigen::Vector2d g1, g2;  // per-antenna coefficients
        double bound;
        double norm2;
    };
    std::vector<Row> rows;
    rows.reserve(size_t(4 * antennas + halfspaces.size()));
    for (int i = 0; i < dim; ++i) {
        Eigen::Vector2d axis = (i % 2 == 0) ? Eigen::Vector2d::UnitX() : Eigen::Vector2d::UnitY();
        rows.push_back({i / 2, -1, axis, {}, region_side, 1.0});
        rows.push_back({i / 2, -1, -axis, {}, 0.0, 1.0});
    }
    for (const Halfspace& h : halfspaces)
        rows.push_back({h.first, h.second, -h.dir, h.dir, -d_min, 2.0});

    Eigen::VectorXd c = target;
    Eigen::VectorXd mu = Eigen::VectorXd::Zero(Eigen::Index(rows.size()));
    const double scale = std::max({1.0, target.lpNorm<Eigen::Infinity>(), region_side});
    const double tol = 1e-10 * scale;

    auto row_value = [&](const Row& r) {
        double v = r.g1.dot(c.segment<2>(2 * r.n1));
        if (r.n2 >= 0) v += r.g2.dot(c.segment<2>(2 * r.n2));
        return v;
    };

    bool converged = false;
    for (int sweep = 0; sweep < 200000 && !converged; ++sweep) {
        double worst = 0.0;
        for (size_t i = 0; i < rows.size(); ++i) {
            const Row& r = rows[i];
            const double residual = row_value(r) - r.bound;
            const double mu_new = std::max(0.0, mu[Eigen::Index(i)] + residual / r.norm2);
            const double delta = mu_new - mu[Eigen::Index(i)];
            if (delta != 0.0) {
                mu[Eigen::Index(i)] = mu_new;
                c.segment<2>(2 * r.n1) -= delta * r.g1;
                if (r.n2 >= 0) c.segment<2>(2 * r.n2) -= delta * r.g2;
            }
            worst = std::max({worst, std::max(0.0, residual), mu_new * std::abs(residual)});
        }
        converged = worst <= tol;
    }
    if (!converged && warnings)
        warnings->push_back("solve_qp: dual iteration cap reached, returning last iterate");

    ArrayLayout out(antennas);
    out.coords = c.cwiseMax(0.0).cwiseMin(region_side);
    if (model.value(out.coords) > model.value(model.c0)) {
        if (warnings) warnings->push_back("solve_qp: surrogate did not improve, keeping iterate");
        out.coords = model.c0;
    }
    return out;
}

// Placement update at fixed (w, alpha, beta): the convex subproblem is
// re-linearized and re-solved at each new iterate until the layout is
// stationary. Never increases the reduced objective (hence never decreases
// the transformed sum-rate objective).
inline ArrayLayout sca_step(const std::vector<SlotGeometry>& slots, const BeamWeights& weights,
                            const AuxState& aux, const ArrayLayout& layout0,
                            const StationConfig& station,
                            std::vector<std::string>* warnings = nullptr,
                            int max_rounds = 2000) {
    ArrayLayout current = layout0;
    double value = reduced_objective(slots, weights, aux, current, station);
    for (int round = 0; round < max_rounds; ++round) {
        const SurrogateModel model = build_surrogate(slots, weights, aux, current, station);
        if (model.kappa <= 0.0) {
            if (warnings)
                warnings->push_back("sca_step: vanishing surrogate curvature, layout kept");
            return current;
        }
        const auto halfspaces = distance_halfspaces(current, station.min_spacing_m, warnings);
        const ArrayLayout next = solve_qp(model, station.region_side_m, halfspaces,
                                          station.min_spacing_m, warnings);
        const double after = reduced_objective(slots, weights, aux, next, station);
        if (after > value + 1e-9 * std::max(1.0, std::abs(value))) {
            if (warnings) warnings->push_back("sca_step: descent check failed, layout kept");
            return current;
        }
        const double move = (next.coords - current.coords).lpNorm<Eigen::Infinity>();
        current = next;
        value = after;
        if (move <= 1e-8 * station.region_side_m) break;
    }
    return current;
}

}  // namespace leoma
