#pragma once

// Fractional-programming machinery: Lagrangian-dual auxiliary alpha, the
// quadratic-transform auxiliary beta, the per-slot signal/interference
// scalars, and the reformulated sum-rate objective.

#include <complex>
#include <vector>

#include "leoma/channel.hpp"

namespace leoma {

struct AuxState {
    Eigen::VectorXd alpha;   // one per slot, >= 0
    CVec beta;               // one per slot

    explicit AuxState(int slots = 0)
        : alpha(Eigen::VectorXd::Zero(slots)), beta(CVec::Zero(slots)) {}
};

// A = sqrt(Ps * dbar_serving) * s_serving^H w
// B = Ps * sum_all_visible dbar_l |s_l^H w|^2 + sigma^2 ||w||^2
// The sum in B includes the serving link, so B - |A|^2 is the interference
// power plus noise and stays positive whenever sigma^2 > 0 and w != 0.
struct SignalTerms {
    Complex a{0.0, 0.0};
    double b = 0.0;
};

inline SignalTerms signal_terms(const SlotGeometry& slot, const ArrayLayout& layout,
                                const CVec& w, const StationConfig& station) {
    if (w.squaredNorm() == 0.0) throw std::invalid_argument("signal_terms: zero beam weights");
    SignalTerms terms;
    terms.b = station.noise_power_w * w.squaredNorm();
    if (!slot.servable) return terms;
    slot.for_each_link([&](const SlotLink& l) {
        terms.b += station.tx_power_w * l.d_bar *
                   std::norm(steering_vector(l.wave, layout).dot(w));
    });
    terms.a = std::sqrt(station.tx_power_w * slot.serving.d_bar) *
              steering_vector(slot.serving.wave, layout).dot(w);
    return terms;
}

// Closed-form maximizers of the transformed objective for one slot:
// alpha* = gamma, beta* = sqrt(1 + alpha*) A / B.
inline std::pair<double, Complex> update_aux(double gamma, Complex a, double b) {
    if (b <= 0.0) throw std::runtime_error("update_aux: non-positive quadratic term");
    const double alpha = gamma;
    return {alpha, std::sqrt(1.0 + alpha) * a / b};
}

// Reformulated objective:
//   sum_m [ log2(1+alpha_m) - alpha_m + 2 sqrt(1+alpha_m) Re(conj(beta_m) A_m)
//           - |beta_m|^2 B_m ]
// Tight (equal to sum_m log2(1+gamma_m)) after update_aux on every slot.
inline double fp_objective(const ArrayLayout& layout, const BeamWeights& weights,
                           const AuxState& aux, const std::vector<SlotGeometry>& slots,
                           const StationConfig& station) {
    const size_t count = slots.size();
    if (weights.w.size() != count || size_t(aux.alpha.size()) != count ||
        size_t(aux.beta.size()) != count)
        throw std::invalid_argument("fp_objective: dimension mismatch");
    double total = 0.0;
    for (size_t m = 0; m < count; ++m) {
        if (!slots[m].servable) continue;
        const double alpha = aux.alpha[m];
        const Complex beta = aux.beta[m];
        const SignalTerms terms = signal_terms(slots[m], layout, weights.w[m], station);
        total += std::log2(1.0 + alpha) - alpha +
                 2.0 * std::sqrt(1.0 + alpha) * std::real(std::conj(beta) * terms.a) -
                 std::norm(beta) * terms.b;
    }
    return total;
}

}  // namespace leoma
