#pragma once

// Closed-form per-slot beam-weight update: assemble the Hermitian normal
// equations U w = v of the quadratic subproblem and solve them by an LDL^T
// factorization.

#include <Eigen/Cholesky>

#include "leoma/fp.hpp"

namespace leoma {

struct NormalEquations {
    CMat u;   // N x N Hermitian, positive definite for beta != 0
    CVec v;
};

// U = |beta|^2 [ sigma^2 I + Ps sum_all_visible dbar_l s_l s_l^H ]
// v = sqrt(Ps * dbar_serving * (1 + alpha)) * beta * s_serving
inline NormalEquations assemble_normal_equations(const SlotGeometry& slot,
                                                 const ArrayLayout& layout, double alpha,
                                                 Complex beta, const StationConfig& station) {
    const int n = layout.size();
    NormalEquations ne;
    const double b2 = std::norm(beta);
    ne.u = b2 * station.noise_power_w * CMat::Identity(n, n);
    ne.v = CVec::Zero(n);
    if (!slot.servable) return ne;
    slot.for_each_link([&](const SlotLink& l) {
        const CVec s = steering_vector(l.wave, layout);
        ne.u += (b2 * station.tx_power_w * l.d_bar) * (s * s.adjoint());
    });
    ne.v = std::sqrt(station.tx_power_w * slot.serving.d_bar * (1.0 + alpha)) * beta *
           steering_vector(slot.serving.wave, layout);
    return ne;
}

// Solves U w = v for Hermitian positive definite U. A numerically singular
// factorization is retried once with a trace-scaled ridge.
inline CVec solve_weights(const NormalEquations& ne, std::vector<std::string>* warnings = nullptr) {
    Eigen::LDLT<CMat> ldlt(ne.u);
    if (ldlt.info() == Eigen::Success && ldlt.isPositive()) {
        const CVec w = ldlt.solve(ne.v);
        const double residual = (ne.u * w - ne.v).norm();
        if (residual <= 1e-10 * std::max(1.0, ne.v.norm())) return w;
    }
    const double ridge = 1e-12 * ne.u.trace().real() / double(ne.u.rows());
    if (warnings)
        warnings->push_back("solve_weights: near-singular system, regularized with ridge");
    CMat reg = ne.u + ridge * CMat::Identity(ne.u.rows(), ne.u.cols());
    return Eigen::LDLT<CMat>(reg).solve(ne.v);
}

}  // namespace leoma
