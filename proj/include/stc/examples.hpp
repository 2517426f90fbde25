#ifndef STC_EXAMPLES_HPP
#define STC_EXAMPLES_HPP

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "stc/certificates.hpp"
#include "stc/hybrid_sim.hpp"
#include "stc/triggering.hpp"

// The two benchmark closed loops: the perturbed single-link robot arm (ISS)
// and the polynomial system from the Tiberi example (RAS).
namespace stc::examples {

// ---------------------------------------------------------------------------
// Example 1: perturbed single-link robot arm.
//   x1' = x2, x2' = -a sin(x1) + b u^ + w,
//   u = (1/b)(a sin(x1) - x1 - x2) evaluated on the held state.
// The disturbance enters the second state, matching E = [0;1] of the
// factorized closed loop.
// ---------------------------------------------------------------------------

inline constexpr double kEx1A = 9.81 / 2.0;
inline constexpr double kEx1B = 2.0;
inline constexpr double kEx1Theta = 10.0;
inline constexpr double kEx1EpsRef = 0.2;
inline constexpr double kEx1Horizon = 6.0 * M_PI;

// Quadratic V for Example 1. The paper's P comes from an unpublished LMI
// design; this P is a rounded interior-margin solution that keeps every
// epsilon of the synthesis grid feasible (see the repository notes on the
// plain Lyapunov-equation candidate, which is infeasible for this M).
inline Eigen::MatrixXd example1_p() {
    Eigen::MatrixXd p(2, 2);
    p << 2.23, 0.59, 0.59, 3.21;
    return p;
}

inline NonlinearSystem example1_system(double a = kEx1A, double b = kEx1B) {
    NonlinearSystem sys;
    sys.n_x = 2;
    sys.n_e = 2;
    sys.n_w = 1;
    sys.dynamics = [a, b](const Eigen::VectorXd& x, const Eigen::VectorXd& e, double w) {
        const double xh1 = x(0) + e(0), xh2 = x(1) + e(1);
        const double u = (a * std::sin(xh1) - xh1 - xh2) / b;
        Eigen::VectorXd dx(2);
        dx << x(1), -a * std::sin(x(0)) + b * u + w;
        return dx;
    };
    return sys;
}

inline EmbeddingBuilder example1_builder(double a = kEx1A, double b = kEx1B) {
    return [a, b](std::optional<double>) { return embed_example1(a, b); };
}

// 21 values, linear from 0.01 down to -20.
inline std::vector<double> example1_epsilon_grid() {
    std::vector<double> grid;
    for (int i = 0; i < 21; ++i) grid.push_back(0.01 + (-20.0 - 0.01) * i / 20.0);
    return grid;
}

inline CertificateBank example1_bank() {
    return synthesize_bank(example1_builder(), example1_epsilon_grid(), kEx1Theta, {},
                           example1_p());
}

// w(t) = sin(t) on [2*pi, 4*pi].
inline DisturbanceSignal example1_disturbance() {
    return {[](double t) { return (t >= 2.0 * M_PI && t <= 4.0 * M_PI) ? std::sin(t) : 0.0; },
            1.0};
}

inline Eigen::VectorXd example1_x0() {
    Eigen::VectorXd x0(2);
    x0 << 0.5, 0.5;
    return x0;
}

inline TriggerConfig example1_config() {
    TriggerConfig cfg;
    cfg.eps_ref = kEx1EpsRef;
    cfg.variant = TriggerConfig::Variant::ISS;
    return cfg;
}

// ---------------------------------------------------------------------------
// Example 2: x1' = -x1, x2' = (x1^2 + x2^2) x2 + u^ + w with
// u = -(1 + x1^2 + x2^2) x2 on the held state; V = 1.5 x'x.
// ---------------------------------------------------------------------------

inline constexpr double kEx2Theta = 2.0;
inline constexpr double kEx2EpsRef = 1.0;
inline constexpr double kEx2Horizon = 15.0;
inline constexpr double kEx2CW = 0.64;
inline constexpr double kEx2CMax = 37.87;
inline constexpr double kEx2WBar = 0.4;
inline constexpr int kEx2NumLevels = 40;

inline Eigen::MatrixXd example2_p() { return 1.5 * Eigen::MatrixXd::Identity(2, 2); }

inline NonlinearSystem example2_system() {
    NonlinearSystem sys;
    sys.n_x = 2;
    sys.n_e = 2;
    sys.n_w = 1;
    sys.dynamics = [](const Eigen::VectorXd& x, const Eigen::VectorXd& e, double w) {
        const double xh1 = x(0) + e(0), xh2 = x(1) + e(1);
        const double u = -(1.0 + xh1 * xh1 + xh2 * xh2) * xh2;
        Eigen::VectorXd dx(2);
        dx << -x(0), (x(0) * x(0) + x(1) * x(1)) * x(1) + u + w;
        return dx;
    };
    return sys;
}

inline EmbeddingBuilder example2_builder() {
    return [](std::optional<double> c) {
        return embed_example2(c.value_or(kEx2CMax));
    };
}

// 20 values, linear from 1 down to -15.
inline std::vector<double> example2_epsilon_grid() {
    std::vector<double> grid;
    for (int i = 0; i < 20; ++i) grid.push_back(1.0 + (-15.0 - 1.0) * i / 19.0);
    return grid;
}

// 40 geometrically spaced sublevels from c_w to c_max.
inline std::vector<double> example2_levels() {
    std::vector<double> levels;
    for (int i = 0; i < kEx2NumLevels; ++i)
        levels.push_back(kEx2CW * std::pow(kEx2CMax / kEx2CW,
                                           static_cast<double>(i) / (kEx2NumLevels - 1)));
    return levels;
}

inline CertificateBank example2_bank() {
    return synthesize_bank(example2_builder(), example2_epsilon_grid(), kEx2Theta,
                           example2_levels(), example2_p());
}

// w(t) = 0.4 on [5.3, 8].
inline DisturbanceSignal example2_disturbance() {
    return {[](double t) { return (t >= 5.3 && t <= 8.0) ? 0.4 : 0.0; }, kEx2WBar};
}

inline Eigen::VectorXd example2_x0() {
    Eigen::VectorXd x0(2);
    x0 << 4.0, -3.0;
    return x0;
}

inline TriggerConfig example2_config() {
    TriggerConfig cfg;
    cfg.eps_ref = kEx2EpsRef;
    cfg.variant = TriggerConfig::Variant::RAS;
    cfg.w_bar = kEx2WBar;
    cfg.c_w = kEx2CW;
    cfg.c_max = kEx2CMax;
    return cfg;
}

// Sampling radius used by verify_pointwise: the embedding parameter ranges
// provably cover the cubic nonlinearity for |x|, |x^| below sqrt(c/28), the
// bound printed alongside the embedding.
inline double example2_sample_radius(double c) { return std::sqrt(c / 28.0); }

}  // namespace stc::examples

#endif  // STC_EXAMPLES_HPP
