#ifndef STC_HYBRID_SIM_HPP
#define STC_HYBRID_SIM_HPP

#include <Eigen/Dense>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

#include "stc/certificates.hpp"
#include "stc/triggering.hpp"

// The hybrid closed loop H_STC: flow the plant/controller ODE under ZOH
// inputs, execute Algorithm-1 jumps, log the hybrid trajectory, and verify
// the Proposition 1/2 bounds along flows.
namespace stc {

struct NonlinearSystem {
    Eigen::Index n_x = 0, n_e = 0, n_w = 1;
    ClosedLoopField dynamics;  // (x, e, w) -> xdot
};

struct DisturbanceSignal {
    std::function<double(double)> eval;  // t -> w(t)
    std::optional<double> w_bar;         // bound, checked at evaluation when present

    double operator()(double t) const {
        const double w = eval(t);
        if (w_bar && std::abs(w) > *w_bar + 1e-12)
            throw std::runtime_error("disturbance exceeds its declared bound");
        return w;
    }
};

inline DisturbanceSignal zero_disturbance() {
    return {[](double) { return 0.0; }, 0.0};
}

struct HybridTrajectory {
    struct Sample {
        double t;
        int j;
        Eigen::VectorXd x, e;
        double v;
        double eta_norm;
    };
    struct Event {
        double t;
        int j;            // jump count after this event
        double v;         // V(x) at the sampling instant
        double gamma;     // chosen interval
        int level;        // RAS level index (0 for ISS)
        int set_index;    // parameter set realizing the interval
        bool fallback;
        // Frozen certificate data of the chosen set, for the bound oracle.
        double epsilon, gamma_cert, l_gain, rate;
    };
    std::vector<Sample> samples;
    std::vector<Event> events;
    double dt_step = 0.0;
};

namespace detail {

inline Eigen::VectorXd rk4_step(const ClosedLoopField& f, const Eigen::VectorXd& x,
                                const Eigen::VectorXd& x_hat, double t, double dt,
                                const DisturbanceSignal& w) {
    auto deriv = [&](const Eigen::VectorXd& xs, double ts) {
        return f(xs, x_hat - xs, w(ts));  // e recomputed, x_hat held
    };
    const Eigen::VectorXd k1 = deriv(x, t);
    const Eigen::VectorXd k2 = deriv(x + 0.5 * dt * k1, t + 0.5 * dt);
    const Eigen::VectorXd k3 = deriv(x + 0.5 * dt * k2, t + 0.5 * dt);
    const Eigen::VectorXd k4 = deriv(x + dt * k3, t + dt);
    return x + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

inline double quad_v(const Eigen::MatrixXd& p, const Eigen::VectorXd& x) {
    return x.dot(p * x);
}

// The per-event decay rate of Proposition 1: max{-eps, 2(L - Lambda)} with
// Lambda = L + eps/2 for the fall-back and max{L + eps/2, 1 - delta} else.
inline double prop1_rate(const ParameterSet& ps, bool fallback, double delta) {
    const double lam =
        fallback ? ps.l_gain + ps.epsilon / 2.0
                 : std::max(ps.l_gain + ps.epsilon / 2.0, 1.0 - delta);
    return std::max(-ps.epsilon, 2.0 * (ps.l_gain - lam));
}

}  // namespace detail

inline double min_dwell_time(const CertificateBank& bank, double delta) {
    double t_min = std::numeric_limits<double>::infinity();
    for (std::size_t l = 0; l < bank.levels.size(); ++l)
        t_min = std::min(t_min, fallback_period(bank, static_cast<int>(l), delta));
    return t_min;
}

// Alternates jumps (first at t = 0) and RK4 flows until the horizon; the
// horizon truncates a flow without a final jump, but a flow ending exactly on
// the horizon still jumps there.
inline HybridTrajectory simulate(const NonlinearSystem& sys, const CertificateBank& bank,
                                 const TriggerConfig& cfg, MechanismState eta,
                                 Eigen::VectorXd x, const DisturbanceSignal& w, double horizon,
                                 double dt_max = 1e-3) {
    if (!x.allFinite()) throw std::invalid_argument("simulate: x0 must be finite");
    const bool ras = cfg.variant == TriggerConfig::Variant::RAS;
    if (ras && detail::quad_v(bank.p_matrix, x) > bank.levels.back().c)
        throw OutOfRegionError("simulate: V(x0) exceeds c_max");
    HybridTrajectory traj;
    traj.dt_step = std::min(dt_max, min_dwell_time(bank, cfg.delta) / 50.0);
    double t = 0.0;
    int j = 0;
    traj.samples.push_back({t, j, x, Eigen::VectorXd::Zero(sys.n_e), detail::quad_v(bank.p_matrix, x),
                            eta_norm(eta)});
    for (;;) {
        const double v = detail::quad_v(bank.p_matrix, x);
        const double c = c_value(eta, v, cfg);
        const GammaResult g = ras ? gamma_ras(v, c, bank, cfg) : gamma_iss(v, c, bank, cfg);
        const ParameterSet& ps = bank.levels[g.level].sets[g.set_index];
        ++j;
        traj.events.push_back({t, j, v, g.gamma, g.level, g.set_index, g.fallback, ps.epsilon,
                               ps.gamma, ps.l_gain, detail::prop1_rate(ps, g.fallback, cfg.delta)});
        eta = s_update(eta, v, g.gamma, cfg);
        if (t >= horizon - 1e-12) break;
        const bool truncated = t + g.gamma > horizon + 1e-12;
        const double flow_len = truncated ? horizon - t : g.gamma;
        const Eigen::VectorXd x_hat = x;
        const long n = std::max(1L, static_cast<long>(std::ceil(flow_len / traj.dt_step)));
        const double dt = flow_len / static_cast<double>(n);
        for (long k = 0; k < n; ++k) {
            x = detail::rk4_step(sys.dynamics, x, x_hat, t + k * dt, dt, w);
            if (!x.allFinite()) throw std::runtime_error("simulate: state diverged");
            const double ts = (k + 1 == n) ? t + flow_len : t + (k + 1) * dt;
            traj.samples.push_back({ts, j, x, x_hat - x, detail::quad_v(bank.p_matrix, x),
                                    eta_norm(eta)});
        }
        t += flow_len;
        if (truncated) break;
    }
    return traj;
}

// Fixed-period baseline (Example 1). When level_adaptive is set, the period is
// the fall-back of the smallest level covering the current V (Example 2).
inline HybridTrajectory simulate_periodic(const NonlinearSystem& sys, const CertificateBank& bank,
                                          const TriggerConfig& cfg, double period,
                                          Eigen::VectorXd x, const DisturbanceSignal& w,
                                          double horizon, bool level_adaptive = false,
                                          double dt_max = 1e-3) {
    if (!level_adaptive && period <= 0.0)
        throw std::domain_error("simulate_periodic: period must be positive");
    HybridTrajectory traj;
    traj.dt_step = std::min(dt_max, min_dwell_time(bank, cfg.delta) / 50.0);
    double t = 0.0;
    int j = 0;
    traj.samples.push_back({t, j, x, Eigen::VectorXd::Zero(sys.n_e),
                            detail::quad_v(bank.p_matrix, x), 0.0});
    for (;;) {
        const double v = detail::quad_v(bank.p_matrix, x);
        int level = 0;
        double gamma = period;
        if (level_adaptive) {
            level = -1;
            for (std::size_t i = 0; i < bank.levels.size(); ++i)
                if (bank.levels[i].c >= v) {
                    level = static_cast<int>(i);
                    break;
                }
            if (level < 0) throw OutOfRegionError("simulate_periodic: V exceeds c_max");
            gamma = fallback_period(bank, level, cfg.delta);
        }
        const ParameterSet& ps = bank.levels[level].sets.front();
        ++j;
        traj.events.push_back({t, j, v, gamma, level, 0, true, ps.epsilon, ps.gamma, ps.l_gain,
                               detail::prop1_rate(ps, true, cfg.delta)});
        if (t >= horizon - 1e-12) break;
        const bool truncated = t + gamma > horizon + 1e-12;
        const double flow_len = truncated ? horizon - t : gamma;
        const Eigen::VectorXd x_hat = x;
        const long n = std::max(1L, static_cast<long>(std::ceil(flow_len / traj.dt_step)));
        const double dt = flow_len / static_cast<double>(n);
        for (long k = 0; k < n; ++k) {
            x = detail::rk4_step(sys.dynamics, x, x_hat, t + k * dt, dt, w);
            if (!x.allFinite()) throw std::runtime_error("simulate_periodic: state diverged");
            const double ts = (k + 1 == n) ? t + flow_len : t + (k + 1) * dt;
            traj.samples.push_back({ts, j, x, x_hat - x, detail::quad_v(bank.p_matrix, x), 0.0});
        }
        t += flow_len;
        if (truncated) break;
    }
    return traj;
}

struct BoundViolation {
    double t;
    double margin;    // relative excess over the certified right-hand side
    const char* kind; // "trajectory" or "certificate"
};

struct BoundReport {
    bool passed = true;
    double worst_margin = -std::numeric_limits<double>::infinity();
    double worst_certificate_eig = -std::numeric_limits<double>::infinity();
    long checked_samples = 0;
    std::vector<BoundViolation> violations;
};

// Verifies Proposition 1/2 along every inter-sample flow: V(x(t)) must stay
// below e^{rate (t - t_j)} V(x(s_j)) plus the disturbance integral (trapezoid
// quadrature on the logged grid; the w_bar constant form for RAS runs). When
// an embedding builder is supplied, the hypothesis of the propositions is
// re-validated too: every parameter set used by the trajectory must pass the
// vertex feasibility check, so a corrupted bank is reported even if the
// sampled system happens to decay faster than its broken certificate.
inline BoundReport check_prop1_bound(const HybridTrajectory& traj, const CertificateBank& bank,
                                     const TriggerConfig& cfg, const DisturbanceSignal& w,
                                     const EmbeddingBuilder* builder = nullptr,
                                     double tol = 1e-6) {
    BoundReport rep;
    const bool ras = cfg.variant == TriggerConfig::Variant::RAS;
    const double alpha_bar = bank.theta * bank.theta * cfg.w_bar * cfg.w_bar;
    std::size_t s = 0;
    for (const auto& ev : traj.events) {
        while (s < traj.samples.size() && traj.samples[s].j < ev.j) ++s;
        double integral = 0.0;
        double prev_g = bank.theta * bank.theta * w(ev.t) * w(ev.t);
        double prev_t = ev.t;
        for (std::size_t k = s; k < traj.samples.size() && traj.samples[k].j == ev.j; ++k) {
            const auto& sm = traj.samples[k];
            const double dtau = sm.t - prev_t;
            double rhs;
            if (ras) {
                // Prop 2 with the constant w_bar envelope.
                const double grow = std::exp(ev.rate * (sm.t - ev.t));
                rhs = grow * ev.v + (ev.rate == 0.0 ? alpha_bar * (sm.t - ev.t)
                                                    : alpha_bar * (grow - 1.0) / ev.rate);
            } else {
                const double cur_g = bank.theta * bank.theta * w(sm.t) * w(sm.t);
                integral = integral * std::exp(ev.rate * dtau) +
                           0.5 * dtau * (std::exp(ev.rate * dtau) * prev_g + cur_g);
                prev_g = cur_g;
                rhs = std::exp(ev.rate * (sm.t - ev.t)) * ev.v + integral;
            }
            prev_t = sm.t;
            const double margin = (sm.v - rhs) / std::max(1.0, std::abs(rhs));
            rep.worst_margin = std::max(rep.worst_margin, margin);
            ++rep.checked_samples;
            if (margin > tol) rep.violations.push_back({sm.t, margin, "trajectory"});
        }
    }
    if (builder) {
        std::vector<std::pair<int, int>> seen;
        for (const auto& ev : traj.events) {
            const std::pair<int, int> key{ev.level, ev.set_index};
            bool dup = false;
            for (const auto& k : seen) dup = dup || k == key;
            if (dup) continue;
            seen.push_back(key);
            const LevelCertificate& level = bank.levels[ev.level];
            const PolytopicEmbedding em = (*builder)(
                std::isfinite(level.c) ? std::optional<double>(level.c) : std::nullopt);
            const double eig = max_feasibility_eig(em, bank.p_matrix, ev.epsilon, ev.gamma_cert,
                                                   bank.theta);
            rep.worst_certificate_eig = std::max(rep.worst_certificate_eig, eig);
            if (eig > 0.0) rep.violations.push_back({ev.t, eig, "certificate"});
        }
    }
    rep.passed = rep.violations.empty();
    return rep;
}

}  // namespace stc

#endif  // STC_HYBRID_SIM_HPP
