#ifndef STC_TRIGGERING_HPP
#define STC_TRIGGERING_HPP

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "stc/certificates.hpp"
#include "stc/core_math.hpp"

// The dynamic STC decision core: C functions and dynamic-variable updates for
// the FIR/IIR/reference mechanisms, Algorithm 2 (ISS) and Algorithm 3 (RAS).
namespace stc {

inline constexpr double kVFloor = 1e-12;

enum class MechKind { FIR, IIR, REF };

struct MechanismState {
    MechKind kind = MechKind::REF;
    // FIR: window length m and the m-1 past values.
    int m = 0;
    Eigen::VectorXd buffer;
    // IIR: filter coefficients (r1 + r2 <= 1) and the scalar state.
    double r1 = 0.0, r2 = 0.0;
    // IIR/REF scalar state.
    double eta = 0.0;
};

inline MechanismState make_fir(int m, double v0) {
    if (m < 1) throw std::domain_error("make_fir: m must be >= 1");
    MechanismState s;
    s.kind = MechKind::FIR;
    s.m = m;
    // Warm start: the paper leaves initial entries free; filling with V(x0)
    // avoids spurious early fall-backs.
    s.buffer = Eigen::VectorXd::Constant(m - 1, v0);
    return s;
}

inline MechanismState make_iir(double r1, double r2, double eta0) {
    if (r1 <= 0.0 || r2 <= 0.0 || r1 + r2 > 1.0)
        throw std::domain_error("make_iir: need r1, r2 > 0 with r1 + r2 <= 1");
    MechanismState s;
    s.kind = MechKind::IIR;
    s.r1 = r1;
    s.r2 = r2;
    s.eta = eta0;
    return s;
}

inline MechanismState make_ref(double eta0) {
    MechanismState s;
    s.kind = MechKind::REF;
    s.eta = eta0;
    return s;
}

struct TriggerConfig {
    enum class Variant { ISS, RAS };
    double eps_ref;          // reference decay rate, > 0
    double delta = 0.999;    // MATI safety factor, in (0,1)
    Variant variant = Variant::ISS;
    double w_bar = 0.0;      // RAS disturbance bound
    double c_w = 0.0;        // RAS target sublevel
    double c_max = 0.0;      // RAS region of attraction sublevel
};

// Initial eta per the theorems: V(x0) for FIR/IIR/REF-ISS, and the shifted
// clamp for REF-RAS.
inline MechanismState make_ref_initial(double v0, const TriggerConfig& cfg) {
    if (cfg.variant == TriggerConfig::Variant::RAS)
        return make_ref(std::clamp(v0 - cfg.c_w, 0.0, cfg.c_max - cfg.c_w));
    return make_ref(v0);
}

// The mechanism's sup-norm, used for decay envelopes.
inline double eta_norm(const MechanismState& s) {
    if (s.kind == MechKind::FIR)
        return s.buffer.size() ? s.buffer.cwiseAbs().maxCoeff() : 0.0;
    return std::abs(s.eta);
}

// C(x, eta) per mechanism; RAS variants clamp into [c_w, c_max] (FIR/IIR) or
// shift by c_w (REF).
inline double c_value(const MechanismState& s, double v_of_x, const TriggerConfig& cfg) {
    double c;
    switch (s.kind) {
        case MechKind::FIR:
            c = (v_of_x + s.buffer.sum()) / static_cast<double>(s.m);
            break;
        default:
            c = s.eta;
            break;
    }
    if (cfg.variant == TriggerConfig::Variant::RAS) {
        if (s.kind == MechKind::REF) return cfg.c_w + c;
        return std::clamp(c, cfg.c_w, cfg.c_max);
    }
    return c;
}

// S(eta, x) with the exp(-eps_ref * Gamma) discount applied after the update.
inline MechanismState s_update(const MechanismState& s, double v_of_x, double gamma_out,
                               const TriggerConfig& cfg) {
    const double d = std::exp(-cfg.eps_ref * gamma_out);
    MechanismState out = s;
    switch (s.kind) {
        case MechKind::FIR: {
            const Eigen::Index n = s.buffer.size();
            if (n > 0) {
                out.buffer.head(n - 1) = s.buffer.tail(n - 1);
                out.buffer(n - 1) = v_of_x;
                out.buffer *= d;
            }
            break;
        }
        case MechKind::IIR:
            out.eta = d * (s.r1 * s.eta + s.r2 * v_of_x);
            break;
        case MechKind::REF:
            out.eta = d * s.eta;
            break;
    }
    return out;
}

struct GammaResult {
    double gamma;     // the sampling interval
    int level;        // selected level index (0 for ISS)
    int set_index;    // parameter set realizing the maximum (0 = fall-back)
    bool fallback;    // true when no dynamic branch beat the fall-back
};

// Shared core of Algorithms 2 and 3. alpha_w_bar = theta^2 * w_bar^2 shifts
// the log bound for the RAS variant; zero recovers Algorithm 2 exactly.
inline GammaResult gamma_level(double v, double c, const LevelCertificate& level,
                               const TriggerConfig& cfg, double alpha_w_bar) {
    const ParameterSet& fb = level.sets.front();
    if (fb.epsilon <= 0.0)
        throw std::invalid_argument("gamma_level: fall-back set must have epsilon > 0");
    double h = cfg.delta * mati(fb.gamma, fb.l_gain + fb.epsilon / 2.0);
    int best = 0;
    for (std::size_t i = 1; i < level.sets.size(); ++i) {
        const ParameterSet& ps = level.sets[i];
        const double lam_i = std::max(ps.l_gain + ps.epsilon / 2.0, 1.0 - cfg.delta);
        double h_i = 0.0;
        if (c >= v) {
            const double cap = cfg.delta * mati(ps.gamma, lam_i);
            if (-ps.epsilon + cfg.eps_ref > 0.0) {
                const double shift = alpha_w_bar != 0.0 ? alpha_w_bar / ps.epsilon : 0.0;
                const double vs = v - shift, cs = c - shift;
                if (shift <= 0.0 && v < kVFloor)
                    h_i = cap;  // at the origin any interval keeps the bound
                else if (vs < kVFloor || cs < kVFloor)
                    h_i = 0.0;  // positive-epsilon shift swallows V: not certifiable
                else
                    h_i = std::min(cap, (std::log(cs) - std::log(vs)) /
                                            (-ps.epsilon + cfg.eps_ref));
            } else {
                h_i = cap;
            }
        }
        if (h_i > h) {
            h = h_i;
            best = static_cast<int>(i);
        }
    }
    return {h, 0, best, best == 0};
}

// Algorithm 2: Gamma for the global ISS variant.
inline GammaResult gamma_iss(double v, double c, const CertificateBank& bank,
                             const TriggerConfig& cfg) {
    if (bank.levels.size() != 1)
        throw std::invalid_argument("gamma_iss: bank must have a single global level");
    return gamma_level(v, c, bank.levels.front(), cfg, 0.0);
}

struct OutOfRegionError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Algorithm 3: level selection by max{V, C} plus the disturbance-shifted log
// bound. Out-of-region states raise instead of clamping.
inline GammaResult gamma_ras(double v, double c, const CertificateBank& bank,
                             const TriggerConfig& cfg) {
    const double target = std::max(v, c);
    int l = -1;
    for (std::size_t i = 0; i < bank.levels.size(); ++i)
        if (bank.levels[i].c >= target) {
            l = static_cast<int>(i);
            break;
        }
    if (l < 0) throw OutOfRegionError("gamma_ras: state left the certified region");
    const double alpha = bank.theta * bank.theta * cfg.w_bar * cfg.w_bar;
    GammaResult r = gamma_level(v, c, bank.levels[l], cfg, alpha);
    r.level = l;
    return r;
}

inline double fallback_period(const CertificateBank& bank, int level) {
    const ParameterSet& fb = bank.levels.at(level).sets.front();
    return 0.999 * mati(fb.gamma, fb.l_gain + fb.epsilon / 2.0);
}

inline double fallback_period(const CertificateBank& bank, int level, double delta) {
    const ParameterSet& fb = bank.levels.at(level).sets.front();
    return delta * mati(fb.gamma, fb.l_gain + fb.epsilon / 2.0);
}

}  // namespace stc

#endif  // STC_TRIGGERING_HPP
