#ifndef STC_CORE_MATH_HPP
#define STC_CORE_MATH_HPP

#include <algorithm>
#include <cmath>
#include <stdexcept>

// Closed-form hybrid-Lyapunov quantities: the coupling ratio r, the MATI
// bound T_max, the transit-time bound tilde-T_max, the phi Riccati solution
// and the hybrid Lyapunov function U.
namespace stc {

// gamma/Lambda ratios closer to 1 than this are treated as the gamma=Lambda
// branch so that r -> 0 never divides a branch formula.
inline constexpr double kSeamTol = 1e-9;
// arctanh arguments are clamped below 1 to avoid +inf from rounding.
inline constexpr double kAtanhClamp = 1.0 - 1e-12;

struct MatiParams {
    double gamma;         // Lyapunov coupling gain, > 0
    double lambda_cap;    // rate parameter Lambda, > 0
    double lambda_small;  // phi initial-condition parameter, in (0,1)
};

struct FlowRateParams {
    double epsilon;  // decay/growth rate, sign-unrestricted
    double l_gain;   // error growth rate L, > 0
};

// r = sqrt(|(gamma/Lambda)^2 - 1|), exactly 0 on the seam.
inline double coupling_ratio(double gamma, double lambda_cap) {
    if (gamma <= 0.0 || lambda_cap <= 0.0)
        throw std::domain_error("coupling_ratio: gamma and Lambda must be positive");
    const double rho = gamma / lambda_cap;
    if (std::abs(rho - 1.0) < kSeamTol) return 0.0;
    return std::sqrt(std::abs(rho * rho - 1.0));
}

// T_max(gamma, Lambda): arctan branch for gamma > Lambda, 1/Lambda on the
// seam, arctanh branch for gamma < Lambda.
inline double mati(double gamma, double lambda_cap) {
    if (gamma <= 0.0 || lambda_cap <= 0.0)
        throw std::domain_error("mati: gamma and Lambda must be positive");
    const double rho = gamma / lambda_cap;
    if (std::abs(rho - 1.0) < kSeamTol) return 1.0 / lambda_cap;
    const double r = coupling_ratio(gamma, lambda_cap);
    if (rho > 1.0) return std::atan(r) / (lambda_cap * r);
    return std::atanh(std::min(r, kAtanhClamp)) / (lambda_cap * r);
}

// tilde-T_max(lambda, gamma, Lambda): the time phi needs to travel from
// 1/lambda down to lambda; sup over lambda in (0,1) recovers T_max.
inline double mati_tilde(double lambda_small, double gamma, double lambda_cap) {
    if (gamma <= 0.0 || lambda_cap <= 0.0)
        throw std::domain_error("mati_tilde: gamma and Lambda must be positive");
    if (!(lambda_small > 0.0 && lambda_small < 1.0))
        throw std::domain_error("mati_tilde: lambda must lie in (0,1)");
    const double rho = gamma / lambda_cap;
    const double lam = lambda_small;
    if (std::abs(rho - 1.0) < kSeamTol)
        return (1.0 / lambda_cap) * (1.0 - lam) / (1.0 + lam);
    const double r = coupling_ratio(gamma, lambda_cap);
    const double arg =
        r * (1.0 - lam) / (2.0 * (lam / (1.0 + lam)) * (rho - 1.0) + 1.0 + lam);
    if (rho > 1.0) return std::atan(arg) / (lambda_cap * r);
    return std::atanh(std::min(arg, kAtanhClamp)) / (lambda_cap * r);
}

// phi(tau): solution of phi' = -2*Lambda*phi - gamma*(phi^2+1), phi(0)=1/lambda.
// Closed form per branch via the substitution u = phi + Lambda/gamma:
//   u' = -gamma*(u^2 + 1 - (Lambda/gamma)^2).
inline double phi_eval(double tau, const MatiParams& p) {
    if (tau < 0.0) throw std::domain_error("phi_eval: tau must be nonnegative");
    const double window = mati_tilde(p.lambda_small, p.gamma, p.lambda_cap);
    if (tau > window * (1.0 + 1e-9) + 1e-15)
        throw std::domain_error("phi_eval: tau exceeds the validity window");
    tau = std::min(tau, window);
    const double rho = p.lambda_cap / p.gamma;  // note: Lambda/gamma here
    const double u0 = 1.0 / p.lambda_small + rho;
    double u;
    if (std::abs(p.gamma / p.lambda_cap - 1.0) < kSeamTol) {
        // u' = -gamma*u^2
        u = 1.0 / (1.0 / u0 + p.gamma * tau);
    } else if (rho < 1.0) {
        // gamma > Lambda: u' = -gamma*(u^2 + k^2), u = k*cot(k*gamma*tau + theta0)
        const double k = std::sqrt(1.0 - rho * rho);
        const double theta0 = std::atan2(k, u0);
        u = k / std::tan(theta0 + k * p.gamma * tau);
    } else {
        // gamma < Lambda: u' = -gamma*(u^2 - k^2) with u > k, u = k*coth(...)
        const double k = std::sqrt(rho * rho - 1.0);
        const double c0 = std::atanh(std::min(k / u0, kAtanhClamp));
        u = k / std::tanh(c0 + k * p.gamma * tau);
    }
    return u - rho;
}

// U(xi) = V(x) + gamma * phi(tau) * W(e)^2.
inline double hybrid_u(double v_of_x, double w_of_e, double tau, const MatiParams& p) {
    if (w_of_e == 0.0) return v_of_x;  // post-jump states bypass the phi window
    return v_of_x + p.gamma * phi_eval(tau, p) * w_of_e * w_of_e;
}

}  // namespace stc

#endif  // STC_CORE_MATH_HPP
