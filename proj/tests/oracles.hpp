#ifndef STC_TESTS_ORACLES_HPP
#define STC_TESTS_ORACLES_HPP

// Numeric oracles kept independent of the library implementations: RK4
// integration of the phi Riccati ODE, quadrature of its transit time, and a
// closed-form 2x2 SVD.
#include <cmath>

namespace oracles {

inline double phi_rhs(double phi, double gamma, double lam_cap) {
    return -2.0 * lam_cap * phi - gamma * (phi * phi + 1.0);
}

// Fixed-step RK4 on the Riccati ODE from phi(0) = 1/lam.
inline double phi_rk4(double tau, double lam, double gamma, double lam_cap, int steps = 20000) {
    double phi = 1.0 / lam;
    const double dt = tau / steps;
    for (int i = 0; i < steps; ++i) {
        const double k1 = phi_rhs(phi, gamma, lam_cap);
        const double k2 = phi_rhs(phi + 0.5 * dt * k1, gamma, lam_cap);
        const double k3 = phi_rhs(phi + 0.5 * dt * k2, gamma, lam_cap);
        const double k4 = phi_rhs(phi + dt * k3, gamma, lam_cap);
        phi += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    return phi;
}

inline double transit_integrand(double phi, double gamma, double lam_cap) {
    return 1.0 / (2.0 * lam_cap * phi + gamma * (phi * phi + 1.0));
}

inline double simpson(double a, double b, double fa, double fm, double fb) {
    return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

inline double adaptive_simpson(double a, double b, double fa, double fm, double fb, double whole,
                               double tol, int depth, double gamma, double lam_cap) {
    const double m = 0.5 * (a + b);
    const double lm = transit_integrand(0.5 * (a + m), gamma, lam_cap);
    const double rm = transit_integrand(0.5 * (m + b), gamma, lam_cap);
    const double left = simpson(a, m, fa, lm, fm);
    const double right = simpson(m, b, fm, rm, fb);
    if (depth <= 0 || std::abs(left + right - whole) < 15.0 * tol)
        return left + right + (left + right - whole) / 15.0;
    return adaptive_simpson(a, m, fa, lm, fm, left, tol / 2, depth - 1, gamma, lam_cap) +
           adaptive_simpson(m, b, fm, rm, fb, right, tol / 2, depth - 1, gamma, lam_cap);
}

// Time for phi to travel from 1/lam down to lam: the integral of dphi/|phi'|
// over [lam, 1/lam]. The substitution u = 1/phi maps the integrand onto
// itself, so the whole equals twice the [lam, 1] half.
inline double transit_time(double lam, double gamma, double lam_cap) {
    const double a = lam, b = 1.0;
    const double fa = transit_integrand(a, gamma, lam_cap);
    const double fb = transit_integrand(b, gamma, lam_cap);
    const double fm = transit_integrand(0.5 * (a + b), gamma, lam_cap);
    const double whole = simpson(a, b, fa, fm, fb);
    return 2.0 * adaptive_simpson(a, b, fa, fm, fb, whole, 1e-13, 48, gamma, lam_cap);
}

// T_max is the transit time in the lam -> 0 limit.
inline double mati_oracle(double gamma, double lam_cap) { return transit_time(1e-8, gamma, lam_cap); }

// Largest singular value of [[a,b],[c,d]] in closed form.
inline double svd2x2_max(double a, double b, double c, double d) {
    const double f = a * a + b * b + c * c + d * d;  // squared Frobenius norm
    const double det = a * d - b * c;
    const double disc = std::sqrt(std::max(0.0, f * f - 4.0 * det * det));
    return std::sqrt(0.5 * (f + disc));
}

}  // namespace oracles

#endif  // STC_TESTS_ORACLES_HPP
