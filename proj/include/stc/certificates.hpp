#ifndef STC_CERTIFICATES_HPP
#define STC_CERTIFICATES_HPP

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <random>
#include <stdexcept>
#include <vector>

#include "stc/core_math.hpp"

// Polytopic embeddings, Assumption-1/2 feasibility with a fixed quadratic V,
// gamma minimization by bisection and multi-level certificate banks.
namespace stc {

inline constexpr double kLGainFloor = 1e-9;
inline constexpr double kGammaLo = 1e-6;
inline constexpr double kGammaHi = 1e6;

struct PolytopicEmbedding {
    struct Vertex {
        Eigen::MatrixXd A, B, E;
    };
    Eigen::Index n_x = 0, n_e = 0, n_w = 0;
    std::vector<Vertex> vertices;
    std::optional<double> level_c;  // sublevel bound the embedding is valid for
};

struct ParameterSet {
    double epsilon;  // decay/growth rate
    double gamma;    // coupling gain, > 0
    double l_gain;   // error growth rate L, > 0
};

struct LevelCertificate {
    double c;  // sublevel bound c_l; +inf for the global ISS level
    std::vector<ParameterSet> sets;  // sets[0] is the fall-back (epsilon > 0)
};

struct CertificateBank {
    Eigen::MatrixXd p_matrix;  // V(x) = x'Px
    double theta = 0.0;        // alpha_w(s) = theta^2 s^2
    std::vector<LevelCertificate> levels;  // sorted ascending by c
};

// Builds an embedding for a requested sublevel bound (nullopt = global level).
using EmbeddingBuilder = std::function<PolytopicEmbedding(std::optional<double>)>;

// Closed-loop vector field evaluated on the true nonlinear dynamics.
using ClosedLoopField =
    std::function<Eigen::VectorXd(const Eigen::VectorXd& x, const Eigen::VectorXd& e, double w)>;

// Single-link robot arm (Example 1): A = [[0,1],[-1,-1]], B(a~) = [[0,0],[a~-1,1]],
// E = [0;1], vertices at a~ = +-a. The controller gain b cancels out of the
// embedded closed loop; it is validated only.
inline PolytopicEmbedding embed_example1(double a, double b) {
    if (a < 0.0 || b <= 0.0)
        throw std::domain_error("embed_example1: need a >= 0, b > 0");
    PolytopicEmbedding em;
    em.n_x = 2;
    em.n_e = 2;
    em.n_w = 1;
    Eigen::MatrixXd A(2, 2), E(2, 1);
    A << 0, 1, -1, -1;
    E << 0, 1;
    auto add = [&](double a_tilde) {
        Eigen::MatrixXd B(2, 2);
        B << 0, 0, a_tilde - 1.0, 1.0;
        em.vertices.push_back({A, B, E});
    };
    add(-a);
    if (a > 0.0) add(a);
    return em;
}

// Example 2: A = -I, B(a1~,a2~) = [[0,0],[a1~, a2~-1]], E = [0;1], with
// a1~ in [-c/7, c/7] and a2~ in [-3c/14, 3c/14]; four extremal combinations.
inline PolytopicEmbedding embed_example2(double c_level) {
    if (c_level <= 0.0) throw std::domain_error("embed_example2: c_level must be positive");
    PolytopicEmbedding em;
    em.n_x = 2;
    em.n_e = 2;
    em.n_w = 1;
    Eigen::MatrixXd A = -Eigen::MatrixXd::Identity(2, 2), E(2, 1);
    E << 0, 1;
    const double a1 = c_level / 7.0, a2 = 3.0 * c_level / 14.0;
    for (double s1 : {-1.0, 1.0})
        for (double s2 : {-1.0, 1.0}) {
            Eigen::MatrixXd B(2, 2);
            B << 0, 0, s1 * a1, s2 * a2 - 1.0;
            em.vertices.push_back({A, B, E});
        }
    em.level_c = c_level;
    return em;
}

// L = max over vertices of the spectral norm of B, for W(e) = |e| and
// H(x,w) = |Ax + Ew|; floored to keep Assumption 1's L > 0.
inline double compute_l_gain(const PolytopicEmbedding& em) {
    double l = 0.0;
    for (const auto& v : em.vertices) {
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(v.B);
        l = std::max(l, svd.singularValues()(0));
    }
    return std::max(l, kLGainFloor);
}

// The vertex feasibility matrix: M <= 0 is exactly
//   2x'Pf <= -eps x'Px - |Ax+Ew|^2 + gamma^2 |e|^2 + theta^2 |w|^2
// for all (x,e,w) under the vertex linearization f = Ax + Be + Ew.
inline Eigen::MatrixXd feasibility_matrix(const PolytopicEmbedding::Vertex& v,
                                          const Eigen::MatrixXd& p_matrix, double epsilon,
                                          double gamma, double theta) {
    const Eigen::Index nx = v.A.rows(), ne = v.B.cols(), nw = v.E.cols();
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(nx + ne + nw, nx + ne + nw);
    m.topLeftCorner(nx, nx) =
        v.A.transpose() * p_matrix + p_matrix * v.A + epsilon * p_matrix + v.A.transpose() * v.A;
    m.block(0, nx, nx, ne) = p_matrix * v.B;
    m.block(nx, 0, ne, nx) = m.block(0, nx, nx, ne).transpose();
    m.block(0, nx + ne, nx, nw) = p_matrix * v.E + v.A.transpose() * v.E;
    m.block(nx + ne, 0, nw, nx) = m.block(0, nx + ne, nx, nw).transpose();
    m.block(nx, nx, ne, ne) = -gamma * gamma * Eigen::MatrixXd::Identity(ne, ne);
    m.block(nx + ne, nx + ne, nw, nw) =
        v.E.transpose() * v.E - theta * theta * Eigen::MatrixXd::Identity(nw, nw);
    return m;
}

inline double max_feasibility_eig(const PolytopicEmbedding& em, const Eigen::MatrixXd& p_matrix,
                                  double epsilon, double gamma, double theta) {
    if (p_matrix.rows() != em.n_x || p_matrix.cols() != em.n_x)
        throw std::invalid_argument("feasibility: P dimension mismatch");
    double worst = -std::numeric_limits<double>::infinity();
    for (const auto& v : em.vertices) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(
            feasibility_matrix(v, p_matrix, epsilon, gamma, theta), Eigen::EigenvaluesOnly);
        worst = std::max(worst, eig.eigenvalues().maxCoeff());
    }
    return worst;
}

inline bool feasibility_check(const PolytopicEmbedding& em, const Eigen::MatrixXd& p_matrix,
                              double epsilon, double gamma, double theta) {
    return max_feasibility_eig(em, p_matrix, epsilon, gamma, theta) <= 0.0;
}

// Smallest gamma (within relative tol, geometric bisection on [1e-6, 1e6])
// passing feasibility_check; nullopt when even the upper bracket fails.
inline std::optional<double> min_gamma(const PolytopicEmbedding& em,
                                       const Eigen::MatrixXd& p_matrix, double epsilon,
                                       double theta, double tol = 1e-6) {
    if (tol <= 0.0) throw std::domain_error("min_gamma: tol must be positive");
    if (!feasibility_check(em, p_matrix, epsilon, kGammaHi, theta)) return std::nullopt;
    if (feasibility_check(em, p_matrix, epsilon, kGammaLo, theta)) return kGammaLo;
    double lo = kGammaLo, hi = kGammaHi;  // lo infeasible, hi feasible
    while (hi / lo - 1.0 > tol) {
        const double mid = std::sqrt(lo * hi);
        if (feasibility_check(em, p_matrix, epsilon, mid, theta))
            hi = mid;
        else
            lo = mid;
    }
    return hi;
}

// One level per entry of c_levels (or a single global +inf level when empty).
// Per level: min_gamma for each epsilon on the grid, infeasible entries
// dropped; the largest feasible positive epsilon becomes the fall-back set.
inline CertificateBank synthesize_bank(const EmbeddingBuilder& builder,
                                       const std::vector<double>& epsilon_grid, double theta,
                                       const std::vector<double>& c_levels,
                                       const Eigen::MatrixXd& p_matrix) {
    if (epsilon_grid.empty()) throw std::invalid_argument("synthesize_bank: empty epsilon grid");
    CertificateBank bank;
    bank.p_matrix = p_matrix;
    bank.theta = theta;
    std::vector<std::optional<double>> level_cs;
    if (c_levels.empty())
        level_cs.push_back(std::nullopt);
    else
        for (double c : c_levels) level_cs.emplace_back(c);
    for (const auto& c : level_cs) {
        const PolytopicEmbedding em = builder(c);
        const double l_gain = compute_l_gain(em);
        std::vector<ParameterSet> feasible;
        for (double eps : epsilon_grid)
            if (auto g = min_gamma(em, p_matrix, eps, theta))
                feasible.push_back({eps, *g, l_gain});
        std::size_t fb = feasible.size();
        for (std::size_t i = 0; i < feasible.size(); ++i)
            if (feasible[i].epsilon > 0.0 &&
                (fb == feasible.size() || feasible[i].epsilon > feasible[fb].epsilon))
                fb = i;
        if (fb == feasible.size())
            throw std::runtime_error("synthesize_bank: no feasible fall-back (positive epsilon)");
        LevelCertificate level;
        level.c = c ? *c : std::numeric_limits<double>::infinity();
        level.sets.push_back(feasible[fb]);
        for (std::size_t i = 0; i < feasible.size(); ++i)
            if (i != fb) level.sets.push_back(feasible[i]);
        bank.levels.push_back(std::move(level));
    }
    return bank;
}

struct PointwiseReport {
    double worst_w_margin = std::numeric_limits<double>::infinity();
    double worst_v_margin = std::numeric_limits<double>::infinity();
    long violations = 0;
    long samples = 0;
};

// Monte-Carlo confirmation of eq_w_est and eq_v_desc_hybrid on the true
// nonlinear vector field. x and x_hat are drawn inside the level's sampling
// radius; margins are relative (violation below -1e-8 is flagged).
inline PointwiseReport verify_pointwise(const CertificateBank& bank,
                                        const EmbeddingBuilder& builder, const ClosedLoopField& f,
                                        const std::function<double(double)>& x_radius,
                                        double w_range, long n_samples, std::uint64_t seed) {
    PointwiseReport rep;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    const long per_level =
        (n_samples + static_cast<long>(bank.levels.size()) - 1) / static_cast<long>(bank.levels.size());
    for (const auto& level : bank.levels) {
        const bool global = !std::isfinite(level.c);
        const PolytopicEmbedding em =
            builder(global ? std::nullopt : std::optional<double>(level.c));
        const Eigen::MatrixXd& A = em.vertices.front().A;
        const Eigen::MatrixXd& E = em.vertices.front().E;
        const double radius = x_radius(level.c);
        for (long k = 0; k < per_level && rep.samples < n_samples; ++k, ++rep.samples) {
            Eigen::VectorXd x(em.n_x), x_hat(em.n_x);
            do {
                for (Eigen::Index i = 0; i < em.n_x; ++i) x(i) = radius * unit(rng);
            } while (x.norm() > radius);
            do {
                for (Eigen::Index i = 0; i < em.n_x; ++i) x_hat(i) = radius * unit(rng);
            } while (x_hat.norm() > radius);
            const Eigen::VectorXd e = x_hat - x;
            const double w = w_range * unit(rng);
            const Eigen::VectorXd fx = f(x, e, w);
            const double h = (A * x + E * Eigen::VectorXd::Constant(1, w)).norm();
            const double v = x.dot(bank.p_matrix * x);
            const double lhs_v = 2.0 * x.dot(bank.p_matrix * fx);
            for (const auto& set : level.sets) {
                // eq_w_est: |f| <= L|e| + H
                const double wm_rhs = set.l_gain * e.norm() + h;
                const double wm = (wm_rhs - fx.norm()) / std::max(1.0, std::abs(wm_rhs));
                // eq_v_desc_hybrid
                const double rhs_v = -set.epsilon * v - h * h + set.gamma * set.gamma * e.squaredNorm() +
                                     bank.theta * bank.theta * w * w;
                const double vm = (rhs_v - lhs_v) / std::max(1.0, std::abs(rhs_v));
                rep.worst_w_margin = std::min(rep.worst_w_margin, wm);
                rep.worst_v_margin = std::min(rep.worst_v_margin, vm);
                if (wm < -1e-8 || vm < -1e-8) ++rep.violations;
            }
        }
    }
    if (rep.samples == 0) {
        rep.worst_w_margin = 0.0;
        rep.worst_v_margin = 0.0;
    }
    return rep;
}

}  // namespace stc

#endif  // STC_CERTIFICATES_HPP
