#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "doctest.h"
#include "stc/triggering.hpp"

using namespace stc;

namespace {

// Bank with a deliberately weak fall-back (large gamma/L) so that the dynamic
// branches can win, one strong negative-epsilon set, and one positive-epsilon
// set for the RAS shift behaviour.
CertificateBank synthetic_bank() {
    CertificateBank bank;
    bank.p_matrix = Eigen::MatrixXd::Identity(2, 2);
    bank.theta = 2.0;
    LevelCertificate level;
    level.c = std::numeric_limits<double>::infinity();
    level.sets.push_back({0.5, 20.0, 5.0});   // fall-back
    level.sets.push_back({-1.0, 3.0, 1.0});   // dynamic, eps < 0
    level.sets.push_back({0.2, 10.0, 3.0});   // dynamic, eps > 0
    bank.levels.push_back(level);
    return bank;
}

TriggerConfig iss_config() {
    TriggerConfig cfg;
    cfg.eps_ref = 1.0;
    cfg.variant = TriggerConfig::Variant::ISS;
    return cfg;
}

}  // namespace

TEST_CASE("mechanism constructors and guards") {
    CHECK_THROWS_AS(make_fir(0, 1.0), std::domain_error);
    CHECK_THROWS_AS(make_iir(0.0, 0.5, 1.0), std::domain_error);
    CHECK_THROWS_AS(make_iir(0.9, 0.2, 1.0), std::domain_error);
    const MechanismState fir = make_fir(5, 3.0);
    REQUIRE(fir.buffer.size() == 4);
    CHECK(fir.buffer.minCoeff() == 3.0);  // warm start with V(x0)
    CHECK(eta_norm(fir) == 3.0);
    CHECK(eta_norm(make_fir(1, 3.0)) == 0.0);
    CHECK(eta_norm(make_ref(-2.0)) == 2.0);
}

TEST_CASE("C values per mechanism") {
    const TriggerConfig iss = iss_config();
    MechanismState fir = make_fir(3, 2.0);
    // C = (V + sum buffer) / m
    CHECK(c_value(fir, 5.0, iss) == doctest::Approx((5.0 + 4.0) / 3.0).epsilon(1e-15));
    CHECK(c_value(make_iir(0.9, 0.1, 7.0), 1.0, iss) == 7.0);
    CHECK(c_value(make_ref(7.0), 1.0, iss) == 7.0);

    TriggerConfig ras = iss;
    ras.variant = TriggerConfig::Variant::RAS;
    ras.c_w = 1.0;
    ras.c_max = 4.0;
    CHECK(c_value(make_iir(0.9, 0.1, 0.2), 1.0, ras) == 1.0);   // clamped up
    CHECK(c_value(make_iir(0.9, 0.1, 9.0), 1.0, ras) == 4.0);   // clamped down
    CHECK(c_value(make_fir(1, 0.0), 9.0, ras) == 4.0);
    CHECK(c_value(make_ref(0.5), 1.0, ras) == 1.5);             // c_w + eta
}

TEST_CASE("S updates shift, filter and discount") {
    TriggerConfig cfg = iss_config();
    cfg.eps_ref = 0.5;
    const double d = std::exp(-0.5 * 2.0);

    MechanismState fir = make_fir(3, 0.0);
    fir.buffer << 1.0, 2.0;
    const MechanismState fir2 = s_update(fir, 5.0, 2.0, cfg);
    CHECK(fir2.buffer(0) == doctest::Approx(2.0 * d).epsilon(1e-15));
    CHECK(fir2.buffer(1) == doctest::Approx(5.0 * d).epsilon(1e-15));

    const MechanismState iir2 = s_update(make_iir(0.9, 0.1, 4.0), 6.0, 2.0, cfg);
    CHECK(iir2.eta == doctest::Approx(d * (0.9 * 4.0 + 0.1 * 6.0)).epsilon(1e-15));

    const MechanismState ref2 = s_update(make_ref(4.0), 6.0, 2.0, cfg);
    CHECK(ref2.eta == doctest::Approx(d * 4.0).epsilon(1e-15));
}

TEST_CASE("reference initialization") {
    const TriggerConfig iss = iss_config();
    CHECK(make_ref_initial(3.0, iss).eta == 3.0);
    TriggerConfig ras = iss;
    ras.variant = TriggerConfig::Variant::RAS;
    ras.c_w = 1.0;
    ras.c_max = 4.0;
    CHECK(make_ref_initial(2.0, ras).eta == 1.0);  // V0 - c_w
    CHECK(make_ref_initial(0.5, ras).eta == 0.0);
    CHECK(make_ref_initial(9.0, ras).eta == 3.0);  // c_max - c_w
}

TEST_CASE("gamma selection: log branch, cap, and the fall-back") {
    const CertificateBank bank = synthetic_bank();
    const TriggerConfig cfg = iss_config();
    const double fb = cfg.delta * mati(20.0, 5.25);
    const double cap_dyn = cfg.delta * mati(3.0, 0.5);  // lam = max(1 - 0.5, 1 - delta)

    // C >= V, log bound below the cap: the eps = -1 set wins.
    const GammaResult log_case = gamma_iss(1.0, 1.5, bank, cfg);
    CHECK(log_case.set_index == 1);
    CHECK_FALSE(log_case.fallback);
    CHECK(log_case.gamma == doctest::Approx(std::log(1.5) / 2.0).epsilon(1e-14));
    CHECK(log_case.gamma > fb);

    // Large headroom: the MATI cap binds.
    const GammaResult cap_case = gamma_iss(1.0, 50.0, bank, cfg);
    CHECK(cap_case.set_index == 1);
    CHECK(cap_case.gamma == doctest::Approx(cap_dyn).epsilon(1e-14));

    // C < V: every dynamic branch collapses to zero.
    const GammaResult fb_case = gamma_iss(1.0, 0.5, bank, cfg);
    CHECK(fb_case.set_index == 0);
    CHECK(fb_case.fallback);
    CHECK(fb_case.gamma == doctest::Approx(fb).epsilon(1e-14));

    // At the origin the cap applies directly.
    CHECK(gamma_iss(0.0, 0.0, bank, cfg).gamma == doctest::Approx(cap_dyn).epsilon(1e-14));

    // Monotone in the headroom ratio until the cap.
    double prev = 0.0;
    for (double c = 1.0; c < 6.0; c += 0.5) {
        const double g = gamma_iss(1.0, c, bank, cfg).gamma;
        CHECK(g >= prev - 1e-15);
        prev = g;
    }
}

TEST_CASE("fall-back set must have positive epsilon") {
    CertificateBank bank = synthetic_bank();
    bank.levels[0].sets[0].epsilon = -0.5;
    CHECK_THROWS_AS(gamma_iss(1.0, 2.0, bank, iss_config()), std::invalid_argument);
}

TEST_CASE("RAS with w_bar = 0 reproduces the ISS decision bit for bit") {
    const CertificateBank bank = synthetic_bank();
    TriggerConfig ras = iss_config();
    ras.variant = TriggerConfig::Variant::RAS;
    ras.w_bar = 0.0;
    for (double v : {0.0, 0.3, 1.0, 2.0})
        for (double c : {0.0, 0.5, 1.5, 50.0}) {
            const GammaResult a = gamma_iss(v, c, bank, iss_config());
            const GammaResult b = gamma_ras(v, c, bank, ras);
            CHECK(a.gamma == b.gamma);
            CHECK(a.set_index == b.set_index);
            CHECK(a.fallback == b.fallback);
        }
}

TEST_CASE("RAS level selection and the out-of-region guard") {
    CertificateBank bank = synthetic_bank();
    bank.levels[0].c = 1.0;
    LevelCertificate upper = bank.levels[0];
    upper.c = 10.0;
    upper.sets[0] = {0.4, 25.0, 6.0};
    bank.levels.push_back(upper);

    TriggerConfig ras = iss_config();
    ras.variant = TriggerConfig::Variant::RAS;
    ras.w_bar = 0.0;
    CHECK(gamma_ras(0.5, 0.9, bank, ras).level == 0);
    CHECK(gamma_ras(0.5, 2.0, bank, ras).level == 1);  // level from max{V, C}
    CHECK(gamma_ras(2.0, 0.5, bank, ras).level == 1);
    CHECK_THROWS_AS(gamma_ras(11.0, 0.5, bank, ras), OutOfRegionError);
}

TEST_CASE("RAS disturbance shift on the log bound") {
    const CertificateBank bank = synthetic_bank();  // theta = 2
    TriggerConfig ras = iss_config();
    ras.variant = TriggerConfig::Variant::RAS;
    ras.w_bar = 0.5;  // alpha_w(w_bar) = 4 * 0.25 = 1

    // The eps = 0.2 set sees shift 1/0.2 = 5; with V = 6, C = 6.1 its bound is
    // log((6.1-5)/(6-5)) / (ref - eps), below its MATI cap.
    const double h2 = std::log(1.1) / (1.0 - 0.2);
    // The eps = -1 set sees shift 1/(-1) = -1: log(7.1/7)/2, much smaller.
    CHECK(std::log(7.1 / 7.0) / 2.0 < h2);
    const GammaResult g = gamma_ras(6.0, 6.1, bank, ras);
    CHECK(g.set_index == 2);
    CHECK(g.gamma == doctest::Approx(h2).epsilon(1e-14));

    // When the shift swallows V the positive-eps branch yields zero, so the
    // negative-eps set (shifted by -1) takes over instead of an unsound cap.
    const GammaResult small = gamma_ras(2.0, 3.0, bank, ras);
    CHECK(small.set_index == 1);
    CHECK(small.gamma == doctest::Approx(std::log(4.0 / 3.0) / 2.0).epsilon(1e-14));

    // Even at the origin the shifted positive-eps branch must not claim the
    // pure MATI cap.
    CertificateBank only_pos = bank;
    only_pos.levels[0].sets.resize(1);
    only_pos.levels[0].sets.push_back(bank.levels[0].sets[2]);
    const GammaResult origin = gamma_ras(0.0, 0.0, only_pos, ras);
    CHECK(origin.fallback);
}

TEST_CASE("fall-back period helpers") {
    const CertificateBank bank = synthetic_bank();
    CHECK(fallback_period(bank, 0) == doctest::Approx(0.999 * mati(20.0, 5.25)).epsilon(1e-15));
    CHECK(fallback_period(bank, 0, 0.5) ==
          doctest::Approx(0.5 * mati(20.0, 5.25)).epsilon(1e-15));
    CHECK_THROWS_AS(fallback_period(bank, 3), std::out_of_range);
}
