// Tests for pilot observation, MMSE channel estimation (scalar and matrix
// forms), and the training-overhead prelog / rate threshold.
#include "doctest.h"

#include <cmath>
#include <complex>

#include <Eigen/Dense>

#include "efsec/channel_model.hpp"
#include "efsec/estimation.hpp"
#include "efsec/statmath.hpp"

using namespace efsec;
using channel_model::SystemConfig;

namespace {

Eigen::MatrixXcd exp_correlation(int n, double r) {
    Eigen::MatrixXcd m(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) m(i, j) = std::pow(r, std::abs(i - j));
    return m;
}

}  // namespace

TEST_CASE("isotropic estimate/error variances at the default operating point") {
    const SystemConfig cfg = SystemConfig::isotropic_default();
    const auto [omega_hat, omega_tilde] = estimation::isotropic_variances(5.0, cfg);
    // tau_p*rho_p = 200, so the split of beta = 5 is 5000/1001 and 5/1001.
    CHECK(omega_hat == 5000.0 / 1001.0);
    CHECK(omega_tilde == 5.0 / 1001.0);

    // The two variances always partition beta...
    CHECK(omega_hat + omega_tilde == doctest::Approx(5.0).epsilon(1e-12));
    // ...and their ratio is the pilot SNR tau_p*rho_p*beta/sigma2.
    CHECK(omega_hat / omega_tilde == doctest::Approx(1000.0).epsilon(1e-12));

    CHECK_THROWS_AS(estimation::isotropic_variances(0.0, cfg), std::invalid_argument);
}

TEST_CASE("estimate variance grows with pilot power and saturates at beta") {
    SystemConfig cfg = SystemConfig::isotropic_default();
    double prev = 0.0;
    for (double rp : {0.1, 1.0, 10.0, 100.0, 1e6}) {
        cfg.rho_p = rp;
        const auto [oh, ot] = estimation::isotropic_variances(5.0, cfg);
        CHECK(oh > prev);
        CHECK(oh < 5.0);
        CHECK(ot > 0.0);
        prev = oh;
    }
    cfg.rho_p = 1e12;
    const auto [oh, ot] = estimation::isotropic_variances(5.0, cfg);
    CHECK(oh == doctest::Approx(5.0).epsilon(1e-9));
    CHECK(ot < 1e-9);
}

TEST_CASE("prelog and secrecy threshold at the default operating point") {
    const SystemConfig cfg = SystemConfig::isotropic_default();
    const auto [eta, theta] = estimation::prelog_and_threshold(cfg);
    CHECK(eta == doctest::Approx(0.9).epsilon(1e-15));
    CHECK(theta == doctest::Approx(std::exp2(1.0 / 0.9)).epsilon(1e-15));
    CHECK(std::abs(theta - 2.16012) < 1e-4);

    SystemConfig zero_rate = cfg;
    zero_rate.R_th = 0.0;  // allowed at this level; no secrecy demanded
    CHECK(estimation::prelog_and_threshold(zero_rate).second == doctest::Approx(1.0));

    SystemConfig no_pilot = cfg;
    no_pilot.tau_p = 0.0;  // allowed at this level; the full block carries data
    CHECK(estimation::prelog_and_threshold(no_pilot).first == doctest::Approx(1.0));

    SystemConfig bad = cfg;
    bad.tau_p = bad.Tc;
    CHECK_THROWS_AS(estimation::prelog_and_threshold(bad), std::invalid_argument);
    bad = cfg;
    bad.R_th = -1.0;
    CHECK_THROWS_AS(estimation::prelog_and_threshold(bad), std::invalid_argument);
}

TEST_CASE("pilot observation: scaling, noise level, determinism") {
    SystemConfig cfg = SystemConfig::isotropic_default();
    cfg.M = 8;

    // Near-noiseless: y must collapse to sqrt(tau_p*rho_p) * h.
    SystemConfig quiet = cfg;
    quiet.sigma2 = 1e-12;
    statmath::RngStream s0(11ULL, 0ULL);
    const Eigen::VectorXcd h = statmath::sample_standard_complex_gaussian(cfg.M, s0);
    statmath::RngStream s1(11ULL, 1ULL);
    const Eigen::VectorXcd y0 = estimation::pilot_observe(h, quiet, s1);
    CHECK((y0 - std::sqrt(200.0) * h).norm() <= 1e-5 * h.norm());

    // Average energy: tau_p*rho_p*beta*M + sigma2*M with beta = 1 here.
    statmath::RngStream s2(11ULL, 2ULL);
    const long n = 20000;
    double energy = 0.0;
    for (long i = 0; i < n; ++i) {
        const Eigen::VectorXcd hi = statmath::sample_standard_complex_gaussian(cfg.M, s2);
        energy += estimation::pilot_observe(hi, cfg, s2).squaredNorm();
    }
    CHECK(energy / n == doctest::Approx(200.0 * cfg.M + cfg.M).epsilon(0.02));

    // Same stream, same input: bit-identical output.
    statmath::RngStream sa(99ULL, 0ULL), sb(99ULL, 0ULL);
    CHECK((estimation::pilot_observe(h, cfg, sa) - estimation::pilot_observe(h, cfg, sb))
              .norm() == 0.0);
}

TEST_CASE("MMSE estimate converges to the channel as noise vanishes") {
    SystemConfig cfg = SystemConfig::isotropic_default();
    cfg.M = 6;
    cfg.sigma2 = 1e-12;
    const double beta = 5.0;
    const Eigen::MatrixXcd R_hb = beta * Eigen::MatrixXcd::Identity(6, 6);
    statmath::RngStream stream(21ULL, 0ULL);
    const Eigen::VectorXcd h =
        std::sqrt(beta) * statmath::sample_standard_complex_gaussian(6, stream);
    const Eigen::VectorXcd y = estimation::pilot_observe(h, cfg, stream);
    const auto est = estimation::mmse_estimate(y, R_hb, cfg);
    CHECK((est.h_hat - h).norm() <= 1e-4 * h.norm());
}

TEST_CASE("MMSE covariance split: exact complement, PSD error, closed-form agreement") {
    SystemConfig cfg = SystemConfig::isotropic_default();
    cfg.M = 5;
    const double beta = 2.0;
    const Eigen::MatrixXcd R_hb = beta * exp_correlation(5, 0.5);
    statmath::RngStream stream(31ULL, 0ULL);
    const Eigen::VectorXcd g = statmath::sample_standard_complex_gaussian(5, stream);
    const Eigen::VectorXcd h = channel_model::psd_sqrt(R_hb) * g;
    const Eigen::VectorXcd y = estimation::pilot_observe(h, cfg, stream);
    const auto est = estimation::mmse_estimate(y, R_hb, cfg);

    // The estimate and error covariances partition the prior covariance.
    CHECK((est.R_hat + est.R_tilde - R_hb).norm() <= 1e-9 * R_hb.norm());

    // R_hat must equal tp * R (tp R + sigma2 I)^{-1} R, recomputed directly.
    const double tp = cfg.tau_p * cfg.rho_p;
    const Eigen::MatrixXcd direct =
        tp * R_hb *
        (tp * R_hb + cfg.sigma2 * Eigen::MatrixXcd::Identity(5, 5)).inverse() * R_hb;
    CHECK((est.R_hat - direct).norm() <= 1e-9 * direct.norm());

    // With sigma2 > 0 the error covariance is strictly positive definite.
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(est.R_tilde, Eigen::EigenvaluesOnly);
    CHECK(es.eigenvalues().minCoeff() > 0.0);

    // Correlated prior: the scalar shortcut variances must not be attached.
    CHECK_FALSE(est.omega_hat.has_value());

    CHECK_THROWS_AS(estimation::mmse_estimate(y, Eigen::MatrixXcd::Identity(4, 4), cfg),
                    std::invalid_argument);
}

TEST_CASE("MMSE estimate and error are empirically orthogonal") {
    SystemConfig cfg = SystemConfig::isotropic_default();
    cfg.M = 4;
    const Eigen::MatrixXcd R_hb = 2.0 * exp_correlation(4, 0.6);
    const Eigen::MatrixXcd sqrt_R = channel_model::psd_sqrt(R_hb);
    statmath::RngStream stream(41ULL, 0ULL);
    const long n = 20000;
    Eigen::MatrixXcd cross = Eigen::MatrixXcd::Zero(4, 4);
    for (long i = 0; i < n; ++i) {
        const Eigen::VectorXcd h = sqrt_R * statmath::sample_standard_complex_gaussian(4, stream);
        const Eigen::VectorXcd y = estimation::pilot_observe(h, cfg, stream);
        const auto est = estimation::mmse_estimate(y, R_hb, cfg);
        cross += est.h_hat * (h - est.h_hat).adjoint();
    }
    cross /= static_cast<double>(n);
    CHECK(cross.cwiseAbs().maxCoeff() < 0.02);
}

TEST_CASE("matrix MMSE filter reduces to the scalar form for an isotropic prior") {
    SystemConfig cfg = SystemConfig::isotropic_default();
    cfg.M = 7;
    const double beta = 5.0;
    const Eigen::MatrixXcd R_hb = beta * Eigen::MatrixXcd::Identity(7, 7);
    statmath::RngStream stream(51ULL, 0ULL);
    const Eigen::VectorXcd h =
        std::sqrt(beta) * statmath::sample_standard_complex_gaussian(7, stream);
    const Eigen::VectorXcd y = estimation::pilot_observe(h, cfg, stream);
    const auto est = estimation::mmse_estimate(y, R_hb, cfg);

    const double tp = cfg.tau_p * cfg.rho_p;
    const Eigen::VectorXcd scalar = (std::sqrt(tp) * beta / (tp * beta + cfg.sigma2)) * y;
    CHECK((est.h_hat - scalar).norm() <= 1e-12 * scalar.norm());

    // The scalar variances are attached and agree with the closed form.
    REQUIRE(est.omega_hat.has_value());
    REQUIRE(est.omega_tilde.has_value());
    const auto [oh, ot] = estimation::isotropic_variances(beta, cfg);
    CHECK(*est.omega_hat == doctest::Approx(oh).epsilon(1e-12));
    CHECK(*est.omega_tilde == doctest::Approx(ot).epsilon(1e-12));

    // R_hat / R_tilde are the matching multiples of the identity.
    CHECK((est.R_hat - oh * Eigen::MatrixXcd::Identity(7, 7)).norm() <= 1e-10);
    CHECK((est.R_tilde - ot * Eigen::MatrixXcd::Identity(7, 7)).norm() <= 1e-10);
}
