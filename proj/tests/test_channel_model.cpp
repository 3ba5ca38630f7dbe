// Tests for system-config validation, correlated small-scale fading,
// routing-gain sampling, and the PSD square root.
#include "doctest.h"

#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "efsec/channel_model.hpp"
#include "efsec/statmath.hpp"

using namespace efsec;
using channel_model::RoutingGainDistribution;
using channel_model::SystemConfig;

namespace {

// Runs fn and returns the ValidationError message (empty if none thrown).
template <typename Fn>
std::string validation_message(Fn&& fn) {
    try {
        fn();
    } catch (const channel_model::ValidationError& e) {
        return e.what();
    }
    return {};
}

}  // namespace

TEST_CASE("default configuration validates and materializes identity correlations") {
    const SystemConfig cfg = channel_model::validate_config(SystemConfig::isotropic_default());
    CHECK(cfg.M == 16);
    CHECK(cfg.R_b.rows() == 16);
    CHECK(cfg.R_e.cols() == 16);
    CHECK(cfg.C.rows() == 16);
    CHECK((cfg.R_b - Eigen::MatrixXcd::Identity(16, 16)).norm() == 0.0);

    // Empty matrices stand for identity-of-dimension-M and must be filled in.
    SystemConfig bare;
    const SystemConfig filled = channel_model::validate_config(bare);
    CHECK(filled.R_b.rows() == bare.M);
    CHECK((filled.C - Eigen::MatrixXcd::Identity(bare.M, bare.M)).norm() == 0.0);
}

TEST_CASE("validation errors name the offending field") {
    auto base = [] { return SystemConfig::isotropic_default(); };

    auto cfg1 = base();
    cfg1.tau_p = cfg1.Tc;  // no symbols left for data
    CHECK(validation_message([&] { channel_model::validate_config(cfg1); })
              .find("tau_p") != std::string::npos);

    auto cfg2 = base();
    cfg2.rho = 1.0;  // perfect leakage excluded
    CHECK(validation_message([&] { channel_model::validate_config(cfg2); })
              .find("rho") != std::string::npos);

    auto cfg3 = base();
    cfg3.M = 1;
    CHECK(validation_message([&] { channel_model::validate_config(cfg3); })
              .find("M") != std::string::npos);

    auto cfg4 = base();
    cfg4.alpha = 1.5;
    CHECK(validation_message([&] { channel_model::validate_config(cfg4); })
              .find("alpha") != std::string::npos);

    auto cfg5 = base();
    cfg5.beta_e_set = {3.0, 1.0};  // inverted interval
    CHECK(validation_message([&] { channel_model::validate_config(cfg5); })
              .find("beta_e_set") != std::string::npos);

    auto cfg6 = base();
    cfg6.C = 1.5 * Eigen::MatrixXcd::Identity(cfg6.M, cfg6.M);  // amplifying coupling
    CHECK(validation_message([&] { channel_model::validate_config(cfg6); })
              .find("C") != std::string::npos);

    auto cfg7 = base();
    cfg7.R_b = 2.0 * Eigen::MatrixXcd::Identity(cfg7.M, cfg7.M);  // diagonal not 1
    CHECK(validation_message([&] { channel_model::validate_config(cfg7); })
              .find("R_b") != std::string::npos);

    auto cfg8 = base();
    cfg8.R_e = Eigen::MatrixXcd::Identity(cfg8.M, cfg8.M);
    cfg8.R_e(0, 1) = std::complex<double>(0.5, 0.0);  // not Hermitian
    CHECK(validation_message([&] { channel_model::validate_config(cfg8); })
              .find("R_e") != std::string::npos);
}

TEST_CASE("routing-gain distributions expose means and reject bad parameters") {
    RoutingGainDistribution point;  // defaults to point mass at 5
    CHECK(point.mean() == doctest::Approx(5.0));
    CHECK(point.valid());

    RoutingGainDistribution uni;
    uni.kind = RoutingGainDistribution::Kind::Uniform;
    uni.a = 1.0;
    uni.b = 3.0;
    CHECK(uni.mean() == doctest::Approx(2.0));
    CHECK(uni.valid());
    uni.b = 0.5;  // max below min
    CHECK_FALSE(uni.valid());

    RoutingGainDistribution gam;
    gam.kind = RoutingGainDistribution::Kind::Gamma;
    gam.a = 4.0;
    gam.b = 1.25;
    CHECK(gam.mean() == doctest::Approx(5.0));
    CHECK(gam.valid());
    gam.b = -1.0;
    std::string why;
    CHECK_FALSE(gam.valid(&why));
    CHECK(!why.empty());

    RoutingGainDistribution logn;
    logn.kind = RoutingGainDistribution::Kind::Lognormal;
    logn.a = 0.0;
    logn.b = 1.0;
    CHECK(logn.mean() == doctest::Approx(std::exp(0.5)));
    CHECK(logn.valid());
}

TEST_CASE("small-scale draws have the designed cross-covariance") {
    SystemConfig cfg = SystemConfig::isotropic_default();
    cfg.M = 4;
    cfg.C = Eigen::MatrixXcd::Identity(4, 4);
    cfg.R_b = Eigen::MatrixXcd::Identity(4, 4);
    cfg.R_e = Eigen::MatrixXcd::Identity(4, 4);

    const long n = 200000;
    for (double rho : {0.0, 0.6}) {
        cfg.rho = rho;
        statmath::RngStream stream(314159ULL, 0ULL);
        Eigen::MatrixXcd cross = Eigen::MatrixXcd::Zero(4, 4);
        Eigen::MatrixXcd cov_e = Eigen::MatrixXcd::Zero(4, 4);
        for (long i = 0; i < n; ++i) {
            const auto [g_b, g_e] = channel_model::draw_small_scale(cfg, stream);
            cross += g_e * g_b.adjoint();
            cov_e += g_e * g_e.adjoint();
        }
        cross /= static_cast<double>(n);
        cov_e /= static_cast<double>(n);
        // E[g_e g_b^H] = rho * C; E[g_e g_e^H] = rho^2 C C^H + (1-rho^2) I = I here.
        CHECK((cross - rho * Eigen::MatrixXcd::Identity(4, 4)).cwiseAbs().maxCoeff() < 0.015);
        CHECK((cov_e - Eigen::MatrixXcd::Identity(4, 4)).cwiseAbs().maxCoeff() < 0.015);
    }
}

TEST_CASE("zero leakage makes the two links statistically independent") {
    SystemConfig cfg = SystemConfig::isotropic_default();
    cfg.M = 4;
    cfg.rho = 0.0;
    cfg.C = Eigen::MatrixXcd::Identity(4, 4);
    statmath::RngStream stream(271828ULL, 0ULL);
    const long n = 100000;
    double sx = 0.0, sy = 0.0, sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (long i = 0; i < n; ++i) {
        const auto [g_b, g_e] = channel_model::draw_small_scale(cfg, stream);
        const double x = g_b.squaredNorm();
        const double y = g_e.squaredNorm();
        sx += x;
        sy += y;
        sxy += x * y;
        sxx += x * x;
        syy += y * y;
    }
    const double mx = sx / n, my = sy / n;
    const double cov = sxy / n - mx * my;
    const double vx = sxx / n - mx * mx, vy = syy / n - my * my;
    const double se = std::sqrt(vx * vy / static_cast<double>(n));
    CHECK(std::abs(cov) <= 3.0 * se);
}

TEST_CASE("assembled channels scale small-scale factors by the routing gains") {
    SystemConfig cfg = SystemConfig::isotropic_default();
    cfg.M = 4;
    cfg.C = Eigen::MatrixXcd::Identity(4, 4);
    cfg.R_b = Eigen::MatrixXcd::Identity(4, 4);
    cfg.R_e = Eigen::MatrixXcd::Identity(4, 4);
    statmath::RngStream stream(5150ULL, 0ULL);
    const auto [g_b, g_e] = channel_model::draw_small_scale(cfg, stream);

    // Unit gains and identity correlation leave the draw untouched.
    const auto unit = channel_model::assemble_channels(g_b, g_e, 1.0, 1.0, cfg);
    CHECK((unit.h_b - g_b).norm() <= 1e-12 * g_b.norm());
    CHECK((unit.h_e - g_e).norm() <= 1e-12 * g_e.norm());

    const auto scaled = channel_model::assemble_channels(g_b, g_e, 5.0, 3.0, cfg);
    CHECK(scaled.h_b.squaredNorm() == doctest::Approx(5.0 * g_b.squaredNorm()).epsilon(1e-12));
    CHECK(scaled.h_e.squaredNorm() == doctest::Approx(3.0 * g_e.squaredNorm()).epsilon(1e-12));

    CHECK_THROWS_AS(channel_model::assemble_channels(g_b, g_e, 0.0, 3.0, cfg),
                    std::invalid_argument);
}

TEST_CASE("assembled channel powers match the configured gains on average") {
    SystemConfig cfg = SystemConfig::isotropic_default();
    statmath::RngStream stream(8675309ULL, 0ULL);
    const long n = 20000;
    double pb = 0.0, pe = 0.0;
    for (long i = 0; i < n; ++i) {
        const auto [g_b, g_e] = channel_model::draw_small_scale(cfg, stream);
        const auto pair = channel_model::assemble_channels(
            g_b, g_e, cfg.beta_b_dist.a, channel_model::worst_case_beta_e(cfg.beta_e_set), cfg);
        pb += pair.h_b.squaredNorm();
        pe += pair.h_e.squaredNorm();
    }
    // E||h_b||^2 = beta_b * M = 80, E||h_e||^2 = beta_e * M = 48 for defaults.
    CHECK(pb / n == doctest::Approx(5.0 * cfg.M).epsilon(0.01));
    CHECK(pe / n == doctest::Approx(3.0 * cfg.M).epsilon(0.01));
}

TEST_CASE("routing-gain sampler reproduces each family's mean") {
    statmath::RngStream stream(13579ULL, 0ULL);

    RoutingGainDistribution point;
    point.a = 5.0;
    CHECK(channel_model::sample_routing_gain(point, stream) == 5.0);
    point.a = 1.0;
    CHECK(channel_model::sample_routing_gain(point, stream) == 1.0);

    const long n = 200000;
    RoutingGainDistribution gam;
    gam.kind = RoutingGainDistribution::Kind::Gamma;
    gam.a = 4.0;
    gam.b = 1.25;
    double sum = 0.0;
    for (long i = 0; i < n; ++i) sum += channel_model::sample_routing_gain(gam, stream);
    CHECK(sum / n == doctest::Approx(5.0).epsilon(0.01));

    // Shape below one exercises the boosting branch.
    gam.a = 0.5;
    gam.b = 2.0;
    sum = 0.0;
    for (long i = 0; i < n; ++i) sum += channel_model::sample_routing_gain(gam, stream);
    CHECK(sum / n == doctest::Approx(1.0).epsilon(0.02));

    RoutingGainDistribution uni;
    uni.kind = RoutingGainDistribution::Kind::Uniform;
    uni.a = 1.0;
    uni.b = 3.0;
    sum = 0.0;
    double lo = 1e9, hi = -1e9;
    for (long i = 0; i < n; ++i) {
        const double v = channel_model::sample_routing_gain(uni, stream);
        sum += v;
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    CHECK(sum / n == doctest::Approx(2.0).epsilon(0.01));
    CHECK(lo >= 1.0);
    CHECK(hi <= 3.0);

    RoutingGainDistribution logn;
    logn.kind = RoutingGainDistribution::Kind::Lognormal;
    logn.a = 0.0;
    logn.b = 0.5;
    sum = 0.0;
    for (long i = 0; i < n; ++i) sum += channel_model::sample_routing_gain(logn, stream);
    CHECK(sum / n == doctest::Approx(std::exp(0.125)).epsilon(0.01));

    RoutingGainDistribution bad;
    bad.a = -1.0;
    CHECK_THROWS_AS(channel_model::sample_routing_gain(bad, stream), std::invalid_argument);
}

TEST_CASE("worst-case eavesdropper gain is the interval maximum") {
    CHECK(channel_model::worst_case_beta_e({1.0, 3.0}) == 3.0);
    CHECK(channel_model::worst_case_beta_e({3.0, 3.0}) == 3.0);
    CHECK_THROWS_AS(channel_model::worst_case_beta_e({3.0, 1.0}), std::invalid_argument);
    CHECK_THROWS_AS(channel_model::worst_case_beta_e({-1.0, 2.0}), std::invalid_argument);
}

TEST_CASE("PSD square root squares back to the input and rejects indefinite matrices") {
    statmath::RngStream stream(24680ULL, 0ULL);
    const int n = 5;
    Eigen::MatrixXcd a(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) a(i, j) = stream.next_complex_gaussian();
    const Eigen::MatrixXcd r = a * a.adjoint();  // PSD by construction
    const Eigen::MatrixXcd s = channel_model::psd_sqrt(r);
    CHECK((s * s - r).norm() <= 1e-10 * r.norm());
    CHECK((s - s.adjoint()).norm() <= 1e-10 * s.norm());

    Eigen::MatrixXcd indef = Eigen::MatrixXcd::Identity(2, 2);
    indef(1, 1) = -1.0;
    CHECK_THROWS_AS(channel_model::psd_sqrt(indef), std::invalid_argument);

    // Tiny negative rounding noise is clipped instead of rejected.
    Eigen::MatrixXcd nearly = Eigen::MatrixXcd::Identity(2, 2);
    nearly(1, 1) = -1e-14;
    CHECK_NOTHROW(channel_model::psd_sqrt(nearly));
}

TEST_CASE("channel draws are bit-reproducible from the seed") {
    SystemConfig cfg = SystemConfig::isotropic_default();
    statmath::RngStream s1(777ULL, 3ULL);
    statmath::RngStream s2(777ULL, 3ULL);
    for (int i = 0; i < 10; ++i) {
        const auto [b1, e1] = channel_model::draw_small_scale(cfg, s1);
        const auto [b2, e2] = channel_model::draw_small_scale(cfg, s2);
        CHECK((b1 - b2).norm() == 0.0);
        CHECK((e1 - e2).norm() == 0.0);
    }
}
