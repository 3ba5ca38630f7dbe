#pragma once
// System configuration and channel generation: correlated jointly-Gaussian
// small-scale fading for the legitimate and eavesdropping links, large-scale
// routing gains (fixed or random), and the eavesdropper gain uncertainty set.

#include <array>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

#include "efsec/statmath.hpp"

namespace efsec::channel_model {

// Raised by validate_config; message names the offending field.
struct ValidationError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// How the eavesdropper's conditional covariance is formed (see beamforming).
enum class VarianceMode {
    ExactConditional,  // full conditional covariance given the estimate
    PerfectCsiApprox,  // drops the estimation-error term
};

struct RoutingGainDistribution {
    enum class Kind { PointMass, Uniform, Gamma, Lognormal };
    Kind kind = Kind::PointMass;
    // PointMass: a = value.           Uniform: support [a, b], 0 < a <= b.
    // Gamma:     shape a, scale b.    Lognormal: a = mean, b = stddev of log.
    double a = 5.0;
    double b = 0.0;

    double mean() const;
    bool valid(std::string* why = nullptr) const;
};

struct SystemConfig {
    int M = 16;             // base-station antennas
    double Tc = 200.0;      // coherence block length (symbols)
    double tau_p = 20.0;    // pilot length (symbols)
    double rho_p = 10.0;    // pilot power (linear)
    double sigma2 = 1.0;    // noise variance (linear)
    double P = 100.0;       // total transmit power (linear)
    double alpha = 0.9;     // data-power fraction; artificial noise gets 1-alpha
    double R_th = 1.0;      // target secrecy rate (bits/s/Hz)
    double rho = 0.6;       // surface-wave leakage correlation, in [0, 1)
    Eigen::MatrixXcd C;     // leakage coupling matrix, spectral norm <= 1
    Eigen::MatrixXcd R_b;   // legitimate-link correlation (Hermitian PSD, unit diag)
    Eigen::MatrixXcd R_e;   // eavesdropper-link correlation
    RoutingGainDistribution beta_b_dist;          // legitimate routing gain
    std::array<double, 2> beta_e_set = {3.0, 3.0};  // [min, max] eavesdropper gain
    std::uint64_t seed = 20260825;
    VarianceMode variance_mode = VarianceMode::ExactConditional;

    // Identity C/R_b/R_e of dimension M (the default correlation model).
    static SystemConfig isotropic_default();
};

struct ChannelPair {
    Eigen::VectorXcd h_b;  // legitimate channel, length M
    Eigen::VectorXcd h_e;  // eavesdropper channel, length M
    Eigen::VectorXcd g_b;  // small-scale factor of h_b (kept for diagnostics)
    double beta_b = 0.0;
    double beta_e = 0.0;
};

// Checks every config invariant; throws ValidationError naming the field.
// Returns the config with empty correlation matrices replaced by identity.
SystemConfig validate_config(const SystemConfig& cfg);

// g_b iid CN(0,1); g_e = rho*C*g_b + sqrt(1-rho^2)*u with independent u.
std::pair<Eigen::VectorXcd, Eigen::VectorXcd> draw_small_scale(const SystemConfig& cfg,
                                                               statmath::RngStream& stream);

// h = sqrt(beta) * R^{1/2} * g for each link.
ChannelPair assemble_channels(const Eigen::VectorXcd& g_b, const Eigen::VectorXcd& g_e,
                              double beta_b, double beta_e, const SystemConfig& cfg);

double sample_routing_gain(const RoutingGainDistribution& dist, statmath::RngStream& stream);

// The eavesdropper gain the robust metrics are evaluated at (interval max).
double worst_case_beta_e(const std::array<double, 2>& set);

// Hermitian PSD square root; eigenvalues in [-1e-10*max, 0) are clipped to 0.
Eigen::MatrixXcd psd_sqrt(const Eigen::MatrixXcd& m);

}  // namespace efsec::channel_model
