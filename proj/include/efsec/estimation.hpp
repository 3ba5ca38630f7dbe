#pragma once
// Uplink pilot observation and linear MMSE channel estimation, with the exact
// estimate/error covariances and the isotropic scalar-variance shortcut.

#include <optional>

#include <Eigen/Dense>

#include "efsec/channel_model.hpp"
#include "efsec/statmath.hpp"

namespace efsec::estimation {

struct EstimationResult {
    Eigen::VectorXcd h_hat;    // MMSE estimate of the legitimate channel
    Eigen::MatrixXcd R_hat;    // covariance of the estimate
    Eigen::MatrixXcd R_tilde;  // covariance of the estimation error
    // Scalar per-entry variances; present only when the channel covariance is
    // a multiple of the identity.
    std::optional<double> omega_hat;
    std::optional<double> omega_tilde;
};

// y_p = sqrt(tau_p * rho_p) * h_b + n_p, noise variance sigma2 per entry.
Eigen::VectorXcd pilot_observe(const Eigen::VectorXcd& h_b,
                               const channel_model::SystemConfig& cfg,
                               statmath::RngStream& stream);

// Linear MMSE filter for the observation model above, given the prior
// covariance R_hb of h_b (for routing gain beta_b, R_hb = beta_b * R_b).
EstimationResult mmse_estimate(const Eigen::VectorXcd& y_p, const Eigen::MatrixXcd& R_hb,
                               const channel_model::SystemConfig& cfg);

// Per-entry variances when R_hb = beta_b * I:
// omega_hat = tau_p*rho_p*beta_b^2 / (tau_p*rho_p*beta_b + sigma2),
// omega_tilde = beta_b*sigma2 / (tau_p*rho_p*beta_b + sigma2).
std::pair<double, double> isotropic_variances(double beta_b,
                                              const channel_model::SystemConfig& cfg);

// eta = 1 - tau_p/Tc (data fraction), theta = 2^{R_th/eta} (SINR-ratio
// threshold equivalent to the target secrecy rate).
std::pair<double, double> prelog_and_threshold(const channel_model::SystemConfig& cfg);

}  // namespace efsec::estimation
