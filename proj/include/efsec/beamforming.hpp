#pragma once
// Transmit design (MRT beamformer + artificial-noise null-space basis), the
// instantaneous SINRs at both receivers, and the conditional distribution
// parameters of the eavesdropper SINR given the channel estimate.

#include <Eigen/Dense>

#include "efsec/channel_model.hpp"
#include "efsec/statmath.hpp"

namespace efsec::beamforming {

// Raised when the channel estimate is (numerically) zero and no beam exists.
struct DegenerateEstimateError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct TxDesign {
    Eigen::VectorXcd w;  // unit-norm MRT beamformer, length M
    Eigen::MatrixXcd V;  // M x (M-1) orthonormal basis of w's orthogonal complement
};

// Everything the analytic law needs about gamma_e given the estimate:
// X = h_e^H w has conditional mean mu_X and variance sigma2_X;
// Y = ||h_e^H V||^2 is a mixture with spectrum Q_spectrum;
// kappa = |mu_X|^2 / sigma2_X is the noncentrality of |X|^2.
struct ConditionalEveStats {
    std::complex<double> mu_X;
    double sigma2_X = 0.0;
    statmath::EigenSpectrum Q_spectrum;
    double kappa = 0.0;
    // Full conditional moments of h_e given the estimate, used by the
    // conditional Monte-Carlo sampler.
    Eigen::VectorXcd mu_vec;
    Eigen::MatrixXcd R_cond;
};

// w = h_hat/||h_hat||; V a deterministic orthonormal completion (Householder
// reflection about the largest-magnitude coordinate of w). All downstream
// quantities are invariant to the basis choice.
TxDesign mrt_and_null_space(const Eigen::VectorXcd& h_hat);

// Use-and-forget SINR at the legitimate receiver:
// gamma_b = P_s*||h_hat||^2 / (P_s*w^H R_tilde w + P_a*tr(V^H R_tilde V) + sigma2).
// Computed basis-free via tr(V^H R V) = tr(R) - w^H R w.
double bob_sinr(const Eigen::VectorXcd& h_hat, const Eigen::MatrixXcd& R_tilde,
                double P_s, double P_a, double sigma2);

// Instantaneous eavesdropper SINR for one channel realization:
// gamma_e = P_s |h_e^H w|^2 / (P_a ||h_e^H V||^2 + sigma2).
double eve_sinr_realization(const Eigen::VectorXcd& h_e, const TxDesign& design,
                            double P_s, double P_a, double sigma2);

// Conditional law parameters of the eavesdropper channel given the estimate.
// Requires isotropic estimation (R_b = I); the conditional mean is
// mu = rho*sqrt(beta_e)*R_e^{1/2} C h_hat / sqrt(beta_b), and the conditional
// covariance depends on cfg.variance_mode:
//   ExactConditional: beta_e * R_e^{1/2}(rho^2*(omega_tilde/beta_b)*C C^H
//                                         + (1-rho^2) I) R_e^{1/2}
//   PerfectCsiApprox: beta_e * (1-rho^2) * R_e   (drops the estimation-error term)
ConditionalEveStats eve_conditional_distribution(const Eigen::VectorXcd& h_hat,
                                                 double beta_b, double beta_e,
                                                 const channel_model::SystemConfig& cfg);

}  // namespace efsec::beamforming
