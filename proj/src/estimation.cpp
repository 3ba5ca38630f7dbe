#include "efsec/estimation.hpp"

#include <cmath>

namespace efsec::estimation {

Eigen::VectorXcd pilot_observe(const Eigen::VectorXcd& h_b,
                               const channel_model::SystemConfig& cfg,
                               statmath::RngStream& stream) {
    const double gain = std::sqrt(cfg.tau_p * cfg.rho_p);
    const double noise_sd = std::sqrt(cfg.sigma2);
    Eigen::VectorXcd y = gain * h_b;
    for (int i = 0; i < y.size(); ++i) y(i) += noise_sd * stream.next_complex_gaussian();
    return y;
}

EstimationResult mmse_estimate(const Eigen::VectorXcd& y_p, const Eigen::MatrixXcd& R_hb,
                               const channel_model::SystemConfig& cfg) {
    if (!(cfg.sigma2 > 0.0))
        throw std::invalid_argument("mmse_estimate: sigma2 must be positive");
    const int M = static_cast<int>(y_p.size());
    if (R_hb.rows() != M || R_hb.cols() != M)
        throw std::invalid_argument("mmse_estimate: covariance dimension mismatch");

    const double tp = cfg.tau_p * cfg.rho_p;
    // A = tp*R + sigma2*I is Hermitian positive definite for sigma2 > 0.
    const Eigen::MatrixXcd A =
        tp * R_hb + cfg.sigma2 * Eigen::MatrixXcd::Identity(M, M);
    Eigen::LLT<Eigen::MatrixXcd> llt(A);
    if (llt.info() != Eigen::Success)
        throw std::runtime_error("mmse_estimate: factorization failed");

    EstimationResult out;
    out.h_hat = std::sqrt(tp) * (R_hb * llt.solve(y_p));
    out.R_hat = tp * (R_hb * llt.solve(R_hb));
    // Symmetrize to shed the factorization's rounding asymmetry.
    out.R_hat = 0.5 * (out.R_hat + out.R_hat.adjoint()).eval();
    out.R_tilde = R_hb - out.R_hat;

    // Detect the isotropic case and attach the scalar variances.
    const double beta_b = R_hb(0, 0).real();
    if (beta_b > 0.0 &&
        (R_hb - beta_b * Eigen::MatrixXcd::Identity(M, M)).norm() <= 1e-12 * R_hb.norm()) {
        out.omega_hat = tp * beta_b * beta_b / (tp * beta_b + cfg.sigma2);
        out.omega_tilde = beta_b * cfg.sigma2 / (tp * beta_b + cfg.sigma2);
    }
    return out;
}

std::pair<double, double> isotropic_variances(double beta_b,
                                              const channel_model::SystemConfig& cfg) {
    if (!(beta_b > 0.0))
        throw std::invalid_argument("isotropic_variances: beta_b must be positive");
    const double tp = cfg.tau_p * cfg.rho_p;
    const double denom = tp * beta_b + cfg.sigma2;
    return {tp * beta_b * beta_b / denom, beta_b * cfg.sigma2 / denom};
}

std::pair<double, double> prelog_and_threshold(const channel_model::SystemConfig& cfg) {
    if (!(cfg.tau_p < cfg.Tc))
        throw std::invalid_argument("prelog_and_threshold: requires tau_p < Tc");
    if (cfg.R_th < 0.0)
        throw std::invalid_argument("prelog_and_threshold: requires R_th >= 0");
    const double eta = 1.0 - cfg.tau_p / cfg.Tc;
    return {eta, std::exp2(cfg.R_th / eta)};
}

}  // namespace efsec::estimation
