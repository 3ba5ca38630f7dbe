#include "efsec/beamforming.hpp"

#include <cmath>

#include "efsec/estimation.hpp"

namespace efsec::beamforming {

namespace {

bool is_identity(const Eigen::MatrixXcd& m, double tol = 1e-12) {
    const int n = static_cast<int>(m.rows());
    return (m - Eigen::MatrixXcd::Identity(n, n)).norm() <= tol * std::max(1.0, m.norm());
}

}  // namespace

TxDesign mrt_and_null_space(const Eigen::VectorXcd& h_hat) {
    const int M = static_cast<int>(h_hat.size());
    if (M < 2) throw std::invalid_argument("mrt_and_null_space: need at least 2 antennas");
    const double norm = h_hat.norm();
    if (!(norm > 0.0) || !std::isfinite(norm))
        throw DegenerateEstimateError("mrt_and_null_space: channel estimate is zero or non-finite");

    TxDesign design;
    design.w = h_hat / norm;

    // Householder reflection H = I - 2 v v^H / (v^H v) with v = w - b*e_p,
    // b = -w_p/|w_p|, pivot p = largest-|entry| coordinate. Then H w = b e_p,
    // so column p of H is proportional to w and the remaining columns form an
    // orthonormal basis of its orthogonal complement.
    int p = 0;
    double best = 0.0;
    for (int i = 0; i < M; ++i) {
        const double a = std::abs(design.w(i));
        if (a > best) {
            best = a;
            p = i;
        }
    }
    const std::complex<double> b = -design.w(p) / std::abs(design.w(p));
    Eigen::VectorXcd v = design.w;
    v(p) -= b;
    const double vnorm2 = v.squaredNorm();

    design.V.resize(M, M - 1);
    int col = 0;
    for (int j = 0; j < M; ++j) {
        if (j == p) continue;
        // Column j of H: e_j - 2 v conj(v_j) / v^H v.
        Eigen::VectorXcd hcol = (-2.0 * std::conj(v(j)) / vnorm2) * v;
        hcol(j) += 1.0;
        design.V.col(col++) = hcol;
    }
    return design;
}

double bob_sinr(const Eigen::VectorXcd& h_hat, const Eigen::MatrixXcd& R_tilde,
                double P_s, double P_a, double sigma2) {
    if (P_s < 0.0 || P_a < 0.0)
        throw std::invalid_argument("bob_sinr: powers must be nonnegative");
    if (!(sigma2 > 0.0)) throw std::invalid_argument("bob_sinr: sigma2 must be positive");
    const double norm2 = h_hat.squaredNorm();
    if (!(norm2 > 0.0)) return 0.0;
    const Eigen::VectorXcd w = h_hat / std::sqrt(norm2);
    const double quad = (w.adjoint() * R_tilde * w).value().real();  // w^H R w
    const double null_leak = R_tilde.trace().real() - quad;          // tr(V^H R V)
    return P_s * norm2 / (P_s * quad + P_a * null_leak + sigma2);
}

double eve_sinr_realization(const Eigen::VectorXcd& h_e, const TxDesign& design,
                            double P_s, double P_a, double sigma2) {
    if (!(sigma2 > 0.0))
        throw std::invalid_argument("eve_sinr_realization: sigma2 must be positive");
    const std::complex<double> X = design.w.dot(h_e);  // conj(w)^T h_e = (h_e^H w)^*
    const double Y = (design.V.adjoint() * h_e).squaredNorm();
    return P_s * std::norm(X) / (P_a * Y + sigma2);
}

ConditionalEveStats eve_conditional_distribution(const Eigen::VectorXcd& h_hat,
                                                 double beta_b, double beta_e,
                                                 const channel_model::SystemConfig& cfg) {
    if (!(beta_b > 0.0) || !(beta_e > 0.0))
        throw std::invalid_argument("eve_conditional_distribution: routing gains must be positive");
    const int M = static_cast<int>(h_hat.size());
    const double norm = h_hat.norm();
    if (!(norm > 0.0) || !std::isfinite(norm))
        throw DegenerateEstimateError("eve_conditional_distribution: channel estimate is zero or non-finite");
    if (cfg.R_b.size() != 0 && !is_identity(cfg.R_b, 1e-10))
        throw std::invalid_argument(
            "eve_conditional_distribution: closed-form conditioning requires R_b = I; "
            "use the Monte-Carlo path for correlated legitimate channels");

    const auto [omega_hat, omega_tilde] = estimation::isotropic_variances(beta_b, cfg);
    (void)omega_hat;
    const double rho = cfg.rho;
    const double one_minus_rho2 = 1.0 - rho * rho;
    const bool iso_e = (cfg.R_e.size() == 0 || is_identity(cfg.R_e)) &&
                       (cfg.C.size() == 0 || is_identity(cfg.C));

    ConditionalEveStats stats;
    if (iso_e) {
        // Identity R_e and C: the conditional covariance is a scalar multiple
        // of I, so X and Y decouple exactly and no eigensolve is needed.
        const double scale =
            (cfg.variance_mode == channel_model::VarianceMode::ExactConditional)
                ? beta_e * (rho * rho * omega_tilde / beta_b + one_minus_rho2)
                : beta_e * one_minus_rho2;
        stats.mu_vec = (rho * std::sqrt(beta_e / beta_b)) * h_hat;
        stats.mu_X = rho * std::sqrt(beta_e / beta_b) * norm;  // w^H mu = rho sqrt(be/bb) ||h||
        stats.sigma2_X = scale;
        stats.Q_spectrum.values = {scale};
        stats.Q_spectrum.multiplicities = {M - 1};
        stats.kappa = std::norm(stats.mu_X) / scale;
        stats.R_cond = scale * Eigen::MatrixXcd::Identity(M, M);
        return stats;
    }

    const Eigen::MatrixXcd Re_sqrt = channel_model::psd_sqrt(cfg.R_e);
    stats.mu_vec = (rho * std::sqrt(beta_e / beta_b)) * (Re_sqrt * (cfg.C * h_hat));
    if (cfg.variance_mode == channel_model::VarianceMode::ExactConditional) {
        const Eigen::MatrixXcd inner =
            (rho * rho * omega_tilde / beta_b) * (cfg.C * cfg.C.adjoint()) +
            one_minus_rho2 * Eigen::MatrixXcd::Identity(M, M);
        stats.R_cond = beta_e * (Re_sqrt * inner * Re_sqrt);
    } else {
        stats.R_cond = beta_e * one_minus_rho2 * cfg.R_e;
    }
    stats.R_cond = 0.5 * (stats.R_cond + stats.R_cond.adjoint()).eval();

    const TxDesign design = mrt_and_null_space(h_hat);
    stats.mu_X = design.w.dot(stats.mu_vec);
    stats.sigma2_X = (design.w.adjoint() * stats.R_cond * design.w).value().real();
    if (!(stats.sigma2_X > 0.0))
        throw std::invalid_argument("eve_conditional_distribution: degenerate conditional variance of X");
    const Eigen::MatrixXcd Q = design.V.adjoint() * stats.R_cond * design.V;
    stats.Q_spectrum = statmath::hermitian_eigenspectrum(Q);
    stats.kappa = std::norm(stats.mu_X) / stats.sigma2_X;
    return stats;
}

}  // namespace efsec::beamforming
