#include "efsec/channel_model.hpp"

#include <cmath>

namespace efsec::channel_model {

double RoutingGainDistribution::mean() const {
    switch (kind) {
        case Kind::PointMass: return a;
        case Kind::Uniform: return 0.5 * (a + b);
        case Kind::Gamma: return a * b;
        case Kind::Lognormal: return std::exp(a + 0.5 * b * b);
    }
    throw std::logic_error("RoutingGainDistribution::mean: unknown kind");
}

bool RoutingGainDistribution::valid(std::string* why) const {
    auto fail = [&](const char* msg) {
        if (why) *why = msg;
        return false;
    };
    switch (kind) {
        case Kind::PointMass:
            if (!(a > 0.0)) return fail("point-mass value must be positive");
            return true;
        case Kind::Uniform:
            if (!(a > 0.0) || !(b >= a)) return fail("uniform support must satisfy 0 < min <= max");
            return true;
        case Kind::Gamma:
            if (!(a > 0.0) || !(b > 0.0)) return fail("gamma shape and scale must be positive");
            return true;
        case Kind::Lognormal:
            if (!std::isfinite(a) || !(b >= 0.0)) return fail("lognormal log-mean must be finite and log-stddev nonnegative");
            return true;
    }
    return fail("unknown distribution kind");
}

SystemConfig SystemConfig::isotropic_default() {
    SystemConfig cfg;
    cfg.C = Eigen::MatrixXcd::Identity(cfg.M, cfg.M);
    cfg.R_b = Eigen::MatrixXcd::Identity(cfg.M, cfg.M);
    cfg.R_e = Eigen::MatrixXcd::Identity(cfg.M, cfg.M);
    return cfg;
}

namespace {

void check_correlation_matrix(const Eigen::MatrixXcd& R, int M, const char* field) {
    if (R.rows() != M || R.cols() != M)
        throw ValidationError(std::string(field) + ": must be M x M");
    const double scale = std::max(1.0, R.norm());
    if ((R - R.adjoint()).norm() > 1e-10 * scale)
        throw ValidationError(std::string(field) + ": must be Hermitian");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(R, Eigen::EigenvaluesOnly);
    const double lam_min = es.eigenvalues().minCoeff();
    const double lam_max = es.eigenvalues().maxCoeff();
    if (lam_min < -1e-10 * std::max(1.0, lam_max))
        throw ValidationError(std::string(field) + ": must be positive semidefinite");
    for (int i = 0; i < M; ++i)
        if (std::abs(R(i, i) - 1.0) > 1e-8)
            throw ValidationError(std::string(field) + ": diagonal must be 1 by convention");
}

}  // namespace

SystemConfig validate_config(const SystemConfig& cfg) {
    SystemConfig out = cfg;
    if (out.M < 2) throw ValidationError("M: antenna count must be >= 2");
    if (!(out.Tc > 0.0)) throw ValidationError("Tc: coherence block length must be positive");
    if (!(out.tau_p > 0.0)) throw ValidationError("tau_p: pilot length must be positive");
    if (!(out.tau_p < out.Tc))
        throw ValidationError("tau_p: pilot length must be < Tc (data fraction would vanish)");
    if (!(out.rho_p > 0.0)) throw ValidationError("rho_p: pilot power must be positive");
    if (!(out.sigma2 > 0.0)) throw ValidationError("sigma2: noise variance must be positive");
    if (!(out.P > 0.0)) throw ValidationError("P: transmit power must be positive");
    if (!(out.alpha >= 0.0 && out.alpha <= 1.0))
        throw ValidationError("alpha: data-power fraction must be in [0, 1]");
    if (!(out.R_th > 0.0)) throw ValidationError("R_th: target secrecy rate must be positive");
    if (!(out.rho >= 0.0 && out.rho < 1.0))
        throw ValidationError("rho: leakage correlation must be in [0, 1)");
    std::string why;
    if (!out.beta_b_dist.valid(&why))
        throw ValidationError("beta_b_dist: " + why);
    if (!(out.beta_e_set[0] > 0.0) || !(out.beta_e_set[1] >= out.beta_e_set[0]))
        throw ValidationError("beta_e_set: must satisfy 0 < min <= max");

    // Empty matrices mean "identity of dimension M".
    if (out.C.size() == 0) out.C = Eigen::MatrixXcd::Identity(out.M, out.M);
    if (out.R_b.size() == 0) out.R_b = Eigen::MatrixXcd::Identity(out.M, out.M);
    if (out.R_e.size() == 0) out.R_e = Eigen::MatrixXcd::Identity(out.M, out.M);

    if (out.C.rows() != out.M || out.C.cols() != out.M)
        throw ValidationError("C: must be M x M");
    // Spectral norm of C via the largest eigenvalue of C^H C.
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(out.C.adjoint() * out.C,
                                                       Eigen::EigenvaluesOnly);
    if (std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff())) > 1.0 + 1e-10)
        throw ValidationError("C: spectral norm must be <= 1");
    check_correlation_matrix(out.R_b, out.M, "R_b");
    check_correlation_matrix(out.R_e, out.M, "R_e");
    return out;
}

std::pair<Eigen::VectorXcd, Eigen::VectorXcd> draw_small_scale(const SystemConfig& cfg,
                                                               statmath::RngStream& stream) {
    const Eigen::VectorXcd g_b = statmath::sample_standard_complex_gaussian(cfg.M, stream);
    const Eigen::VectorXcd u = statmath::sample_standard_complex_gaussian(cfg.M, stream);
    const double leak = cfg.rho;
    Eigen::VectorXcd g_e = std::sqrt(1.0 - leak * leak) * u;
    if (leak > 0.0) g_e += leak * (cfg.C * g_b);
    return {g_b, g_e};
}

ChannelPair assemble_channels(const Eigen::VectorXcd& g_b, const Eigen::VectorXcd& g_e,
                              double beta_b, double beta_e, const SystemConfig& cfg) {
    if (!(beta_b > 0.0) || !(beta_e > 0.0))
        throw std::invalid_argument("assemble_channels: routing gains must be positive");
    ChannelPair pair;
    pair.g_b = g_b;
    pair.beta_b = beta_b;
    pair.beta_e = beta_e;
    pair.h_b = std::sqrt(beta_b) * (psd_sqrt(cfg.R_b) * g_b);
    pair.h_e = std::sqrt(beta_e) * (psd_sqrt(cfg.R_e) * g_e);
    return pair;
}

double sample_routing_gain(const RoutingGainDistribution& dist, statmath::RngStream& stream) {
    std::string why;
    if (!dist.valid(&why)) throw std::invalid_argument("sample_routing_gain: " + why);
    switch (dist.kind) {
        case RoutingGainDistribution::Kind::PointMass:
            return dist.a;
        case RoutingGainDistribution::Kind::Uniform:
            return dist.a + (dist.b - dist.a) * stream.next_unit();
        case RoutingGainDistribution::Kind::Gamma: {
            // Marsaglia-Tsang for shape >= 1; shape < 1 via the boost relation
            // X(a) = X(a+1) * U^{1/a}.
            double shape = dist.a;
            double boost = 1.0;
            if (shape < 1.0) {
                boost = std::pow(stream.next_unit(), 1.0 / shape);
                shape += 1.0;
            }
            const double d = shape - 1.0 / 3.0;
            const double c = 1.0 / std::sqrt(9.0 * d);
            for (;;) {
                double x, v;
                do {
                    x = stream.next_normal();
                    v = 1.0 + c * x;
                } while (v <= 0.0);
                v = v * v * v;
                const double u = stream.next_unit();
                if (u < 1.0 - 0.0331 * x * x * x * x) return boost * d * v * dist.b;
                if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return boost * d * v * dist.b;
            }
        }
        case RoutingGainDistribution::Kind::Lognormal:
            return std::exp(dist.a + dist.b * stream.next_normal());
    }
    throw std::logic_error("sample_routing_gain: unknown kind");
}

double worst_case_beta_e(const std::array<double, 2>& set) {
    if (!(set[0] > 0.0) || !(set[1] >= set[0]))
        throw std::invalid_argument("worst_case_beta_e: interval must satisfy 0 < min <= max");
    return set[1];
}

Eigen::MatrixXcd psd_sqrt(const Eigen::MatrixXcd& m) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m);
    if (es.info() != Eigen::Success)
        throw std::runtime_error("psd_sqrt: eigendecomposition failed");
    Eigen::VectorXd evs = es.eigenvalues();
    const double lam_max = std::max(0.0, evs.maxCoeff());
    for (int i = 0; i < evs.size(); ++i) {
        if (evs(i) < 0.0) {
            if (evs(i) < -1e-10 * std::max(1.0, lam_max))
                throw std::invalid_argument("psd_sqrt: matrix is not positive semidefinite");
            evs(i) = 0.0;
        }
    }
    return es.eigenvectors() * evs.cwiseSqrt().asDiagonal() * es.eigenvectors().adjoint();
}

}  // namespace efsec::channel_model
