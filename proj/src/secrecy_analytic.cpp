#include "efsec/secrecy_analytic.hpp"

#include <algorithm>
#include <cmath>

#include "efsec/estimation.hpp"

namespace efsec::secrecy_analytic {

namespace {

constexpr std::uint64_t kTagHybridSop = 0x68796272644F5350ULL;
constexpr std::uint64_t kTagHybridEsr = 0x6879627264455352ULL;
constexpr std::uint64_t kTagProxyRatio = 0x70726F7879526174ULL;

// pi_k = e^{-rate} rate^k / k!, k = 0..count. The multiplicative recursion is
// used while e^{-rate} is representable; beyond that each entry is formed in
// log space so large-rate laws keep their (representable) central terms.
std::vector<double> poisson_pmf_row(double rate, int count) {
    std::vector<double> row(count + 1, 0.0);
    if (rate == 0.0) {
        row[0] = 1.0;
        return row;
    }
    if (rate <= 700.0) {
        row[0] = std::exp(-rate);
        for (int k = 1; k <= count; ++k) row[k] = row[k - 1] * rate / k;
    } else {
        const double lr = std::log(rate);
        for (int k = 0; k <= count; ++k)
            row[k] = std::exp(-rate + k * lr - std::lgamma(k + 1.0));
    }
    return row;
}

// W_j = sum_{i<=j} pois_pmf(delta, j-i) * G_i for j = 0..J, where
// G_i = sum_{c,l} A_{c,l} C(l+i-1, i) r_c^i (1+xi*lam_c)^{-l}.
std::vector<double> mixture_terms(const EveSinrLaw& law, double t, int J) {
    const double delta = law.delta_slope * t;
    const double xi = law.xi_slope * t;

    std::vector<double> G(J + 1, 0.0);
    if (law.lambdas.empty()) {
        G[0] = 1.0;  // Y identically zero: its transform is 1
    } else {
        for (std::size_t c = 0; c < law.lambdas.size(); ++c) {
            const double lam = law.lambdas[c];
            const double denom = 1.0 + xi * lam;
            const double r = xi * lam / denom;
            for (int l = 1; l <= law.mults[c]; ++l) {
                double cur = law.pf[c][l - 1] * std::pow(denom, -l);
                for (int i = 0; i <= J; ++i) {
                    G[i] += cur;
                    cur *= r * (l + i) / (i + 1.0);
                }
            }
        }
    }

    const std::vector<double> dpois = poisson_pmf_row(delta, J);
    std::vector<double> W(J + 1, 0.0);
    for (int j = 0; j <= J; ++j) {
        double acc = 0.0;
        for (int i = 0; i <= j; ++i) acc += dpois[j - i] * G[i];
        W[j] = acc;
    }
    return W;
}

bool is_identity_or_empty(const Eigen::MatrixXcd& m) {
    if (m.size() == 0) return true;
    const int n = static_cast<int>(m.rows());
    return (m - Eigen::MatrixXcd::Identity(n, n)).norm() <= 1e-12 * std::max(1.0, m.norm());
}

bool deterministic_isotropic(const channel_model::SystemConfig& cfg) {
    return cfg.beta_b_dist.kind == channel_model::RoutingGainDistribution::Kind::PointMass &&
           is_identity_or_empty(cfg.R_b) && is_identity_or_empty(cfg.R_e) &&
           is_identity_or_empty(cfg.C);
}

// E[f(omega * s)] for s ~ Gamma(M, 1) via the cached 20-node Gauss-Laguerre
// rule: E = sum_q exp(log w_q + (M-1) log x_q - lgamma(M)) f(omega x_q).
double gamma_outer_expectation(int M, double omega,
                               const std::function<double(double)>& f) {
    static const statmath::QuadratureRule rule = statmath::gauss_laguerre(20);
    const double lg = std::lgamma(static_cast<double>(M));
    double acc = 0.0;
    for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
        const double x = rule.nodes[q];
        const double weight = std::exp(std::log(rule.weights[q]) + (M - 1) * std::log(x) - lg);
        acc += weight * f(omega * x);
    }
    return acc;
}

double resolve_beta_e(const channel_model::SystemConfig& cfg, SopMode mode) {
    if (mode == SopMode::WorstCase) return channel_model::worst_case_beta_e(cfg.beta_e_set);
    if (cfg.beta_e_set[0] != cfg.beta_e_set[1])
        throw std::invalid_argument(
            "sop: fixed-beta_e mode requires a degenerate beta_e_set interval");
    return cfg.beta_e_set[0];
}

// Synthesizes an axis-aligned estimate with the requested squared norm; in
// the isotropic setting every conditional quantity depends on the estimate
// only through its norm, so this is exact for the quadrature outer rule.
Eigen::VectorXcd axis_estimate(int M, double norm2) {
    Eigen::VectorXcd h = Eigen::VectorXcd::Zero(M);
    h(0) = std::sqrt(norm2);
    return h;
}

struct HybridAccumulator {
    std::vector<double> buffer;
    // Ordered fold over the per-draw buffer: results are bit-identical for
    // any worker partitioning of the draw index range.
    double mean() const {
        double s = 0.0;
        for (double v : buffer) s += v;
        return s / static_cast<double>(buffer.size());
    }
    double stderr_of_mean(double m) const {
        if (buffer.size() < 2) return 0.0;
        double ss = 0.0;
        for (double v : buffer) ss += (v - m) * (v - m);
        return std::sqrt(ss / (static_cast<double>(buffer.size()) - 1.0) /
                         static_cast<double>(buffer.size()));
    }
};

}  // namespace

EveSinrLaw make_eve_law(const beamforming::ConditionalEveStats& stats,
                        double P_s, double P_a, double sigma2, int m_max_override) {
    if (P_s < 0.0 || P_a < 0.0 || sigma2 < 0.0)
        throw std::invalid_argument("make_eve_law: powers and noise must be nonnegative");
    if (P_s > 0.0 && P_a == 0.0 && sigma2 == 0.0)
        throw std::invalid_argument("make_eve_law: need AN power or noise to normalize the SINR");
    if (!(stats.sigma2_X > 0.0))
        throw std::invalid_argument("make_eve_law: conditional variance of X must be positive");

    EveSinrLaw law;
    law.stats = stats;
    law.P_s = P_s;
    law.P_a = P_a;
    law.sigma2 = sigma2;
    law.degenerate_zero = (P_s == 0.0);
    if (!law.degenerate_zero) {
        law.delta_slope = sigma2 / (P_s * stats.sigma2_X);
        law.xi_slope = P_a / (P_s * stats.sigma2_X);
    }

    // Keep the strictly positive part of the Q spectrum; zero eigenvalues are
    // AN directions that contribute nothing to Y.
    double lam_max = 0.0;
    for (double v : stats.Q_spectrum.values) lam_max = std::max(lam_max, v);
    for (std::size_t c = 0; c < stats.Q_spectrum.values.size(); ++c) {
        const double v = stats.Q_spectrum.values[c];
        if (v < -1e-9 * std::max(1.0, lam_max))
            throw std::invalid_argument("make_eve_law: Q spectrum has a negative eigenvalue");
        if (v > 1e-12 * lam_max && v > 0.0) {
            law.lambdas.push_back(v);
            law.mults.push_back(stats.Q_spectrum.multiplicities[c]);
        }
    }
    if (!law.lambdas.empty()) {
        statmath::EigenSpectrum spec;
        spec.values = law.lambdas;
        spec.multiplicities = law.mults;
        law.pf = statmath::generalized_partial_fractions(spec);
        law.mean_Y = statmath::hypoexp_mean(spec);
    }

    law.m_max = m_max_override >= 0 ? m_max_override
                                    : statmath::poisson_truncation_index(stats.kappa, 1e-12);
    law.pois_pmf = poisson_pmf_row(stats.kappa, law.m_max + 1);
    law.pois_tail.resize(law.m_max + 1);
    law.pois_tail[0] = 1.0;
    for (int j = 1; j <= law.m_max; ++j)
        law.pois_tail[j] = std::max(0.0, law.pois_tail[j - 1] - law.pois_pmf[j - 1]);
    return law;
}

double eve_survival(double t, const EveSinrLaw& law) {
    if (t < 0.0) throw std::invalid_argument("eve_survival: t must be nonnegative");
    if (law.degenerate_zero) return t > 0.0 ? 0.0 : 1.0;
    if (t == 0.0) return 1.0;
    const std::vector<double> W = mixture_terms(law, t, law.m_max);
    double s = 0.0;
    for (int j = 0; j <= law.m_max; ++j) s += law.pois_tail[j] * W[j];
    return std::clamp(s, 0.0, 1.0);
}

double eve_cdf(double t, const EveSinrLaw& law) {
    if (t < 0.0) throw std::invalid_argument("eve_cdf: t must be nonnegative");
    return 1.0 - eve_survival(t, law);
}

double eve_pdf(double t, const EveSinrLaw& law, PdfVariant variant) {
    if (t < 0.0) throw std::invalid_argument("eve_pdf: t must be nonnegative");
    if (law.degenerate_zero) return 0.0;

    if (variant == PdfVariant::ExactDerivative) {
        if (t == 0.0)
            return law.pois_pmf[0] * (law.delta_slope + law.xi_slope * law.mean_Y);
        const std::vector<double> W = mixture_terms(law, t, law.m_max + 1);
        double f = 0.0;
        for (int m = 0; m <= law.m_max; ++m)
            f += law.pois_pmf[m] * (m + 1) * W[m + 1];
        return std::max(0.0, f / t);
    }

    // Component series: per Poisson component m the density contribution is
    // A_{c,l} e^{-delta} (1+xi lam)^{-(m+l+1)} (sigma2+P_a lam)/(P_s sigma2_X);
    // the Poisson sum telescopes, sum_m pi_m(kappa) z^m = e^{-kappa(1-z)} with
    // z = 1/(1+xi lam), leaving a finite closed form.
    const double delta = law.delta_slope * t;
    const double xi = law.xi_slope * t;
    const double scale = 1.0 / (law.P_s * law.stats.sigma2_X);
    if (law.lambdas.empty())
        return std::max(0.0, std::exp(-delta) * law.sigma2 * scale);
    double f = 0.0;
    for (std::size_t c = 0; c < law.lambdas.size(); ++c) {
        const double lam = law.lambdas[c];
        const double denom = 1.0 + xi * lam;
        const double r = xi * lam / denom;
        const double front =
            std::exp(-delta - law.stats.kappa * r) * (law.sigma2 + law.P_a * lam) * scale;
        for (int l = 1; l <= law.mults[c]; ++l)
            f += law.pf[c][l - 1] * front * std::pow(denom, -(l + 1));
    }
    return std::max(0.0, f);
}

double induced_threshold(double gamma_b, double theta) {
    if (!(theta > 1.0)) throw std::invalid_argument("induced_threshold: theta must exceed 1");
    return (gamma_b + 1.0) / theta - 1.0;
}

double conditional_sop(double gamma_b, double theta, const EveSinrLaw& law) {
    const double t_b = induced_threshold(gamma_b, theta);
    if (t_b < 0.0) return 1.0;
    return eve_survival(t_b, law);
}

double conditional_secrecy_G(double gamma_b_star, const EveSinrLaw& law) {
    if (gamma_b_star < 0.0)
        throw std::invalid_argument("conditional_secrecy_G: threshold must be nonnegative");
    if (gamma_b_star == 0.0) return 0.0;
    const double u_max = std::log1p(gamma_b_star);
    // Int_0^{g*} S(t)/(1+t) dt under u = ln(1+t); the substitution
    // equidistributes resolution across the SINR decades.
    const double integral = statmath::adaptive_simpson(
        [&law](double u) { return eve_survival(std::expm1(u), law); }, 0.0, u_max, 1e-8);
    constexpr double kLn2 = 0.6931471805599453;
    return std::max(0.0, (u_max - integral) / kLn2);
}

namespace {

struct IsoPoint {
    double beta_b, beta_e, omega_hat, omega_tilde, P_s, P_a;
    double gamma_b_denom;  // omega_tilde*(P_s + P_a*(M-1)) + sigma2
};

IsoPoint iso_point(const channel_model::SystemConfig& cfg, double beta_b, double beta_e) {
    IsoPoint pt;
    pt.beta_b = beta_b;
    pt.beta_e = beta_e;
    std::tie(pt.omega_hat, pt.omega_tilde) = estimation::isotropic_variances(beta_b, cfg);
    pt.P_s = cfg.alpha * cfg.P;
    pt.P_a = (1.0 - cfg.alpha) * cfg.P;
    pt.gamma_b_denom = pt.omega_tilde * (pt.P_s + pt.P_a * (cfg.M - 1)) + cfg.sigma2;
    return pt;
}

}  // namespace

SecrecyReport sop(const channel_model::SystemConfig& cfg_in, SopMode mode, long n_outer) {
    const channel_model::SystemConfig cfg = channel_model::validate_config(cfg_in);
    if (!is_identity_or_empty(cfg.R_b))
        throw std::invalid_argument(
            "sop: the hybrid estimator requires R_b = I; use the Monte-Carlo "
            "estimator for correlated legitimate channels");
    if (n_outer < 1) throw std::invalid_argument("sop: n_outer must be >= 1");

    const double beta_e = resolve_beta_e(cfg, mode);
    const auto [eta, theta] = estimation::prelog_and_threshold(cfg);
    (void)eta;

    const statmath::RngStream base(statmath::derive_seed(cfg.seed, kTagHybridSop), 0);
    HybridAccumulator acc;
    acc.buffer.resize(static_cast<std::size_t>(n_outer));
    for (long g = 0; g < n_outer; ++g) {
        statmath::RngStream sub = base.substream(static_cast<std::uint64_t>(g));
        const double beta_b = channel_model::sample_routing_gain(cfg.beta_b_dist, sub);
        const IsoPoint pt = iso_point(cfg, beta_b, beta_e);
        const Eigen::VectorXcd h_hat =
            std::sqrt(pt.omega_hat) * statmath::sample_standard_complex_gaussian(cfg.M, sub);
        const double gamma_b = pt.P_s * h_hat.squaredNorm() / pt.gamma_b_denom;
        const auto stats = beamforming::eve_conditional_distribution(h_hat, beta_b, beta_e, cfg);
        const EveSinrLaw law = make_eve_law(stats, pt.P_s, pt.P_a, cfg.sigma2);
        acc.buffer[static_cast<std::size_t>(g)] = conditional_sop(gamma_b, theta, law);
    }

    SecrecyReport rep;
    rep.metric = (mode == SopMode::WorstCase) ? SecrecyReport::Metric::SopWorstCase
                                              : SecrecyReport::Metric::Sop;
    rep.method = Method::Hybrid;
    rep.value = acc.mean();
    rep.stderr_value = acc.stderr_of_mean(rep.value);
    rep.ci_halfwidth = std::max(1.96 * rep.stderr_value, 1.0 / static_cast<double>(n_outer));
    rep.n_outer = n_outer;
    return rep;
}

SecrecyReport sop_gauss_laguerre(const channel_model::SystemConfig& cfg_in, SopMode mode) {
    const channel_model::SystemConfig cfg = channel_model::validate_config(cfg_in);
    if (!deterministic_isotropic(cfg))
        throw std::invalid_argument(
            "sop_gauss_laguerre: requires point-mass beta_b and identity correlation matrices");
    const double beta_e = resolve_beta_e(cfg, mode);
    const auto [eta, theta] = estimation::prelog_and_threshold(cfg);
    (void)eta;
    const IsoPoint pt = iso_point(cfg, cfg.beta_b_dist.a, beta_e);

    SecrecyReport rep;
    rep.metric = (mode == SopMode::WorstCase) ? SecrecyReport::Metric::SopWorstCase
                                              : SecrecyReport::Metric::Sop;
    rep.method = Method::Analytic;
    rep.value = gamma_outer_expectation(cfg.M, pt.omega_hat, [&](double s) {
        const Eigen::VectorXcd h_hat = axis_estimate(cfg.M, s);
        const double gamma_b = pt.P_s * s / pt.gamma_b_denom;
        const auto stats =
            beamforming::eve_conditional_distribution(h_hat, pt.beta_b, pt.beta_e, cfg);
        const EveSinrLaw law = make_eve_law(stats, pt.P_s, pt.P_a, cfg.sigma2);
        return conditional_sop(gamma_b, theta, law);
    });
    rep.value = std::clamp(rep.value, 0.0, 1.0);
    return rep;
}

SecrecyReport esr(const channel_model::SystemConfig& cfg_in, long n_outer) {
    const channel_model::SystemConfig cfg = channel_model::validate_config(cfg_in);
    if (!is_identity_or_empty(cfg.R_b))
        throw std::invalid_argument(
            "esr: the analytic/hybrid estimators require R_b = I; use the "
            "Monte-Carlo estimator for correlated legitimate channels");
    const double beta_e = channel_model::worst_case_beta_e(cfg.beta_e_set);
    const auto [eta, theta] = estimation::prelog_and_threshold(cfg);
    (void)theta;

    SecrecyReport rep;
    rep.metric = SecrecyReport::Metric::Esr;

    if (deterministic_isotropic(cfg)) {
        const IsoPoint pt = iso_point(cfg, cfg.beta_b_dist.a, beta_e);
        rep.method = Method::Analytic;
        if (pt.P_s == 0.0) return rep;  // no information signal: ESR = 0
        rep.value = eta * gamma_outer_expectation(cfg.M, pt.omega_hat, [&](double s) {
                        const Eigen::VectorXcd h_hat = axis_estimate(cfg.M, s);
                        const double gamma_b = pt.P_s * s / pt.gamma_b_denom;
                        const auto stats = beamforming::eve_conditional_distribution(
                            h_hat, pt.beta_b, pt.beta_e, cfg);
                        const EveSinrLaw law = make_eve_law(stats, pt.P_s, pt.P_a, cfg.sigma2);
                        return conditional_secrecy_G(gamma_b, law);
                    });
        return rep;
    }

    if (n_outer < 1) throw std::invalid_argument("esr: n_outer must be >= 1");
    const statmath::RngStream base(statmath::derive_seed(cfg.seed, kTagHybridEsr), 0);
    HybridAccumulator acc;
    acc.buffer.resize(static_cast<std::size_t>(n_outer));
    for (long g = 0; g < n_outer; ++g) {
        statmath::RngStream sub = base.substream(static_cast<std::uint64_t>(g));
        const double beta_b = channel_model::sample_routing_gain(cfg.beta_b_dist, sub);
        const IsoPoint pt = iso_point(cfg, beta_b, beta_e);
        if (pt.P_s == 0.0) {
            acc.buffer[static_cast<std::size_t>(g)] = 0.0;
            continue;
        }
        const Eigen::VectorXcd h_hat =
            std::sqrt(pt.omega_hat) * statmath::sample_standard_complex_gaussian(cfg.M, sub);
        const double gamma_b = pt.P_s * h_hat.squaredNorm() / pt.gamma_b_denom;
        const auto stats = beamforming::eve_conditional_distribution(h_hat, beta_b, beta_e, cfg);
        const EveSinrLaw law = make_eve_law(stats, pt.P_s, pt.P_a, cfg.sigma2);
        acc.buffer[static_cast<std::size_t>(g)] = conditional_secrecy_G(gamma_b, law);
    }
    rep.method = Method::Hybrid;
    const double mean_G = acc.mean();
    rep.value = eta * mean_G;
    rep.stderr_value = eta * acc.stderr_of_mean(mean_G);
    rep.ci_halfwidth = std::max(1.96 * rep.stderr_value, 1.0 / static_cast<double>(n_outer));
    rep.n_outer = n_outer;
    return rep;
}

HighSnrLimits high_snr_limits(const channel_model::SystemConfig& cfg_in) {
    const channel_model::SystemConfig cfg = channel_model::validate_config(cfg_in);
    if (!deterministic_isotropic(cfg))
        throw std::invalid_argument(
            "high_snr_limits: requires point-mass beta_b and identity correlation matrices");
    const double alpha = cfg.alpha;
    const double beta_b = cfg.beta_b_dist.a;
    const double beta_e = channel_model::worst_case_beta_e(cfg.beta_e_set);
    const auto [omega_hat, omega_tilde] = estimation::isotropic_variances(beta_b, cfg);
    const auto [eta, theta] = estimation::prelog_and_threshold(cfg);
    (void)theta;

    HighSnrLimits lim;
    const double mix = alpha + (1.0 - alpha) * (cfg.M - 1);
    lim.gamma_b_inf_coeff = alpha / (omega_tilde * mix);
    if (alpha == 1.0) {
        lim.secrecy_collapse = true;  // no AN: the eavesdropper SINR grows without bound
        lim.esr_inf = 0.0;
        return lim;
    }
    if (alpha == 0.0) {
        lim.esr_inf = 0.0;
        return lim;
    }

    // Limiting law: same conditional geometry with powers (alpha, 1-alpha)
    // and no thermal noise (delta_slope = 0).
    lim.esr_inf = eta * gamma_outer_expectation(cfg.M, omega_hat, [&](double s) {
                      const Eigen::VectorXcd h_hat = axis_estimate(cfg.M, s);
                      const auto stats = beamforming::eve_conditional_distribution(
                          h_hat, beta_b, beta_e, cfg);
                      const EveSinrLaw law = make_eve_law(stats, alpha, 1.0 - alpha, 0.0);
                      return conditional_secrecy_G(lim.gamma_b_inf_coeff * s, law);
                  });
    return lim;
}

double mean_ceiling(double alpha, const channel_model::SystemConfig& cfg, double beta_b) {
    if (!(alpha > 0.0 && alpha < 1.0))
        throw std::invalid_argument("mean_ceiling: alpha must be in (0, 1)");
    if (!(beta_b > 0.0)) throw std::invalid_argument("mean_ceiling: beta_b must be positive");
    const double mix = alpha + (1.0 - alpha) * (cfg.M - 1);
    return alpha * cfg.M * cfg.tau_p * cfg.rho_p * beta_b / (cfg.sigma2 * mix);
}

double alpha_proxy(const channel_model::SystemConfig& cfg_in, ProxyForm form) {
    const channel_model::SystemConfig cfg = channel_model::validate_config(cfg_in);
    const double beta_b = cfg.beta_b_dist.mean();
    const auto [omega_hat, omega_tilde] = estimation::isotropic_variances(beta_b, cfg);
    const double rho2 = cfg.rho * cfg.rho;

    double r;  // mean high-SNR eavesdropper ratio E|X|^2 / E[Y]
    if (is_identity_or_empty(cfg.R_e) && is_identity_or_empty(cfg.C) &&
        is_identity_or_empty(cfg.R_b)) {
        const double common = (1.0 - rho2) + rho2 * omega_tilde / beta_b;
        const double ex2 = common + rho2 * cfg.M * omega_hat / beta_b;
        const double ey = (cfg.M - 1) * common;
        r = ex2 / ey;
    } else {
        if (!is_identity_or_empty(cfg.R_b))
            throw std::invalid_argument("alpha_proxy: requires R_b = I");
        // Estimate the ratio from the conditional moments over estimate draws.
        const double beta_e = channel_model::worst_case_beta_e(cfg.beta_e_set);
        const statmath::RngStream base(statmath::derive_seed(cfg.seed, kTagProxyRatio), 0);
        constexpr int kDraws = 20000;
        double ex2 = 0.0, ey = 0.0;
        for (int g = 0; g < kDraws; ++g) {
            statmath::RngStream sub = base.substream(static_cast<std::uint64_t>(g));
            const Eigen::VectorXcd h_hat =
                std::sqrt(omega_hat) * statmath::sample_standard_complex_gaussian(cfg.M, sub);
            const auto stats =
                beamforming::eve_conditional_distribution(h_hat, beta_b, beta_e, cfg);
            ex2 += std::norm(stats.mu_X) + stats.sigma2_X;
            double trQ = 0.0;
            for (std::size_t c = 0; c < stats.Q_spectrum.values.size(); ++c)
                trQ += stats.Q_spectrum.multiplicities[c] * stats.Q_spectrum.values[c];
            ey += (stats.mu_vec.squaredNorm() - std::norm(stats.mu_X)) + trQ;
        }
        r = ex2 / ey;
    }

    const double training = cfg.M * cfg.tau_p * cfg.rho_p * beta_b;
    double alpha;
    if (form == ProxyForm::Exact) {
        alpha = (training - (cfg.M - 1) * cfg.sigma2 * r) /
                (training - (cfg.M - 2) * cfg.sigma2 * r);
    } else {
        alpha = 1.0 - cfg.sigma2 * (cfg.M - 1) * r / training;
    }
    return std::clamp(alpha, 1e-6, 1.0 - 1e-6);
}

AlphaOpt optimize_alpha(const channel_model::SystemConfig& cfg_in, double P, long n_outer) {
    channel_model::SystemConfig cfg = channel_model::validate_config(cfg_in);
    if (!(P > 0.0)) throw std::invalid_argument("optimize_alpha: P must be positive");
    cfg.P = P;

    const auto esr_at = [&](double a) {
        channel_model::SystemConfig c = cfg;
        c.alpha = a;
        return esr(c, n_outer).value;
    };

    AlphaOpt best;
    best.alpha_star = alpha_proxy(cfg, ProxyForm::Exact);
    best.esr_at_star = esr_at(best.alpha_star);
    for (int k = 1; k <= 49; ++k) {
        const double a = 0.02 * k;
        const double v = esr_at(a);
        if (v > best.esr_at_star) {
            best.alpha_star = a;
            best.esr_at_star = v;
        }
    }
    if (!(best.esr_at_star > 0.0)) {
        best.degenerate = true;
        best.esr_at_star = 0.0;
        return best;
    }

    // Golden-section refinement around the coarse winner.
    constexpr double kInvPhi = 0.6180339887498949;
    double lo = std::max(1e-3, best.alpha_star - 0.02);
    double hi = std::min(1.0 - 1e-3, best.alpha_star + 0.02);
    double c = hi - kInvPhi * (hi - lo);
    double d = lo + kInvPhi * (hi - lo);
    double fc = esr_at(c), fd = esr_at(d);
    while (hi - lo > 1e-3) {
        if (fc > fd) {
            hi = d;
            d = c;
            fd = fc;
            c = hi - kInvPhi * (hi - lo);
            fc = esr_at(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + kInvPhi * (hi - lo);
            fd = esr_at(d);
        }
    }
    const double a_mid = 0.5 * (lo + hi);
    const double f_mid = esr_at(a_mid);
    if (f_mid > best.esr_at_star) {
        best.alpha_star = a_mid;
        best.esr_at_star = f_mid;
    } else if (fc > best.esr_at_star) {
        best.alpha_star = c;
        best.esr_at_star = fc;
    } else if (fd > best.esr_at_star) {
        best.alpha_star = d;
        best.esr_at_star = fd;
    }
    return best;
}

}  // namespace efsec::secrecy_analytic
