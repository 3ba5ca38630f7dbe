#pragma once
// Closed-form conditional CDF/PDF of the eavesdropper SINR, secrecy outage
// probability, ergodic secrecy rate, high-SNR limits, and data/AN power-split
// optimization.
//
// The conditional law of gamma_e = P_s|X|^2 / (P_a Y + sigma2) given the
// channel estimate combines a noncentral |X|^2 (Poisson mixture of Erlangs,
// noncentrality kappa) with a hypoexponential Y (spectrum of Q). The survival
// function is evaluated as
//   S(t) = sum_j P(Pois(kappa) >= j) * W_j,
//   W_j  = sum_{i<=j} pois_pmf(delta, j-i) * G_i,
//   G_i  = sum_{c,l} A_{c,l} * C(l+i-1, i) * r_c^i * (1+xi*lam_c)^{-l},
// with delta = delta_slope*t, xi = xi_slope*t, r_c = xi*lam_c/(1+xi*lam_c),
// and A the (generalized) partial-fraction coefficients of Y's transform.

#include <vector>

#include "efsec/beamforming.hpp"
#include "efsec/channel_model.hpp"
#include "efsec/statmath.hpp"

namespace efsec::secrecy_analytic {

enum class Method { Analytic, Hybrid, MonteCarlo };
enum class SopMode { FixedBetaE, WorstCase };
enum class PdfVariant {
    ExactDerivative,  // term-wise derivative of the implemented CDF
    ComponentSeries,  // per-Poisson-component density series (approximate for
                      // t > 0; agrees with the exact derivative at t = 0)
};
enum class ProxyForm { Exact, Approx };

struct SecrecyReport {
    enum class Metric { Sop, SopWorstCase, Esr, EsrAsymptotic };
    Metric metric = Metric::Sop;
    double value = 0.0;
    Method method = Method::Analytic;
    double stderr_value = 0.0;   // outer-sampling standard error (0 if analytic)
    double ci_halfwidth = 0.0;   // max(1.96*stderr, 1/n) for sampled methods
    long n_outer = 0;
};

// Frozen, t-independent description of one conditional eavesdropper-SINR law.
struct EveSinrLaw {
    beamforming::ConditionalEveStats stats;
    double P_s = 0.0;
    double P_a = 0.0;
    double sigma2 = 0.0;
    double delta_slope = 0.0;  // sigma2 / (P_s * sigma2_X)
    double xi_slope = 0.0;     // P_a   / (P_s * sigma2_X)
    int m_max = 0;             // Poisson series truncation (tail < 1e-12)
    bool degenerate_zero = false;  // P_s == 0: gamma_e is identically zero

    // Positive part of the Q spectrum (zero AN-subspace directions dropped).
    std::vector<double> lambdas;
    std::vector<int> mults;
    std::vector<std::vector<double>> pf;  // A[c][l-1], partial fractions
    double mean_Y = 0.0;

    std::vector<double> pois_pmf;   // pi_m(kappa), m = 0..m_max+1
    std::vector<double> pois_tail;  // P(Pois(kappa) >= j), j = 0..m_max
};

// Builds the law; sigma2 = 0 is allowed (the high-SNR limiting law).
// m_max_override >= 0 replaces the automatic truncation index (used by the
// series-stability tests; results must be insensitive to deepening it).
EveSinrLaw make_eve_law(const beamforming::ConditionalEveStats& stats,
                        double P_s, double P_a, double sigma2,
                        int m_max_override = -1);

double eve_cdf(double t, const EveSinrLaw& law);
double eve_survival(double t, const EveSinrLaw& law);  // 1 - CDF, direct
double eve_pdf(double t, const EveSinrLaw& law, PdfVariant variant);

// t_b = (gamma_b + 1)/theta - 1; outage is the event gamma_e > t_b.
double induced_threshold(double gamma_b, double theta);

// P(outage | estimate) = 1 if t_b < 0, else survival(t_b).
double conditional_sop(double gamma_b, double theta, const EveSinrLaw& law);

// Hybrid secrecy outage probability: outer Monte-Carlo over (beta_b, h_hat),
// inner conditional outage analytic. Requires R_b = I (the estimate is then
// isotropic Gaussian); worst-case mode evaluates at the top of beta_e_set,
// fixed mode requires a degenerate beta_e_set.
SecrecyReport sop(const channel_model::SystemConfig& cfg, SopMode mode, long n_outer);

// Deterministic variant of sop() for point-mass beta_b and identity
// correlation matrices: outer expectation over ||h_hat||^2 ~ Gamma(M, omega_hat)
// via a 20-node Gauss-Laguerre rule. Used for trend assertions where the
// hybrid estimator's sampling noise would mask tiny outage probabilities.
SecrecyReport sop_gauss_laguerre(const channel_model::SystemConfig& cfg, SopMode mode);

// Conditional secrecy-rate kernel G = E[log2((1+g*)/(1+gamma_e))^+ | estimate]
// = log2(1+g*) - (1/ln 2) * Int_0^{g*} S(t)/(1+t) dt, evaluated with adaptive
// quadrature (absolute tolerance 1e-8) after the substitution u = ln(1+t).
double conditional_secrecy_G(double gamma_b_star, const EveSinrLaw& law);

// Ergodic secrecy rate eta * E[G]. Point-mass beta_b with identity correlation
// matrices uses the deterministic Gauss-Laguerre outer rule (method Analytic,
// n_outer ignored); other configs use outer Monte-Carlo (method Hybrid).
// The eavesdropper gain is the worst-case endpoint of beta_e_set.
SecrecyReport esr(const channel_model::SystemConfig& cfg, long n_outer);

struct HighSnrLimits {
    bool secrecy_collapse = false;   // alpha == 1: no AN, ESR tends to 0
    double gamma_b_inf_coeff = 0.0;  // gamma_b limit = coeff * ||h_hat||^2
    double esr_inf = 0.0;            // bits/s/Hz
};

// P -> infinity limits at fixed alpha: the legitimate SINR ceiling coefficient
// and the limiting ESR (same G machinery with delta_slope = 0 and powers
// (alpha, 1-alpha)). Requires point-mass beta_b and identity matrices.
HighSnrLimits high_snr_limits(const channel_model::SystemConfig& cfg);

// E of the legitimate-SINR ceiling:
// alpha*M*tau_p*rho_p*beta_b / (sigma2*(alpha + (1-alpha)*(M-1))).
double mean_ceiling(double alpha, const channel_model::SystemConfig& cfg, double beta_b);

// Closed-form initializer for the data-power fraction, from the mean high-SNR
// ratio r = E|X|^2 / E[Y]; Exact keeps the full ratio structure, Approx is its
// first-order simplification. Result clipped to (0, 1).
double alpha_proxy(const channel_model::SystemConfig& cfg, ProxyForm form);

struct AlphaOpt {
    double alpha_star = 0.0;
    double esr_at_star = 0.0;
    bool degenerate = false;  // ESR vanished over the whole grid
};

// Maximizes esr over alpha at transmit power P: coarse grid (step 0.02 on
// [0.02, 0.98]) plus the alpha_proxy candidate, then golden-section
// refinement to width 1e-3.
AlphaOpt optimize_alpha(const channel_model::SystemConfig& cfg, double P,
                        long n_outer = 20000);

}  // namespace efsec::secrecy_analytic
