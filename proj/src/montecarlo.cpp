#include "efsec/montecarlo.hpp"

#include <cmath>

namespace efsec::montecarlo {

namespace {

constexpr std::uint64_t kTagConditionalCdf = 0x636F6E6443444620ULL;
constexpr std::uint64_t kTagEmpiricalSop = 0x656D70534F502020ULL;
constexpr std::uint64_t kTagEmpiricalEsr = 0x656D704553522020ULL;

bool is_identity(const Eigen::MatrixXcd& m) {
    const int n = static_cast<int>(m.rows());
    return (m - Eigen::MatrixXcd::Identity(n, n)).norm() <= 1e-12 * std::max(1.0, m.norm());
}

double binomial_stderr(double p, long n) {
    return std::sqrt(std::max(0.0, p * (1.0 - p)) / static_cast<double>(n));
}

void check_layout(long n, int workers) {
    if (n < 10000) throw std::invalid_argument("monte-carlo estimator: requires n >= 10^4");
    if (workers < 1) throw std::invalid_argument("monte-carlo estimator: workers must be >= 1");
    if (n % workers != 0)
        throw std::invalid_argument("monte-carlo estimator: n must be divisible by workers");
}

}  // namespace

PipelineContext PipelineContext::make(const channel_model::SystemConfig& cfg_in) {
    PipelineContext ctx;
    ctx.cfg = channel_model::validate_config(cfg_in);
    ctx.beta_e = channel_model::worst_case_beta_e(ctx.cfg.beta_e_set);
    std::tie(ctx.eta, ctx.theta) = estimation::prelog_and_threshold(ctx.cfg);
    ctx.P_s = ctx.cfg.alpha * ctx.cfg.P;
    ctx.P_a = (1.0 - ctx.cfg.alpha) * ctx.cfg.P;
    ctx.iso_Rb = is_identity(ctx.cfg.R_b);
    ctx.sqrt_Rb = channel_model::psd_sqrt(ctx.cfg.R_b);
    ctx.sqrt_Re = channel_model::psd_sqrt(ctx.cfg.R_e);
    ctx.fixed_beta_b =
        ctx.cfg.beta_b_dist.kind == channel_model::RoutingGainDistribution::Kind::PointMass;
    if (ctx.fixed_beta_b && !ctx.iso_Rb) {
        // Precompute the matrix MMSE filter and error covariance once.
        const int M = ctx.cfg.M;
        const double tp = ctx.cfg.tau_p * ctx.cfg.rho_p;
        const Eigen::MatrixXcd R_hb = ctx.cfg.beta_b_dist.a * ctx.cfg.R_b;
        const Eigen::MatrixXcd A = tp * R_hb + ctx.cfg.sigma2 * Eigen::MatrixXcd::Identity(M, M);
        Eigen::LLT<Eigen::MatrixXcd> llt(A);
        ctx.filter = std::sqrt(tp) * (R_hb * llt.solve(Eigen::MatrixXcd::Identity(M, M)));
        ctx.R_tilde = R_hb - std::sqrt(tp) * ctx.filter * R_hb;
        ctx.R_tilde = 0.5 * (ctx.R_tilde + ctx.R_tilde.adjoint()).eval();
    }
    return ctx;
}

SinrSample simulate_sinr_pair(PipelineContext& ctx, statmath::RngStream& stream) {
    const channel_model::SystemConfig& cfg = ctx.cfg;
    const int M = cfg.M;
    for (;;) {
        const double beta_b = channel_model::sample_routing_gain(cfg.beta_b_dist, stream);
        const auto [g_b, g_e] = channel_model::draw_small_scale(cfg, stream);
        const Eigen::VectorXcd h_b = std::sqrt(beta_b) * (ctx.iso_Rb ? g_b.eval()
                                                                     : (ctx.sqrt_Rb * g_b).eval());
        const Eigen::VectorXcd h_e = std::sqrt(ctx.beta_e) * (ctx.sqrt_Re * g_e);

        const Eigen::VectorXcd y_p = estimation::pilot_observe(h_b, cfg, stream);
        Eigen::VectorXcd h_hat;
        Eigen::MatrixXcd R_tilde;
        double omega_tilde = 0.0;
        if (ctx.iso_Rb) {
            // Matrix filter with R_hb = beta_b*I reduces exactly to a scalar.
            const double tp = cfg.tau_p * cfg.rho_p;
            h_hat = (std::sqrt(tp) * beta_b / (tp * beta_b + cfg.sigma2)) * y_p;
            omega_tilde = beta_b * cfg.sigma2 / (tp * beta_b + cfg.sigma2);
        } else if (ctx.fixed_beta_b) {
            h_hat = ctx.filter * y_p;
        } else {
            const auto est = estimation::mmse_estimate(y_p, beta_b * cfg.R_b, cfg);
            h_hat = est.h_hat;
            R_tilde = est.R_tilde;
        }

        if (!(h_hat.squaredNorm() > 0.0)) {
            ++ctx.degenerate_resamples;
            continue;
        }

        const beamforming::TxDesign design = beamforming::mrt_and_null_space(h_hat);
        SinrSample out;
        if (ctx.iso_Rb) {
            const double norm2 = h_hat.squaredNorm();
            out.gamma_b = ctx.P_s * norm2 /
                          (omega_tilde * (ctx.P_s + ctx.P_a * (M - 1)) + cfg.sigma2);
        } else {
            const Eigen::MatrixXcd& Rt = ctx.fixed_beta_b ? ctx.R_tilde : R_tilde;
            out.gamma_b = beamforming::bob_sinr(h_hat, Rt, ctx.P_s, ctx.P_a, cfg.sigma2);
        }
        // The raw instantaneous SINR at the legitimate receiver has the same
        // shape as the eavesdropper's: signal through w, AN leakage through V.
        out.gamma_b_raw =
            beamforming::eve_sinr_realization(h_b, design, ctx.P_s, ctx.P_a, cfg.sigma2);
        out.gamma_e =
            beamforming::eve_sinr_realization(h_e, design, ctx.P_s, ctx.P_a, cfg.sigma2);
        return out;
    }
}

SinrSample simulate_sinr_pair(const channel_model::SystemConfig& cfg,
                              statmath::RngStream& stream) {
    PipelineContext ctx = PipelineContext::make(cfg);
    return simulate_sinr_pair(ctx, stream);
}

std::vector<statmath::RngStream> split_streams(std::uint64_t master_seed, int workers,
                                               long draws_per_worker) {
    if (workers < 1) throw std::invalid_argument("split_streams: workers must be >= 1");
    if (draws_per_worker < 0)
        throw std::invalid_argument("split_streams: draws_per_worker must be nonnegative");
    std::vector<statmath::RngStream> streams;
    streams.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w)
        streams.emplace_back(master_seed, static_cast<std::uint64_t>(w));
    return streams;
}

std::vector<McEstimate> empirical_conditional_cdf(const channel_model::SystemConfig& cfg_in,
                                                  const Eigen::VectorXcd& h_hat_fixed,
                                                  const std::vector<double>& grid, long n) {
    const channel_model::SystemConfig cfg = channel_model::validate_config(cfg_in);
    if (n < 10000)
        throw std::invalid_argument("empirical_conditional_cdf: requires n >= 10^4");
    if (cfg.beta_b_dist.kind != channel_model::RoutingGainDistribution::Kind::PointMass)
        throw std::invalid_argument("empirical_conditional_cdf: requires point-mass beta_b");

    const double beta_b = cfg.beta_b_dist.a;
    const double beta_e = channel_model::worst_case_beta_e(cfg.beta_e_set);
    const double P_s = cfg.alpha * cfg.P;
    const double P_a = (1.0 - cfg.alpha) * cfg.P;
    const auto stats =
        beamforming::eve_conditional_distribution(h_hat_fixed, beta_b, beta_e, cfg);
    const Eigen::MatrixXcd cond_sqrt = channel_model::psd_sqrt(stats.R_cond);
    const beamforming::TxDesign design = beamforming::mrt_and_null_space(h_hat_fixed);

    const std::uint64_t master = statmath::derive_seed(cfg.seed, kTagConditionalCdf);
    const statmath::RngStream base(master, 0);
    std::vector<long> counts(grid.size(), 0);  // integer counts: order-free reduction
    for (long g = 0; g < n; ++g) {
        statmath::RngStream sub = base.substream(static_cast<std::uint64_t>(g));
        const Eigen::VectorXcd z = statmath::sample_standard_complex_gaussian(cfg.M, sub);
        const Eigen::VectorXcd h_e = stats.mu_vec + cond_sqrt * z;
        const double gamma = beamforming::eve_sinr_realization(h_e, design, P_s, P_a, cfg.sigma2);
        for (std::size_t k = 0; k < grid.size(); ++k)
            if (gamma <= grid[k]) ++counts[k];
    }

    std::vector<McEstimate> out(grid.size());
    for (std::size_t k = 0; k < grid.size(); ++k) {
        out[k].value = static_cast<double>(counts[k]) / static_cast<double>(n);
        out[k].stderr_value = binomial_stderr(out[k].value, n);
        out[k].n = n;
        out[k].seed = cfg.seed;
        out[k].stream_layout = {1, n};
    }
    return out;
}

McEstimate empirical_sop(const channel_model::SystemConfig& cfg_in, long n, int workers) {
    check_layout(n, workers);
    PipelineContext ctx = PipelineContext::make(cfg_in);
    const std::uint64_t master = statmath::derive_seed(ctx.cfg.seed, kTagEmpiricalSop);
    const statmath::RngStream base(master, 0);
    long outages = 0;
    for (long g = 0; g < n; ++g) {
        statmath::RngStream sub = base.substream(static_cast<std::uint64_t>(g));
        const SinrSample s = simulate_sinr_pair(ctx, sub);
        const double rate =
            ctx.eta * std::max(0.0, std::log2(1.0 + s.gamma_b) - std::log2(1.0 + s.gamma_e));
        if (rate < ctx.cfg.R_th) ++outages;
    }
    McEstimate est;
    est.value = static_cast<double>(outages) / static_cast<double>(n);
    est.stderr_value = binomial_stderr(est.value, n);
    est.n = n;
    est.seed = ctx.cfg.seed;
    est.stream_layout = {workers, n / workers};
    return est;
}

McEstimate empirical_esr(const channel_model::SystemConfig& cfg_in, long n, int workers) {
    check_layout(n, workers);
    PipelineContext ctx = PipelineContext::make(cfg_in);
    const std::uint64_t master = statmath::derive_seed(ctx.cfg.seed, kTagEmpiricalEsr);
    const statmath::RngStream base(master, 0);
    std::vector<double> buffer(static_cast<std::size_t>(n));
    for (long g = 0; g < n; ++g) {
        statmath::RngStream sub = base.substream(static_cast<std::uint64_t>(g));
        const SinrSample s = simulate_sinr_pair(ctx, sub);
        buffer[static_cast<std::size_t>(g)] =
            ctx.eta * std::max(0.0, std::log2(1.0 + s.gamma_b) - std::log2(1.0 + s.gamma_e));
    }
    double mean = 0.0;
    for (double v : buffer) mean += v;  // ordered fold: layout-independent
    mean /= static_cast<double>(n);
    double ss = 0.0;
    for (double v : buffer) ss += (v - mean) * (v - mean);
    McEstimate est;
    est.value = mean;
    est.stderr_value = std::sqrt(ss / (static_cast<double>(n) - 1.0) / static_cast<double>(n));
    est.n = n;
    est.seed = ctx.cfg.seed;
    est.stream_layout = {workers, n / workers};
    return est;
}

}  // namespace efsec::montecarlo
