#pragma once
// Full-pipeline stochastic oracle: samples channels, estimates, beamforms,
// and computes instantaneous SINR pairs; produces empirical conditional CDFs,
// secrecy outage probabilities, and ergodic secrecy rates with standard
// errors. Every estimator draws each realization from a sub-stream keyed by
// the realization's global index and reduces in index order, so results are
// bit-identical for any worker partitioning.

#include <cstdint>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "efsec/beamforming.hpp"
#include "efsec/channel_model.hpp"
#include "efsec/estimation.hpp"
#include "efsec/statmath.hpp"

namespace efsec::montecarlo {

struct McEstimate {
    double value = 0.0;
    double stderr_value = 0.0;  // sample (or binomial) standard error
    long n = 0;
    std::uint64_t seed = 0;
    std::pair<int, long> stream_layout = {1, 0};  // (workers, draws per worker)
};

struct SinrSample {
    double gamma_b = 0.0;      // use-and-forget effective SINR (analysis target)
    double gamma_b_raw = 0.0;  // instantaneous SINR with the true channel (diagnostic)
    double gamma_e = 0.0;
};

// Per-config state reused across draws (correlation square roots, estimation
// filters); building it once makes tight sampling loops cheap.
struct PipelineContext {
    channel_model::SystemConfig cfg;  // validated copy
    double beta_e = 0.0;              // worst-case endpoint of beta_e_set
    double eta = 0.0, theta = 0.0, P_s = 0.0, P_a = 0.0;
    bool iso_Rb = false;              // R_b == I: scalar estimation filter applies
    Eigen::MatrixXcd sqrt_Rb, sqrt_Re;
    bool fixed_beta_b = false;        // point-mass beta_b: filter precomputable
    Eigen::MatrixXcd filter;          // h_hat = filter * y_p (general R_b)
    Eigen::MatrixXcd R_tilde;         // error covariance for the fixed filter
    long degenerate_resamples = 0;    // zero-estimate redraws (probability ~0)

    static PipelineContext make(const channel_model::SystemConfig& cfg);
};

// One coherence-block realization: routing gains, small-scale fading, pilot
// observation, MMSE estimate, transmit design, both SINRs. Resamples (with a
// logged count) if the estimate is exactly zero.
SinrSample simulate_sinr_pair(PipelineContext& ctx, statmath::RngStream& stream);

// Convenience overload; builds the context on every call.
SinrSample simulate_sinr_pair(const channel_model::SystemConfig& cfg,
                              statmath::RngStream& stream);

// Worker-local streams derived from the master seed; distinct workers never
// share a stream state.
std::vector<statmath::RngStream> split_streams(std::uint64_t master_seed, int workers,
                                               long draws_per_worker);

// Holds the estimate fixed and redraws h_e from its exact conditional law
// n >= 10^4 times; returns the empirical CDF (with binomial standard errors)
// at each grid point. Requires point-mass beta_b.
std::vector<McEstimate> empirical_conditional_cdf(const channel_model::SystemConfig& cfg,
                                                  const Eigen::VectorXcd& h_hat_fixed,
                                                  const std::vector<double>& grid, long n);

// Frequency of {instantaneous secrecy rate < R_th} over n >= 10^4 pipeline
// draws. n must be divisible by workers.
McEstimate empirical_sop(const channel_model::SystemConfig& cfg, long n, int workers = 1);

// Mean of eta*[log2(1+gamma_b) - log2(1+gamma_e)]^+ over n >= 10^4 draws.
McEstimate empirical_esr(const channel_model::SystemConfig& cfg, long n, int workers = 1);

}  // namespace efsec::montecarlo
