#pragma once
// Statistical/numerical kernel: deterministic RNG streams, complex Gaussian
// sampling, Hermitian eigenspectra with multiplicity clustering, (generalized)
// partial fractions of hypoexponential Laplace transforms, Gauss-Laguerre
// rules, Poisson-series truncation, and adaptive Simpson quadrature.

#include <complex>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace efsec::statmath {

// Raised when a series cannot meet its tail bound within the iteration cap.
struct TruncationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Counter-based deterministic stream. A stream is fully determined by
// (master_seed, stream_id); independent ids give independent-looking streams.
// Sub-streams keyed by a global draw index make Monte-Carlo results
// independent of how draws are partitioned across workers.
class RngStream {
  public:
    RngStream(std::uint64_t master_seed, std::uint64_t stream_id);

    std::uint64_t next_u64();
    double next_unit();  // uniform on (0, 1]
    std::pair<double, double> next_normal_pair();
    double next_normal();
    std::complex<double> next_complex_gaussian();  // CN(0,1): variance 1/2 per part

    std::uint64_t master_seed() const { return master_; }
    std::uint64_t stream_id() const { return id_; }

    // Stream for one draw, keyed by its global index; layout-invariant.
    RngStream substream(std::uint64_t draw_index) const;

  private:
    std::uint64_t master_;
    std::uint64_t id_;
    std::uint64_t state_;
};

// Mixes an operation tag into a seed so different estimators consume
// independent randomness from the same user-facing seed.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag);

// dim iid CN(0,1) entries (variance 1/2 per real part).
Eigen::VectorXcd sample_standard_complex_gaussian(int dim, RngStream& stream);

// Eigenvalues grouped into clusters of numerically equal values.
struct EigenSpectrum {
    std::vector<double> values;        // one entry per cluster, descending
    std::vector<int> multiplicities;   // same length as values
    int total_dimension() const;
};

// Spectrum of a Hermitian matrix; eigenvalues whose pairwise relative gap is
// below cluster_rel_tol are merged (value = cluster mean, multiplicity = size).
EigenSpectrum hermitian_eigenspectrum(const Eigen::MatrixXcd& m,
                                      double cluster_rel_tol = 1e-8);

struct PartialFractionExpansion {
    std::vector<double> poles;         // the distinct lambda_i
    std::vector<double> coefficients;  // sums to 1
};

// Coefficients a_i = prod_{j!=i} lambda_i/(lambda_i - lambda_j) for
// distinct positive rates; rejects repeated input.
PartialFractionExpansion partial_fraction_coefficients(const std::vector<double>& lambdas);

// Generalized expansion of L(s) = prod_c (1 + s*lambda_c)^{-n_c} as
// sum_c sum_{l=1..n_c} A[c][l-1] * (1 + s*lambda_c)^{-l}; works for any
// multiplicities (higher-order poles via log-derivative recursion).
std::vector<std::vector<double>> generalized_partial_fractions(const EigenSpectrum& spectrum);

// P(Y > y) for Y = sum lambda_i |u_i|^2, u_i iid CN(0,1).
double hypoexp_tail(const EigenSpectrum& spectrum, double y);
double hypoexp_mean(const EigenSpectrum& spectrum);

// Survival of an Erlang(shape) with scale lambda at y.
double erlang_survival(int shape, double lambda, double y);

struct QuadratureRule {
    std::vector<double> nodes;    // strictly increasing
    std::vector<double> weights;  // sum to 1 for the e^{-x} weight
};

// n-point Gauss-Laguerre rule (weight e^{-x} on [0, inf)), 1 <= n <= 64.
QuadratureRule gauss_laguerre(int n);

// Smallest m such that the Poisson(kappa) tail mass beyond m is < tail_eps.
int poisson_truncation_index(double kappa, double tail_eps);

// Adaptive Simpson quadrature to absolute tolerance, with an evaluation cap.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double abs_tol, int max_intervals = 10000);

}  // namespace efsec::statmath
