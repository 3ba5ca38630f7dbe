#include "efsec/statmath.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace efsec::statmath {

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

// 64-bit finalizer (murmur3 variant); bijective, good avalanche.
std::uint64_t mix64(std::uint64_t z) {
    z ^= z >> 33;
    z *= 0xFF51AFD7ED558CCDULL;
    z ^= z >> 33;
    z *= 0xC4CEB9FE1A85EC53ULL;
    z ^= z >> 33;
    return z;
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag) { return mix64(seed ^ tag); }

RngStream::RngStream(std::uint64_t master_seed, std::uint64_t stream_id)
    : master_(master_seed), id_(stream_id) {
    state_ = mix64(master_seed ^ mix64(stream_id * kGolden + 0xD1B54A32D192ED03ULL));
}

std::uint64_t RngStream::next_u64() {
    state_ += kGolden;
    std::uint64_t z = state_;
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ULL;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBULL;
    z ^= z >> 31;
    return z;
}

double RngStream::next_unit() {
    // Top 53 bits, shifted into (0, 1]; never returns 0, so log() is safe.
    return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
}

std::pair<double, double> RngStream::next_normal_pair() {
    const double u1 = next_unit();
    const double u2 = next_unit();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double phi = 2.0 * M_PI * u2;
    return {r * std::cos(phi), r * std::sin(phi)};
}

double RngStream::next_normal() { return next_normal_pair().first; }

std::complex<double> RngStream::next_complex_gaussian() {
    const auto [re, im] = next_normal_pair();
    return {re * M_SQRT1_2, im * M_SQRT1_2};
}

RngStream RngStream::substream(std::uint64_t draw_index) const {
    // Derived id depends only on (parent id, draw index), so the same global
    // draw index yields the same stream regardless of worker partitioning.
    return RngStream(master_, mix64(id_ * 0xD6E8FEB86659FD93ULL + draw_index + 1));
}

Eigen::VectorXcd sample_standard_complex_gaussian(int dim, RngStream& stream) {
    if (dim <= 0) throw std::invalid_argument("sample_standard_complex_gaussian: dim must be positive");
    Eigen::VectorXcd v(dim);
    for (int i = 0; i < dim; ++i) v(i) = stream.next_complex_gaussian();
    return v;
}

int EigenSpectrum::total_dimension() const {
    return std::accumulate(multiplicities.begin(), multiplicities.end(), 0);
}

EigenSpectrum hermitian_eigenspectrum(const Eigen::MatrixXcd& m, double cluster_rel_tol) {
    if (m.rows() != m.cols() || m.rows() == 0)
        throw std::invalid_argument("hermitian_eigenspectrum: matrix must be square and non-empty");
    const double scale = std::max(1.0, m.norm());
    if ((m - m.adjoint()).norm() > 1e-10 * scale)
        throw std::invalid_argument("hermitian_eigenspectrum: matrix is not Hermitian");
    if (cluster_rel_tol < 0.0)
        throw std::invalid_argument("hermitian_eigenspectrum: cluster_rel_tol must be nonnegative");

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(m, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success)
        throw std::runtime_error("hermitian_eigenspectrum: eigensolver failed to converge");

    std::vector<double> evs(solver.eigenvalues().data(),
                            solver.eigenvalues().data() + m.rows());
    std::sort(evs.begin(), evs.end(), std::greater<double>());

    EigenSpectrum out;
    double cluster_sum = evs[0];
    int cluster_size = 1;
    auto flush = [&]() {
        out.values.push_back(cluster_sum / cluster_size);
        out.multiplicities.push_back(cluster_size);
    };
    for (std::size_t i = 1; i < evs.size(); ++i) {
        const double mean = cluster_sum / cluster_size;
        const double gap = mean - evs[i];  // nonnegative: sorted descending
        if (gap <= cluster_rel_tol * std::max(std::abs(mean), std::abs(evs[i]))) {
            cluster_sum += evs[i];
            ++cluster_size;
        } else {
            flush();
            cluster_sum = evs[i];
            cluster_size = 1;
        }
    }
    flush();
    return out;
}

PartialFractionExpansion partial_fraction_coefficients(const std::vector<double>& lambdas) {
    if (lambdas.empty())
        throw std::invalid_argument("partial_fraction_coefficients: empty rate list");
    double vmax = 0.0;
    for (double l : lambdas) {
        if (!(l > 0.0)) throw std::invalid_argument("partial_fraction_coefficients: rates must be positive");
        vmax = std::max(vmax, l);
    }
    for (std::size_t i = 0; i < lambdas.size(); ++i)
        for (std::size_t j = i + 1; j < lambdas.size(); ++j)
            if (std::abs(lambdas[i] - lambdas[j]) <= 1e-12 * vmax)
                throw std::invalid_argument(
                    "partial_fraction_coefficients: rates must be distinct; "
                    "use generalized_partial_fractions for repeated rates");

    PartialFractionExpansion out;
    out.poles = lambdas;
    out.coefficients.resize(lambdas.size());
    for (std::size_t i = 0; i < lambdas.size(); ++i) {
        double a = 1.0;
        for (std::size_t j = 0; j < lambdas.size(); ++j)
            if (j != i) a *= lambdas[i] / (lambdas[i] - lambdas[j]);
        out.coefficients[i] = a;
    }
    return out;
}

std::vector<std::vector<double>> generalized_partial_fractions(const EigenSpectrum& spectrum) {
    const std::size_t n_clusters = spectrum.values.size();
    if (n_clusters == 0 || spectrum.multiplicities.size() != n_clusters)
        throw std::invalid_argument("generalized_partial_fractions: malformed spectrum");
    for (std::size_t c = 0; c < n_clusters; ++c) {
        if (!(spectrum.values[c] > 0.0))
            throw std::invalid_argument("generalized_partial_fractions: rates must be positive");
        if (spectrum.multiplicities[c] < 1)
            throw std::invalid_argument("generalized_partial_fractions: multiplicities must be >= 1");
    }

    std::vector<std::vector<double>> coeffs(n_clusters);
    for (std::size_t c = 0; c < n_clusters; ++c) {
        const int nc = spectrum.multiplicities[c];
        const double lam_c = spectrum.values[c];
        const double s_c = -1.0 / lam_c;  // pole of (1 + s*lam_c)^{-1}

        // Derivatives of g(s) = prod_{j != c} (1 + s*lam_j)^{-n_j} at s_c via
        // the log-derivative recursion g^{(i)} = sum C(i-1,q) h^{(i-q)} g^{(q)},
        // h^{(i)} = (d/ds)^i log g = (-1)^i (i-1)! sum_j n_j lam_j^i / (1+s lam_j)^i.
        const int order = nc - 1;
        std::vector<double> g(order + 1, 0.0), h(order + 1, 0.0);
        double log_g0 = 0.0;
        for (std::size_t j = 0; j < n_clusters; ++j) {
            if (j == c) continue;
            log_g0 -= spectrum.multiplicities[j] * std::log(std::abs(1.0 + s_c * spectrum.values[j]));
        }
        double sign_g0 = 1.0;
        for (std::size_t j = 0; j < n_clusters; ++j) {
            if (j == c) continue;
            if (1.0 + s_c * spectrum.values[j] < 0.0 && spectrum.multiplicities[j] % 2 == 1)
                sign_g0 = -sign_g0;
        }
        g[0] = sign_g0 * std::exp(log_g0);
        for (int i = 1; i <= order; ++i) {
            double fact = 1.0;  // (i-1)!
            for (int k = 2; k < i; ++k) fact *= k;
            double s = 0.0;
            for (std::size_t j = 0; j < n_clusters; ++j) {
                if (j == c) continue;
                const double base = spectrum.values[j] / (1.0 + s_c * spectrum.values[j]);
                s += spectrum.multiplicities[j] * std::pow(base, i);
            }
            h[i] = ((i % 2 == 0) ? 1.0 : -1.0) * fact * s;
        }
        for (int i = 1; i <= order; ++i) {
            double binom = 1.0;  // C(i-1, q), updated multiplicatively
            double acc = 0.0;
            for (int q = 0; q <= i - 1; ++q) {
                acc += binom * h[i - q] * g[q];
                binom = binom * (i - 1 - q) / (q + 1);
            }
            g[i] = acc;
        }

        // A_{c,l} = lam_c^{-(nc-l)} / (nc-l)! * g^{(nc-l)}(s_c), l = 1..nc.
        coeffs[c].resize(nc);
        for (int l = 1; l <= nc; ++l) {
            const int d = nc - l;
            double fact = 1.0;
            for (int k = 2; k <= d; ++k) fact *= k;
            coeffs[c][l - 1] = g[d] / (fact * std::pow(lam_c, d));
        }
    }
    return coeffs;
}

double erlang_survival(int shape, double lambda, double y) {
    if (shape < 1) throw std::invalid_argument("erlang_survival: shape must be >= 1");
    if (!(lambda > 0.0)) throw std::invalid_argument("erlang_survival: scale must be positive");
    if (y < 0.0) return 1.0;
    const double x = y / lambda;
    double term = 1.0, sum = 1.0;
    for (int i = 1; i < shape; ++i) {
        term *= x / i;
        sum += term;
    }
    return std::exp(-x) * sum;
}

double hypoexp_tail(const EigenSpectrum& spectrum, double y) {
    if (y < 0.0) throw std::invalid_argument("hypoexp_tail: y must be nonnegative");
    if (y == 0.0) return 1.0;
    const auto coeffs = generalized_partial_fractions(spectrum);
    double tail = 0.0;
    for (std::size_t c = 0; c < spectrum.values.size(); ++c)
        for (std::size_t l = 0; l < coeffs[c].size(); ++l)
            tail += coeffs[c][l] * erlang_survival(static_cast<int>(l) + 1, spectrum.values[c], y);
    return std::clamp(tail, 0.0, 1.0);
}

double hypoexp_mean(const EigenSpectrum& spectrum) {
    double mean = 0.0;
    for (std::size_t c = 0; c < spectrum.values.size(); ++c)
        mean += spectrum.multiplicities[c] * spectrum.values[c];
    return mean;
}

QuadratureRule gauss_laguerre(int n) {
    if (n < 1 || n > 64)
        throw std::invalid_argument("gauss_laguerre: order must be in [1, 64]");
    QuadratureRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    double z = 0.0;
    for (int i = 0; i < n; ++i) {
        // Standard initial guesses for Laguerre roots, then Newton refinement.
        if (i == 0) {
            z = 3.0 / (1.0 + 2.4 * n);
        } else if (i == 1) {
            z += 15.0 / (1.0 + 2.5 * n);
        } else {
            const double ai = i - 1;
            z += ((1.0 + 2.55 * ai) / (1.9 * ai)) * (z - rule.nodes[i - 2]);
        }
        double p1 = 0.0, p2 = 0.0;
        bool converged = false;
        for (int iter = 0; iter < 100; ++iter) {
            p1 = 1.0;
            p2 = 0.0;
            for (int j = 1; j <= n; ++j) {
                const double p3 = p2;
                p2 = p1;
                p1 = ((2.0 * j - 1.0 - z) * p2 - (j - 1.0) * p3) / j;
            }
            const double pp = n * (p1 - p2) / z;
            const double z_old = z;
            z = z_old - p1 / pp;
            if (std::abs(z - z_old) <= 1e-14 * std::max(1.0, std::abs(z))) {
                converged = true;
                break;
            }
        }
        if (!converged) throw TruncationError("gauss_laguerre: Newton iteration did not converge");
        // One clean evaluation at the converged node for the weight formula.
        p1 = 1.0;
        p2 = 0.0;
        for (int j = 1; j <= n; ++j) {
            const double p3 = p2;
            p2 = p1;
            p1 = ((2.0 * j - 1.0 - z) * p2 - (j - 1.0) * p3) / j;
        }
        const double pp = n * (p1 - p2) / z;
        rule.nodes[i] = z;
        rule.weights[i] = -1.0 / (pp * n * p2);
    }
    return rule;
}

int poisson_truncation_index(double kappa, double tail_eps) {
    if (kappa < 0.0) throw std::invalid_argument("poisson_truncation_index: kappa must be nonnegative");
    if (!(tail_eps > 0.0) || tail_eps >= 1.0)
        throw std::invalid_argument("poisson_truncation_index: tail_eps must be in (0, 1)");
    if (kappa == 0.0) return 0;
    constexpr int kCap = 10000;
    const double log_kappa = std::log(kappa);
    long double cdf = 0.0L;  // extended precision so the tail test stays sharp
    for (int m = 0; m <= kCap; ++m) {
        cdf += std::exp(-kappa + m * log_kappa - std::lgamma(m + 1.0));
        if (1.0L - cdf < static_cast<long double>(tail_eps)) return m;
    }
    throw TruncationError("poisson_truncation_index: series did not reach the tail bound within 10000 terms");
}

namespace {

struct SimpsonState {
    const std::function<double(double)>& f;
    int evals_left;

    double eval(double x) {
        if (--evals_left < 0)
            throw TruncationError("adaptive_simpson: evaluation budget exhausted");
        return f(x);
    }
};

double simpson_recurse(SimpsonState& st, double a, double b, double fa, double fm, double fb,
                       double whole, double tol) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = st.eval(lm), frm = st.eval(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
    return simpson_recurse(st, a, m, fa, flm, fm, left, 0.5 * tol) +
           simpson_recurse(st, m, b, fm, frm, fb, right, 0.5 * tol);
}

}  // namespace

double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double abs_tol, int max_intervals) {
    if (!(abs_tol > 0.0)) throw std::invalid_argument("adaptive_simpson: tolerance must be positive");
    if (a > b) throw std::invalid_argument("adaptive_simpson: requires a <= b");
    if (a == b) return 0.0;
    SimpsonState st{f, max_intervals};
    const double m = 0.5 * (a + b);
    const double fa = st.eval(a), fm = st.eval(m), fb = st.eval(b);
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return simpson_recurse(st, a, b, fa, fm, fb, whole, abs_tol);
}

}  // namespace efsec::statmath
