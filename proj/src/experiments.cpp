#include "efsec/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "efsec/beamforming.hpp"
#include "efsec/channel_model.hpp"
#include "efsec/estimation.hpp"
#include "efsec/montecarlo.hpp"
#include "efsec/secrecy_analytic.hpp"
#include "efsec/statmath.hpp"

namespace efsec::experiments {

namespace {

namespace cm = channel_model;
namespace sa = secrecy_analytic;
namespace mc = montecarlo;
using nlohmann::json;

constexpr std::uint64_t kTagFixedEstimate = 0x45564543'44460001ull;

struct CsvRow {
    double axis = 0.0;
    double value = 0.0;
    double se = 0.0;
    std::string method;
    std::uint64_t seed = 0;
};

struct Ctx {
    const ExperimentSpec* spec = nullptr;
    cm::SystemConfig cfg;  // validated base configuration
    long samples = 0;
    bool analytic = false;
    bool monte_carlo = false;
    bool deterministic_iso = false;  // point-mass beta_b + identity matrices
    std::vector<CsvRow> rows;
    json extras = json::object();
    json errors = json::array();
    json violations = json::array();
};

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string fmt_short(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%g", v);
    return buf;
}

void append_row(Ctx& ctx, double axis, double value, double se, std::string method,
                std::uint64_t seed) {
    if (!std::isfinite(axis) || !std::isfinite(value) || !std::isfinite(se))
        throw std::runtime_error("non-finite value in series '" + method + "' at axis " +
                                 fmt_short(axis));
    ctx.rows.push_back({axis, value, se, std::move(method), seed});
}

// Runs one sweep point; failures become summary error entries instead of
// aborting the remaining points.
template <typename Fn>
void guarded(Ctx& ctx, double axis, Fn&& fn) {
    try {
        fn();
    } catch (const std::exception& e) {
        ctx.errors.push_back({{"axis", axis}, {"message", e.what()}});
    }
}

void check_agreement(Ctx& ctx, const std::string& what, double axis, double analytic,
                     double se_a, long n_a, double empirical, double se_m, long n_m) {
    const long n_min = std::max<long>(1, std::min(n_a > 0 ? n_a : n_m, n_m > 0 ? n_m : n_a));
    const double tol =
        3.0 * std::sqrt(se_a * se_a + se_m * se_m) + 1.0 / static_cast<double>(n_min);
    if (std::abs(analytic - empirical) > tol) {
        ctx.violations.push_back({{"check", what},
                                  {"axis", axis},
                                  {"analytic", analytic},
                                  {"monte_carlo", empirical},
                                  {"tolerance", tol}});
    }
}

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

double point_mass_beta_b(const Ctx& ctx) {
    if (ctx.cfg.beta_b_dist.kind != cm::RoutingGainDistribution::Kind::PointMass)
        throw cm::ValidationError(
            "beta_b_dist: this experiment conditions on a fixed estimate and "
            "requires a point-mass routing gain");
    return ctx.cfg.beta_b_dist.a;
}

// The shared fixed estimate the conditional-law experiments condition on.
Eigen::VectorXcd fixed_estimate(const Ctx& ctx, double beta_b) {
    const auto [omega_hat, omega_tilde] = estimation::isotropic_variances(beta_b, ctx.cfg);
    statmath::RngStream stream(statmath::derive_seed(ctx.cfg.seed, kTagFixedEstimate), 0);
    return std::sqrt(omega_hat) * statmath::sample_standard_complex_gaussian(ctx.cfg.M, stream);
}

sa::EveSinrLaw law_for(const cm::SystemConfig& cfg, const Eigen::VectorXcd& h_hat,
                       double beta_b) {
    const double beta_e = cm::worst_case_beta_e(cfg.beta_e_set);
    const auto stats = beamforming::eve_conditional_distribution(h_hat, beta_b, beta_e, cfg);
    return sa::make_eve_law(stats, cfg.alpha * cfg.P, (1.0 - cfg.alpha) * cfg.P, cfg.sigma2);
}

double cdf_quantile(const sa::EveSinrLaw& law, double q) {
    double hi = 1.0;
    while (sa::eve_cdf(hi, law) < q && hi < 1e12) hi *= 2.0;
    double lo = 0.0;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        (sa::eve_cdf(mid, law) < q ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

// ---------------------------------------------------------------------------
// Experiments
// ---------------------------------------------------------------------------

void run_eve_cdf(Ctx& ctx) {
    const std::vector<double> rho_values = {0.0, 0.3, 0.6};
    const double beta_b = point_mass_beta_b(ctx);
    const Eigen::VectorXcd h_hat = fixed_estimate(ctx, beta_b);

    // Common grid: 20 quantiles of the heaviest-tailed (largest-rho) law, so
    // the tail ordering across rho is visible at shared abscissae.
    cm::SystemConfig cfg_top = ctx.cfg;
    cfg_top.rho = rho_values.back();
    const auto law_top = law_for(cfg_top, h_hat, beta_b);
    std::vector<double> grid;
    for (int k = 1; k <= 20; ++k)
        grid.push_back(cdf_quantile(law_top, static_cast<double>(k) / 21.0));

    std::vector<std::vector<double>> analytic_curves;
    for (const double rho : rho_values) {
        cm::SystemConfig cfg = ctx.cfg;
        cfg.rho = rho;
        cfg = cm::validate_config(cfg);
        guarded(ctx, rho, [&] {
            const auto law = law_for(cfg, h_hat, beta_b);
            if (ctx.analytic) {
                std::vector<double> curve;
                for (const double t : grid) {
                    const double F = sa::eve_cdf(t, law);
                    append_row(ctx, t, F, 0.0, "analytic:rho=" + fmt_short(rho), cfg.seed);
                    curve.push_back(F);
                }
                analytic_curves.push_back(curve);
            }
            if (ctx.monte_carlo) {
                const auto est = mc::empirical_conditional_cdf(cfg, h_hat, grid, ctx.samples);
                for (std::size_t i = 0; i < grid.size(); ++i)
                    append_row(ctx, grid[i], est[i].value, est[i].stderr_value,
                               "monte-carlo:rho=" + fmt_short(rho), est[i].seed);
            }
        });
    }

    // Larger rho concentrates the eavesdropper along the beam: heavier upper
    // tail, i.e. smaller CDF at the top grid points.
    if (analytic_curves.size() == rho_values.size()) {
        for (std::size_t r = 1; r < analytic_curves.size(); ++r) {
            for (std::size_t i = grid.size() - 3; i < grid.size(); ++i) {
                if (analytic_curves[r][i] > analytic_curves[r - 1][i] + 1e-12) {
                    ctx.violations.push_back(
                        {{"check", "cdf-tail-ordering"},
                         {"axis", grid[i]},
                         {"rho_low", rho_values[r - 1]},
                         {"rho_high", rho_values[r]},
                         {"cdf_low", analytic_curves[r - 1][i]},
                         {"cdf_high", analytic_curves[r][i]}});
                }
            }
        }
    }
    ctx.extras["rho_values"] = rho_values;
    ctx.extras["grid"] = grid;
}

void run_eve_pdf(Ctx& ctx) {
    const double beta_b = point_mass_beta_b(ctx);
    const Eigen::VectorXcd h_hat = fixed_estimate(ctx, beta_b);
    const auto law = law_for(ctx.cfg, h_hat, beta_b);

    const double t_lo = cdf_quantile(law, 0.005);
    const double t_hi = cdf_quantile(law, 0.995);

    if (ctx.analytic) {
        for (int i = 0; i < 40; ++i) {
            const double t = t_lo + (t_hi - t_lo) * i / 39.0;
            append_row(ctx, t, sa::eve_pdf(t, law, sa::PdfVariant::ExactDerivative), 0.0,
                       "analytic:exact", ctx.cfg.seed);
            append_row(ctx, t, sa::eve_pdf(t, law, sa::PdfVariant::ComponentSeries), 0.0,
                       "analytic:series", ctx.cfg.seed);
        }
    }
    if (ctx.monte_carlo) {
        // Histogram density from empirical-CDF increments at the bin edges.
        const int bins = 20;
        std::vector<double> edges;
        for (int j = 0; j <= bins; ++j) edges.push_back(t_hi * j / bins);
        const auto est = mc::empirical_conditional_cdf(ctx.cfg, h_hat, edges, ctx.samples);
        const double width = t_hi / bins;
        for (int j = 0; j < bins; ++j) {
            const double p = est[j + 1].value - est[j].value;
            const double se =
                std::sqrt(std::max(0.0, p * (1.0 - p)) / static_cast<double>(ctx.samples));
            append_row(ctx, edges[j] + 0.5 * width, p / width, se / width,
                       "monte-carlo:histogram", est[j].seed);
        }
    }
    ctx.extras["t_range"] = {t_lo, t_hi};
}

void run_sop_vs_power(Ctx& ctx) {
    for (double p_db = 0.0; p_db <= 40.0 + 1e-9; p_db += 5.0) {
        cm::SystemConfig cfg = ctx.cfg;
        cfg.P = db_to_linear(p_db);
        cfg = cm::validate_config(cfg);
        guarded(ctx, p_db, [&] {
            sa::SecrecyReport a;
            mc::McEstimate m;
            if (ctx.analytic) {
                a = ctx.deterministic_iso ? sa::sop_gauss_laguerre(cfg, sa::SopMode::WorstCase)
                                          : sa::sop(cfg, sa::SopMode::WorstCase, ctx.samples);
                append_row(ctx, p_db, a.value, a.stderr_value, "analytic", cfg.seed);
            }
            if (ctx.monte_carlo) {
                m = mc::empirical_sop(cfg, ctx.samples, ctx.spec->workers);
                append_row(ctx, p_db, m.value, m.stderr_value, "monte-carlo", m.seed);
            }
            if (ctx.analytic && ctx.monte_carlo)
                check_agreement(ctx, "sop-cross-method", p_db, a.value, a.stderr_value,
                                a.n_outer, m.value, m.stderr_value, m.n);
        });
    }
}

// Shared scaffold for the ESR sweeps: mutate() places the axis value into a
// config copy, which is then revalidated and evaluated by both methods.
template <typename Mutate>
void esr_sweep(Ctx& ctx, const std::vector<double>& axis_values, Mutate&& mutate) {
    for (const double x : axis_values) {
        guarded(ctx, x, [&] {
            cm::SystemConfig cfg = ctx.cfg;
            mutate(cfg, x);
            cfg = cm::validate_config(cfg);
            sa::SecrecyReport a;
            mc::McEstimate m;
            if (ctx.analytic) {
                a = sa::esr(cfg, ctx.samples);
                append_row(ctx, x, a.value, a.stderr_value, "analytic", cfg.seed);
            }
            if (ctx.monte_carlo) {
                m = mc::empirical_esr(cfg, ctx.samples, ctx.spec->workers);
                append_row(ctx, x, m.value, m.stderr_value, "monte-carlo", m.seed);
            }
            if (ctx.analytic && ctx.monte_carlo)
                check_agreement(ctx, "esr-cross-method", x, a.value, a.stderr_value, a.n_outer,
                                m.value, m.stderr_value, m.n);
        });
    }
}

std::vector<double> linspace_step(double lo, double hi, double step) {
    std::vector<double> out;
    for (double x = lo; x <= hi + 1e-9; x += step) out.push_back(x);
    return out;
}

void run_esr_vs_power(Ctx& ctx) {
    esr_sweep(ctx, linspace_step(0.0, 50.0, 5.0),
              [](cm::SystemConfig& cfg, double p_db) { cfg.P = db_to_linear(p_db); });
}

void run_esr_vs_beta(Ctx& ctx) {
    esr_sweep(ctx, linspace_step(1.0, 10.0, 1.0), [](cm::SystemConfig& cfg, double beta) {
        cfg.beta_b_dist.kind = cm::RoutingGainDistribution::Kind::PointMass;
        cfg.beta_b_dist.a = beta;
        cfg.beta_b_dist.b = 0.0;
    });
}

void run_esr_vs_alpha(Ctx& ctx) {
    esr_sweep(ctx, linspace_step(0.02, 0.98, 0.02),
              [](cm::SystemConfig& cfg, double alpha) { cfg.alpha = alpha; });
    // Convenience: the analytic argmax, for eyeballing against optimize-alpha.
    double best_alpha = 0.0, best_val = -1.0;
    for (const auto& row : ctx.rows) {
        if (row.method == "analytic" && row.value > best_val) {
            best_val = row.value;
            best_alpha = row.axis;
        }
    }
    if (best_val >= 0.0) {
        ctx.extras["grid_argmax_alpha"] = best_alpha;
        ctx.extras["grid_max_esr"] = best_val;
    }
}

void run_esr_vs_rho(Ctx& ctx) {
    esr_sweep(ctx, linspace_step(0.0, 0.9, 0.1),
              [](cm::SystemConfig& cfg, double rho) { cfg.rho = rho; });
}

void run_esr_vs_antennas(Ctx& ctx) {
    const std::vector<double> ms = {4, 8, 16, 32};
    for (const double m_axis : ms) {
        guarded(ctx, m_axis, [&] {
            // Correlation matrices must be rebuilt at the new dimension.
            config_io::ConfigDocument doc = ctx.spec->base;
            doc.cfg.M = static_cast<int>(m_axis);
            config_io::rematerialize(doc);
            const cm::SystemConfig& cfg = doc.cfg;
            if (ctx.analytic) {
                const auto a = sa::esr(cfg, ctx.samples);
                append_row(ctx, m_axis, a.value, a.stderr_value, "analytic", cfg.seed);
            }
            if (ctx.monte_carlo) {
                const auto m = mc::empirical_esr(cfg, ctx.samples, ctx.spec->workers);
                append_row(ctx, m_axis, m.value, m.stderr_value, "monte-carlo", m.seed);
            }
        });
    }
}

void run_asymptote(Ctx& ctx) {
    if (!ctx.deterministic_iso)
        throw cm::ValidationError(
            "asymptote requires a point-mass routing gain and identity "
            "correlation matrices (the high-SNR limit is defined there)");
    const auto limits = sa::high_snr_limits(ctx.cfg);
    esr_sweep(ctx, linspace_step(10.0, 50.0, 5.0),
              [](cm::SystemConfig& cfg, double p_db) { cfg.P = db_to_linear(p_db); });
    if (ctx.analytic) {
        for (const double p_db : linspace_step(10.0, 50.0, 5.0))
            append_row(ctx, p_db, limits.esr_inf, 0.0, "analytic:limit", ctx.cfg.seed);
    }
    ctx.extras["esr_inf"] = limits.esr_inf;
    ctx.extras["secrecy_collapse"] = limits.secrecy_collapse;
    ctx.extras["gamma_b_inf_coeff"] = limits.gamma_b_inf_coeff;
}

void run_optimize_alpha(Ctx& ctx) {
    if (ctx.monte_carlo)
        throw cm::ValidationError(
            "optimize-alpha supports only the analytic method (pass "
            "--methods analytic)");
    // Coarse plot-ready curve around the optimizer's answer.
    for (const double alpha : linspace_step(0.05, 0.95, 0.05)) {
        guarded(ctx, alpha, [&] {
            cm::SystemConfig cfg = ctx.cfg;
            cfg.alpha = alpha;
            cfg = cm::validate_config(cfg);
            const auto a = sa::esr(cfg, ctx.samples);
            append_row(ctx, alpha, a.value, a.stderr_value, "analytic", cfg.seed);
        });
    }
    const auto opt = sa::optimize_alpha(ctx.cfg, ctx.cfg.P, ctx.samples);
    append_row(ctx, opt.alpha_star, opt.esr_at_star, 0.0, "analytic:optimum", ctx.cfg.seed);
    ctx.extras["alpha_star"] = opt.alpha_star;
    ctx.extras["esr_at_star"] = opt.esr_at_star;
    ctx.extras["degenerate"] = opt.degenerate;
    ctx.extras["alpha_proxy_exact"] = sa::alpha_proxy(ctx.cfg, sa::ProxyForm::Exact);
    ctx.extras["alpha_proxy_approx"] = sa::alpha_proxy(ctx.cfg, sa::ProxyForm::Approx);
}

// ---------------------------------------------------------------------------
// Orchestration
// ---------------------------------------------------------------------------

void dispatch(Ctx& ctx) {
    const std::string& name = ctx.spec->name;
    if (name == "eve-cdf") return run_eve_cdf(ctx);
    if (name == "eve-pdf") return run_eve_pdf(ctx);
    if (name == "sop-vs-power") return run_sop_vs_power(ctx);
    if (name == "esr-vs-power") return run_esr_vs_power(ctx);
    if (name == "esr-vs-beta") return run_esr_vs_beta(ctx);
    if (name == "esr-vs-alpha") return run_esr_vs_alpha(ctx);
    if (name == "esr-vs-rho") return run_esr_vs_rho(ctx);
    if (name == "esr-vs-antennas") return run_esr_vs_antennas(ctx);
    if (name == "asymptote") return run_asymptote(ctx);
    if (name == "optimize-alpha") return run_optimize_alpha(ctx);
    throw std::logic_error("dispatch: unreachable");
}

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 1469598103934665603ull;
    for (const unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::string resolve_output_dir(const ExperimentSpec& spec) {
    if (!spec.output_dir.empty()) return spec.output_dir;
    if (const char* env = std::getenv("EFSEC_OUTPUT_DIR"); env && *env) return env;
    return "out";
}

void write_csv(const std::string& path, const std::vector<CsvRow>& rows) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    out << "axis,value,stderr,method,seed\r\n";
    for (const auto& row : rows)
        out << fmt(row.axis) << ',' << fmt(row.value) << ',' << fmt(row.se) << ','
            << row.method << ',' << row.seed << "\r\n";
}

}  // namespace

const std::vector<std::string>& experiment_names() {
    static const std::vector<std::string> names = {
        "eve-cdf",      "eve-pdf",    "sop-vs-power",    "esr-vs-power",
        "esr-vs-beta",  "esr-vs-alpha", "esr-vs-rho",    "esr-vs-antennas",
        "asymptote",    "optimize-alpha"};
    return names;
}

RunResult run(const ExperimentSpec& spec) {
    using clock = std::chrono::steady_clock;
    const auto t0 = clock::now();
    RunResult result;

    Ctx ctx;
    ctx.spec = &spec;
    try {
        const auto& names = experiment_names();
        if (std::find(names.begin(), names.end(), spec.name) == names.end()) {
            std::string all;
            for (const auto& n : names) all += (all.empty() ? "" : ", ") + n;
            throw cm::ValidationError("unknown experiment '" + spec.name +
                                      "' (expected one of: " + all + ")");
        }
        if (spec.methods.empty())
            throw cm::ValidationError("methods: at least one of analytic, monte-carlo");
        for (const auto& m : spec.methods) {
            if (m == "analytic")
                ctx.analytic = true;
            else if (m == "monte-carlo")
                ctx.monte_carlo = true;
            else
                throw cm::ValidationError("methods: unknown method '" + m + "'");
        }
        if (spec.samples < 0) throw cm::ValidationError("samples must be nonnegative");
        if (spec.workers < 1) throw cm::ValidationError("workers must be at least 1");

        ctx.cfg = cm::validate_config(spec.base.cfg);
        const bool conditional =
            spec.name == "eve-cdf" || spec.name == "eve-pdf";
        ctx.samples = spec.samples > 0 ? spec.samples : (conditional ? 1'000'000 : 100'000);
        if (ctx.monte_carlo && ctx.samples < 10'000)
            throw cm::ValidationError("samples: Monte-Carlo estimators need at least 10^4");
        if (ctx.monte_carlo && ctx.samples % spec.workers != 0)
            throw cm::ValidationError("samples must be divisible by workers");
        ctx.deterministic_iso =
            ctx.cfg.beta_b_dist.kind == cm::RoutingGainDistribution::Kind::PointMass &&
            spec.base.R_b_spec.kind == "identity" && spec.base.R_e_spec.kind == "identity" &&
            spec.base.C_spec.kind == "identity";
    } catch (const std::exception& e) {
        result.exit_code = 1;
        result.message = e.what();
        return result;
    }

    try {
        dispatch(ctx);
    } catch (const cm::ValidationError& e) {
        result.exit_code = 1;
        result.message = e.what();
        return result;
    } catch (const std::invalid_argument& e) {
        result.exit_code = 1;
        result.message = e.what();
        return result;
    } catch (const std::exception& e) {
        ctx.errors.push_back({{"axis", nullptr}, {"message", e.what()}});
    }

    try {
        const std::string dir = resolve_output_dir(spec);
        std::filesystem::create_directories(dir);
        const std::string csv_path = dir + "/" + spec.name + ".csv";
        const std::string summary_path = dir + "/" + spec.name + "_summary.json";

        write_csv(csv_path, ctx.rows);
        result.files.push_back(csv_path);

        if (!ctx.errors.empty())
            result.exit_code = 2;
        else if (!ctx.violations.empty())
            result.exit_code = 3;

        const std::string config_text = config_io::serialize_config(spec.base);
        std::string hash_input = spec.name + "\n" + config_text +
                                 "samples=" + std::to_string(ctx.samples) +
                                 " workers=" + std::to_string(spec.workers) + " methods=";
        for (const auto& m : spec.methods) hash_input += m + ";";
        char hash_hex[17];
        std::snprintf(hash_hex, sizeof(hash_hex), "%016llx",
                      static_cast<unsigned long long>(fnv1a(hash_input)));

        const auto wall_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                                 clock::now() - t0)
                                 .count();
        json summary = {{"experiment", spec.name},
                        {"config", config_text},
                        {"content_hash", hash_hex},
                        {"methods", spec.methods},
                        {"samples", ctx.samples},
                        {"workers", spec.workers},
                        {"seed", ctx.cfg.seed},
                        {"wall_time_ms", wall_ms},
                        {"rows", ctx.rows.size()},
                        {"files", json::array({csv_path})},
                        {"extras", ctx.extras},
                        {"errors", ctx.errors},
                        {"trend_violations", ctx.violations},
                        {"exit_code", result.exit_code}};
        std::ofstream out(summary_path, std::ios::binary);
        if (!out) throw std::runtime_error("cannot open '" + summary_path + "' for writing");
        out << summary.dump(2) << "\n";
        result.files.push_back(summary_path);
    } catch (const std::exception& e) {
        result.exit_code = 2;
        result.message = e.what();
        return result;
    }

    if (result.exit_code == 0)
        result.message = "ok: " + std::to_string(ctx.rows.size()) + " rows";
    else if (result.exit_code == 2)
        result.message = "numerical failures recorded in summary";
    else if (result.exit_code == 3)
        result.message = "trend/agreement assertion failed (see summary)";
    return result;
}

}  // namespace efsec::experiments
