#include "efsec/config_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

namespace efsec::config_io {

namespace {

using channel_model::RoutingGainDistribution;
using channel_model::SystemConfig;
using channel_model::VarianceMode;

[[noreturn]] void fail(int line, const std::string& msg) {
    throw ConfigError("config line " + std::to_string(line) + ": " + msg);
}

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

double parse_number(const std::string& s, int line) {
    const std::string t = trim(s);
    if (t.empty()) fail(line, "expected a number");
    char* end = nullptr;
    const double v = std::strtod(t.c_str(), &end);
    if (end != t.c_str() + t.size()) fail(line, "malformed number '" + t + "'");
    if (!std::isfinite(v)) fail(line, "number out of range '" + t + "'");
    return v;
}

long long parse_integer(const std::string& s, int line) {
    const double v = parse_number(s, line);
    const long long i = static_cast<long long>(v);
    if (static_cast<double>(i) != v) fail(line, "expected an integer, got '" + trim(s) + "'");
    return i;
}

std::uint64_t parse_seed(const std::string& s, int line) {
    const std::string t = trim(s);
    char* end = nullptr;
    // strtoull would silently wrap a leading minus; reject any non-digit.
    const bool all_digits = !t.empty() && t.find_first_not_of("0123456789") == std::string::npos;
    const unsigned long long v = std::strtoull(t.c_str(), &end, 10);
    if (!all_digits || end != t.c_str() + t.size())
        fail(line, "malformed seed '" + t + "' (expected a nonnegative integer)");
    return static_cast<std::uint64_t>(v);
}

std::string parse_string(const std::string& s, int line) {
    const std::string t = trim(s);
    if (t.size() < 2 || t.front() != '"' || t.back() != '"')
        fail(line, "expected a double-quoted string, got '" + t + "'");
    return t.substr(1, t.size() - 2);
}

std::vector<double> parse_array(const std::string& s, int line) {
    const std::string t = trim(s);
    if (t.size() < 2 || t.front() != '[' || t.back() != ']')
        fail(line, "expected an array like [a, b], got '" + t + "'");
    std::vector<double> out;
    std::string inner = t.substr(1, t.size() - 2);
    std::stringstream ss(inner);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(parse_number(item, line));
    if (out.empty()) fail(line, "array must not be empty");
    return out;
}

std::string fmt_number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

RoutingGainDistribution::Kind routing_kind(const std::string& name, int line) {
    if (name == "point-mass") return RoutingGainDistribution::Kind::PointMass;
    if (name == "uniform") return RoutingGainDistribution::Kind::Uniform;
    if (name == "gamma") return RoutingGainDistribution::Kind::Gamma;
    if (name == "lognormal") return RoutingGainDistribution::Kind::Lognormal;
    fail(line, "unknown routing-gain kind '" + name +
                   "' (expected point-mass, uniform, gamma, or lognormal)");
}

std::string routing_kind_name(RoutingGainDistribution::Kind kind) {
    switch (kind) {
        case RoutingGainDistribution::Kind::PointMass: return "point-mass";
        case RoutingGainDistribution::Kind::Uniform: return "uniform";
        case RoutingGainDistribution::Kind::Gamma: return "gamma";
        case RoutingGainDistribution::Kind::Lognormal: return "lognormal";
    }
    throw std::logic_error("routing_kind_name: unknown kind");
}

Eigen::MatrixXcd build_matrix(const MatrixSpec& spec, int M, bool is_coupling,
                              const std::string& field) {
    if (spec.kind == "identity") return Eigen::MatrixXcd::Identity(M, M);
    if (spec.kind == "exp" && !is_coupling) {
        if (!(spec.param >= 0.0 && spec.param < 1.0))
            throw ConfigError(field + ": exp decay parameter must be in [0, 1)");
        Eigen::MatrixXcd R(M, M);
        for (int i = 0; i < M; ++i)
            for (int j = 0; j < M; ++j) R(i, j) = std::pow(spec.param, std::abs(i - j));
        return R;
    }
    if (spec.kind == "scaled" && is_coupling) {
        if (!(spec.param >= 0.0 && spec.param <= 1.0))
            throw ConfigError(field + ": scale must be in [0, 1]");
        return spec.param * Eigen::MatrixXcd::Identity(M, M);
    }
    throw ConfigError(field + ": unknown matrix kind '" + spec.kind + "' (expected " +
                      (is_coupling ? "identity or scaled" : "identity or exp") + ")");
}

}  // namespace

void rematerialize(ConfigDocument& doc) {
    doc.cfg.R_b = build_matrix(doc.R_b_spec, doc.cfg.M, false, "R_b_kind");
    doc.cfg.R_e = build_matrix(doc.R_e_spec, doc.cfg.M, false, "R_e_kind");
    doc.cfg.C = build_matrix(doc.C_spec, doc.cfg.M, true, "C_kind");
    doc.cfg = channel_model::validate_config(doc.cfg);
}

ConfigDocument parse_config_text(const std::string& text) {
    ConfigDocument doc;
    SystemConfig& cfg = doc.cfg;

    std::stringstream ss(text);
    std::string raw;
    int line_no = 0;
    while (std::getline(ss, raw)) {
        ++line_no;
        // Strip comments (quotes in our grammar never contain '#').
        const auto hash = raw.find('#');
        if (hash != std::string::npos) raw = raw.substr(0, hash);
        const std::string line = trim(raw);
        if (line.empty()) continue;

        const auto eq = line.find('=');
        if (eq == std::string::npos) fail(line_no, "expected 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = line.substr(eq + 1);

        if (key == "M") {
            const long long m = parse_integer(value, line_no);
            if (m < 2 || m > 4096) fail(line_no, "M must be an integer in [2, 4096]");
            cfg.M = static_cast<int>(m);
        } else if (key == "Tc") {
            cfg.Tc = parse_number(value, line_no);
        } else if (key == "tau_p") {
            cfg.tau_p = parse_number(value, line_no);
        } else if (key == "rho_p") {
            cfg.rho_p = parse_number(value, line_no);
        } else if (key == "sigma2") {
            cfg.sigma2 = parse_number(value, line_no);
        } else if (key == "P") {
            cfg.P = parse_number(value, line_no);
        } else if (key == "alpha") {
            cfg.alpha = parse_number(value, line_no);
        } else if (key == "R_th") {
            cfg.R_th = parse_number(value, line_no);
        } else if (key == "rho") {
            cfg.rho = parse_number(value, line_no);
        } else if (key == "beta_b_kind") {
            cfg.beta_b_dist.kind = routing_kind(parse_string(value, line_no), line_no);
        } else if (key == "beta_b_params") {
            const auto params = parse_array(value, line_no);
            if (params.size() > 2) fail(line_no, "beta_b_params takes at most two values");
            cfg.beta_b_dist.a = params[0];
            cfg.beta_b_dist.b = params.size() > 1 ? params[1] : 0.0;
        } else if (key == "beta_e_set") {
            const auto set = parse_array(value, line_no);
            if (set.size() != 2) fail(line_no, "beta_e_set must be [min, max]");
            cfg.beta_e_set = {set[0], set[1]};
        } else if (key == "seed") {
            cfg.seed = parse_seed(value, line_no);
        } else if (key == "variance_mode") {
            const std::string mode = parse_string(value, line_no);
            if (mode == "exact-conditional")
                cfg.variance_mode = VarianceMode::ExactConditional;
            else if (mode == "perfect-csi-approx")
                cfg.variance_mode = VarianceMode::PerfectCsiApprox;
            else
                fail(line_no, "unknown variance_mode '" + mode +
                                  "' (expected exact-conditional or perfect-csi-approx)");
        } else if (key == "R_b_kind") {
            doc.R_b_spec.kind = parse_string(value, line_no);
        } else if (key == "R_b_param") {
            doc.R_b_spec.param = parse_number(value, line_no);
        } else if (key == "R_e_kind") {
            doc.R_e_spec.kind = parse_string(value, line_no);
        } else if (key == "R_e_param") {
            doc.R_e_spec.param = parse_number(value, line_no);
        } else if (key == "C_kind") {
            doc.C_spec.kind = parse_string(value, line_no);
        } else if (key == "C_param") {
            doc.C_spec.param = parse_number(value, line_no);
        } else {
            fail(line_no, "unknown key '" + key + "'");
        }
    }

    rematerialize(doc);
    return doc;
}

ConfigDocument parse_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str());
}

std::string serialize_config(const ConfigDocument& doc) {
    const SystemConfig& cfg = doc.cfg;
    std::ostringstream out;
    out << "M = " << cfg.M << "\n";
    out << "Tc = " << fmt_number(cfg.Tc) << "\n";
    out << "tau_p = " << fmt_number(cfg.tau_p) << "\n";
    out << "rho_p = " << fmt_number(cfg.rho_p) << "\n";
    out << "sigma2 = " << fmt_number(cfg.sigma2) << "\n";
    out << "P = " << fmt_number(cfg.P) << "\n";
    out << "alpha = " << fmt_number(cfg.alpha) << "\n";
    out << "R_th = " << fmt_number(cfg.R_th) << "\n";
    out << "rho = " << fmt_number(cfg.rho) << "\n";
    out << "beta_b_kind = \"" << routing_kind_name(cfg.beta_b_dist.kind) << "\"\n";
    out << "beta_b_params = [" << fmt_number(cfg.beta_b_dist.a) << ", "
        << fmt_number(cfg.beta_b_dist.b) << "]\n";
    out << "beta_e_set = [" << fmt_number(cfg.beta_e_set[0]) << ", "
        << fmt_number(cfg.beta_e_set[1]) << "]\n";
    out << "seed = " << cfg.seed << "\n";
    out << "variance_mode = \""
        << (cfg.variance_mode == VarianceMode::ExactConditional ? "exact-conditional"
                                                                : "perfect-csi-approx")
        << "\"\n";
    out << "R_b_kind = \"" << doc.R_b_spec.kind << "\"\n";
    out << "R_b_param = " << fmt_number(doc.R_b_spec.param) << "\n";
    out << "R_e_kind = \"" << doc.R_e_spec.kind << "\"\n";
    out << "R_e_param = " << fmt_number(doc.R_e_spec.param) << "\n";
    out << "C_kind = \"" << doc.C_spec.kind << "\"\n";
    out << "C_param = " << fmt_number(doc.C_spec.param) << "\n";
    return out.str();
}

}  // namespace efsec::config_io
