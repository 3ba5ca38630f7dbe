#pragma once
// Strict plain-text configuration: a TOML-compatible key/value subset with
// full round-trip serialization. Unknown keys, malformed values, and invariant
// violations are rejected with line context.

#include <string>

#include "efsec/channel_model.hpp"

namespace efsec::config_io {

// Raised for syntax/typing problems; invariant violations raise
// channel_model::ValidationError from validate_config.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// How a correlation/coupling matrix is generated:
//   identity            (any matrix slot)
//   exp     param r     R(i,j) = r^|i-j|, 0 <= r < 1    (R_b, R_e only)
//   scaled  param c     C = c*I, 0 <= c <= 1            (C only)
struct MatrixSpec {
    std::string kind = "identity";
    double param = 0.0;
    bool operator==(const MatrixSpec&) const = default;
};

struct ConfigDocument {
    channel_model::SystemConfig cfg;  // materialized and validated
    MatrixSpec R_b_spec, R_e_spec, C_spec;
};

// Rebuilds cfg.C / cfg.R_b / cfg.R_e from the specs at the current cfg.M
// (used by sweeps that change the antenna count) and revalidates.
void rematerialize(ConfigDocument& doc);

// Empty text yields the default configuration.
ConfigDocument parse_config_text(const std::string& text);
ConfigDocument parse_config(const std::string& path);

// Full-precision serialization; parse(serialize(d)) reproduces d exactly.
std::string serialize_config(const ConfigDocument& doc);

}  // namespace efsec::config_io
