#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "snls/noise.hpp"
#include "snls/scheme.hpp"

namespace snls {

enum class InitialProfile { Sin2PiX, Zero };

/// One theta policy plus the config token it came from (used to label
/// outputs when several policies run side by side).
struct ThetaPolicySpec {
    std::string label;
    ThetaPolicy policy = ThetaPolicy::fixed(0.5);
};

/// Full description of an experiment run. Parsed from a flat key-value
/// text file with dotted section keys; see print_config_schema().
struct ExperimentConfig {
    double domain_a = -1.0;
    double domain_b = 1.0;
    int n_cells = 512;

    double T = 0.25;
    std::vector<double> tau_list;
    double tau_ref = 0.0; // 0 = unset

    int lambda = -1;
    std::vector<ThetaPolicySpec> theta_policies; // defaults to {half}
    double newton_tol = 1e-12;
    int newton_max_iter = 50;
    NonlinearQuadrature quadrature = NonlinearQuadrature::Lumped;

    int noise_L = 0;
    double noise_nu = 0.0;
    CoeffRule coeff_rule = CoeffRule::OneOverEll;
    std::vector<double> noise_coeffs; // used when coeff_rule == Custom

    InitialProfile initial = InitialProfile::Sin2PiX;

    std::size_t realizations = 1;
    std::uint64_t base_seed = 0;

    std::string output_csv;
    std::string snapshots_csv;
    std::vector<double> snapshot_times;

    /// Checks structural invariants: positive sizes, every tau dividing T,
    /// tau_ref dividing every tau (integer refinement). Throws ConfigError.
    void validate() const;

    SchemeParams scheme_params(const ThetaPolicySpec& spec, double tau) const;
};

/// Parses `key = value` lines; '#' starts a comment; parse errors cite the
/// offending line as "<source>:<line>: <message>".
ExperimentConfig parse_config(std::istream& is, const std::string& source_name);
ExperimentConfig load_config(const std::string& path);

/// Applies one "key=value" override (the CLI --set flag).
void apply_override(ExperimentConfig& cfg, const std::string& assignment);

/// Numeric literal parser for config values: plain decimals plus the
/// power/radical forms 2^-10 and sqrt(2).
double parse_config_number(const std::string& token);

void print_config_schema(std::ostream& os);

} // namespace snls
