#include "snls/config.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "snls/errors.hpp"

namespace snls {

namespace {

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) return "";
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream is(s);
    std::string item;
    while (std::getline(is, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

[[noreturn]] void fail_at(const std::string& source, int line, const std::string& msg) {
    throw ConfigError(source + ":" + std::to_string(line) + ": " + msg);
}

double parse_number_or_throw(const std::string& token, const std::string& source, int line) {
    try {
        return parse_config_number(token);
    } catch (const std::exception& e) {
        fail_at(source, line, e.what());
    }
}

long parse_int_or_throw(const std::string& token, const std::string& source, int line) {
    char* end = nullptr;
    const long v = std::strtol(token.c_str(), &end, 10);
    if (end == token.c_str() || *end != '\0') {
        fail_at(source, line, "expected an integer, got '" + token + "'");
    }
    return v;
}

ThetaPolicySpec parse_theta_token(const std::string& token, const std::string& source, int line) {
    ThetaPolicySpec spec;
    spec.label = token;
    const auto colon = token.find(':');
    const std::string name = colon == std::string::npos ? token : token.substr(0, colon);
    const std::string arg = colon == std::string::npos ? "" : token.substr(colon + 1);
    try {
        if (name == "half") {
            spec.policy = ThetaPolicy::fixed(0.5);
        } else if (name == "one") {
            spec.policy = ThetaPolicy::fixed(1.0);
        } else if (name == "fixed") {
            if (arg.empty()) fail_at(source, line, "fixed theta needs a value, e.g. fixed:0.75");
            spec.policy = ThetaPolicy::fixed(parse_config_number(arg));
        } else if (name == "half_plus_c_sqrt_tau") {
            spec.policy =
                ThetaPolicy::half_plus_c_sqrt_tau(arg.empty() ? 1.0 : parse_config_number(arg));
        } else {
            fail_at(source, line,
                    "unknown theta policy '" + name +
                        "' (expected half | one | fixed:<v> | half_plus_c_sqrt_tau[:<c>])");
        }
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& e) {
        fail_at(source, line, e.what());
    }
    return spec;
}

void assign_key(ExperimentConfig& cfg, const std::string& key, const std::string& value,
                const std::string& source, int line) {
    if (key == "domain.a") cfg.domain_a = parse_number_or_throw(value, source, line);
    else if (key == "domain.b") cfg.domain_b = parse_number_or_throw(value, source, line);
    else if (key == "grid.n_cells") cfg.n_cells = static_cast<int>(parse_int_or_throw(value, source, line));
    else if (key == "time.T") cfg.T = parse_number_or_throw(value, source, line);
    else if (key == "time.tau_list") {
        cfg.tau_list.clear();
        for (const auto& tok : split_list(value)) {
            cfg.tau_list.push_back(parse_number_or_throw(tok, source, line));
        }
    } else if (key == "time.tau_ref") cfg.tau_ref = parse_number_or_throw(value, source, line);
    else if (key == "scheme.lambda") {
        const long v = parse_int_or_throw(value, source, line);
        if (v != -1 && v != 1) fail_at(source, line, "scheme.lambda must be -1 or 1");
        cfg.lambda = static_cast<int>(v);
    } else if (key == "scheme.theta_policy") {
        cfg.theta_policies.clear();
        for (const auto& tok : split_list(value)) {
            cfg.theta_policies.push_back(parse_theta_token(tok, source, line));
        }
        if (cfg.theta_policies.empty()) fail_at(source, line, "scheme.theta_policy needs a value");
    } else if (key == "scheme.newton_tol") cfg.newton_tol = parse_number_or_throw(value, source, line);
    else if (key == "scheme.newton_max_iter") {
        cfg.newton_max_iter = static_cast<int>(parse_int_or_throw(value, source, line));
    } else if (key == "scheme.quadrature") {
        if (value == "lumped") cfg.quadrature = NonlinearQuadrature::Lumped;
        else if (value == "consistent") cfg.quadrature = NonlinearQuadrature::ConsistentMass;
        else fail_at(source, line, "scheme.quadrature must be lumped or consistent");
    } else if (key == "noise.L") cfg.noise_L = static_cast<int>(parse_int_or_throw(value, source, line));
    else if (key == "noise.nu") cfg.noise_nu = parse_number_or_throw(value, source, line);
    else if (key == "noise.coeff_rule") {
        if (value == "one_over_ell") cfg.coeff_rule = CoeffRule::OneOverEll;
        else if (value == "custom") cfg.coeff_rule = CoeffRule::Custom;
        else fail_at(source, line, "noise.coeff_rule must be one_over_ell or custom");
    } else if (key == "noise.coeffs") {
        cfg.noise_coeffs.clear();
        for (const auto& tok : split_list(value)) {
            cfg.noise_coeffs.push_back(parse_number_or_throw(tok, source, line));
        }
    } else if (key == "initial.profile") {
        if (value == "sin2_pi_x") cfg.initial = InitialProfile::Sin2PiX;
        else if (value == "zero") cfg.initial = InitialProfile::Zero;
        else fail_at(source, line, "initial.profile must be sin2_pi_x or zero");
    } else if (key == "mc.realizations") {
        const long v = parse_int_or_throw(value, source, line);
        if (v < 1) fail_at(source, line, "mc.realizations must be >= 1");
        cfg.realizations = static_cast<std::size_t>(v);
    } else if (key == "mc.base_seed") {
        char* end = nullptr;
        cfg.base_seed = std::strtoull(value.c_str(), &end, 10);
        if (end == value.c_str() || *end != '\0') fail_at(source, line, "mc.base_seed must be an integer");
    } else if (key == "output.csv") cfg.output_csv = value;
    else if (key == "output.snapshots_csv") cfg.snapshots_csv = value;
    else if (key == "output.snapshot_times") {
        cfg.snapshot_times.clear();
        for (const auto& tok : split_list(value)) {
            cfg.snapshot_times.push_back(parse_number_or_throw(tok, source, line));
        }
    } else {
        fail_at(source, line, "unknown key '" + key + "'");
    }
}

bool is_near_integer(double x, double rel_tol) {
    const double r = std::round(x);
    return std::abs(x - r) <= rel_tol * std::max(1.0, std::abs(x)) && r >= 1.0;
}

} // namespace

double parse_config_number(const std::string& token) {
    const std::string t = trim(token);
    if (t.empty()) throw std::invalid_argument("empty numeric value");
    if (t.rfind("sqrt(", 0) == 0 && t.back() == ')') {
        return std::sqrt(parse_config_number(t.substr(5, t.size() - 6)));
    }
    if (t[0] == '-') return -parse_config_number(t.substr(1));
    const auto caret = t.find('^');
    if (caret != std::string::npos) {
        const double base = parse_config_number(t.substr(0, caret));
        char* end = nullptr;
        const std::string exp_s = t.substr(caret + 1);
        const long exp = std::strtol(exp_s.c_str(), &end, 10);
        if (end == exp_s.c_str() || *end != '\0') {
            throw std::invalid_argument("bad exponent in '" + t + "'");
        }
        return std::pow(base, static_cast<double>(exp));
    }
    char* end = nullptr;
    const double v = std::strtod(t.c_str(), &end);
    if (end == t.c_str() || *end != '\0') {
        throw std::invalid_argument("bad numeric value '" + t + "'");
    }
    return v;
}

ExperimentConfig parse_config(std::istream& is, const std::string& source_name) {
    ExperimentConfig cfg;
    cfg.theta_policies.push_back(ThetaPolicySpec{"half", ThetaPolicy::fixed(0.5)});

    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) fail_at(source_name, lineno, "expected 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) fail_at(source_name, lineno, "missing key before '='");
        assign_key(cfg, key, value, source_name, lineno);
    }
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot open config file '" + path + "'");
    return parse_config(is, path);
}

void apply_override(ExperimentConfig& cfg, const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos) {
        throw ConfigError("--set expects key=value, got '" + assignment + "'");
    }
    assign_key(cfg, trim(assignment.substr(0, eq)), trim(assignment.substr(eq + 1)), "--set", 1);
}

void ExperimentConfig::validate() const {
    if (!(domain_b > domain_a)) throw ConfigError("config: domain.b must exceed domain.a");
    if (n_cells < 2) throw ConfigError("config: grid.n_cells must be >= 2");
    if (!(T > 0.0)) throw ConfigError("config: time.T must be positive");
    if (tau_list.empty()) throw ConfigError("config: time.tau_list must not be empty");
    for (double tau : tau_list) {
        if (!(tau > 0.0)) throw ConfigError("config: every tau must be positive");
        if (!is_near_integer(T / tau, 1e-12)) {
            throw ConfigError("config: tau = " + std::to_string(tau) + " does not divide T");
        }
        if (tau_ref > 0.0 && !is_near_integer(tau / tau_ref, 1e-12)) {
            throw ConfigError("config: tau_ref must divide tau = " + std::to_string(tau));
        }
    }
    if (tau_ref > 0.0 && !is_near_integer(T / tau_ref, 1e-12)) {
        throw ConfigError("config: tau_ref does not divide T");
    }
    if (theta_policies.empty()) throw ConfigError("config: at least one theta policy required");
    if (!(newton_tol > 0.0)) throw ConfigError("config: newton_tol must be positive");
    if (newton_max_iter < 1) throw ConfigError("config: newton_max_iter must be >= 1");
    if (noise_L < 0) throw ConfigError("config: noise.L must be >= 0");
    if (coeff_rule == CoeffRule::Custom &&
        noise_coeffs.size() != static_cast<std::size_t>(noise_L)) {
        throw ConfigError("config: noise.coeffs must list exactly noise.L values");
    }
    if (realizations < 1) throw ConfigError("config: mc.realizations must be >= 1");
}

SchemeParams ExperimentConfig::scheme_params(const ThetaPolicySpec& spec, double tau) const {
    SchemeParams p;
    p.lambda = lambda;
    p.theta_policy = spec.policy;
    p.tau = tau;
    p.newton_tol = newton_tol;
    p.newton_max_iter = newton_max_iter;
    p.quadrature = quadrature;
    return p;
}

void print_config_schema(std::ostream& os) {
    os << "Config file: one 'key = value' per line, '#' comments.\n"
          "Numbers accept plain decimals plus 2^-10 and sqrt(2) forms.\n"
          "\n"
          "  domain.a / domain.b        spatial interval (default -1, 1)\n"
          "  grid.n_cells               cells; unknowns live on n_cells-1 interior nodes (512)\n"
          "  time.T                     final time (0.25)\n"
          "  time.tau_list              comma list of step sizes, each dividing T\n"
          "  time.tau_ref               reference step for converge; divides every tau\n"
          "  scheme.lambda              -1 (defocusing) or 1 (focusing)\n"
          "  scheme.theta_policy        comma list of half | one | fixed:<v> |\n"
          "                             half_plus_c_sqrt_tau[:<c>]  (default half)\n"
          "  scheme.newton_tol          Newton residual tolerance, scaled by sqrt(N) (1e-12)\n"
          "  scheme.newton_max_iter     iteration cap (50)\n"
          "  scheme.quadrature          lumped | consistent mass weighting of nodal terms\n"
          "  noise.L                    number of Wiener modes, 0 = deterministic\n"
          "  noise.nu                   global noise amplitude\n"
          "  noise.coeff_rule           one_over_ell | custom\n"
          "  noise.coeffs               comma list (when custom)\n"
          "  initial.profile            sin2_pi_x | zero\n"
          "  mc.realizations            Monte Carlo sample count (1)\n"
          "  mc.base_seed               base seed; realization r uses stream (seed, r)\n"
          "  output.csv                 diagnostics / error table destination\n"
          "  output.snapshots_csv       optional field snapshot destination\n"
          "  output.snapshot_times      comma list of times to snapshot\n"
          "\n"
          "Worker count comes from the SNLS_WORKERS environment variable\n"
          "(default: logical cores); results are identical for any value.\n";
}

} // namespace snls
