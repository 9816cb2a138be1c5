// Command-line harness: single trajectories, ensembles, strong-error
// convergence tables and the built-in oracle selftest.

#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "snls/diagnostics.hpp"
#include "snls/errors.hpp"
#include "snls/experiment.hpp"
#include "snls/rng.hpp"
#include "snls/selftest.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitNumerical = 2;

snls::ExperimentConfig load_with_overrides(const std::string& path,
                                           const std::vector<std::string>& overrides) {
    snls::ExperimentConfig cfg = snls::load_config(path);
    for (const auto& o : overrides) snls::apply_override(cfg, o);
    cfg.validate();
    return cfg;
}

std::string label_for_file(std::string label) {
    for (char& c : label) {
        if (c == ':' || c == '.' || c == '/') c = '_';
    }
    return label;
}

/// out.csv -> out_<suffix>.csv
std::string with_suffix(const std::string& path, const std::string& suffix) {
    const auto dot = path.find_last_of('.');
    if (dot == std::string::npos || path.find('/', dot) != std::string::npos) {
        return path + "_" + suffix;
    }
    return path.substr(0, dot) + "_" + suffix + path.substr(dot);
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot write '" + path + "'");
    os << content;
}

std::vector<std::size_t> snapshot_steps_from_times(const std::vector<double>& times, double tau,
                                                   std::size_t n_steps) {
    std::vector<std::size_t> steps;
    for (double t : times) {
        const auto s = static_cast<std::size_t>(std::llround(t / tau));
        if (s <= n_steps) steps.push_back(s);
    }
    return steps;
}

void write_snapshots_csv(const snls::TrajectoryResult& traj, const snls::Grid1D& grid,
                         std::ostream& os) {
    os << "step,time,x,re,im\n";
    char buf[32];
    auto g17 = [&buf](double v) {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        return std::string(buf);
    };
    for (const auto& snap : traj.snapshots) {
        for (std::size_t i = 0; i < snap.values.size(); ++i) {
            os << snap.step << ',' << g17(snap.time) << ',' << g17(grid.node(i)) << ','
               << g17(snap.values[i].real()) << ',' << g17(snap.values[i].imag()) << '\n';
        }
    }
}

int cmd_simulate(const snls::ExperimentConfig& cfg) {
    if (cfg.theta_policies.size() != 1) {
        std::cerr << "simulate: exactly one theta policy expected\n";
        return kExitUsage;
    }
    if (cfg.tau_list.size() != 1) {
        std::cerr << "simulate: time.tau_list must contain exactly one step size\n";
        return kExitUsage;
    }
    const double tau = cfg.tau_list.front();
    const std::size_t n_steps = static_cast<std::size_t>(std::llround(cfg.T / tau));
    const bool want_snapshots = !cfg.snapshots_csv.empty();
    const std::vector<std::size_t> snapshot_steps =
        want_snapshots ? snapshot_steps_from_times(cfg.snapshot_times, tau, n_steps)
                       : std::vector<std::size_t>{};

    snls::EnsembleRunResult ens = snls::run_ensemble(cfg, cfg.theta_policies.front(), tau, 0,
                                                     want_snapshots, snapshot_steps);
    std::ostringstream csv;
    if (cfg.realizations == 1) {
        snls::write_trajectory_csv(ens.diagnostics.front(), csv);
    } else {
        snls::write_ensemble_csv(snls::ensemble_reduce(ens.diagnostics, ens.n_failures), csv);
    }
    if (cfg.output_csv.empty()) {
        std::cout << csv.str();
    } else {
        write_file(cfg.output_csv, csv.str());
        std::cout << "wrote " << cfg.output_csv << "\n";
    }
    if (want_snapshots && !ens.trajectories.empty()) {
        const snls::Grid1D grid = snls::build_grid(cfg.domain_a, cfg.domain_b, cfg.n_cells);
        std::ostringstream snap;
        write_snapshots_csv(ens.trajectories.front(), grid, snap);
        write_file(cfg.snapshots_csv, snap.str());
        std::cout << "wrote " << cfg.snapshots_csv << "\n";
    }
    return kExitOk;
}

int cmd_converge(const snls::ExperimentConfig& cfg) {
    const snls::ErrorTable table = snls::strong_error_experiment(cfg);
    std::ostringstream csv;
    snls::write_error_table_csv(table, csv);
    std::cout << csv.str();
    std::cout << "order=" << table.fitted_order << "\n";
    if (!cfg.output_csv.empty()) {
        write_file(cfg.output_csv, csv.str());
        std::cout << "wrote " << cfg.output_csv << "\n";
    }
    return kExitOk;
}

int cmd_invariants(const snls::ExperimentConfig& cfg) {
    const std::vector<snls::InvariantRun> runs = snls::invariant_experiment(cfg);
    for (const auto& run : runs) {
        std::ostringstream csv;
        snls::write_ensemble_csv(run.stats, csv);
        std::cout << "theta=" << run.theta_label << " tau=" << run.tau
                  << " resolved_theta=" << run.theta_resolved
                  << " max_mean_hamiltonian=" << run.stats.max_mean_hamiltonian
                  << " max_abs_mass_drift=" << run.stats.max_abs_mass_drift
                  << " h1_max_quartiles=" << run.stats.h1_max_quantiles[0] << '/'
                  << run.stats.h1_max_quantiles[1] << '/' << run.stats.h1_max_quantiles[2]
                  << " failures=" << run.stats.n_failures << "\n";
        if (!cfg.output_csv.empty()) {
            std::string path = cfg.output_csv;
            if (runs.size() > 1) {
                std::ostringstream suffix;
                suffix << label_for_file(run.theta_label) << "_tau" << run.tau;
                path = with_suffix(path, suffix.str());
            }
            write_file(path, csv.str());
            std::cout << "wrote " << path << "\n";
        }
    }
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Stochastic cubic Schrodinger theta-scheme harness"};
    app.require_subcommand(1);

    std::string config_path;
    std::vector<std::string> overrides;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "experiment config file")->required();
        sub->add_option("--set", overrides, "override config entries, key=value");
    };

    CLI::App* simulate = app.add_subcommand("simulate", "run one trajectory or an ensemble");
    CLI::App* converge = app.add_subcommand("converge", "coupled-path strong error table");
    CLI::App* invariants = app.add_subcommand("invariants", "mass/Hamiltonian ensemble statistics");
    CLI::App* selftest = app.add_subcommand("selftest", "run the built-in oracle checks");
    add_common(simulate);
    add_common(converge);
    add_common(invariants);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (selftest->parsed()) {
            return snls::run_selftest(std::cout) ? kExitOk : kExitNumerical;
        }
        const snls::ExperimentConfig cfg = load_with_overrides(config_path, overrides);
        if (simulate->parsed()) return cmd_simulate(cfg);
        if (converge->parsed()) return cmd_converge(cfg);
        if (invariants->parsed()) return cmd_invariants(cfg);
    } catch (const snls::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n\n";
        snls::print_config_schema(std::cerr);
        return kExitUsage;
    } catch (const snls::NonConvergenceError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const snls::ExperimentError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}
