#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "snls/config.hpp"
#include "snls/diagnostics.hpp"

namespace snls {

struct ErrorTableRow {
    double tau = 0.0;
    double rms_error = 0.0;
    std::size_t n_realizations = 0;
    std::size_t n_failures = 0;
};

/// Strong-error rows, sorted by decreasing tau, plus the log-log fit.
struct ErrorTable {
    std::vector<ErrorTableRow> rows;
    double fitted_order = 0.0;
    double fit_residual = 0.0;
};

/// Ordinary least squares of log(error) against log(tau).
/// Returns (slope, RMS of fit deviations in log space). Throws
/// std::invalid_argument on fewer than two rows or nonpositive values.
std::pair<double, double> estimate_order(std::span<const double> taus,
                                         std::span<const double> errors);

/// Coupled-path strong error study: per realization one fine path at
/// tau_ref drives the reference trajectory and, coarsened, every coarse
/// trajectory; rms_error(tau) is the RMS of the pathwise final-time L2
/// distances. Requires exactly one theta policy and tau_ref set.
/// n_workers = 0 picks SNLS_WORKERS or the logical core count.
ErrorTable strong_error_experiment(const ExperimentConfig& cfg, unsigned n_workers = 0);

struct InvariantRun {
    std::string theta_label;
    double tau = 0.0;
    double theta_resolved = 0.0;
    EnsembleStats stats;
};

/// Ensemble invariant statistics for every (theta policy, tau) pair in the
/// config, with common random numbers across pairs.
std::vector<InvariantRun> invariant_experiment(const ExperimentConfig& cfg,
                                               unsigned n_workers = 0);

/// One ensemble at a single (policy, tau): per-step diagnostics of the
/// successful realizations in index order, plus the failure count.
/// The last trajectory result (fields included) is returned for
/// single-realization runs wanting snapshots.
struct EnsembleRunResult {
    std::vector<std::vector<StepDiagnostics>> diagnostics;
    std::size_t n_failures = 0;
    std::vector<TrajectoryResult> trajectories; // only filled when keep_fields
};

EnsembleRunResult run_ensemble(const ExperimentConfig& cfg, const ThetaPolicySpec& spec,
                               double tau, unsigned n_workers, bool keep_fields = false,
                               const std::vector<std::size_t>& snapshot_steps = {});

/// Header tau,rms_error,realizations,failures then one row per tau and a
/// trailing "# fitted_order=… residual=…" comment.
void write_error_table_csv(const ErrorTable& table, std::ostream& os);

/// Initial datum selected by the config on the given grid.
ComplexField initial_field(const ExperimentConfig& cfg, const Grid1D& grid);

/// SNLS_WORKERS environment variable, or the logical core count.
unsigned default_worker_count();

/// Runs fn(i) for i in [0, count) on up to n_workers threads. Exceptions
/// propagate after all workers have stopped.
void parallel_for_index(std::size_t count, unsigned n_workers,
                        const std::function<void(std::size_t)>& fn);

} // namespace snls
