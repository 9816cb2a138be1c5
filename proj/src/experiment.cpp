#include "snls/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <limits>
#include <mutex>
#include <ostream>
#include <thread>

#include "snls/errors.hpp"
#include "snls/rng.hpp"

namespace snls {

namespace {

std::string g17(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::size_t steps_for(double T, double tau) {
    return static_cast<std::size_t>(std::llround(T / tau));
}

void check_failure_budget(std::size_t failures, std::size_t realizations) {
    if (failures == 0) return;
    if (static_cast<double>(failures) > 0.01 * static_cast<double>(realizations)) {
        throw ExperimentError("failure rate above 1%: " + std::to_string(failures) + " of " +
                              std::to_string(realizations) + " realizations did not converge");
    }
}

} // namespace

unsigned default_worker_count() {
    if (const char* env = std::getenv("SNLS_WORKERS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v >= 1) return static_cast<unsigned>(v);
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? hw : 1;
}

void parallel_for_index(std::size_t count, unsigned n_workers,
                        const std::function<void(std::size_t)>& fn) {
    if (n_workers == 0) n_workers = default_worker_count();
    n_workers = static_cast<unsigned>(std::min<std::size_t>(n_workers, count));
    if (n_workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::atomic<bool> abort{false};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    auto worker = [&] {
        while (!abort.load(std::memory_order_relaxed)) {
            const std::size_t i = next.fetch_add(1, std::memory_order_relaxed);
            if (i >= count) return;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
                abort.store(true, std::memory_order_relaxed);
                return;
            }
        }
    };
    std::vector<std::thread> threads;
    threads.reserve(n_workers);
    for (unsigned w = 0; w < n_workers; ++w) threads.emplace_back(worker);
    for (auto& t : threads) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

ComplexField initial_field(const ExperimentConfig& cfg, const Grid1D& grid) {
    switch (cfg.initial) {
        case InitialProfile::Zero:
            return zero_field(grid);
        case InitialProfile::Sin2PiX:
        default:
            return interpolate(
                [](double x) {
                    const double s = std::sin(M_PI * x);
                    return cplx(s * s, 0.0);
                },
                grid);
    }
}

std::pair<double, double> estimate_order(std::span<const double> taus,
                                         std::span<const double> errors) {
    if (taus.size() != errors.size()) {
        throw std::invalid_argument("estimate_order: size mismatch");
    }
    if (taus.size() < 2) throw std::invalid_argument("estimate_order: need at least two rows");
    const std::size_t n = taus.size();
    std::vector<double> x(n), y(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (!(taus[i] > 0.0) || !(errors[i] > 0.0)) {
            throw std::invalid_argument("estimate_order: values must be positive");
        }
        x[i] = std::log(taus[i]);
        y[i] = std::log(errors[i]);
    }
    double xb = 0.0, yb = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        xb += x[i];
        yb += y[i];
    }
    xb /= static_cast<double>(n);
    yb /= static_cast<double>(n);
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (x[i] - xb) * (x[i] - xb);
        sxy += (x[i] - xb) * (y[i] - yb);
    }
    if (sxx == 0.0) throw std::invalid_argument("estimate_order: all taus equal");
    const double slope = sxy / sxx;
    const double intercept = yb - slope * xb;
    double ss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = y[i] - (intercept + slope * x[i]);
        ss += d * d;
    }
    return {slope, std::sqrt(ss / static_cast<double>(n))};
}

ErrorTable strong_error_experiment(const ExperimentConfig& cfg, unsigned n_workers) {
    cfg.validate();
    if (cfg.theta_policies.size() != 1) {
        throw ConfigError("strong_error_experiment: exactly one theta policy required");
    }
    if (!(cfg.tau_ref > 0.0)) {
        throw ConfigError("strong_error_experiment: time.tau_ref must be set");
    }

    const Grid1D grid = build_grid(cfg.domain_a, cfg.domain_b, cfg.n_cells);
    const TriDiagMatrix M = assemble_mass(grid);
    const TriDiagMatrix A = assemble_stiffness(grid);
    const NoiseModel model =
        make_noise_model(cfg.noise_L, cfg.noise_nu, cfg.coeff_rule, grid, cfg.noise_coeffs);
    const ComplexField psi0 = initial_field(cfg, grid);
    const ThetaPolicySpec& spec = cfg.theta_policies.front();

    std::vector<double> taus = cfg.tau_list;
    std::sort(taus.begin(), taus.end(), std::greater<double>());
    const std::size_t n_ref_steps = steps_for(cfg.T, cfg.tau_ref);
    const std::size_t n_taus = taus.size();
    const std::size_t R = cfg.realizations;

    // errors[r * n_taus + j], NaN marks a failed realization.
    std::vector<double> errors(R * n_taus, std::numeric_limits<double>::quiet_NaN());
    std::vector<char> failed(R, 0);

    parallel_for_index(R, n_workers, [&](std::size_t r) {
        const std::uint64_t seed = derive_stream_seed(cfg.base_seed, r);
        const WienerPath fine = sample_path(model, seed, cfg.tau_ref, n_ref_steps);
        try {
            const TrajectoryResult ref =
                run_trajectory(psi0, fine, model, cfg.scheme_params(spec, cfg.tau_ref), grid, M, A);
            for (std::size_t j = 0; j < n_taus; ++j) {
                const std::size_t k =
                    static_cast<std::size_t>(std::llround(taus[j] / cfg.tau_ref));
                const WienerPath coarse_path = coarsen(fine, k);
                const TrajectoryResult coarse = run_trajectory(
                    psi0, coarse_path, model, cfg.scheme_params(spec, taus[j]), grid, M, A);
                ComplexField diff = coarse.final_field;
                for (std::size_t i = 0; i < diff.size(); ++i) {
                    diff.values[i] -= ref.final_field.values[i];
                }
                errors[r * n_taus + j] = std::sqrt(l2_norm_sq(diff, M));
            }
        } catch (const NonConvergenceError&) {
            failed[r] = 1;
        }
    });

    std::size_t n_failures = 0;
    for (char f : failed) n_failures += static_cast<std::size_t>(f);
    check_failure_budget(n_failures, R);
    const std::size_t n_ok = R - n_failures;
    if (n_ok == 0) throw ExperimentError("strong_error_experiment: no successful realizations");

    ErrorTable table;
    table.rows.resize(n_taus);
    for (std::size_t j = 0; j < n_taus; ++j) {
        double acc = 0.0;
        for (std::size_t r = 0; r < R; ++r) {
            if (!failed[r]) {
                const double e = errors[r * n_taus + j];
                acc += e * e;
            }
        }
        table.rows[j] = ErrorTableRow{taus[j], std::sqrt(acc / static_cast<double>(n_ok)), n_ok,
                                      n_failures};
    }

    std::vector<double> fit_taus, fit_errors;
    for (const auto& row : table.rows) {
        if (row.rms_error > 0.0) {
            fit_taus.push_back(row.tau);
            fit_errors.push_back(row.rms_error);
        }
    }
    if (fit_taus.size() >= 2) {
        std::tie(table.fitted_order, table.fit_residual) = estimate_order(fit_taus, fit_errors);
    } else {
        table.fitted_order = std::numeric_limits<double>::quiet_NaN();
        table.fit_residual = std::numeric_limits<double>::quiet_NaN();
    }
    return table;
}

EnsembleRunResult run_ensemble(const ExperimentConfig& cfg, const ThetaPolicySpec& spec,
                               double tau, unsigned n_workers, bool keep_fields,
                               const std::vector<std::size_t>& snapshot_steps) {
    const Grid1D grid = build_grid(cfg.domain_a, cfg.domain_b, cfg.n_cells);
    const TriDiagMatrix M = assemble_mass(grid);
    const TriDiagMatrix A = assemble_stiffness(grid);
    const NoiseModel model =
        make_noise_model(cfg.noise_L, cfg.noise_nu, cfg.coeff_rule, grid, cfg.noise_coeffs);
    const ComplexField psi0 = initial_field(cfg, grid);
    const std::size_t n_steps = steps_for(cfg.T, tau);
    const std::size_t R = cfg.realizations;

    std::vector<std::vector<StepDiagnostics>> slots(R);
    std::vector<TrajectoryResult> results;
    if (keep_fields) results.resize(R);
    std::vector<char> failed(R, 0);

    parallel_for_index(R, n_workers, [&](std::size_t r) {
        const std::uint64_t seed = derive_stream_seed(cfg.base_seed, r);
        const WienerPath path = sample_path(model, seed, tau, n_steps);
        try {
            TrajectoryResult traj = run_trajectory(psi0, path, model, cfg.scheme_params(spec, tau),
                                                   grid, M, A, snapshot_steps);
            slots[r] = std::move(traj.steps);
            if (keep_fields) {
                traj.steps.clear();
                results[r] = std::move(traj);
            }
        } catch (const NonConvergenceError&) {
            failed[r] = 1;
        }
    });

    EnsembleRunResult out;
    for (std::size_t r = 0; r < R; ++r) {
        if (failed[r]) {
            ++out.n_failures;
        } else {
            out.diagnostics.push_back(std::move(slots[r]));
            if (keep_fields) out.trajectories.push_back(std::move(results[r]));
        }
    }
    check_failure_budget(out.n_failures, R);
    return out;
}

std::vector<InvariantRun> invariant_experiment(const ExperimentConfig& cfg, unsigned n_workers) {
    cfg.validate();
    std::vector<InvariantRun> runs;
    for (const auto& spec : cfg.theta_policies) {
        for (double tau : cfg.tau_list) {
            EnsembleRunResult ens = run_ensemble(cfg, spec, tau, n_workers);
            if (ens.diagnostics.empty()) {
                throw ExperimentError("invariant_experiment: no successful realizations");
            }
            InvariantRun run;
            run.theta_label = spec.label;
            run.tau = tau;
            run.theta_resolved = resolve_theta(spec.policy, tau);
            run.stats = ensemble_reduce(ens.diagnostics, ens.n_failures);
            runs.push_back(std::move(run));
        }
    }
    return runs;
}

void write_error_table_csv(const ErrorTable& table, std::ostream& os) {
    os << "tau,rms_error,realizations,failures\n";
    for (const auto& row : table.rows) {
        os << g17(row.tau) << ',' << g17(row.rms_error) << ',' << row.n_realizations << ','
           << row.n_failures << '\n';
    }
    os << "# fitted_order=" << g17(table.fitted_order) << " residual=" << g17(table.fit_residual)
       << '\n';
}

} // namespace snls
