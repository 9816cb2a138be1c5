#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace snls {

/// Implicit step failed: Newton iterations exhausted or residual diverged.
/// Carries enough context to report which step of which realization died.
class NonConvergenceError : public std::runtime_error {
public:
    NonConvergenceError(std::string what, std::size_t step, int iterations, double residual)
        : std::runtime_error(std::move(what)),
          step_(step),
          iterations_(iterations),
          residual_(residual) {}

    std::size_t step() const { return step_; }
    int iterations() const { return iterations_; }
    double residual() const { return residual_; }

private:
    std::size_t step_;
    int iterations_;
    double residual_;
};

/// Config file could not be parsed or violates an invariant.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Ensemble-level failure (e.g. failed-realization budget exceeded).
class ExperimentError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace snls
