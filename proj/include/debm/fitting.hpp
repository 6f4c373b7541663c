#pragma once

#include "debm/asymptotics.hpp"
#include "debm/estimators.hpp"
#include "debm/models.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace debm {

enum class InitKind { zeros, given, randomized };

/// Backtracking (Armijo) line search parameters.
struct LineSearch {
    double initial_step = 1.0;
    double shrink = 0.5;              // in (0, 1)
    double sufficient_increase = 1e-4; // in (0, 0.5]
    int max_shrinks = 60;
};

struct FitOptions {
    int max_iterations = 500;
    /// Convergence threshold on the infinity norm of the criterion gradient.
    double grad_tol = 1e-8;
    /// Extra randomized starts after the primary one. Unset means 0 for
    /// all-log estimators (concave for log-linear models) and 4 otherwise.
    std::optional<int> restarts;
    InitKind init = InitKind::zeros;
    Vector theta0;
    /// Seeds the randomized starts (and the primary start for
    /// InitKind::randomized).
    std::uint64_t seed = 0;
    /// Standard deviation of randomized starts.
    double init_scale = 0.5;
    LineSearch line_search;

    /// Throws DomainError for out-of-range settings.
    void validate() const;
};

struct FitResult {
    Vector theta_hat;
    double criterion_value = 0.0;
    double grad_inf_norm = 0.0;
    int iterations = 0;
    bool converged = false;
    /// 0 for the primary start, k for the k-th randomized restart.
    int restart_index = 0;
    /// Criterion value at the start and after every accepted step of the
    /// returned run.
    std::vector<double> history;
    /// Set for models whose parameters are not identifiable (RBMs); such
    /// fits should not be compared parameter-by-parameter.
    std::vector<std::string> warnings;
};

/// Maximizes the dataset criterion. Quasi-Newton (BFGS) ascent with a
/// backtracking line search; falls back to the gradient direction whenever
/// the quasi-Newton direction fails. Among all starts the highest criterion
/// value wins (earliest start on ties).
FitResult fit(const EstimatorSpec& spec, const EnergyModel& model, const Dataset& data,
              const FitOptions& options = {});

/// Same ascent applied to the population criterion under P*; locates theta_inf.
FitResult fit_population(const EstimatorSpec& spec, const EnergyModel& model,
                         const ProbabilityTable& p_star, const FitOptions& options = {});

/// Misspecified mode: theta_inf found by fit_population, then the sandwich
/// covariance at (theta_inf, P*). Throws FitError if the fit does not converge.
CovarianceReport misspecified_report(const EstimatorSpec& spec, const EnergyModel& model,
                                     const ProbabilityTable& p_star,
                                     const FitOptions& options = {});

struct MonteCarloTrial {
    int trial = 0;
    bool converged = false;
    /// False when the fit threw; theta_hat is then empty.
    bool ok = true;
    Vector theta_hat;
};

struct MonteCarloResult {
    /// Sample covariance of sqrt(N)(theta_hat - theta_true) over converged trials.
    Matrix covariance;
    Vector mean_deviation;
    int trials = 0;
    int converged = 0;
    int non_converged = 0;
    int failed = 0;
    std::vector<MonteCarloTrial> records;
};

/// Runs `trials` independent fits on fresh datasets of `cases` draws from
/// P_theta_true. Trial t samples with derive_seed(seed, t). Non-converged
/// trials are excluded from the covariance and counted; throwing trials are
/// counted as failed, and the run aborts with FitError when more than 10% fail.
/// Requires theta_true to be stationary for the population criterion.
MonteCarloResult monte_carlo_covariance(const EstimatorSpec& spec, const EnergyModel& model,
                                        const Vector& theta_true, std::size_t cases, int trials,
                                        std::uint64_t seed, const FitOptions& options = {});

} // namespace debm
