#include "debm/fitting.hpp"

#include "debm/errors.hpp"
#include "debm/rng.hpp"

#include <atomic>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>
#include <thread>

namespace debm {

namespace {

using Objective = std::function<CaseDerivatives(const Vector&, Order)>;

constexpr double kStationarityTol = 1e-8;
constexpr double kEps = std::numeric_limits<double>::epsilon();

std::string describe(const Vector& theta) {
    std::ostringstream os;
    os.precision(17);
    os << "[";
    for (Eigen::Index i = 0; i < theta.size(); ++i) os << (i ? ", " : "") << theta[i];
    os << "]";
    return os.str();
}

struct Point {
    Vector theta;
    double value = 0.0;
    Vector grad;
};

// Evaluates value and gradient; nullopt when the criterion is undefined or
// non-finite at theta.
std::optional<Point> try_evaluate(const Objective& f, const Vector& theta) {
    try {
        CaseDerivatives d = f(theta, Order::gradient);
        if (!std::isfinite(d.value) || !d.grad.allFinite()) return std::nullopt;
        return Point{theta, d.value, std::move(d.grad)};
    } catch (const DomainError&) {
        return std::nullopt;
    }
}

// Step along `direction` satisfying the sufficient-increase condition. Near
// the optimum, where criterion differences are at rounding level, a step is
// also accepted if it does not lower the criterion beyond rounding and it
// reduces the gradient norm.
std::optional<Point> line_search(const Objective& f, const Point& from, const Vector& direction,
                                 const LineSearch& ls) {
    const double slope = from.grad.dot(direction);
    const double noise = 4.0 * kEps * (1.0 + std::abs(from.value));
    double step = ls.initial_step;
    for (int k = 0; k <= ls.max_shrinks; ++k, step *= ls.shrink) {
        const Vector trial = from.theta + step * direction;
        auto p = try_evaluate(f, trial);
        if (!p) continue;
        if (p->value >= from.value + ls.sufficient_increase * step * slope) return p;
        if (p->value >= from.value - noise && std::abs(p->value - from.value) <= noise &&
            p->grad.norm() < from.grad.norm()) {
            return p;
        }
    }
    return std::nullopt;
}

FitResult ascend(const Objective& f, const Vector& start, const FitOptions& options) {
    auto initial = try_evaluate(f, start);
    if (!initial) {
        throw FitError("criterion is not finite at the starting point " + describe(start));
    }
    Point here = std::move(*initial);
    const Eigen::Index n = start.size();
    Matrix inv_hess = Matrix::Identity(n, n);
    bool fresh_metric = true;

    FitResult r;
    r.history.push_back(here.value);
    while (true) {
        const double gnorm = here.grad.lpNorm<Eigen::Infinity>();
        if (gnorm <= options.grad_tol) {
            r.converged = true;
            break;
        }
        if (r.iterations >= options.max_iterations) break;

        Vector direction = inv_hess * here.grad;
        if (!(here.grad.dot(direction) > 0.0)) {
            inv_hess.setIdentity();
            fresh_metric = true;
            direction = here.grad;
        }
        auto next = line_search(f, here, direction, options.line_search);
        if (!next && !fresh_metric) {
            inv_hess.setIdentity();
            fresh_metric = true;
            direction = here.grad;
            next = line_search(f, here, direction, options.line_search);
        }
        if (!next) {
            throw FitError("line search failed at iteration " + std::to_string(r.iterations) +
                           ", theta = " + describe(here.theta) +
                           ", gradient infinity norm " + std::to_string(gnorm));
        }

        // BFGS on the negated criterion.
        const Vector s = next->theta - here.theta;
        const Vector y = here.grad - next->grad;
        const double sy = s.dot(y);
        if (sy > 1e-12 * s.norm() * y.norm()) {
            if (fresh_metric) inv_hess = (sy / y.dot(y)) * Matrix::Identity(n, n);
            const double rho = 1.0 / sy;
            const Matrix left = Matrix::Identity(n, n) - rho * s * y.transpose();
            inv_hess = left * inv_hess * left.transpose() + rho * s * s.transpose();
            fresh_metric = false;
        }

        here = std::move(*next);
        ++r.iterations;
        r.history.push_back(here.value);
    }
    r.theta_hat = here.theta;
    r.criterion_value = here.value;
    r.grad_inf_norm = here.grad.lpNorm<Eigen::Infinity>();
    return r;
}

FitResult maximize(const Objective& f, const EstimatorSpec& spec, const EnergyModel& model,
                   const FitOptions& options) {
    options.validate();
    const int p = model.param_count();
    const int restarts = options.restarts.value_or(spec.all_log_transfers() ? 0 : 4);

    auto random_start = [&](std::uint64_t stream) {
        Rng rng(derive_seed(options.seed, stream));
        Vector theta(p);
        for (int i = 0; i < p; ++i) theta[i] = options.init_scale * rng.normal();
        return theta;
    };

    std::optional<FitResult> best;
    std::optional<FitError> first_error;
    for (int k = 0; k <= restarts; ++k) {
        Vector start;
        if (k > 0 || options.init == InitKind::randomized) {
            start = random_start(static_cast<std::uint64_t>(k));
        } else if (options.init == InitKind::given) {
            model.check_parameters(options.theta0);
            start = options.theta0;
        } else {
            start = Vector::Zero(p);
        }
        try {
            FitResult r = ascend(f, start, options);
            r.restart_index = k;
            if (!best || r.criterion_value > best->criterion_value) best = std::move(r);
        } catch (const FitError& e) {
            if (!first_error) first_error = e;
        }
    }
    if (!best) throw *first_error;
    if (!model.log_linear()) {
        best->warnings.push_back(
            "RBM parameters are not identifiable: permuting filters leaves the criterion "
            "unchanged, so theta_hat is one of several equivalent optima");
    }
    return *best;
}

} // namespace

void FitOptions::validate() const {
    if (max_iterations < 1) throw DomainError("max_iterations must be positive");
    if (!(grad_tol > 0.0)) throw DomainError("grad_tol must be positive");
    if (restarts && *restarts < 0) throw DomainError("restarts must be non-negative");
    if (!(line_search.shrink > 0.0 && line_search.shrink < 1.0)) {
        throw DomainError("line-search shrink factor must lie in (0, 1)");
    }
    if (!(line_search.sufficient_increase > 0.0 && line_search.sufficient_increase <= 0.5)) {
        throw DomainError("sufficient-increase constant must lie in (0, 0.5]");
    }
    if (!(line_search.initial_step > 0.0)) throw DomainError("initial step must be positive");
    if (!(init_scale > 0.0)) throw DomainError("init_scale must be positive");
}

FitResult fit(const EstimatorSpec& spec, const EnergyModel& model, const Dataset& data,
              const FitOptions& options) {
    if (data.dimension() != model.dimension()) throw DimensionError("fit: dataset/model dimension mismatch");
    return fit_population(spec, model, empirical_distribution(data), options);
}

FitResult fit_population(const EstimatorSpec& spec, const EnergyModel& model,
                         const ProbabilityTable& p_star, const FitOptions& options) {
    p_star.validate();
    if (p_star.dimension != model.dimension() || spec.dimension() != model.dimension()) {
        throw DimensionError("fit: estimator/model/table dimension mismatch");
    }
    Objective f = [&](const Vector& theta, Order order) {
        return population_derivatives(spec, model, theta, p_star, order);
    };
    return maximize(f, spec, model, options);
}

CovarianceReport misspecified_report(const EstimatorSpec& spec, const EnergyModel& model,
                                     const ProbabilityTable& p_star, const FitOptions& options) {
    const FitResult r = fit_population(spec, model, p_star, options);
    if (!r.converged) {
        throw FitError("could not locate the population optimum (gradient norm " +
                       std::to_string(r.grad_inf_norm) + ")");
    }
    return covariance_report(spec, model, r.theta_hat, p_star);
}

MonteCarloResult monte_carlo_covariance(const EstimatorSpec& spec, const EnergyModel& model,
                                        const Vector& theta_true, std::size_t cases, int trials,
                                        std::uint64_t seed, const FitOptions& options) {
    if (trials < 2) throw DomainError("monte_carlo_covariance needs at least two trials");
    if (cases == 0) throw DomainError("monte_carlo_covariance needs a positive sample size");
    const ExactDistribution p = exact_distribution(model, theta_true);
    const double g = population_grad(spec, model, theta_true, p).lpNorm<Eigen::Infinity>();
    if (!(g < kStationarityTol)) {
        throw DomainError("theta_true is not stationary for '" + spec.name() +
                          "' (gradient infinity norm " + std::to_string(g) + ")");
    }

    MonteCarloResult out;
    out.trials = trials;
    out.records.resize(static_cast<std::size_t>(trials));

    std::atomic<int> next{0};
    auto worker = [&] {
        for (int t = next++; t < trials; t = next++) {
            const std::uint64_t trial_seed = derive_seed(seed, static_cast<std::uint64_t>(t));
            MonteCarloTrial& rec = out.records[static_cast<std::size_t>(t)];
            rec.trial = t;
            try {
                const Dataset data = sample_dataset(p, cases, trial_seed);
                FitOptions opts = options;
                opts.seed = derive_seed(trial_seed, 1);
                FitResult r = fit(spec, model, data, opts);
                rec.converged = r.converged;
                rec.theta_hat = std::move(r.theta_hat);
            } catch (const Error&) {
                rec.ok = false;
            }
        }
    };
    const unsigned workers = std::max(1U, std::min<unsigned>(std::thread::hardware_concurrency(),
                                                             static_cast<unsigned>(trials)));
    {
        std::vector<std::jthread> pool;
        for (unsigned w = 1; w < workers; ++w) pool.emplace_back(worker);
        worker();
    }

    // Ordered reduction by trial index.
    const double root_n = std::sqrt(static_cast<double>(cases));
    std::vector<Vector> deviations;
    for (const auto& rec : out.records) {
        if (!rec.ok) {
            ++out.failed;
        } else if (!rec.converged) {
            ++out.non_converged;
        } else {
            deviations.push_back(root_n * (rec.theta_hat - theta_true));
        }
    }
    out.converged = static_cast<int>(deviations.size());
    if (out.failed * 10 > trials) {
        throw FitError(std::to_string(out.failed) + " of " + std::to_string(trials) +
                       " Monte Carlo fits failed");
    }
    if (deviations.size() < 2) throw FitError("fewer than two converged Monte Carlo trials");

    const Eigen::Index n = model.param_count();
    out.mean_deviation = Vector::Zero(n);
    for (const auto& z : deviations) out.mean_deviation += z;
    out.mean_deviation /= static_cast<double>(deviations.size());
    out.covariance = Matrix::Zero(n, n);
    for (const auto& z : deviations) {
        const Vector c = z - out.mean_deviation;
        out.covariance.noalias() += c * c.transpose();
    }
    out.covariance /= static_cast<double>(deviations.size() - 1);
    return out;
}

} // namespace debm
