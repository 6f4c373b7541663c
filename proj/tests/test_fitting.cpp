#include "debm/asymptotics.hpp"
#include "debm/errors.hpp"
#include "debm/fitting.hpp"

#include "doctest.h"
#include "oracles.hpp"

#include <cmath>
#include <limits>

using namespace debm;

namespace {

void check_monotone(const std::vector<double>& history) {
    const double eps = std::numeric_limits<double>::epsilon();
    for (std::size_t i = 1; i < history.size(); ++i) {
        CHECK(history[i] >= history[i - 1] - 4 * eps * (1 + std::abs(history[i - 1])));
    }
}

} // namespace

TEST_CASE("population fits recover theta_true") {
    Rng rng(51);
    const auto model = EnergyModel::third_order_bm();
    for (int rep = 0; rep < 3; ++rep) {
        const Vector theta = oracle::normal_vector(rng, 6);
        const auto p = exact_distribution(model, theta);
        for (const auto& name : {"ml", "pl", "rm", "gsm"}) {
            const auto r = fit_population(EstimatorSpec::from_selector(name, 3), model, p);
            CHECK(r.converged);
            CHECK((r.theta_hat - theta).lpNorm<Eigen::Infinity>() < 1e-6);
            CHECK(r.grad_inf_norm <= 1e-8);
            CHECK(r.history.size() == static_cast<std::size_t>(r.iterations) + 1);
            check_monotone(r.history);
        }
    }
}

TEST_CASE("MRF population fit from a given start") {
    Rng rng(52);
    const auto model = EnergyModel::binary_mrf(4);
    const Vector theta = oracle::normal_vector(rng, model.param_count(), 0.5);
    FitOptions opts;
    opts.init = InitKind::given;
    opts.theta0 = Vector::Constant(model.param_count(), 0.1);
    const auto r = fit_population(EstimatorSpec::pseudolikelihood(4), model, exact_distribution(model, theta), opts);
    CHECK(r.converged);
    CHECK(r.restart_index == 0);
    CHECK((r.theta_hat - theta).lpNorm<Eigen::Infinity>() < 1e-6);

    opts.theta0 = Vector::Zero(3);
    CHECK_THROWS_AS(fit_population(EstimatorSpec::pseudolikelihood(4), model, exact_distribution(model, theta), opts),
                    ParameterError);
}

TEST_CASE("sample-then-fit is consistent") {
    Rng rng(53);
    const auto model = EnergyModel::third_order_bm();
    const Vector theta = oracle::normal_vector(rng, 6);
    const Dataset data = sample_dataset(model, theta, 50000, 17);
    for (const auto& name : {"pl", "rm"}) {
        const auto r = fit(EstimatorSpec::from_selector(name, 3), model, data);
        CHECK(r.converged);
        CHECK((r.theta_hat - theta).lpNorm<Eigen::Infinity>() < 0.1);
        check_monotone(r.history);
    }
}

TEST_CASE("ratio matching from zeros with restarts") {
    Rng rng(54);
    const auto model = EnergyModel::third_order_bm();
    const Vector theta = oracle::normal_vector(rng, 6, 1.5);
    const Dataset data = sample_dataset(model, theta, 20000, 18);
    FitOptions opts;
    opts.seed = 99;
    const auto a = fit(EstimatorSpec::ratio_matching(3), model, data, opts);
    const auto b = fit(EstimatorSpec::ratio_matching(3), model, data, opts);
    CHECK(a.converged);
    CHECK(a.theta_hat == b.theta_hat);
    CHECK(a.restart_index == b.restart_index);
    opts.restarts = 0;
    const auto single = fit(EstimatorSpec::ratio_matching(3), model, data, opts);
    CHECK(a.criterion_value >= single.criterion_value - 1e-12);
}

TEST_CASE("RBM fits carry a non-identifiability warning") {
    Rng rng(55);
    const auto model = EnergyModel::binary_rbm(3, 1);
    const Vector theta = oracle::normal_vector(rng, 4);
    const Dataset data = sample_dataset(model, theta, 5000, 19);
    const auto r = fit(EstimatorSpec::pseudolikelihood(3), model, data);
    CHECK_FALSE(r.warnings.empty());
    CHECK(fit(EstimatorSpec::pseudolikelihood(3), EnergyModel::third_order_bm(), data).warnings.empty());
}

TEST_CASE("iteration cap reports non-convergence") {
    const auto model = EnergyModel::third_order_bm();
    Rng rng(56);
    const Dataset data = sample_dataset(model, oracle::normal_vector(rng, 6), 1000, 20);
    FitOptions opts;
    opts.max_iterations = 1;
    const auto r = fit(EstimatorSpec::pseudolikelihood(3), model, data, opts);
    CHECK_FALSE(r.converged);
    CHECK(r.iterations == 1);
}

TEST_CASE("fit option validation") {
    const auto model = EnergyModel::third_order_bm();
    const Dataset data(3, {Configuration(3, 0), Configuration(3, 5)});
    const auto pl = EstimatorSpec::pseudolikelihood(3);
    FitOptions bad;
    bad.max_iterations = 0;
    CHECK_THROWS_AS(fit(pl, model, data, bad), DomainError);
    bad = {};
    bad.grad_tol = 0.0;
    CHECK_THROWS_AS(fit(pl, model, data, bad), DomainError);
    bad = {};
    bad.line_search.shrink = 1.0;
    CHECK_THROWS_AS(fit(pl, model, data, bad), DomainError);
    bad = {};
    bad.restarts = -1;
    CHECK_THROWS_AS(fit(pl, model, data, bad), DomainError);
    CHECK_THROWS_AS(fit(pl, EnergyModel::binary_mrf(2), data), DimensionError);
}

TEST_CASE("Monte Carlo covariance approaches the sandwich") {
    const auto model = EnergyModel::third_order_bm();
    const Vector theta = Vector::Constant(6, 0.3);
    const auto ml = EstimatorSpec::maximum_likelihood(3);
    const auto mc = monte_carlo_covariance(ml, model, theta, 2000, 2000, 61);
    CHECK(mc.converged + mc.non_converged + mc.failed == 2000);
    CHECK(mc.failed == 0);
    CHECK(mc.records.size() == 2000);
    const Matrix fisher_inv = fisher_information(model, theta).inverse();
    CHECK(relative_frobenius(mc.covariance, fisher_inv) < 0.2);
    CHECK(mc.mean_deviation.lpNorm<Eigen::Infinity>() < 0.5);

    // Empirical efficiency ordering follows the analytic one.
    const auto pl = EstimatorSpec::pseudolikelihood(3);
    const auto mc_pl = monte_carlo_covariance(pl, model, theta, 2000, 2000, 61);
    const double ld_ml = std::log(mc.covariance.determinant());
    const double ld_pl = std::log(mc_pl.covariance.determinant());
    const auto a_ml = well_specified_report(ml, model, theta);
    const auto a_pl = well_specified_report(pl, model, theta);
    CHECK(a_ml.logdet_sigma < a_pl.logdet_sigma);
    CHECK(ld_ml < ld_pl);
}

TEST_CASE("Monte Carlo covariance is stable in N and reproducible") {
    const auto model = EnergyModel::third_order_bm();
    const Vector zero = Vector::Zero(6);
    const auto pl = EstimatorSpec::pseudolikelihood(3);
    const auto small = monte_carlo_covariance(pl, model, zero, 1000, 4000, 62);
    const auto large = monte_carlo_covariance(pl, model, zero, 2000, 4000, 63);
    CHECK(relative_frobenius(small.covariance, large.covariance) < 0.15);

    const auto a = monte_carlo_covariance(pl, model, zero, 300, 50, 64);
    const auto b = monte_carlo_covariance(pl, model, zero, 300, 50, 64);
    CHECK(a.covariance == b.covariance);
}

TEST_CASE("Monte Carlo argument checks") {
    const auto model = EnergyModel::third_order_bm();
    const auto pl = EstimatorSpec::pseudolikelihood(3);
    CHECK_THROWS_AS(monte_carlo_covariance(pl, model, Vector::Zero(6), 100, 1, 1), DomainError);
    CHECK_THROWS_AS(monte_carlo_covariance(pl, model, Vector::Zero(6), 0, 10, 1), DomainError);
    const auto linear = TransferFunction::custom(
        "linear", [](double r) { return r; }, [](double) { return 1.0; }, [](double) { return 0.0; });
    const EstimatorSpec inconsistent("linear", 3, std::vector<TransferFunction>(3, linear),
                                     [](int d, const Configuration& x) { return one_flip_neighborhood(x, d); });
    CHECK_THROWS_AS(monte_carlo_covariance(inconsistent, model, Vector::Constant(6, 0.5), 100, 10, 1),
                    DomainError);
}
