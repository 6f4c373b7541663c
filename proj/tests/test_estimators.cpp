#include "debm/errors.hpp"
#include "debm/estimators.hpp"

#include "doctest.h"
#include "oracles.hpp"

#include <cmath>

using namespace debm;

namespace {

const std::vector<std::string> kPresets = {"ml", "pl", "rm", "gsm"};

std::vector<EnergyModel> test_models() {
    return {EnergyModel::third_order_bm(), EnergyModel::binary_mrf(3), EnergyModel::binary_rbm(3, 2)};
}

// Unreduced ratio matching criterion written directly from its definition:
// -(1/ND) sum_n sum_d sum_xi (P_N(X_d = xi | x_-d) - P_theta(X_d = xi | x_-d))^2.
double unreduced_rm(const EnergyModel& model, const Vector& theta, const Dataset& data) {
    const Vector p = oracle::brute_probabilities(model, theta);
    const auto counts = state_counts(data);
    const int dim = model.dimension();
    double total = 0.0;
    for (const auto& x : data.cases()) {
        for (int d = 0; d < dim; ++d) {
            const auto y = flip(x, d);
            const double n_x = static_cast<double>(counts[x.index()]);
            const double n_y = static_cast<double>(counts[y.index()]);
            const double emp_x = n_x / (n_x + n_y);
            const double mod_x = oracle::brute_conditional(p, x, d);
            total += std::pow(emp_x - mod_x, 2) + std::pow((1 - emp_x) - (1 - mod_x), 2);
        }
    }
    return -total / (static_cast<double>(data.size()) * dim);
}

} // namespace

TEST_CASE("transfer functions and their derivatives") {
    const auto gsm = TransferFunction::generalized_score_matching();
    const auto rm = TransferFunction::ratio_matching();
    const auto lg = TransferFunction::log();
    for (double r : {0.05, 0.2, 0.5, 0.7, 0.95}) {
        const double t = r / (1 - r);
        CHECK(gsm.value(r) == doctest::Approx(2 * t - 1 / (t * t)));
        CHECK(rm.value(r) == doctest::Approx(-(1 - r) * (1 - r)));
        CHECK(lg.value(r) == doctest::Approx(std::log(r)));
        for (const auto* g : {&gsm, &rm, &lg}) {
            const double h = 1e-6;
            CHECK(g->deriv1(r) == doctest::Approx((g->value(r + h) - g->value(r - h)) / (2 * h)).epsilon(1e-6));
            CHECK(g->deriv2(r) == doctest::Approx((g->deriv1(r + h) - g->deriv1(r - h)) / (2 * h)).epsilon(1e-6));
        }
        // R g'(R) = (1-R) g'(1-R): the per-pair population gradient vanishes.
        CHECK(r * gsm.deriv1(r) == doctest::Approx((1 - r) * gsm.deriv1(1 - r)));
        CHECK(r * rm.deriv1(r) == doctest::Approx((1 - r) * rm.deriv1(1 - r)));
    }
    CHECK_THROWS_AS(gsm.value(0.0), DomainError);
    CHECK_THROWS_AS(gsm.deriv1(1.0), DomainError);
    CHECK_THROWS_AS(TransferFunction::custom("bad", nullptr, nullptr, nullptr), DomainError);
}

TEST_CASE("estimator presets") {
    CHECK(EstimatorSpec::maximum_likelihood(3).component_count() == 1);
    CHECK(EstimatorSpec::pseudolikelihood(3).component_count() == 3);
    CHECK(EstimatorSpec::pseudolikelihood(3).all_log_transfers());
    CHECK_FALSE(EstimatorSpec::ratio_matching(3).all_log_transfers());
    CHECK(EstimatorSpec::from_selector("gsm", 4).name() == "gsm");
    CHECK_THROWS_AS(EstimatorSpec::from_selector("cd", 3), InputError);
    CHECK_THROWS_AS(EstimatorSpec::pseudolikelihood(3).transfer(3), IndexError);

    const Configuration x(3, 5);
    const auto nb = EstimatorSpec::pseudolikelihood(3).neighborhood(2, x);
    CHECK(nb.size() == 2);
    CHECK(nb.contains(flip(x, 2)));
    CHECK(EstimatorSpec::maximum_likelihood(3).neighborhood(0, x).size() == 8);

    const EstimatorSpec broken("broken", 3, {TransferFunction::log()},
                               [](int, const Configuration& y) { return Neighborhood({flip(y, 0)}); });
    CHECK_THROWS_AS(broken.neighborhood(0, x), DomainError);
    const auto model = EnergyModel::third_order_bm();
    CHECK_THROWS_AS(m_value(broken, model, Vector::Zero(6), x), DomainError);
    CHECK_THROWS_AS(m_value(EstimatorSpec::pseudolikelihood(2), model, Vector::Zero(6), x), DimensionError);
}

TEST_CASE("ratios against brute force") {
    Rng rng(21);
    for (const auto& model : test_models()) {
        const Vector theta = oracle::normal_vector(rng, model.param_count());
        const Vector p = oracle::brute_probabilities(model, theta);
        const auto full = full_neighborhood(model.dimension());
        for (const auto& x : enumerate_space(model.dimension())) {
            CHECK(ratio(model, theta, x, full) == doctest::Approx(p[x.index()]));
            for (int d = 0; d < model.dimension(); ++d) {
                const auto nb = one_flip_neighborhood(x, d);
                CHECK(ratio(model, theta, x, nb) == doctest::Approx(oracle::brute_conditional(p, x, d)));
                const Vector e = ratio_expectation(model, theta, x, nb, [&](const Configuration& y) {
                    return Vector::Constant(1, static_cast<double>(y.bit(d)));
                });
                const double p_one = x.bit(d) ? oracle::brute_conditional(p, x, d)
                                              : 1.0 - oracle::brute_conditional(p, x, d);
                CHECK(e[0] == doctest::Approx(p_one));
            }
        }
        CHECK_THROWS_AS(ratio(model, theta, Configuration(3, 0), one_flip_neighborhood(Configuration(3, 7), 0)),
                        DomainError);
    }
}

TEST_CASE("estimating functions against conditional oracles") {
    Rng rng(22);
    for (const auto& model : test_models()) {
        const int dim = model.dimension();
        const Vector theta = oracle::normal_vector(rng, model.param_count());
        const Vector p = oracle::brute_probabilities(model, theta);
        for (const auto& x : enumerate_space(dim)) {
            double pl = 0.0, rm = 0.0, gsm = 0.0;
            for (int d = 0; d < dim; ++d) {
                const double c = oracle::brute_conditional(p, x, d);
                pl += std::log(c);
                rm -= (1 - c) * (1 - c);
                gsm += 2 * c / (1 - c) - std::pow((1 - c) / c, 2);
            }
            CHECK(m_value(EstimatorSpec::maximum_likelihood(dim), model, theta, x) ==
                  doctest::Approx(std::log(p[x.index()])));
            CHECK(m_value(EstimatorSpec::pseudolikelihood(dim), model, theta, x) == doctest::Approx(pl / dim));
            CHECK(m_value(EstimatorSpec::ratio_matching(dim), model, theta, x) == doctest::Approx(rm / dim));
            CHECK(m_value(EstimatorSpec::generalized_score_matching(dim), model, theta, x) ==
                  doctest::Approx(gsm / dim));
        }
    }
}

TEST_CASE("estimating functions are invariant to an energy offset") {
    Rng rng(23);
    for (const auto& model : test_models()) {
        const auto shifted = model.with_offset(-57.5);
        const Vector theta = oracle::normal_vector(rng, model.param_count());
        for (const auto& name : kPresets) {
            const auto spec = EstimatorSpec::from_selector(name, model.dimension());
            for (const auto& x : enumerate_space(model.dimension())) {
                const auto a = m_derivatives(spec, model, theta, x, Order::hessian);
                const auto b = m_derivatives(spec, shifted, theta, x, Order::hessian);
                CHECK(a.value == doctest::Approx(b.value));
                CHECK(oracle::rel_err(a.grad, b.grad) < 1e-12);
                CHECK(oracle::rel_err(a.hess, b.hess) < 1e-12);
            }
        }
    }
}

TEST_CASE("derivatives match finite differences") {
    Rng rng(24);
    for (const auto& model : test_models()) {
        for (const auto& name : kPresets) {
            const auto spec = EstimatorSpec::from_selector(name, model.dimension());
            for (int rep = 0; rep < 3; ++rep) {
                const Vector theta = oracle::normal_vector(rng, model.param_count());
                for (const auto& x : enumerate_space(model.dimension())) {
                    const auto m = m_derivatives(spec, model, theta, x, Order::hessian);
                    CHECK(m.value == doctest::Approx(m_value(spec, model, theta, x)));
                    const Vector g_fd =
                        oracle::fd_grad([&](const Vector& t) { return m_value(spec, model, t, x); }, theta);
                    const Matrix h_fd = oracle::fd_jacobian(
                        [&](const Vector& t) { return m_grad(spec, model, t, x); }, theta);
                    CHECK(oracle::rel_err(m.grad, g_fd) < 1e-6);
                    CHECK(oracle::rel_err(m.hess, h_fd) < 1e-6);
                    CHECK((m.hess - m.hess.transpose()).cwiseAbs().maxCoeff() == 0.0);
                }
            }
        }
    }
}

TEST_CASE("log-linear models: the energy Hessian term vanishes") {
    // For a log-linear model and the log transfer, g''R^2 + g'R = 0, so the
    // Hessian is minus the ratio covariance of the energy gradient.
    Rng rng(25);
    const auto model = EnergyModel::binary_mrf(3);
    const auto pl = EstimatorSpec::pseudolikelihood(3);
    const Vector theta = oracle::normal_vector(rng, model.param_count());
    for (const auto& x : enumerate_space(3)) {
        Matrix expected = Matrix::Zero(6, 6);
        for (int d = 0; d < 3; ++d) {
            const auto nb = one_flip_neighborhood(x, d);
            const double r = ratio(model, theta, x, nb);
            const Vector diff = model.energy_grad(theta, x) - model.energy_grad(theta, flip(x, d));
            expected -= r * (1 - r) * diff * diff.transpose();
        }
        CHECK(oracle::rel_err(m_hess(pl, model, theta, x), expected / 3.0) < 1e-12);
    }
}

TEST_CASE("dataset criterion is the case average") {
    Rng rng(26);
    const auto model = EnergyModel::third_order_bm();
    const Vector theta = oracle::normal_vector(rng, 6);
    const Dataset data = sample_dataset(model, theta, 257, 3);
    for (const auto& name : kPresets) {
        const auto spec = EstimatorSpec::from_selector(name, 3);
        double avg = 0.0;
        for (const auto& x : data.cases()) avg += m_value(spec, model, theta, x);
        avg /= static_cast<double>(data.size());
        CHECK(criterion(spec, model, theta, data) == doctest::Approx(avg));

        const Vector t2 = oracle::normal_vector(rng, 6);
        const Vector g_fd = oracle::fd_grad([&](const Vector& t) { return criterion(spec, model, t, data); }, t2);
        const Matrix h_fd =
            oracle::fd_jacobian([&](const Vector& t) { return criterion_grad(spec, model, t, data); }, t2);
        CHECK(oracle::rel_err(criterion_grad(spec, model, t2, data), g_fd) < 1e-6);
        CHECK(oracle::rel_err(criterion_hess(spec, model, t2, data), h_fd) < 1e-6);
    }
}

TEST_CASE("reduced ratio matching differs from the unreduced form by a constant") {
    Rng rng(27);
    const auto model = EnergyModel::third_order_bm();
    const auto rm = EstimatorSpec::ratio_matching(3);
    const Dataset data = sample_dataset(model, oracle::normal_vector(rng, 6), 300, 4);
    std::vector<double> offsets;
    for (int rep = 0; rep < 6; ++rep) {
        const Vector theta = oracle::normal_vector(rng, 6, 1.5);
        offsets.push_back(unreduced_rm(model, theta, data) - 2.0 * criterion(rm, model, theta, data));
    }
    for (double o : offsets) CHECK(o == doctest::Approx(offsets.front()).epsilon(1e-12));
}

TEST_CASE("well-specified population gradients vanish") {
    Rng rng(28);
    for (const auto& model : test_models()) {
        const Vector theta = oracle::normal_vector(rng, model.param_count());
        const auto p = exact_distribution(model, theta);
        for (const auto& name : kPresets) {
            const auto spec = EstimatorSpec::from_selector(name, model.dimension());
            CHECK(population_grad(spec, model, theta, p).lpNorm<Eigen::Infinity>() < 1e-12);
        }
    }
}

TEST_CASE("uniform distribution values") {
    const auto model = EnergyModel::binary_mrf(4);
    const Vector zero = Vector::Zero(model.param_count());
    for (const auto& x : enumerate_space(4)) {
        CHECK(m_value(EstimatorSpec::pseudolikelihood(4), model, zero, x) == doctest::Approx(std::log(0.5)));
        CHECK(m_value(EstimatorSpec::ratio_matching(4), model, zero, x) == doctest::Approx(-0.25));
        CHECK(m_value(EstimatorSpec::generalized_score_matching(4), model, zero, x) == doctest::Approx(1.0));
        CHECK(m_value(EstimatorSpec::maximum_likelihood(4), model, zero, x) == doctest::Approx(std::log(1.0 / 16)));
    }
}

TEST_CASE("custom transfer reproduces a preset") {
    const auto custom_rm = TransferFunction::custom(
        "rm_copy", [](double r) { return -(1 - r) * (1 - r); }, [](double r) { return 2 * (1 - r); },
        [](double) { return -2.0; });
    CHECK(custom_rm.kind() == TransferKind::custom);
    const EstimatorSpec spec("rm_copy", 3, std::vector<TransferFunction>(3, custom_rm),
                             [](int d, const Configuration& x) { return one_flip_neighborhood(x, d); });
    Rng rng(29);
    const auto model = EnergyModel::third_order_bm();
    const Vector theta = oracle::normal_vector(rng, 6);
    const auto rm = EstimatorSpec::ratio_matching(3);
    for (const auto& x : enumerate_space(3)) {
        const auto a = m_derivatives(spec, model, theta, x, Order::hessian);
        const auto b = m_derivatives(rm, model, theta, x, Order::hessian);
        CHECK(a.value == doctest::Approx(b.value));
        CHECK(oracle::rel_err(a.hess, b.hess) < 1e-14);
    }
}
