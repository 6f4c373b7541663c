#include "debm/estimators.hpp"

#include "debm/errors.hpp"

#include <cmath>

namespace debm {

namespace {

constexpr double kSingularityGuard = 1e-300;

void check_gsm_domain(double r) {
    if (r < kSingularityGuard || 1.0 - r < kSingularityGuard) {
        throw DomainError("generalized score matching transfer is singular at R = " +
                          std::to_string(r));
    }
}

// Per-member energies (and optionally derivatives) for a neighborhood, plus
// the normalized ratio weights R(x', A).
struct RatioTable {
    Vector weights;
    std::vector<Vector> grads;
    std::vector<Matrix> hessians;
};

RatioTable ratio_table(const EnergyModel& model, const Vector& theta, const Neighborhood& a,
                       Order order) {
    const auto n = static_cast<Eigen::Index>(a.size());
    RatioTable t;
    Vector neg_energy(n);
    for (Eigen::Index k = 0; k < n; ++k) neg_energy[k] = -model.energy(theta, a[k]);
    const double top = neg_energy.maxCoeff();
    t.weights = (neg_energy.array() - top).exp().matrix();
    t.weights /= t.weights.sum();
    if (order >= Order::gradient) {
        t.grads.reserve(a.size());
        for (const auto& m : a) t.grads.push_back(model.energy_grad(theta, m));
    }
    if (order == Order::hessian && !model.log_linear()) {
        t.hessians.reserve(a.size());
        for (const auto& m : a) t.hessians.push_back(model.energy_hess(theta, m));
    }
    return t;
}

} // namespace

// ---- transfer functions ----------------------------------------------------

TransferFunction TransferFunction::log() { return {TransferKind::log, "log"}; }

TransferFunction TransferFunction::ratio_matching() {
    return {TransferKind::ratio_matching, "ratio_matching"};
}

TransferFunction TransferFunction::generalized_score_matching() {
    return {TransferKind::generalized_score_matching, "generalized_score_matching"};
}

TransferFunction TransferFunction::custom(std::string name, Fn value, Fn deriv1, Fn deriv2) {
    if (!value || !deriv1 || !deriv2) {
        throw DomainError("custom transfer '" + name + "' needs g, g' and g''");
    }
    TransferFunction t(TransferKind::custom, std::move(name));
    t.value_ = std::move(value);
    t.deriv1_ = std::move(deriv1);
    t.deriv2_ = std::move(deriv2);
    return t;
}

double TransferFunction::value(double r) const {
    switch (kind_) {
    case TransferKind::log: return std::log(r);
    case TransferKind::ratio_matching: return -(1.0 - r) * (1.0 - r);
    case TransferKind::generalized_score_matching: {
        check_gsm_domain(r);
        const double odds = r / (1.0 - r);
        return 2.0 * odds - 1.0 / (odds * odds);
    }
    case TransferKind::custom: return value_(r);
    }
    return 0.0;
}

double TransferFunction::deriv1(double r) const {
    switch (kind_) {
    case TransferKind::log: return 1.0 / r;
    case TransferKind::ratio_matching: return 2.0 * (1.0 - r);
    case TransferKind::generalized_score_matching: {
        check_gsm_domain(r);
        const double s = 1.0 - r;
        return 2.0 * s / (r * r * r) + 2.0 / (s * s);
    }
    case TransferKind::custom: return deriv1_(r);
    }
    return 0.0;
}

double TransferFunction::deriv2(double r) const {
    switch (kind_) {
    case TransferKind::log: return -1.0 / (r * r);
    case TransferKind::ratio_matching: return -2.0;
    case TransferKind::generalized_score_matching: {
        check_gsm_domain(r);
        const double s = 1.0 - r;
        const double r2 = r * r;
        return 4.0 / (s * s * s) - (6.0 - 4.0 * r) / (r2 * r2);
    }
    case TransferKind::custom: return deriv2_(r);
    }
    return 0.0;
}

// ---- estimator specs -------------------------------------------------------

EstimatorSpec::EstimatorSpec(std::string name, int dimension,
                             std::vector<TransferFunction> transfers, NeighborhoodFn neighborhoods)
    : name_(std::move(name)), dimension_(dimension), transfers_(std::move(transfers)),
      neighborhoods_(std::move(neighborhoods)) {
    check_dimension(dimension);
    if (transfers_.empty()) throw DomainError("estimator needs at least one component");
    if (!neighborhoods_) throw DomainError("estimator needs a neighborhood function");
}

namespace {

EstimatorSpec one_flip_estimator(std::string name, int dimension, TransferFunction g) {
    check_dimension(dimension);
    std::vector<TransferFunction> transfers(static_cast<std::size_t>(dimension), g);
    return EstimatorSpec(std::move(name), dimension, std::move(transfers),
                         [](int d, const Configuration& x) { return one_flip_neighborhood(x, d); });
}

} // namespace

EstimatorSpec EstimatorSpec::maximum_likelihood(int dimension) {
    auto everything = std::make_shared<const Neighborhood>(full_neighborhood(dimension));
    return EstimatorSpec("ml", dimension, {TransferFunction::log()},
                         [everything](int, const Configuration&) { return *everything; });
}

EstimatorSpec EstimatorSpec::pseudolikelihood(int dimension) {
    return one_flip_estimator("pl", dimension, TransferFunction::log());
}

EstimatorSpec EstimatorSpec::ratio_matching(int dimension) {
    return one_flip_estimator("rm", dimension, TransferFunction::ratio_matching());
}

EstimatorSpec EstimatorSpec::generalized_score_matching(int dimension) {
    return one_flip_estimator("gsm", dimension, TransferFunction::generalized_score_matching());
}

EstimatorSpec EstimatorSpec::from_selector(std::string_view selector, int dimension) {
    if (selector == "ml") return maximum_likelihood(dimension);
    if (selector == "pl") return pseudolikelihood(dimension);
    if (selector == "rm") return ratio_matching(dimension);
    if (selector == "gsm") return generalized_score_matching(dimension);
    throw InputError("unknown estimator '" + std::string(selector) +
                     "' (expected ml, pl, rm or gsm)");
}

const TransferFunction& EstimatorSpec::transfer(int component) const {
    if (component < 0 || component >= component_count()) {
        throw IndexError("component " + std::to_string(component) + " out of range");
    }
    return transfers_[static_cast<std::size_t>(component)];
}

Neighborhood EstimatorSpec::neighborhood(int component, const Configuration& x) const {
    if (component < 0 || component >= component_count()) {
        throw IndexError("component " + std::to_string(component) + " out of range");
    }
    if (x.dimension() != dimension_) throw DimensionError("estimator/configuration dimension mismatch");
    Neighborhood n = neighborhoods_(component, x);
    if (!n.contains(x)) {
        throw DomainError("neighborhood of component " + std::to_string(component) +
                          " does not contain its configuration " + std::to_string(x.index()));
    }
    return n;
}

bool EstimatorSpec::all_log_transfers() const {
    for (const auto& t : transfers_) {
        if (t.kind() != TransferKind::log) return false;
    }
    return true;
}

// ---- ratios ----------------------------------------------------------------

double ratio(const EnergyModel& model, const Vector& theta, const Configuration& x,
             const Neighborhood& a) {
    const std::size_t pos = a.position(x);
    return ratio_table(model, theta, a, Order::value).weights[static_cast<Eigen::Index>(pos)];
}

Vector ratio_expectation(const EnergyModel& model, const Vector& theta, const Configuration& x,
                         const Neighborhood& a,
                         const std::function<Vector(const Configuration&)>& f) {
    a.position(x);
    const auto t = ratio_table(model, theta, a, Order::value);
    Vector out;
    for (std::size_t k = 0; k < a.size(); ++k) {
        Vector term = t.weights[static_cast<Eigen::Index>(k)] * f(a[k]);
        if (k == 0) {
            out = std::move(term);
        } else {
            out += term;
        }
    }
    return out;
}

// ---- the estimating function -----------------------------------------------

CaseDerivatives m_derivatives(const EstimatorSpec& spec, const EnergyModel& model,
                              const Vector& theta, const Configuration& x, Order order) {
    if (spec.dimension() != model.dimension()) {
        throw DimensionError("estimator '" + spec.name() + "' and model disagree on dimension");
    }
    model.check_parameters(theta);
    const Eigen::Index p = model.param_count();
    const int components = spec.component_count();

    CaseDerivatives out;
    if (order >= Order::gradient) out.grad = Vector::Zero(p);
    if (order == Order::hessian) out.hess = Matrix::Zero(p, p);

    for (int c = 0; c < components; ++c) {
        const Neighborhood a = spec.neighborhood(c, x);
        const auto self = static_cast<Eigen::Index>(a.position(x));
        const RatioTable t = ratio_table(model, theta, a, order);
        const double r = t.weights[self];
        const TransferFunction& g = spec.transfer(c);
        out.value += g.value(r);
        if (order == Order::value) continue;

        // centered = -dE(x)/dtheta + E_R[dE/dtheta]
        Vector mean = Vector::Zero(p);
        for (std::size_t k = 0; k < a.size(); ++k) mean += t.weights[static_cast<Eigen::Index>(k)] * t.grads[k];
        const Vector centered = mean - t.grads[static_cast<std::size_t>(self)];
        const double g1r = g.deriv1(r) * r;
        out.grad += g1r * centered;
        if (order != Order::hessian) continue;

        const double line_one = g.deriv2(r) * r * r + g1r;
        out.hess.noalias() += line_one * centered * centered.transpose();
        if (!t.hessians.empty()) {
            Matrix mean_h = Matrix::Zero(p, p);
            for (std::size_t k = 0; k < a.size(); ++k) mean_h += t.weights[static_cast<Eigen::Index>(k)] * t.hessians[k];
            out.hess += g1r * (mean_h - t.hessians[static_cast<std::size_t>(self)]);
        }
        Matrix cov = Matrix::Zero(p, p);
        for (std::size_t k = 0; k < a.size(); ++k) {
            const Vector dev = t.grads[k] - mean;
            cov.noalias() += t.weights[static_cast<Eigen::Index>(k)] * dev * dev.transpose();
        }
        out.hess -= g1r * cov;
    }

    const double inv_c = 1.0 / components;
    out.value *= inv_c;
    if (order >= Order::gradient) out.grad *= inv_c;
    if (order == Order::hessian) {
        out.hess *= inv_c;
        out.hess = 0.5 * (out.hess + out.hess.transpose()).eval();
    }
    return out;
}

double m_value(const EstimatorSpec& spec, const EnergyModel& model, const Vector& theta,
               const Configuration& x) {
    return m_derivatives(spec, model, theta, x, Order::value).value;
}

Vector m_grad(const EstimatorSpec& spec, const EnergyModel& model, const Vector& theta,
              const Configuration& x) {
    return m_derivatives(spec, model, theta, x, Order::gradient).grad;
}

Matrix m_hess(const EstimatorSpec& spec, const EnergyModel& model, const Vector& theta,
              const Configuration& x) {
    return m_derivatives(spec, model, theta, x, Order::hessian).hess;
}

// ---- criteria --------------------------------------------------------------

CaseDerivatives population_derivatives(const EstimatorSpec& spec, const EnergyModel& model,
                                       const Vector& theta, const ProbabilityTable& p_star,
                                       Order order) {
    if (p_star.dimension != spec.dimension() || p_star.dimension != model.dimension()) {
        throw DimensionError("probability table dimension does not match the estimator/model");
    }
    p_star.validate();
    model.check_parameters(theta);
    const Eigen::Index p = model.param_count();

    CaseDerivatives out;
    if (order >= Order::gradient) out.grad = Vector::Zero(p);
    if (order == Order::hessian) out.hess = Matrix::Zero(p, p);
    for (const auto& x : enumerate_space(p_star.dimension)) {
        const double w = p_star(x);
        if (w == 0.0) continue;
        const CaseDerivatives m = m_derivatives(spec, model, theta, x, order);
        out.value += w * m.value;
        if (order >= Order::gradient) out.grad += w * m.grad;
        if (order == Order::hessian) out.hess += w * m.hess;
    }
    return out;
}

double population_criterion(const EstimatorSpec& spec, const EnergyModel& model,
                            const Vector& theta, const ProbabilityTable& p_star) {
    return population_derivatives(spec, model, theta, p_star, Order::value).value;
}

Vector population_grad(const EstimatorSpec& spec, const EnergyModel& model, const Vector& theta,
                       const ProbabilityTable& p_star) {
    return population_derivatives(spec, model, theta, p_star, Order::gradient).grad;
}

Matrix population_hess(const EstimatorSpec& spec, const EnergyModel& model, const Vector& theta,
                       const ProbabilityTable& p_star) {
    return population_derivatives(spec, model, theta, p_star, Order::hessian).hess;
}

double criterion(const EstimatorSpec& spec, const EnergyModel& model, const Vector& theta,
                 const Dataset& data) {
    return population_criterion(spec, model, theta, empirical_distribution(data));
}

Vector criterion_grad(const EstimatorSpec& spec, const EnergyModel& model, const Vector& theta,
                      const Dataset& data) {
    return population_grad(spec, model, theta, empirical_distribution(data));
}

Matrix criterion_hess(const EstimatorSpec& spec, const EnergyModel& model, const Vector& theta,
                      const Dataset& data) {
    return population_hess(spec, model, theta, empirical_distribution(data));
}

} // namespace debm
