#pragma once

#include "debm/configspace.hpp"
#include "debm/models.hpp"

#include <functional>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace debm {

enum class TransferKind { log, ratio_matching, generalized_score_matching, custom };

/// Scalar map g applied to a probability ratio, with analytic g' and g''.
///
///   log:                        g(R) = log R
///   ratio_matching:             g(R) = -(1 - R)^2
///   generalized_score_matching: g(R) = 2 t - t^-2 with t = R / (1 - R)
///
/// The score-matching transfer is singular at R = 0 and R = 1; evaluating it
/// within 1e-300 of either end throws DomainError instead of returning Inf.
class TransferFunction {
public:
    using Fn = std::function<double(double)>;

    static TransferFunction log();
    static TransferFunction ratio_matching();
    static TransferFunction generalized_score_matching();
    /// All three maps are required; there is no numerical differentiation.
    static TransferFunction custom(std::string name, Fn value, Fn deriv1, Fn deriv2);

    TransferKind kind() const noexcept { return kind_; }
    const std::string& name() const noexcept { return name_; }

    double value(double r) const;
    double deriv1(double r) const;
    double deriv2(double r) const;

private:
    TransferFunction(TransferKind kind, std::string name) : kind_(kind), name_(std::move(name)) {}

    TransferKind kind_;
    std::string name_;
    Fn value_, deriv1_, deriv2_;
};

/// The (C, g_c, N_c) triple defining m_theta(x) = (1/C) sum_c g_c(R(x, N_c(x))).
class EstimatorSpec {
public:
    using NeighborhoodFn = std::function<Neighborhood(int component, const Configuration& x)>;

    /// One transfer function per component; the component count is
    /// transfers.size().
    EstimatorSpec(std::string name, int dimension, std::vector<TransferFunction> transfers,
                  NeighborhoodFn neighborhoods);

    /// C = 1, log transfer, N(x) = X.
    static EstimatorSpec maximum_likelihood(int dimension);
    /// C = D, log transfer, N_d(x) = {x, flip(x, d)}.
    static EstimatorSpec pseudolikelihood(int dimension);
    /// C = D, -(1-R)^2 transfer, N_d(x) = {x, flip(x, d)}.
    static EstimatorSpec ratio_matching(int dimension);
    /// C = D, score-matching transfer, N_d(x) = {x, flip(x, d)}.
    static EstimatorSpec generalized_score_matching(int dimension);
    /// "ml", "pl", "rm" or "gsm".
    static EstimatorSpec from_selector(std::string_view selector, int dimension);

    const std::string& name() const noexcept { return name_; }
    int dimension() const noexcept { return dimension_; }
    int component_count() const noexcept { return static_cast<int>(transfers_.size()); }
    const TransferFunction& transfer(int component) const;

    /// N_c(x). Throws DomainError if the result does not contain x.
    Neighborhood neighborhood(int component, const Configuration& x) const;

    /// True when every component uses the log transfer (ML, PL and other
    /// composite likelihoods), whose criteria are concave for log-linear models.
    bool all_log_transfers() const;

private:
    std::string name_;
    int dimension_;
    std::vector<TransferFunction> transfers_;
    NeighborhoodFn neighborhoods_;
};

/// R_theta(x, A) = Q(x) / sum_{x' in A} Q(x'), computed in log space.
/// Throws DomainError when x is not in A.
double ratio(const EnergyModel& model, const Vector& theta, const Configuration& x,
             const Neighborhood& a);

/// sum_{x' in A} R(x', A) f(x'), the expectation under the ratio distribution on A.
Vector ratio_expectation(const EnergyModel& model, const Vector& theta, const Configuration& x,
                         const Neighborhood& a,
                         const std::function<Vector(const Configuration&)>& f);

/// Derivative orders requested from a single evaluation pass.
enum class Order { value = 0, gradient = 1, hessian = 2 };

/// m_theta(x) and, depending on the order, its gradient and Hessian in theta.
struct CaseDerivatives {
    double value = 0.0;
    Vector grad;
    Matrix hess;
};

CaseDerivatives m_derivatives(const EstimatorSpec& spec, const EnergyModel& model,
                              const Vector& theta, const Configuration& x, Order order);

double m_value(const EstimatorSpec& spec, const EnergyModel& model, const Vector& theta,
               const Configuration& x);
Vector m_grad(const EstimatorSpec& spec, const EnergyModel& model, const Vector& theta,
              const Configuration& x);
Matrix m_hess(const EstimatorSpec& spec, const EnergyModel& model, const Vector& theta,
              const Configuration& x);

/// Weighted sum over states: sum_x P(x) m_theta(x) and derivatives. States
/// with zero weight are skipped. The table must sum to one within 1e-9.
CaseDerivatives population_derivatives(const EstimatorSpec& spec, const EnergyModel& model,
                                       const Vector& theta, const ProbabilityTable& p_star,
                                       Order order);

double population_criterion(const EstimatorSpec& spec, const EnergyModel& model,
                            const Vector& theta, const ProbabilityTable& p_star);
Vector population_grad(const EstimatorSpec& spec, const EnergyModel& model, const Vector& theta,
                       const ProbabilityTable& p_star);
Matrix population_hess(const EstimatorSpec& spec, const EnergyModel& model, const Vector& theta,
                       const ProbabilityTable& p_star);

// The dataset criterion (1/N) sum_n m(x_n). Cases are grouped by state, so
// the result depends only on the state counts.
double criterion(const EstimatorSpec& spec, const EnergyModel& model, const Vector& theta,
                 const Dataset& data);
Vector criterion_grad(const EstimatorSpec& spec, const EnergyModel& model, const Vector& theta,
                      const Dataset& data);
Matrix criterion_hess(const EstimatorSpec& spec, const EnergyModel& model, const Vector& theta,
                      const Dataset& data);

} // namespace debm
