#pragma once

#include "debm/estimators.hpp"
#include "debm/models.hpp"

#include <string>

namespace debm {

/// Asymptotic covariance of sqrt(N)(theta_hat - theta_inf) for one estimator
/// at one parameter point: Sigma = H^-1 J H^-1.
struct CovarianceReport {
    std::string estimator;
    Vector theta_star;
    Matrix H;
    Matrix J;
    Matrix sigma;
    double logdet_sigma = 0.0;
    /// Eigenvalues of Sigma below 1e-14 * max that were left out of logdet.
    int rank_deficiency = 0;
    /// max |eig(H)| / min |eig(H)|.
    double h_condition = 0.0;
};

/// H = sum_x P*(x) d^2 m(x) / dtheta^2, by exact enumeration.
Matrix compute_H(const EstimatorSpec& spec, const EnergyModel& model, const Vector& theta_star,
                 const ProbabilityTable& p_star);

/// J = sum_x P*(x) dm(x)/dtheta dm(x)/dtheta^T, by exact enumeration.
Matrix compute_J(const EstimatorSpec& spec, const EnergyModel& model, const Vector& theta_star,
                 const ProbabilityTable& p_star);

struct SandwichResult {
    Matrix sigma;
    double logdet = 0.0;
    int rank_deficiency = 0;
    double h_condition = 0.0;
};

/// Sigma = H^-1 J H^-1 through a symmetric eigendecomposition of H. Throws
/// SingularMatrixError when min |eig(H)| <= 1e-10 * max |eig(H)|.
SandwichResult sandwich(const Matrix& H, const Matrix& J);

/// Report at an arbitrary (theta_star, P*) pair; theta_star is assumed to be
/// the maximizer of the population criterion under P*.
CovarianceReport covariance_report(const EstimatorSpec& spec, const EnergyModel& model,
                                   const Vector& theta_star, const ProbabilityTable& p_star);

/// Well-specified report: P* = P_theta_true and theta_inf = theta_true.
/// Throws DomainError if the population gradient at theta_true is not zero
/// (infinity norm >= 1e-8), which means theta_true is not theta_inf.
CovarianceReport well_specified_report(const EstimatorSpec& spec, const EnergyModel& model,
                                       const Vector& theta_true);

// Closed forms under the well-specified assumption, evaluated by direct
// enumeration over (x, d) with conditionals of P_theta. They share no code
// with the generic H/J path and serve as cross-checks of it.

/// H^PL = -E[(1/D) sum_d Cov_{P(x_d|x_-d)}(dE/dtheta)].
Matrix closed_form_H_PL(const EnergyModel& model, const Vector& theta);
/// J^PL = E[u u^T], u = (1/D) sum_d (E_{P(x_d|x_-d)}[dE/dtheta] - dE/dtheta)
/// (the outer product is of the averaged sums).
Matrix closed_form_J_PL(const EnergyModel& model, const Vector& theta);
/// H^RM = -(2/D) sum_d E[P(x_d|x_-d)^2 u_d u_d^T].
Matrix closed_form_H_RM(const EnergyModel& model, const Vector& theta);
/// J^RM = E[v v^T], v = (2/D) sum_d V_d u_d with V_d = P(x_d|x_-d)(1 - P(x_d|x_-d)).
Matrix closed_form_J_RM(const EnergyModel& model, const Vector& theta);

/// Fisher information Cov_{P_theta}(dE/dtheta).
Matrix fisher_information(const EnergyModel& model, const Vector& theta);

/// ||A - B||_F / ||B||_F (or ||A||_F when B is zero).
double relative_frobenius(const Matrix& a, const Matrix& b);

} // namespace debm
