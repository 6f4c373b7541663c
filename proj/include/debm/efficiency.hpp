#pragma once

#include "debm/models.hpp"

#include <optional>
#include <string_view>

namespace debm {

/// Coefficients of the ratio-matching versus pseudolikelihood covariance
/// bound  l * Sigma_PL <= Sigma_RM <= h * Sigma_PL  (PSD order), computed
/// from all conditionals P(x_d | x_-d) of the true distribution.
struct BoundReport {
    double q_min = 0.0;
    double q_max = 0.0;
    /// Largest conditional that does not exceed 0.5.
    double q_mid = 0.0;
    double v_min = 0.0;
    double v_max = 0.0;
    /// V_min^2 / q_max^4 (= q_min^2 / q_max^2).
    double l = 0.0;
    /// V_max^2 / q_min^4 (= q_mid^2 (1 - q_mid)^2 / q_min^4).
    double h = 0.0;
    int d_theta = 0;
    double logdet_gap_lower = 0.0; // d_theta * log l
    double logdet_gap_upper = 0.0; // d_theta * log h
    /// logdet Sigma_RM - logdet Sigma_PL, when it has been computed.
    std::optional<double> observed_gap;
};

BoundReport bound_quantities(const EnergyModel& model, const Vector& theta);

enum class PsdRelation { a_below_b, b_below_a, equal, incomparable };

std::string_view to_string(PsdRelation relation);

struct PsdOrdering {
    PsdRelation relation = PsdRelation::equal;
    /// Eigenvalues of B - A, sorted descending.
    Vector spectrum;
};

inline constexpr double kDefaultPsdTol = 1e-7;

/// Classifies B - A by its spectrum with threshold tol * max |eigenvalue|.
/// Throws DomainError when either input is asymmetric beyond tol.
PsdOrdering psd_order(const Matrix& a, const Matrix& b, double tol = kDefaultPsdTol);

struct TheoremCheck {
    bool pass = false;
    /// Spectra (descending) of Sigma_RM - l Sigma_PL and h Sigma_PL - Sigma_RM.
    Vector lower_spectrum;
    Vector upper_spectrum;
    double lower_min = 0.0;
    double upper_min = 0.0;
    /// max |eigenvalue| across both differences.
    double scale = 0.0;
};

TheoremCheck check_theorem_bound(const Matrix& sigma_pl, const Matrix& sigma_rm,
                                 const BoundReport& bound, double tol = kDefaultPsdTol);

/// logdet Sigma_B - logdet Sigma_A. Both must be positive definite
/// (min eigenvalue > 1e-12 * max), else SingularMatrixError.
double logdet_gap(const Matrix& sigma_a, const Matrix& sigma_b);

/// Descending eigenvalues of a symmetric matrix.
Vector sorted_eigenvalues(const Matrix& m);

} // namespace debm
