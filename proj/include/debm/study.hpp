#pragma once

#include "debm/asymptotics.hpp"
#include "debm/efficiency.hpp"
#include "debm/models.hpp"

#include <cstdint>
#include <iosfwd>
#include <vector>

namespace debm {

/// ML, PL and RM covariances at one well-specified parameter point, the
/// bound coefficients, and the RM-versus-PL comparison.
struct Comparison {
    CovarianceReport ml;
    CovarianceReport pl;
    CovarianceReport rm;
    BoundReport bound;
    /// psd_order(Sigma_PL, Sigma_RM): spectrum of Sigma_RM - Sigma_PL.
    PsdOrdering rm_vs_pl;
    TheoremCheck theorem;
};

Comparison compare_estimators(const EnergyModel& model, const Vector& theta,
                              double tol = kDefaultPsdTol);

/// One random draw of the third-order Boltzmann machine study.
struct Figure2Row {
    int trial = 0;
    Vector theta;
    double logdet_ml = 0.0;
    double logdet_pl = 0.0;
    double logdet_rm = 0.0;
    double delta_pl_ml = 0.0; // logdet_pl - logdet_ml
    double delta_rm_ml = 0.0; // logdet_rm - logdet_ml
    double delta_rm_pl = 0.0; // logdet_rm - logdet_pl
    double log_l = 0.0;
    double log_h = 0.0;
    double bound_width = 0.0; // D_theta (log h - log l)

    /// max(1, |logdet_ml|, |logdet_pl|, |logdet_rm|); tolerances are relative to it.
    double scale() const;
    /// ML dominance and the log-determinant bound, each within tol * scale().
    bool invariants_hold(double tol = kDefaultPsdTol) const;
};

struct Figure2Draw {
    Figure2Row row;
    TheoremCheck theorem;
    PsdOrdering ml_vs_pl;
    PsdOrdering ml_vs_rm;
};

/// theta for trial t: six N(0, sigma^2) values from Rng(derive_seed(seed, t)).
Vector figure2_theta(std::uint64_t seed, int trial, double sigma);

Figure2Draw figure2_draw(int trial, const Vector& theta, double tol = kDefaultPsdTol);

struct Figure2Run {
    std::vector<Figure2Draw> draws; // in trial order
    int skipped = 0;                // draws with a singular H
    double positive_fraction = 0.0; // fraction with delta_rm_pl > 0
    double min_bound_width = 0.0;
    double max_bound_width = 0.0;
};

/// Runs `trials` draws in parallel; results are ordered by trial index.
Figure2Run run_figure2(int trials, std::uint64_t seed, double sigma = 1.0);

/// Header plus one row per draw, columns in Figure2Row order with theta
/// expanded to theta_0..theta_5.
void write_figure2_csv(std::ostream& out, const std::vector<Figure2Draw>& draws);

} // namespace debm
