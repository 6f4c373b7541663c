#include "debm/efficiency.hpp"

#include "debm/errors.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace debm {

namespace {

constexpr double kLogdetRankTol = 1e-12;

double logdet_checked(const Matrix& m, const char* name) {
    const Vector mu = sorted_eigenvalues(m);
    const double top = mu[0];
    const double bottom = mu[mu.size() - 1];
    if (!(top > 0.0) || !(bottom > kLogdetRankTol * top)) {
        std::ostringstream os;
        os << name << " is not positive definite: eigenvalue " << bottom << " against max " << top;
        throw SingularMatrixError(os.str(), bottom);
    }
    return mu.array().log().sum();
}

} // namespace

Vector sorted_eigenvalues(const Matrix& m) {
    Eigen::SelfAdjointEigenSolver<Matrix> eig(0.5 * (m + m.transpose()), Eigen::EigenvaluesOnly);
    return eig.eigenvalues().reverse();
}

BoundReport bound_quantities(const EnergyModel& model, const Vector& theta) {
    const ExactDistribution p = exact_distribution(model, theta);
    BoundReport b;
    b.q_min = std::numeric_limits<double>::infinity();
    b.q_max = -std::numeric_limits<double>::infinity();
    b.q_mid = -std::numeric_limits<double>::infinity();
    b.v_min = std::numeric_limits<double>::infinity();
    b.v_max = -std::numeric_limits<double>::infinity();
    for (const auto& x : enumerate_space(model.dimension())) {
        for (int d = 0; d < model.dimension(); ++d) {
            const double q = conditional(p, x, d);
            const double v = q * (1.0 - q);
            b.q_min = std::min(b.q_min, q);
            b.q_max = std::max(b.q_max, q);
            if (q <= 0.5) b.q_mid = std::max(b.q_mid, q);
            b.v_min = std::min(b.v_min, v);
            b.v_max = std::max(b.v_max, v);
        }
    }
    // Complementary conditionals guarantee some q <= 0.5.
    if (!(b.q_mid > 0.0)) throw std::logic_error("bound_quantities: no conditional <= 0.5");
    b.l = b.v_min * b.v_min / std::pow(b.q_max, 4);
    b.h = b.v_max * b.v_max / std::pow(b.q_min, 4);
    b.d_theta = model.param_count();
    b.logdet_gap_lower = b.d_theta * std::log(b.l);
    b.logdet_gap_upper = b.d_theta * std::log(b.h);
    return b;
}

std::string_view to_string(PsdRelation relation) {
    switch (relation) {
    case PsdRelation::a_below_b: return "A_below_B";
    case PsdRelation::b_below_a: return "B_below_A";
    case PsdRelation::equal: return "equal";
    case PsdRelation::incomparable: return "incomparable";
    }
    return "unknown";
}

PsdOrdering psd_order(const Matrix& a, const Matrix& b, double tol) {
    if (a.rows() != b.rows() || a.cols() != b.cols() || a.rows() != a.cols()) {
        throw DimensionError("psd_order: matrices must be square and of equal size");
    }
    for (const Matrix* m : {&a, &b}) {
        const double scale = std::max(1.0, m->cwiseAbs().maxCoeff());
        if ((*m - m->transpose()).cwiseAbs().maxCoeff() > tol * scale) {
            throw DomainError("psd_order: input matrix is not symmetric");
        }
    }
    PsdOrdering out;
    out.spectrum = sorted_eigenvalues(b - a);
    const double threshold = tol * out.spectrum.cwiseAbs().maxCoeff();
    const bool nonneg = out.spectrum.minCoeff() >= -threshold;
    const bool nonpos = out.spectrum.maxCoeff() <= threshold;
    if (nonneg && nonpos) {
        out.relation = PsdRelation::equal;
    } else if (nonneg) {
        out.relation = PsdRelation::a_below_b;
    } else if (nonpos) {
        out.relation = PsdRelation::b_below_a;
    } else {
        out.relation = PsdRelation::incomparable;
    }
    return out;
}

TheoremCheck check_theorem_bound(const Matrix& sigma_pl, const Matrix& sigma_rm,
                                 const BoundReport& bound, double tol) {
    if (sigma_pl.rows() != sigma_rm.rows() || sigma_pl.cols() != sigma_rm.cols()) {
        throw DimensionError("check_theorem_bound: matrix size mismatch");
    }
    TheoremCheck c;
    c.lower_spectrum = sorted_eigenvalues(sigma_rm - bound.l * sigma_pl);
    c.upper_spectrum = sorted_eigenvalues(bound.h * sigma_pl - sigma_rm);
    c.lower_min = c.lower_spectrum.minCoeff();
    c.upper_min = c.upper_spectrum.minCoeff();
    c.scale = std::max(c.lower_spectrum.cwiseAbs().maxCoeff(), c.upper_spectrum.cwiseAbs().maxCoeff());
    c.pass = c.lower_min >= -tol * c.scale && c.upper_min >= -tol * c.scale;
    return c;
}

double logdet_gap(const Matrix& sigma_a, const Matrix& sigma_b) {
    if (sigma_a.rows() != sigma_b.rows()) throw DimensionError("logdet_gap: size mismatch");
    return logdet_checked(sigma_b, "Sigma_B") - logdet_checked(sigma_a, "Sigma_A");
}

} // namespace debm
