#include "debm/asymptotics.hpp"

#include "debm/errors.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <sstream>

namespace debm {

namespace {

constexpr double kSymmetryTol = 1e-10;
constexpr double kSingularTol = 1e-10;
constexpr double kRankTol = 1e-14;
constexpr double kStationarityTol = 1e-8;

void check_symmetric(const Matrix& m, const char* what) {
    const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
    const double asym = (m - m.transpose()).cwiseAbs().maxCoeff();
    if (asym > kSymmetryTol * scale) {
        std::ostringstream os;
        os << what << " is not symmetric (max asymmetry " << asym << ")";
        throw DomainError(os.str());
    }
}

// Conditional mean/covariance of the energy gradient over {x, flip(x, d)}
// under P(x_d | x_-d).
struct ConditionalMoments {
    double p_self;
    Vector centered; // E_cond[dE] - dE(x)
    Matrix cov;
};

ConditionalMoments conditional_moments(const EnergyModel& model, const Vector& theta,
                                       const ExactDistribution& p, const Configuration& x, int d) {
    const Configuration other = flip(x, d);
    const double c = conditional(p, x, d);
    const Vector gx = model.energy_grad(theta, x);
    const Vector go = model.energy_grad(theta, other);
    const Vector mean = c * gx + (1.0 - c) * go;
    const Vector dx = gx - mean;
    const Vector dother = go - mean;
    return {c, mean - gx, c * dx * dx.transpose() + (1.0 - c) * dother * dother.transpose()};
}

} // namespace

Matrix compute_H(const EstimatorSpec& spec, const EnergyModel& model, const Vector& theta_star,
                 const ProbabilityTable& p_star) {
    Matrix h = population_hess(spec, model, theta_star, p_star);
    check_symmetric(h, "H");
    return 0.5 * (h + h.transpose());
}

Matrix compute_J(const EstimatorSpec& spec, const EnergyModel& model, const Vector& theta_star,
                 const ProbabilityTable& p_star) {
    if (p_star.dimension != model.dimension()) throw DimensionError("compute_J: dimension mismatch");
    p_star.validate();
    const Eigen::Index n = model.param_count();
    Matrix j = Matrix::Zero(n, n);
    for (const auto& x : enumerate_space(model.dimension())) {
        const double w = p_star(x);
        if (w == 0.0) continue;
        const Vector g = m_grad(spec, model, theta_star, x);
        j.noalias() += w * g * g.transpose();
    }
    return j;
}

SandwichResult sandwich(const Matrix& H, const Matrix& J) {
    if (H.rows() != H.cols() || J.rows() != J.cols() || H.rows() != J.rows()) {
        throw DimensionError("sandwich: H and J must be square and of equal size");
    }
    check_symmetric(H, "H");
    check_symmetric(J, "J");
    Eigen::SelfAdjointEigenSolver<Matrix> eig_h(0.5 * (H + H.transpose()));
    const Vector& lambda = eig_h.eigenvalues();
    const double max_abs = lambda.cwiseAbs().maxCoeff();
    Eigen::Index worst = 0;
    const double min_abs = lambda.cwiseAbs().minCoeff(&worst);
    if (!(min_abs > kSingularTol * max_abs)) {
        std::ostringstream os;
        os << "H is singular: eigenvalue " << lambda[worst] << " against max |eigenvalue| "
           << max_abs << " (the model is not identifiable at this parameter)";
        throw SingularMatrixError(os.str(), lambda[worst]);
    }

    const Matrix& u = eig_h.eigenvectors();
    const Matrix h_inv = u * lambda.cwiseInverse().asDiagonal() * u.transpose();
    SandwichResult out;
    out.sigma = h_inv * J * h_inv;
    out.sigma = 0.5 * (out.sigma + out.sigma.transpose()).eval();
    out.h_condition = max_abs / min_abs;

    Eigen::SelfAdjointEigenSolver<Matrix> eig_s(out.sigma, Eigen::EigenvaluesOnly);
    const Vector& mu = eig_s.eigenvalues();
    const double top = mu.maxCoeff();
    for (Eigen::Index i = 0; i < mu.size(); ++i) {
        if (mu[i] > kRankTol * top) {
            out.logdet += std::log(mu[i]);
        } else {
            ++out.rank_deficiency;
        }
    }
    return out;
}

CovarianceReport covariance_report(const EstimatorSpec& spec, const EnergyModel& model,
                                   const Vector& theta_star, const ProbabilityTable& p_star) {
    CovarianceReport r;
    r.estimator = spec.name();
    r.theta_star = theta_star;
    r.H = compute_H(spec, model, theta_star, p_star);
    r.J = compute_J(spec, model, theta_star, p_star);
    SandwichResult s;
    try {
        s = sandwich(r.H, r.J);
    } catch (const SingularMatrixError& e) {
        throw SingularMatrixError("estimator '" + spec.name() + "': " + e.what(), e.eigenvalue());
    }
    r.sigma = std::move(s.sigma);
    r.logdet_sigma = s.logdet;
    r.rank_deficiency = s.rank_deficiency;
    r.h_condition = s.h_condition;
    return r;
}

CovarianceReport well_specified_report(const EstimatorSpec& spec, const EnergyModel& model,
                                       const Vector& theta_true) {
    const ExactDistribution p = exact_distribution(model, theta_true);
    const double g = population_grad(spec, model, theta_true, p).lpNorm<Eigen::Infinity>();
    if (!(g < kStationarityTol)) {
        std::ostringstream os;
        os << "population gradient of '" << spec.name() << "' at theta_true has infinity norm "
           << g << "; theta_true is not the population optimum";
        throw DomainError(os.str());
    }
    return covariance_report(spec, model, theta_true, p);
}

Matrix closed_form_H_PL(const EnergyModel& model, const Vector& theta) {
    const ExactDistribution p = exact_distribution(model, theta);
    const int dim = model.dimension();
    Matrix h = Matrix::Zero(model.param_count(), model.param_count());
    for (const auto& x : enumerate_space(dim)) {
        Matrix inner = Matrix::Zero(h.rows(), h.cols());
        for (int d = 0; d < dim; ++d) inner += conditional_moments(model, theta, p, x, d).cov;
        h -= p(x) * inner / dim;
    }
    return h;
}

Matrix closed_form_J_PL(const EnergyModel& model, const Vector& theta) {
    const ExactDistribution p = exact_distribution(model, theta);
    const int dim = model.dimension();
    Matrix j = Matrix::Zero(model.param_count(), model.param_count());
    for (const auto& x : enumerate_space(dim)) {
        Vector u = Vector::Zero(model.param_count());
        for (int d = 0; d < dim; ++d) u += conditional_moments(model, theta, p, x, d).centered;
        u /= dim;
        j += p(x) * u * u.transpose();
    }
    return j;
}

Matrix closed_form_H_RM(const EnergyModel& model, const Vector& theta) {
    const ExactDistribution p = exact_distribution(model, theta);
    const int dim = model.dimension();
    Matrix h = Matrix::Zero(model.param_count(), model.param_count());
    for (int d = 0; d < dim; ++d) {
        for (const auto& x : enumerate_space(dim)) {
            const auto m = conditional_moments(model, theta, p, x, d);
            h += p(x) * m.p_self * m.p_self * m.centered * m.centered.transpose();
        }
    }
    return -2.0 / dim * h;
}

Matrix closed_form_J_RM(const EnergyModel& model, const Vector& theta) {
    const ExactDistribution p = exact_distribution(model, theta);
    const int dim = model.dimension();
    Matrix j = Matrix::Zero(model.param_count(), model.param_count());
    for (const auto& x : enumerate_space(dim)) {
        Vector v = Vector::Zero(model.param_count());
        for (int d = 0; d < dim; ++d) {
            const auto m = conditional_moments(model, theta, p, x, d);
            v += m.p_self * (1.0 - m.p_self) * m.centered;
        }
        v *= 2.0 / dim;
        j += p(x) * v * v.transpose();
    }
    return j;
}

Matrix fisher_information(const EnergyModel& model, const Vector& theta) {
    const ExactDistribution p = exact_distribution(model, theta);
    const auto space = enumerate_space(model.dimension());
    Vector mean = Vector::Zero(model.param_count());
    for (const auto& x : space) mean += p(x) * model.energy_grad(theta, x);
    Matrix cov = Matrix::Zero(model.param_count(), model.param_count());
    for (const auto& x : space) {
        const Vector dev = model.energy_grad(theta, x) - mean;
        cov += p(x) * dev * dev.transpose();
    }
    return cov;
}

double relative_frobenius(const Matrix& a, const Matrix& b) {
    const double denom = b.norm();
    return denom > 0.0 ? (a - b).norm() / denom : a.norm();
}

} // namespace debm
