#include "debm/models.hpp"

#include "debm/errors.hpp"
#include "debm/rng.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

namespace debm {

namespace {

// log(1 + exp(a)) without overflow.
double softplus(double a) {
    return a > 0.0 ? a + std::log1p(std::exp(-a)) : std::log1p(std::exp(a));
}

double logistic(double a) {
    if (a >= 0.0) return 1.0 / (1.0 + std::exp(-a));
    const double e = std::exp(a);
    return e / (1.0 + e);
}

std::array<double, 6> third_order_features(const Configuration& x) {
    const double x1 = x.bit(0), x2 = x.bit(1), x3 = x.bit(2);
    return {(1 - x1) * (1 - x2) * (1 - x3), x1 * (1 - x2) * (1 - x3),
            (1 - x1) * x2 * (1 - x3),       (1 - x1) * (1 - x2) * x3,
            x1 * x2 * (1 - x3),             x1 * (1 - x2) * x3};
}

double rbm_activation(const Vector& theta, const Configuration& x, int k, int dimension) {
    const int base = k * (dimension + 1);
    double a = theta[base + dimension];
    for (int d = 0; d < dimension; ++d) {
        if (x.bit(d)) a += theta[base + d];
    }
    return a;
}

} // namespace

std::string_view to_string(ModelKind kind) {
    switch (kind) {
    case ModelKind::third_order_bm: return "third_order_bm";
    case ModelKind::binary_mrf: return "binary_mrf";
    case ModelKind::binary_rbm: return "binary_rbm";
    }
    return "unknown";
}

ModelKind model_kind_from_string(std::string_view name) {
    if (name == "third_order_bm") return ModelKind::third_order_bm;
    if (name == "binary_mrf") return ModelKind::binary_mrf;
    if (name == "binary_rbm") return ModelKind::binary_rbm;
    throw InputError("unknown model kind '" + std::string(name) + "'");
}

EnergyModel EnergyModel::third_order_bm() {
    return EnergyModel(ModelKind::third_order_bm, 3, 6, 0);
}

EnergyModel EnergyModel::binary_mrf(int dimension) {
    check_dimension(dimension);
    return EnergyModel(ModelKind::binary_mrf, dimension, dimension * (dimension + 1) / 2, 0);
}

EnergyModel EnergyModel::binary_rbm(int dimension, int filters) {
    check_dimension(dimension);
    if (filters < 1) throw ParameterError("an RBM needs at least one filter");
    return EnergyModel(ModelKind::binary_rbm, dimension, filters * (dimension + 1), filters);
}

EnergyModel EnergyModel::with_offset(double offset) const {
    EnergyModel copy = *this;
    copy.offset_ = offset;
    return copy;
}

void EnergyModel::check_parameters(const Vector& theta) const {
    if (theta.size() != param_count_) {
        throw ParameterError("parameter vector has length " + std::to_string(theta.size()) +
                             ", model '" + std::string(to_string(kind_)) + "' expects " +
                             std::to_string(param_count_));
    }
    if (!theta.allFinite()) throw ParameterError("parameter vector has non-finite entries");
}

void EnergyModel::check_configuration(const Configuration& x) const {
    if (x.dimension() != dimension_) {
        throw DimensionError("configuration of dimension " + std::to_string(x.dimension()) +
                             " passed to a " + std::to_string(dimension_) +
                             "-dimensional model");
    }
}

double EnergyModel::energy(const Vector& theta, const Configuration& x) const {
    check_parameters(theta);
    check_configuration(x);
    double e = 0.0;
    switch (kind_) {
    case ModelKind::third_order_bm: {
        const auto f = third_order_features(x);
        for (int k = 0; k < 6; ++k) e -= theta[k] * f[k];
        break;
    }
    case ModelKind::binary_mrf: {
        int p = 0;
        for (int i = 0; i < dimension_; ++i) {
            for (int j = i; j < dimension_; ++j, ++p) {
                if (x.bit(i) && x.bit(j)) e -= (i == j ? 1.0 : 2.0) * theta[p];
            }
        }
        break;
    }
    case ModelKind::binary_rbm:
        for (int k = 0; k < filters_; ++k) e -= softplus(rbm_activation(theta, x, k, dimension_));
        break;
    }
    return e + offset_;
}

Vector EnergyModel::energy_grad(const Vector& theta, const Configuration& x) const {
    check_parameters(theta);
    check_configuration(x);
    Vector g = Vector::Zero(param_count_);
    switch (kind_) {
    case ModelKind::third_order_bm: {
        const auto f = third_order_features(x);
        for (int k = 0; k < 6; ++k) g[k] = -f[k];
        break;
    }
    case ModelKind::binary_mrf: {
        int p = 0;
        for (int i = 0; i < dimension_; ++i) {
            for (int j = i; j < dimension_; ++j, ++p) {
                if (x.bit(i) && x.bit(j)) g[p] = i == j ? -1.0 : -2.0;
            }
        }
        break;
    }
    case ModelKind::binary_rbm:
        for (int k = 0; k < filters_; ++k) {
            const int base = k * (dimension_ + 1);
            const double s = logistic(rbm_activation(theta, x, k, dimension_));
            for (int d = 0; d < dimension_; ++d) g[base + d] = -s * x.bit(d);
            g[base + dimension_] = -s;
        }
        break;
    }
    return g;
}

Matrix EnergyModel::energy_hess(const Vector& theta, const Configuration& x) const {
    check_parameters(theta);
    check_configuration(x);
    Matrix h = Matrix::Zero(param_count_, param_count_);
    if (kind_ != ModelKind::binary_rbm) return h;
    // Block diagonal: filter k only touches its own (W_k, c_k) block.
    Vector u(dimension_ + 1);
    for (int d = 0; d < dimension_; ++d) u[d] = x.bit(d);
    u[dimension_] = 1.0;
    for (int k = 0; k < filters_; ++k) {
        const int base = k * (dimension_ + 1);
        const double s = logistic(rbm_activation(theta, x, k, dimension_));
        h.block(base, base, dimension_ + 1, dimension_ + 1) = -s * (1.0 - s) * (u * u.transpose());
    }
    return h;
}

Matrix EnergyModel::mrf_interaction(const Vector& theta) const {
    if (kind_ != ModelKind::binary_mrf) throw DomainError("mrf_interaction needs a binary MRF");
    check_parameters(theta);
    Matrix w(dimension_, dimension_);
    int p = 0;
    for (int i = 0; i < dimension_; ++i) {
        for (int j = i; j < dimension_; ++j, ++p) w(i, j) = w(j, i) = theta[p];
    }
    return w;
}

void ProbabilityTable::validate(double tol) const {
    if (probabilities.size() != static_cast<Eigen::Index>(state_count(dimension))) {
        throw DimensionError("probability table has " + std::to_string(probabilities.size()) +
                             " entries, expected 2^" + std::to_string(dimension));
    }
    if (!probabilities.allFinite() || (probabilities.array() < 0.0).any()) {
        throw DomainError("probability table has negative or non-finite entries");
    }
    const double total = probabilities.sum();
    if (std::abs(total - 1.0) > tol) {
        throw DomainError("probability table sums to " + std::to_string(total) + ", not 1");
    }
}

ExactDistribution exact_distribution(const EnergyModel& model, const Vector& theta) {
    model.check_parameters(theta);
    const auto space = enumerate_space(model.dimension());
    Vector neg_energy(static_cast<Eigen::Index>(space.size()));
    for (const auto& x : space) neg_energy[x.index()] = -model.energy(theta, x);
    const double top = neg_energy.maxCoeff();
    const double log_z = top + std::log((neg_energy.array() - top).exp().sum());

    ExactDistribution p;
    p.dimension = model.dimension();
    p.probabilities = (neg_energy.array() - log_z).exp().matrix();
    p.log_partition = log_z;
    return p;
}

double conditional(const ExactDistribution& p, const Configuration& x, int d) {
    if (x.dimension() != p.dimension) throw DimensionError("conditional: dimension mismatch");
    const double px = p(x);
    return px / (px + p(flip(x, d)));
}

Dataset::Dataset(int dimension, std::vector<Configuration> cases)
    : dimension_(dimension), cases_(std::move(cases)) {
    check_dimension(dimension);
    if (cases_.empty()) throw InputError("dataset must contain at least one case");
    for (const auto& c : cases_) {
        if (c.dimension() != dimension_) {
            throw DimensionError("dataset case of dimension " + std::to_string(c.dimension()) +
                                 " in a " + std::to_string(dimension_) + "-dimensional dataset");
        }
    }
}

std::vector<std::uint64_t> state_counts(const Dataset& data) {
    std::vector<std::uint64_t> counts(state_count(data.dimension()), 0);
    for (const auto& c : data.cases()) ++counts[c.index()];
    return counts;
}

ProbabilityTable empirical_distribution(const Dataset& data) {
    const auto counts = state_counts(data);
    ProbabilityTable p;
    p.dimension = data.dimension();
    p.probabilities.resize(static_cast<Eigen::Index>(counts.size()));
    const double n = static_cast<double>(data.size());
    for (std::size_t i = 0; i < counts.size(); ++i) {
        p.probabilities[static_cast<Eigen::Index>(i)] = static_cast<double>(counts[i]) / n;
    }
    return p;
}

Dataset sample_dataset(const ProbabilityTable& p, std::size_t n, std::uint64_t seed) {
    p.validate();
    if (n == 0) throw InputError("sample size must be positive");
    std::vector<double> cdf(static_cast<std::size_t>(p.probabilities.size()));
    double running = 0.0;
    for (std::size_t i = 0; i < cdf.size(); ++i) {
        running += p.probabilities[static_cast<Eigen::Index>(i)];
        cdf[i] = running;
    }
    Rng rng(seed);
    std::vector<Configuration> cases;
    cases.reserve(n);
    for (std::size_t t = 0; t < n; ++t) {
        const double u = rng.uniform() * running;
        auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
        auto idx = static_cast<std::uint32_t>(std::min<std::size_t>(it - cdf.begin(), cdf.size() - 1));
        cases.emplace_back(p.dimension, idx);
    }
    return Dataset(p.dimension, std::move(cases));
}

Dataset sample_dataset(const EnergyModel& model, const Vector& theta, std::size_t n,
                       std::uint64_t seed) {
    return sample_dataset(exact_distribution(model, theta), n, seed);
}

} // namespace debm
