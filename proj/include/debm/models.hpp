#pragma once

#include "debm/configspace.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace debm {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

enum class ModelKind { third_order_bm, binary_mrf, binary_rbm };

std::string_view to_string(ModelKind kind);
ModelKind model_kind_from_string(std::string_view name);

/// An energy function E_theta(x) over {0,1}^D with analytic first and second
/// derivatives in theta. The model object holds only the shape; parameter
/// vectors are passed to every evaluation.
///
/// Parameter layouts:
///  - third_order_bm: W1..W6 attached to the indicator products
///    (1-x1)(1-x2)(1-x3), x1(1-x2)(1-x3), (1-x1)x2(1-x3), (1-x1)(1-x2)x3,
///    x1x2(1-x3), x1(1-x2)x3, with E = -sum_k W_k f_k(x).
///  - binary_mrf: upper triangle of the symmetric interaction matrix W,
///    diagonal included, row-major; E = -x^T W x.
///  - binary_rbm: (W_1 entries, c_1, W_2 entries, c_2, ...);
///    E = -sum_k log(1 + exp(x^T W_k + c_k)).
class EnergyModel {
public:
    static EnergyModel third_order_bm();
    static EnergyModel binary_mrf(int dimension);
    static EnergyModel binary_rbm(int dimension, int filters);

    ModelKind kind() const noexcept { return kind_; }
    int dimension() const noexcept { return dimension_; }
    int param_count() const noexcept { return param_count_; }
    /// Number of RBM filters; 0 for the other kinds.
    int filters() const noexcept { return filters_; }
    /// Energies linear in theta have a zero parameter Hessian.
    bool log_linear() const noexcept { return kind_ != ModelKind::binary_rbm; }

    /// Constant added to every energy. It cancels from every probability and
    /// ratio; it exists so that partition-free behaviour can be checked.
    double offset() const noexcept { return offset_; }
    EnergyModel with_offset(double offset) const;

    /// Throws ParameterError on a length mismatch or a non-finite entry.
    void check_parameters(const Vector& theta) const;

    double energy(const Vector& theta, const Configuration& x) const;
    Vector energy_grad(const Vector& theta, const Configuration& x) const;
    Matrix energy_hess(const Vector& theta, const Configuration& x) const;

    /// Symmetric D x D interaction matrix of a binary MRF parameter vector.
    Matrix mrf_interaction(const Vector& theta) const;

private:
    EnergyModel(ModelKind kind, int dimension, int param_count, int filters)
        : kind_(kind), dimension_(dimension), param_count_(param_count), filters_(filters) {}

    void check_configuration(const Configuration& x) const;

    ModelKind kind_;
    int dimension_;
    int param_count_;
    int filters_;
    double offset_ = 0.0;
};

/// A probability table over {0,1}^D indexed by Configuration::index.
/// Entries may be zero (e.g. an empirical distribution).
struct ProbabilityTable {
    int dimension = 0;
    Vector probabilities;

    double operator()(const Configuration& x) const { return probabilities[x.index()]; }

    /// Throws DimensionError for a wrong length and DomainError for negative
    /// entries or a total further than `tol` from one.
    void validate(double tol = 1e-9) const;
};

/// The normalized model distribution P_theta with its log partition function.
struct ExactDistribution : ProbabilityTable {
    double log_partition = 0.0;
};

ExactDistribution exact_distribution(const EnergyModel& model, const Vector& theta);

/// P(x_d | x_{-d}) = P(x) / (P(x) + P(flip(x, d))).
double conditional(const ExactDistribution& p, const Configuration& x, int d);

/// An ordered list of N >= 1 observed configurations of one dimension.
class Dataset {
public:
    Dataset(int dimension, std::vector<Configuration> cases);

    int dimension() const noexcept { return dimension_; }
    std::size_t size() const noexcept { return cases_.size(); }
    const std::vector<Configuration>& cases() const noexcept { return cases_; }
    const Configuration& operator[](std::size_t i) const { return cases_[i]; }

private:
    int dimension_;
    std::vector<Configuration> cases_;
};

/// Case counts per state index.
std::vector<std::uint64_t> state_counts(const Dataset& data);

/// P_N(x) = count(x) / N.
ProbabilityTable empirical_distribution(const Dataset& data);

/// N independent exact draws by inverse-CDF lookup.
Dataset sample_dataset(const ProbabilityTable& p, std::size_t n, std::uint64_t seed);
Dataset sample_dataset(const EnergyModel& model, const Vector& theta, std::size_t n,
                       std::uint64_t seed);

} // namespace debm
