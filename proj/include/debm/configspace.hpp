#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace debm {

/// Largest supported number of binary variables. All exact computations
/// enumerate 2^D states.
inline constexpr int kMaxDimension = 20;

/// Throws DimensionError unless 1 <= dimension <= kMaxDimension.
void check_dimension(int dimension);

/// Number of states in {0,1}^dimension.
std::size_t state_count(int dimension);

/// A point of {0,1}^D. Stored as its little-endian index: bit d carries
/// weight 2^d.
class Configuration {
public:
    Configuration(int dimension, std::uint32_t index);

    static Configuration from_bits(std::span<const int> bits);

    int dimension() const noexcept { return dimension_; }
    std::uint32_t index() const noexcept { return index_; }

    /// Value (0 or 1) of coordinate d. Throws IndexError for d outside [0, D).
    int bit(int d) const;
    std::vector<int> bits() const;

    friend bool operator==(const Configuration&, const Configuration&) = default;

private:
    int dimension_;
    std::uint32_t index_;
};

/// All 2^D configurations in index order.
std::vector<Configuration> enumerate_space(int dimension);

/// x with coordinate d negated.
Configuration flip(const Configuration& x, int d);

/// Hamming distance between two configurations of the same dimension.
int hamming_distance(const Configuration& a, const Configuration& b);

/// A non-empty set of distinct configurations sharing one dimension.
/// Iteration order is the construction order.
class Neighborhood {
public:
    explicit Neighborhood(std::vector<Configuration> members);

    int dimension() const noexcept { return members_.front().dimension(); }
    std::size_t size() const noexcept { return members_.size(); }
    bool contains(const Configuration& x) const;

    /// Position of x among the members; throws DomainError if absent.
    std::size_t position(const Configuration& x) const;

    const Configuration& operator[](std::size_t i) const { return members_[i]; }
    auto begin() const noexcept { return members_.begin(); }
    auto end() const noexcept { return members_.end(); }

private:
    std::vector<Configuration> members_;
};

/// {x, flip(x, d)} with x first.
Neighborhood one_flip_neighborhood(const Configuration& x, int d);

/// The whole sample space as one neighborhood.
Neighborhood full_neighborhood(int dimension);

} // namespace debm
