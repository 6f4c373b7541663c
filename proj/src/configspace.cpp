#include "debm/configspace.hpp"

#include "debm/errors.hpp"

#include <algorithm>
#include <bit>
#include <string>
#include <unordered_set>

namespace debm {

void check_dimension(int dimension) {
    if (dimension < 1 || dimension > kMaxDimension) {
        throw DimensionError("dimension " + std::to_string(dimension) +
                             " outside supported range [1, " +
                             std::to_string(kMaxDimension) + "]");
    }
}

std::size_t state_count(int dimension) {
    check_dimension(dimension);
    return std::size_t{1} << dimension;
}

Configuration::Configuration(int dimension, std::uint32_t index)
    : dimension_(dimension), index_(index) {
    if (index >= state_count(dimension)) {
        throw IndexError("configuration index " + std::to_string(index) +
                         " out of range for dimension " + std::to_string(dimension));
    }
}

Configuration Configuration::from_bits(std::span<const int> bits) {
    const int dimension = static_cast<int>(bits.size());
    check_dimension(dimension);
    std::uint32_t index = 0;
    for (int d = 0; d < dimension; ++d) {
        if (bits[d] != 0 && bits[d] != 1) {
            throw DomainError("configuration bits must be 0 or 1");
        }
        index |= static_cast<std::uint32_t>(bits[d]) << d;
    }
    return Configuration(dimension, index);
}

int Configuration::bit(int d) const {
    if (d < 0 || d >= dimension_) {
        throw IndexError("coordinate " + std::to_string(d) + " out of range for dimension " +
                         std::to_string(dimension_));
    }
    return static_cast<int>((index_ >> d) & 1U);
}

std::vector<int> Configuration::bits() const {
    std::vector<int> out(dimension_);
    for (int d = 0; d < dimension_; ++d) out[d] = static_cast<int>((index_ >> d) & 1U);
    return out;
}

std::vector<Configuration> enumerate_space(int dimension) {
    const std::size_t n = state_count(dimension);
    std::vector<Configuration> space;
    space.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        space.emplace_back(dimension, static_cast<std::uint32_t>(i));
    }
    return space;
}

Configuration flip(const Configuration& x, int d) {
    if (d < 0 || d >= x.dimension()) {
        throw IndexError("cannot flip coordinate " + std::to_string(d) + " of a " +
                         std::to_string(x.dimension()) + "-dimensional configuration");
    }
    return Configuration(x.dimension(), x.index() ^ (std::uint32_t{1} << d));
}

int hamming_distance(const Configuration& a, const Configuration& b) {
    if (a.dimension() != b.dimension()) throw DimensionError("hamming distance across dimensions");
    return std::popcount(a.index() ^ b.index());
}

Neighborhood::Neighborhood(std::vector<Configuration> members) : members_(std::move(members)) {
    if (members_.empty()) throw DomainError("neighborhood must not be empty");
    const int dimension = members_.front().dimension();
    std::unordered_set<std::uint32_t> seen;
    seen.reserve(members_.size());
    for (const auto& m : members_) {
        if (m.dimension() != dimension) {
            throw DimensionError("neighborhood members have mixed dimensions");
        }
        if (!seen.insert(m.index()).second) {
            throw DomainError("neighborhood contains duplicate configuration " +
                              std::to_string(m.index()));
        }
    }
}

bool Neighborhood::contains(const Configuration& x) const {
    return std::find(members_.begin(), members_.end(), x) != members_.end();
}

std::size_t Neighborhood::position(const Configuration& x) const {
    auto it = std::find(members_.begin(), members_.end(), x);
    if (it == members_.end()) {
        throw DomainError("configuration " + std::to_string(x.index()) +
                          " is not a member of the neighborhood");
    }
    return static_cast<std::size_t>(it - members_.begin());
}

Neighborhood one_flip_neighborhood(const Configuration& x, int d) {
    return Neighborhood({x, flip(x, d)});
}

Neighborhood full_neighborhood(int dimension) {
    return Neighborhood(enumerate_space(dimension));
}

} // namespace debm
