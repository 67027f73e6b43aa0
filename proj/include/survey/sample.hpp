#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace survey {

/// Subset bitmask used by the enumeration oracles (bit i <=> unit i in the sample).
using SubsetMask = std::uint32_t;

/// The indicator vector (eps_1, ..., eps_N) of a drawn sample.
class SampleIndicator {
public:
    SampleIndicator() = default;
    explicit SampleIndicator(std::size_t population_size) : bits_(population_size, 0) {}
    explicit SampleIndicator(std::vector<std::uint8_t> bits);

    static SampleIndicator from_indices(std::size_t population_size, std::span<const std::size_t> units);
    static SampleIndicator from_mask(std::size_t population_size, SubsetMask mask);
    static SampleIndicator full(std::size_t population_size);

    std::size_t population_size() const noexcept { return bits_.size(); }
    /// n(s), the popcount of the indicator.
    std::size_t size() const noexcept { return size_; }
    bool contains(std::size_t unit) const { return bits_[unit] != 0; }

    void insert(std::size_t unit);
    void erase(std::size_t unit);

    std::span<const std::uint8_t> bits() const noexcept { return bits_; }
    std::vector<std::size_t> units() const;
    /// Requires population_size() <= 32.
    SubsetMask mask() const;

    friend bool operator==(const SampleIndicator&, const SampleIndicator&) = default;

private:
    std::vector<std::uint8_t> bits_;
    std::size_t size_ = 0;
};

}  // namespace survey
