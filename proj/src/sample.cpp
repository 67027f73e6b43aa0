#include "survey/sample.hpp"

#include "survey/errors.hpp"
#include "survey/random.hpp"

namespace survey {

std::uint64_t split_seed(std::uint64_t master, std::uint64_t stream) noexcept {
    std::uint64_t z = master + (stream + 1) * 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

SampleIndicator::SampleIndicator(std::vector<std::uint8_t> bits) : bits_(std::move(bits)) {
    for (auto& b : bits_) {
        if (b > 1) throw InvalidArgument("sample indicator entries must be 0 or 1");
        size_ += b;
    }
}

SampleIndicator SampleIndicator::from_indices(std::size_t population_size, std::span<const std::size_t> units) {
    SampleIndicator s(population_size);
    for (auto u : units) {
        if (u >= population_size) throw InvalidArgument("sample unit index out of range");
        s.insert(u);
    }
    return s;
}

SampleIndicator SampleIndicator::from_mask(std::size_t population_size, SubsetMask mask) {
    if (population_size > 32) throw InvalidArgument("bitmask samples require N <= 32");
    SampleIndicator s(population_size);
    for (std::size_t i = 0; i < population_size; ++i) {
        if (mask & (SubsetMask{1} << i)) s.insert(i);
    }
    return s;
}

SampleIndicator SampleIndicator::full(std::size_t population_size) {
    SampleIndicator s(std::vector<std::uint8_t>(population_size, 1));
    return s;
}

void SampleIndicator::insert(std::size_t unit) {
    if (!bits_[unit]) {
        bits_[unit] = 1;
        ++size_;
    }
}

void SampleIndicator::erase(std::size_t unit) {
    if (bits_[unit]) {
        bits_[unit] = 0;
        --size_;
    }
}

std::vector<std::size_t> SampleIndicator::units() const {
    std::vector<std::size_t> out;
    out.reserve(size_);
    for (std::size_t i = 0; i < bits_.size(); ++i) {
        if (bits_[i]) out.push_back(i);
    }
    return out;
}

SubsetMask SampleIndicator::mask() const {
    if (bits_.size() > 32) throw InvalidArgument("bitmask samples require N <= 32");
    SubsetMask m = 0;
    for (std::size_t i = 0; i < bits_.size(); ++i) {
        if (bits_[i]) m |= SubsetMask{1} << i;
    }
    return m;
}

}  // namespace survey
