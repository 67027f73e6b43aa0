#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace survey {

/// Labeled finite population D_N: row-major N x d features, labels in {-1,+1}.
class Population {
public:
    Population() = default;
    /// Throws InvalidArgument on shape mismatch, non-finite features or labels outside {-1,+1}.
    Population(std::size_t dims, std::vector<double> features, std::vector<int> labels);

    std::size_t size() const noexcept { return labels_.size(); }
    std::size_t dims() const noexcept { return dims_; }

    std::span<const double> row(std::size_t i) const { return {features_.data() + i * dims_, dims_}; }
    int label(std::size_t i) const { return labels_[i]; }

    std::span<const double> features() const noexcept { return features_; }
    std::span<const int> labels() const noexcept { return labels_; }

private:
    std::size_t dims_ = 0;
    std::vector<double> features_;
    std::vector<int> labels_;
};

/// Any decision rule x -> {-1,+1}.
using Classifier = std::function<int(std::span<const double>)>;

/// Axis-aligned threshold rule: +1 when polarity * (x[feature] - threshold) > 0, else -1.
struct Stump {
    std::size_t feature = 0;
    double threshold = 0.0;
    int polarity = 1;

    int operator()(std::span<const double> x) const {
        return polarity * (x[feature] - threshold) > 0.0 ? 1 : -1;
    }
};

/// Stumps on one feature cutting the sorted population at all N+1 positions
/// (below the minimum, between consecutive distinct values, above the maximum).
std::vector<Stump> stump_grid(const Population& pop, std::size_t feature, int polarity);

}  // namespace survey
