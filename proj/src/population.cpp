#include "survey/population.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "survey/errors.hpp"

namespace survey {

Population::Population(std::size_t dims, std::vector<double> features, std::vector<int> labels)
    : dims_(dims), features_(std::move(features)), labels_(std::move(labels)) {
    if (dims_ == 0) throw InvalidArgument("population needs at least one feature");
    if (labels_.empty()) throw InvalidArgument("population must not be empty");
    if (features_.size() != dims_ * labels_.size()) throw InvalidArgument("feature matrix shape does not match labels");
    for (double v : features_) {
        if (!std::isfinite(v)) throw InvalidArgument("population features must be finite");
    }
    for (int y : labels_) {
        if (y != 1 && y != -1) throw InvalidArgument("labels must be -1 or +1");
    }
}

std::vector<Stump> stump_grid(const Population& pop, std::size_t feature, int polarity) {
    if (feature >= pop.dims()) throw InvalidArgument("stump feature out of range");
    std::vector<double> values(pop.size());
    for (std::size_t i = 0; i < pop.size(); ++i) values[i] = pop.row(i)[feature];
    std::sort(values.begin(), values.end());
    values.erase(std::unique(values.begin(), values.end()), values.end());

    std::vector<Stump> out;
    out.reserve(values.size() + 1);
    out.push_back({feature, values.front() - 1.0, polarity});
    for (std::size_t k = 0; k + 1 < values.size(); ++k) {
        out.push_back({feature, 0.5 * (values[k] + values[k + 1]), polarity});
    }
    out.push_back({feature, values.back() + 1.0, polarity});
    return out;
}

}  // namespace survey
