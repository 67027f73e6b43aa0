#include <numeric>

#include "survey/errors.hpp"
#include "survey/learners.hpp"

namespace survey {

std::size_t expanded_dimension(std::size_t dims, int degree) {
    switch (degree) {
        case 1: return dims;
        case 2: return dims + dims + dims * (dims - 1) / 2;
        default: throw InvalidArgument("feature degree must be 1 or 2");
    }
}

std::vector<double> feature_expand(std::span<const double> x, int degree) {
    std::vector<double> out;
    out.reserve(expanded_dimension(x.size(), degree));
    out.assign(x.begin(), x.end());
    if (degree == 1) return out;
    for (double v : x) out.push_back(v * v);
    for (std::size_t j = 0; j < x.size(); ++j) {
        for (std::size_t k = j + 1; k < x.size(); ++k) out.push_back(x[j] * x[k]);
    }
    return out;
}

double LinearModel::decision(std::span<const double> x) const {
    const auto phi = feature_expand(x, degree);
    if (phi.size() != theta.size()) throw InvalidArgument("input dimension does not match the model");
    return std::inner_product(phi.begin(), phi.end(), theta.begin(), 0.0) - b;
}

}  // namespace survey
