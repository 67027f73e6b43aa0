#include <algorithm>
#include <numeric>

#include "survey/errors.hpp"
#include "survey/learners.hpp"

namespace survey {

double weighted_gini(double w_pos, double w_neg) {
    const double total = w_pos + w_neg;
    if (!(total > 0.0)) return 0.0;
    const double a = w_pos / total;
    const double b = w_neg / total;
    return 1.0 - a * a - b * b;
}

namespace {

struct Grower {
    const Population& pop;
    const std::vector<double>& weight;  // 1/pi over the population, 0 when not sampled
    const TreeOptions& options;
    std::vector<TreeNode> nodes;

    std::size_t grow(std::vector<std::size_t> units, std::size_t depth) {
        double w_pos = 0.0;
        double w_neg = 0.0;
        for (auto i : units) (pop.label(i) > 0 ? w_pos : w_neg) += weight[i];

        const std::size_t id = nodes.size();
        nodes.push_back({});
        nodes[id].label = w_pos >= w_neg ? 1 : -1;
        if (depth >= options.max_depth || w_pos == 0.0 || w_neg == 0.0) return id;

        const double total = w_pos + w_neg;
        const double eps = 1e-12 * total;
        double best = total * weighted_gini(w_pos, w_neg) - eps;
        bool found = false;
        std::size_t best_feature = 0;
        double best_threshold = 0.0;

        std::vector<std::size_t> order = units;
        for (std::size_t f = 0; f < pop.dims(); ++f) {
            std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
                const double xa = pop.row(a)[f];
                const double xb = pop.row(b)[f];
                return xa < xb || (xa == xb && a < b);
            });
            double left_pos = 0.0;
            double left_neg = 0.0;
            for (std::size_t k = 0; k + 1 < order.size(); ++k) {
                const auto i = order[k];
                (pop.label(i) > 0 ? left_pos : left_neg) += weight[i];
                const double here = pop.row(i)[f];
                const double there = pop.row(order[k + 1])[f];
                if (here == there) continue;
                const double left = left_pos + left_neg;
                const double right = total - left;
                if (left < options.min_leaf_weight || right < options.min_leaf_weight) continue;
                const double right_pos = w_pos - left_pos;
                const double right_neg = w_neg - left_neg;
                const double impurity =
                    left * weighted_gini(left_pos, left_neg) + right * weighted_gini(right_pos, right_neg);
                if (impurity < best) {
                    best = impurity - eps;
                    found = true;
                    best_feature = f;
                    best_threshold = 0.5 * (here + there);
                }
            }
        }
        if (!found) return id;

        std::vector<std::size_t> left_units;
        std::vector<std::size_t> right_units;
        for (auto i : units) (pop.row(i)[best_feature] <= best_threshold ? left_units : right_units).push_back(i);
        units.clear();
        units.shrink_to_fit();

        nodes[id].leaf = false;
        nodes[id].feature = best_feature;
        nodes[id].threshold = best_threshold;
        const auto l = grow(std::move(left_units), depth + 1);
        const auto r = grow(std::move(right_units), depth + 1);
        nodes[id].left = l;
        nodes[id].right = r;
        return id;
    }
};

std::size_t subtree_depth(const std::vector<TreeNode>& nodes, std::size_t id) {
    const auto& node = nodes[id];
    if (node.leaf) return 0;
    return 1 + std::max(subtree_depth(nodes, node.left), subtree_depth(nodes, node.right));
}

}  // namespace

TreeModel train_weighted_tree(const Population& pop, const SampleIndicator& sample, std::span<const double> pi,
                              const TreeOptions& options) {
    if (sample.population_size() != pop.size() || pi.size() != pop.size()) {
        throw InvalidArgument("population, sample and inclusion vector must have the same length");
    }
    auto units = sample.units();
    if (units.empty()) throw TrainingFailure("cannot grow a tree on an empty sample");
    std::vector<double> weight(pop.size(), 0.0);
    for (auto i : units) {
        if (!(pi[i] > 0.0)) throw WeightUndefined("sampled unit has zero inclusion probability", i);
        weight[i] = 1.0 / pi[i];
    }
    Grower grower{pop, weight, options, {}};
    grower.grow(std::move(units), 0);
    return {std::move(grower.nodes), options};
}

int TreeModel::predict(std::span<const double> x) const {
    if (nodes.empty()) throw InvalidArgument("empty tree");
    std::size_t id = 0;
    while (!nodes[id].leaf) {
        const auto& node = nodes[id];
        if (node.feature >= x.size()) throw InvalidArgument("input dimension does not match the tree");
        id = x[node.feature] <= node.threshold ? node.left : node.right;
    }
    return nodes[id].label;
}

std::size_t TreeModel::depth() const { return nodes.empty() ? 0 : subtree_depth(nodes, 0); }

std::size_t TreeModel::leaf_count() const {
    return static_cast<std::size_t>(std::count_if(nodes.begin(), nodes.end(), [](const TreeNode& n) { return n.leaf; }));
}

}  // namespace survey
