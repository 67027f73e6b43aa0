#pragma once

// HT-weighted classifiers: a linear SVM over explicit polynomial features and
// a CART-style tree grown on HT-weighted Gini impurity.

#include <cstddef>
#include <span>
#include <vector>

#include "survey/population.hpp"
#include "survey/random.hpp"
#include "survey/sample.hpp"

namespace survey {

/// degree 1: x unchanged. degree 2: x, then x_k^2 for every k, then x_j x_k for
/// j < k in lexicographic order. Throws InvalidArgument for any other degree.
std::vector<double> feature_expand(std::span<const double> x, int degree);
std::size_t expanded_dimension(std::size_t dims, int degree);

/// g(x) = sign(phi(x)^T theta - b), sign(0) = +1.
struct LinearModel {
    std::vector<double> theta;
    double b = 0.0;
    double lambda = 0.0;
    int degree = 1;

    double decision(std::span<const double> x) const;
    int predict(std::span<const double> x) const { return decision(x) >= 0.0 ? 1 : -1; }
};

struct StepSchedule {
    double eta0 = 1.0;
    double t0 = 100.0;

    double at(std::size_t t) const { return eta0 / (1.0 + static_cast<double>(t) / t0); }
};

struct SvmOptions {
    double lambda = 1e-3;
    int degree = 2;
    StepSchedule schedule{};
    std::size_t epochs = 500;
    /// Standard deviation of the random initial (theta, b).
    double init_scale = 0.1;
    /// Optimise over z-scored expanded features (HT-weighted mean and scale of
    /// the sample); the returned model is mapped back to raw features.
    bool standardize = true;
};

struct SvmFit {
    LinearModel model;
    /// Objective of the returned iterate, in the coordinates it was optimised in.
    double objective = 0.0;
    /// Objective of the running averaged iterate, sampled every epochs/50 epochs.
    std::vector<double> objective_trace;
};

/// Minimises (1/N) sum_{i in S} (1/pi_i) max(0, 1 - Y_i (phi(X_i)^T theta - b)) + lambda |theta|^2
/// by full-batch subgradient descent with step eta0/(1 + t/t0), returning the
/// average of the second half of the iterates. N is the population size.
/// Throws TrainingFailure on an empty sample or a non-finite objective.
SvmFit train_weighted_svm(const Population& pop, const SampleIndicator& sample, std::span<const double> pi,
                          const SvmOptions& options, Rng& rng);

/// Objective above evaluated on raw expanded features for a given model.
double svm_objective(const Population& pop, const SampleIndicator& sample, std::span<const double> pi,
                     const LinearModel& model);

struct CrossValidationOptions {
    std::vector<double> lambda_grid{1e-4, 1e-3, 1e-2, 1e-1, 1.0};
    std::size_t folds = 5;
    /// Weight validation errors by 1/pi_i; false scores folds by plain error rate.
    bool weighted_validation = true;
};

struct CrossValidationResult {
    double best_lambda = 0.0;
    std::vector<double> validation_risk;  ///< one entry per grid value
};

/// k-fold cross-validation of lambda over the sampled units; weights travel
/// with the units. Ties go to the larger lambda.
CrossValidationResult select_lambda_cv(const Population& pop, const SampleIndicator& sample,
                                       std::span<const double> pi, const SvmOptions& base,
                                       const CrossValidationOptions& cv, Rng& rng);

struct TreeNode {
    bool leaf = true;
    int label = 1;
    std::size_t feature = 0;
    double threshold = 0.0;  ///< x[feature] <= threshold goes left
    std::size_t left = 0;
    std::size_t right = 0;
};

struct TreeOptions {
    std::size_t max_depth = 8;
    /// Minimum HT mass (sum of 1/pi_i) allowed in each child.
    double min_leaf_weight = 1.0;
};

struct TreeModel {
    std::vector<TreeNode> nodes;  ///< nodes[0] is the root
    TreeOptions options{};

    int predict(std::span<const double> x) const;
    std::size_t depth() const;
    std::size_t leaf_count() const;
};

/// Greedy recursive partitioning minimising HT-weighted Gini impurity, each
/// sampled unit carrying mass 1/pi_i. Candidate thresholds are midpoints of
/// consecutive distinct values; ties resolve to the lowest feature, then the
/// lowest threshold. Leaves predict the sign of the weighted label sum (+1 on ties).
TreeModel train_weighted_tree(const Population& pop, const SampleIndicator& sample, std::span<const double> pi,
                              const TreeOptions& options = {});

/// Weighted Gini impurity 1 - sum_c (W_c/W)^2 of a node with class masses (w_pos, w_neg).
double weighted_gini(double w_pos, double w_neg);

}  // namespace survey
