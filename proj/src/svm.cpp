#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "survey/errors.hpp"
#include "survey/estimators.hpp"
#include "survey/learners.hpp"

namespace survey {

namespace {

// Sampled units in optimisation coordinates.
struct HingeProblem {
    std::size_t dim = 0;
    std::vector<double> x;       // n x dim, row-major
    std::vector<double> y;
    std::vector<double> c;       // (1/pi_i) / N
    std::vector<double> center;  // standardisation, identity when disabled
    std::vector<double> scale;

    std::size_t rows() const { return y.size(); }
    const double* row(std::size_t i) const { return x.data() + i * dim; }
};

HingeProblem build_problem(const Population& pop, const SampleIndicator& sample, std::span<const double> pi,
                           int degree, bool standardize) {
    if (sample.population_size() != pop.size() || pi.size() != pop.size()) {
        throw InvalidArgument("population, sample and inclusion vector must have the same length");
    }
    const auto units = sample.units();
    if (units.empty()) throw TrainingFailure("cannot train on an empty sample");

    HingeProblem prob;
    prob.dim = expanded_dimension(pop.dims(), degree);
    prob.x.reserve(units.size() * prob.dim);
    std::vector<double> w;
    w.reserve(units.size());
    for (auto i : units) {
        if (!(pi[i] > 0.0)) throw WeightUndefined("sampled unit has zero inclusion probability", i);
        const auto phi = feature_expand(pop.row(i), degree);
        prob.x.insert(prob.x.end(), phi.begin(), phi.end());
        prob.y.push_back(static_cast<double>(pop.label(i)));
        w.push_back(1.0 / pi[i]);
    }
    const auto N = static_cast<double>(pop.size());
    prob.c.resize(w.size());
    std::transform(w.begin(), w.end(), prob.c.begin(), [N](double v) { return v / N; });

    prob.center.assign(prob.dim, 0.0);
    prob.scale.assign(prob.dim, 1.0);
    if (!standardize) return prob;

    const double total = std::accumulate(w.begin(), w.end(), 0.0);
    for (std::size_t r = 0; r < prob.rows(); ++r) {
        for (std::size_t k = 0; k < prob.dim; ++k) prob.center[k] += w[r] * prob.row(r)[k];
    }
    for (auto& m : prob.center) m /= total;
    std::vector<double> var(prob.dim, 0.0);
    for (std::size_t r = 0; r < prob.rows(); ++r) {
        for (std::size_t k = 0; k < prob.dim; ++k) {
            const double d = prob.row(r)[k] - prob.center[k];
            var[k] += w[r] * d * d;
        }
    }
    for (std::size_t k = 0; k < prob.dim; ++k) {
        const double sd = std::sqrt(var[k] / total);
        prob.scale[k] = sd > 1e-12 ? sd : 1.0;
    }
    for (std::size_t r = 0; r < prob.rows(); ++r) {
        double* row = prob.x.data() + r * prob.dim;
        for (std::size_t k = 0; k < prob.dim; ++k) row[k] = (row[k] - prob.center[k]) / prob.scale[k];
    }
    return prob;
}

double objective(const HingeProblem& prob, std::span<const double> theta, double b, double lambda) {
    double loss = 0.0;
    for (std::size_t r = 0; r < prob.rows(); ++r) {
        const double f = std::inner_product(theta.begin(), theta.end(), prob.row(r), 0.0) - b;
        loss += prob.c[r] * std::max(0.0, 1.0 - prob.y[r] * f);
    }
    const double norm = std::inner_product(theta.begin(), theta.end(), theta.begin(), 0.0);
    return loss + lambda * norm;
}

}  // namespace

SvmFit train_weighted_svm(const Population& pop, const SampleIndicator& sample, std::span<const double> pi,
                          const SvmOptions& options, Rng& rng) {
    if (!(options.lambda >= 0.0)) throw InvalidArgument("lambda must be nonnegative");
    if (options.epochs == 0) throw InvalidArgument("epochs must be positive");
    const auto prob = build_problem(pop, sample, pi, options.degree, options.standardize);
    const std::size_t D = prob.dim;

    std::normal_distribution<double> init(0.0, options.init_scale);
    std::vector<double> theta(D);
    for (auto& t : theta) t = options.init_scale > 0.0 ? init(rng) : 0.0;
    double b = options.init_scale > 0.0 ? init(rng) : 0.0;

    std::vector<double> grad(D);
    std::vector<double> avg_theta(D, 0.0);
    double avg_b = 0.0;
    std::size_t averaged = 0;
    const std::size_t burn_in = options.epochs / 2;
    const std::size_t trace_every = std::max<std::size_t>(1, options.epochs / 50);

    // Steps are taken on the objective divided by the total loss weight, which
    // makes the iterates invariant to a common rescaling of the weights.
    const double mass = std::accumulate(prob.c.begin(), prob.c.end(), 0.0);

    SvmFit fit;
    for (std::size_t t = 0; t < options.epochs; ++t) {
        std::fill(grad.begin(), grad.end(), 0.0);
        double grad_b = 0.0;
        for (std::size_t r = 0; r < prob.rows(); ++r) {
            const double* x = prob.row(r);
            const double f = std::inner_product(theta.begin(), theta.end(), x, 0.0) - b;
            if (prob.y[r] * f < 1.0) {
                const double g = prob.c[r] * prob.y[r];
                for (std::size_t k = 0; k < D; ++k) grad[k] -= g * x[k];
                grad_b += g;
            }
        }
        const double eta = options.schedule.at(t) / mass;
        // Hinge part by subgradient, ridge part by its exact proximal map.
        const double shrink = 1.0 / (1.0 + 2.0 * eta * options.lambda);
        for (std::size_t k = 0; k < D; ++k) theta[k] = (theta[k] - eta * grad[k]) * shrink;
        b -= eta * grad_b;

        if (t >= burn_in) {
            ++averaged;
            const double mix = 1.0 / static_cast<double>(averaged);
            for (std::size_t k = 0; k < D; ++k) avg_theta[k] += mix * (theta[k] - avg_theta[k]);
            avg_b += mix * (b - avg_b);
            if ((t - burn_in) % trace_every == 0 || t + 1 == options.epochs) {
                fit.objective_trace.push_back(objective(prob, avg_theta, avg_b, options.lambda));
            }
        }
    }

    fit.objective = objective(prob, avg_theta, avg_b, options.lambda);
    if (!std::isfinite(fit.objective)) throw TrainingFailure("SVM objective diverged");

    // Fold the standardisation into (theta, b): theta_raw = theta / scale, b_raw = b + sum theta center / scale.
    fit.model.degree = options.degree;
    fit.model.lambda = options.lambda;
    fit.model.theta.resize(D);
    fit.model.b = avg_b;
    for (std::size_t k = 0; k < D; ++k) {
        fit.model.theta[k] = avg_theta[k] / prob.scale[k];
        fit.model.b += fit.model.theta[k] * prob.center[k];
    }
    return fit;
}

double svm_objective(const Population& pop, const SampleIndicator& sample, std::span<const double> pi,
                     const LinearModel& model) {
    const auto prob = build_problem(pop, sample, pi, model.degree, false);
    if (model.theta.size() != prob.dim) throw InvalidArgument("model dimension does not match the features");
    return objective(prob, model.theta, model.b, model.lambda);
}

CrossValidationResult select_lambda_cv(const Population& pop, const SampleIndicator& sample,
                                       std::span<const double> pi, const SvmOptions& base,
                                       const CrossValidationOptions& cv, Rng& rng) {
    if (cv.lambda_grid.empty()) throw InvalidArgument("empty lambda grid");
    auto units = sample.units();
    if (units.size() < cv.folds || cv.folds < 2) throw InvalidArgument("need at least `folds` >= 2 sampled units");
    std::shuffle(units.begin(), units.end(), rng);
    const std::uint64_t stream_seed = rng();

    // fold_of[k] is the fold of units[k]: contiguous chunks of the shuffled order.
    std::vector<std::size_t> fold_of(units.size());
    for (std::size_t k = 0; k < units.size(); ++k) fold_of[k] = k * cv.folds / units.size();

    CrossValidationResult result;
    result.validation_risk.reserve(cv.lambda_grid.size());
    for (std::size_t g = 0; g < cv.lambda_grid.size(); ++g) {
        SvmOptions opts = base;
        opts.lambda = cv.lambda_grid[g];
        double risk = 0.0;
        double mass = 0.0;
        for (std::size_t f = 0; f < cv.folds; ++f) {
            SampleIndicator train(pop.size());
            for (std::size_t k = 0; k < units.size(); ++k) {
                if (fold_of[k] != f) train.insert(units[k]);
            }
            Rng fold_rng(split_seed(stream_seed, g * cv.folds + f));
            const auto model = train_weighted_svm(pop, train, pi, opts, fold_rng).model;
            for (std::size_t k = 0; k < units.size(); ++k) {
                if (fold_of[k] != f) continue;
                const auto i = units[k];
                const double w = cv.weighted_validation ? 1.0 / pi[i] : 1.0;
                mass += w;
                if (model.predict(pop.row(i)) != pop.label(i)) risk += w;
            }
        }
        result.validation_risk.push_back(risk / mass);
    }

    std::size_t best = 0;
    for (std::size_t g = 1; g < cv.lambda_grid.size(); ++g) {
        const double r = result.validation_risk[g];
        const double b = result.validation_risk[best];
        if (r < b - 1e-12 || (std::abs(r - b) <= 1e-12 && cv.lambda_grid[g] > cv.lambda_grid[best])) best = g;
    }
    result.best_lambda = cv.lambda_grid[best];
    return result;
}

}  // namespace survey
