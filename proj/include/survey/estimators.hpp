#pragma once

// Risk functionals of a classifier on a finite population and its samples.

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "survey/designs.hpp"
#include "survey/population.hpp"
#include "survey/sample.hpp"

namespace survey {

enum class RiskKind { True, Empirical, HT, BiasedHT, Mixed };

std::string_view to_string(RiskKind kind);

struct RiskValue {
    double value = 0.0;
    RiskKind kind = RiskKind::Empirical;
};

/// 1{clf(X_i) != Y_i} for every unit, as 0.0 / 1.0.
std::vector<double> misclassification(const Population& pop, const Classifier& clf);

/// One misclassification vector per classifier.
using LossTable = std::vector<std::vector<double>>;
LossTable misclassification_table(const Population& pop, std::span<const Classifier> classifiers);
LossTable misclassification_table(const Population& pop, std::span<const Stump> stumps);

/// (1/N) sum_i 1{clf(X_i) != Y_i}.
RiskValue empirical_risk(const Population& pop, const Classifier& clf);
RiskValue empirical_risk(std::span<const double> losses);

/// Error rate on held-out data drawn from the same distribution.
RiskValue test_error(const Population& test, const Classifier& clf);

/// (1/N) sum_i (eps_i / w_i) loss_i with 0/0 = 0. Throws WeightUndefined when a
/// sampled unit has w_i <= 0. The kind only labels the result.
RiskValue weighted_sample_risk(std::span<const double> losses, const SampleIndicator& sample,
                               std::span<const double> inclusion, RiskKind kind);
double weighted_sample_risk(std::span<const double> losses, SubsetMask sample, std::span<const double> inclusion);

/// Horvitz-Thompson risk, weights 1/pi_i.
RiskValue ht_risk(const Population& pop, const Classifier& clf, const SampleIndicator& sample,
                  std::span<const double> pi);
/// HT risk with the canonical parameters p in place of pi.
RiskValue biased_ht_risk(const Population& pop, const Classifier& clf, const SampleIndicator& sample,
                         std::span<const double> p);
/// Rejective indicator weighted by the inclusion probabilities pi* of another design.
RiskValue mixed_risk(const Population& pop, const Classifier& clf, const SampleIndicator& rejective_sample,
                     std::span<const double> pi_star);

/// Conditional variance of the HT risk under Poisson(p): (1/N^2) sum_i ((1-p_i)/p_i) loss_i.
double poisson_conditional_variance(std::span<const double> losses, std::span<const double> p);

/// (1/2) sum_s |a(s) - b(s)|. Throws IncompatibleDesigns on population-size mismatch.
double tv_distance(const EnumeratedDesign& a, const EnumeratedDesign& b);

/// max over the class of |HT risk - empirical risk| for one sample.
double sup_deviation(const LossTable& losses, const SampleIndicator& sample, std::span<const double> pi);
double sup_deviation(const LossTable& losses, SubsetMask sample, std::span<const double> pi);
double sup_deviation(const Population& pop, std::span<const Classifier> classifiers,
                     const SampleIndicator& sample, std::span<const double> pi);

/// Exact P{sup deviation >= t} under an enumerated design, for each threshold t.
std::vector<double> sup_deviation_tail(const EnumeratedDesign& design, const LossTable& losses,
                                       std::span<const double> pi, std::span<const double> thresholds);

/// Exact design expectation of the HT risk.
double expected_ht_risk(const EnumeratedDesign& design, std::span<const double> losses, std::span<const double> pi);

/// Index of the HT-risk minimizer over the class (first index on ties).
std::size_t ht_minimizer(const LossTable& losses, SubsetMask sample, std::span<const double> pi);

}  // namespace survey
