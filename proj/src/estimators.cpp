#include "survey/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "survey/errors.hpp"

namespace survey {

namespace {

void require_same_length(std::size_t a, std::size_t b, const char* what) {
    if (a != b) throw InvalidArgument(std::string(what) + ": length mismatch");
}

}  // namespace

std::string_view to_string(RiskKind kind) {
    switch (kind) {
        case RiskKind::True: return "true";
        case RiskKind::Empirical: return "empirical";
        case RiskKind::HT: return "ht";
        case RiskKind::BiasedHT: return "biased_ht";
        case RiskKind::Mixed: return "mixed";
    }
    return "unknown";
}

std::vector<double> misclassification(const Population& pop, const Classifier& clf) {
    std::vector<double> out(pop.size());
    for (std::size_t i = 0; i < pop.size(); ++i) out[i] = clf(pop.row(i)) != pop.label(i) ? 1.0 : 0.0;
    return out;
}

LossTable misclassification_table(const Population& pop, std::span<const Classifier> classifiers) {
    LossTable table;
    table.reserve(classifiers.size());
    for (const auto& c : classifiers) table.push_back(misclassification(pop, c));
    return table;
}

LossTable misclassification_table(const Population& pop, std::span<const Stump> stumps) {
    LossTable table;
    table.reserve(stumps.size());
    for (const auto& s : stumps) table.push_back(misclassification(pop, Classifier(s)));
    return table;
}

RiskValue empirical_risk(std::span<const double> losses) {
    if (losses.empty()) throw InvalidArgument("empirical risk of an empty population");
    return {std::accumulate(losses.begin(), losses.end(), 0.0) / static_cast<double>(losses.size()),
            RiskKind::Empirical};
}

RiskValue empirical_risk(const Population& pop, const Classifier& clf) {
    return empirical_risk(misclassification(pop, clf));
}

RiskValue test_error(const Population& test, const Classifier& clf) {
    return {empirical_risk(test, clf).value, RiskKind::True};
}

RiskValue weighted_sample_risk(std::span<const double> losses, const SampleIndicator& sample,
                               std::span<const double> inclusion, RiskKind kind) {
    require_same_length(losses.size(), sample.population_size(), "weighted risk");
    require_same_length(losses.size(), inclusion.size(), "weighted risk");
    double total = 0.0;
    for (std::size_t i = 0; i < losses.size(); ++i) {
        if (!sample.contains(i)) continue;
        if (!(inclusion[i] > 0.0)) {
            throw WeightUndefined("sampled unit " + std::to_string(i) + " has zero inclusion probability", i);
        }
        total += losses[i] / inclusion[i];
    }
    return {total / static_cast<double>(losses.size()), kind};
}

double weighted_sample_risk(std::span<const double> losses, SubsetMask sample, std::span<const double> inclusion) {
    double total = 0.0;
    for (std::size_t i = 0; i < losses.size(); ++i) {
        if (!(sample & (SubsetMask{1} << i))) continue;
        if (!(inclusion[i] > 0.0)) {
            throw WeightUndefined("sampled unit " + std::to_string(i) + " has zero inclusion probability", i);
        }
        total += losses[i] / inclusion[i];
    }
    return total / static_cast<double>(losses.size());
}

RiskValue ht_risk(const Population& pop, const Classifier& clf, const SampleIndicator& sample,
                  std::span<const double> pi) {
    return weighted_sample_risk(misclassification(pop, clf), sample, pi, RiskKind::HT);
}

RiskValue biased_ht_risk(const Population& pop, const Classifier& clf, const SampleIndicator& sample,
                         std::span<const double> p) {
    return weighted_sample_risk(misclassification(pop, clf), sample, p, RiskKind::BiasedHT);
}

RiskValue mixed_risk(const Population& pop, const Classifier& clf, const SampleIndicator& rejective_sample,
                     std::span<const double> pi_star) {
    return weighted_sample_risk(misclassification(pop, clf), rejective_sample, pi_star, RiskKind::Mixed);
}

double poisson_conditional_variance(std::span<const double> losses, std::span<const double> p) {
    require_same_length(losses.size(), p.size(), "Poisson variance");
    double total = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) total += (1.0 - p[i]) / p[i] * losses[i];
    const auto N = static_cast<double>(p.size());
    return total / (N * N);
}

double tv_distance(const EnumeratedDesign& a, const EnumeratedDesign& b) {
    if (a.population_size() != b.population_size()) {
        throw IncompatibleDesigns("total variation needs designs on the same population");
    }
    const auto ma = a.masses();
    const auto mb = b.masses();
    double total = 0.0;
    for (std::size_t s = 0; s < ma.size(); ++s) total += std::abs(ma[s] - mb[s]);
    return std::min(1.0, 0.5 * total);
}

double sup_deviation(const LossTable& losses, const SampleIndicator& sample, std::span<const double> pi) {
    if (losses.empty()) throw InvalidArgument("sup deviation over an empty classifier class");
    double worst = 0.0;
    for (const auto& row : losses) {
        const double ht = weighted_sample_risk(row, sample, pi, RiskKind::HT).value;
        worst = std::max(worst, std::abs(ht - empirical_risk(row).value));
    }
    return worst;
}

double sup_deviation(const LossTable& losses, SubsetMask sample, std::span<const double> pi) {
    if (losses.empty()) throw InvalidArgument("sup deviation over an empty classifier class");
    double worst = 0.0;
    for (const auto& row : losses) {
        worst = std::max(worst, std::abs(weighted_sample_risk(row, sample, pi) - empirical_risk(row).value));
    }
    return worst;
}

double sup_deviation(const Population& pop, std::span<const Classifier> classifiers, const SampleIndicator& sample,
                     std::span<const double> pi) {
    return sup_deviation(misclassification_table(pop, classifiers), sample, pi);
}

std::vector<double> sup_deviation_tail(const EnumeratedDesign& design, const LossTable& losses,
                                       std::span<const double> pi, std::span<const double> thresholds) {
    std::vector<double> tail(thresholds.size(), 0.0);
    design.for_each_support([&](SubsetMask s, double m) {
        const double dev = sup_deviation(losses, s, pi);
        for (std::size_t k = 0; k < thresholds.size(); ++k) {
            if (dev >= thresholds[k]) tail[k] += m;
        }
    });
    return tail;
}

double expected_ht_risk(const EnumeratedDesign& design, std::span<const double> losses,
                        std::span<const double> pi) {
    return design.expectation([&](SubsetMask s) { return weighted_sample_risk(losses, s, pi); });
}

std::size_t ht_minimizer(const LossTable& losses, SubsetMask sample, std::span<const double> pi) {
    if (losses.empty()) throw InvalidArgument("minimiser over an empty classifier class");
    std::size_t best = 0;
    double best_risk = weighted_sample_risk(losses[0], sample, pi);
    for (std::size_t g = 1; g < losses.size(); ++g) {
        const double r = weighted_sample_risk(losses[g], sample, pi);
        if (r < best_risk) {
            best_risk = r;
            best = g;
        }
    }
    return best;
}

}  // namespace survey
