#pragma once

// Two-Gaussian replication study: rejective sample with class-dependent
// inclusion probabilities, weighted vs unweighted learners, SRSWOR baseline.

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "survey/designs.hpp"
#include "survey/learners.hpp"
#include "survey/population.hpp"
#include "survey/random.hpp"

namespace survey {

struct PopulationSpec {
    std::size_t dims = 10;
    double positive_mean = 0.0;  ///< every coordinate
    double negative_mean = 1.0;
    double positive_variance = 1.0;  ///< isotropic
    double negative_variance = 10.0;
    std::size_t positive_train = 10'000;
    std::size_t negative_train = 10'000;
    std::size_t positive_test = 1'000;
    std::size_t negative_test = 1'000;

    void validate() const;
};

struct GeneratedData {
    Population train;
    Population test;
};

/// Positive units first, then negative, in both populations.
GeneratedData gen_gaussian_population(const PopulationSpec& spec, Rng& rng);

/// Rejective design whose exact inclusion probabilities are pi_pos on label +1
/// and pi_neg on label -1. Equal values give the SRSWOR spec. Throws
/// InvalidArgument unless the implied sample size is an integer.
DesignSpec build_rejective_training_design(const Population& pop, double pi_pos, double pi_neg);

enum class Variant { SvmWeighted, SvmUnweighted, SvmSrswor, TreeWeighted, TreeUnweighted, TreeSrswor };
inline constexpr std::size_t kVariantCount = 6;
std::string_view to_string(Variant v);

struct ExperimentConfig {
    PopulationSpec population{};
    double pi_positive = 0.01;
    double pi_negative = 0.1;
    std::size_t replications = 50;
    std::uint64_t master_seed = 2017;
    SvmOptions svm{};
    CrossValidationOptions cv{};
    /// When false the SVM uses svm.lambda without cross-validation.
    bool select_lambda = true;
    TreeOptions tree{};
    std::size_t threads = 0;  ///< 0: hardware concurrency

    void validate() const;

    /// 20000 training points, 2000 test points, 50 replications.
    static ExperimentConfig full();
    /// Four times smaller: 5000 / 500 points, 20 replications.
    static ExperimentConfig desk();
};

struct ReplicationRow {
    std::size_t replication = 0;
    std::uint64_t seed = 0;
    std::size_t sample_size = 0;
    double test_error[kVariantCount] = {};
    double lambda[3] = {};  ///< selected for the three SVM variants
    std::string error;      ///< empty on success

    bool ok() const { return error.empty(); }
};

struct VariantSummary {
    double mean = 0.0;
    double std_dev = 0.0;  ///< sample standard deviation (n-1)
    std::size_t count = 0;
};

struct ExperimentReport {
    ExperimentConfig config;
    std::vector<ReplicationRow> rows;
    VariantSummary summary[kVariantCount];
    std::size_t failed_replications = 0;
    std::size_t svm_gap_positive = 0;   ///< replications with unweighted > weighted
    std::size_t tree_gap_positive = 0;
    double runtime_seconds = 0.0;

    bool partial_failure() const { return failed_replications > 0; }
    const VariantSummary& operator[](Variant v) const { return summary[static_cast<std::size_t>(v)]; }
};

/// Replication r regenerates the data and redraws the samples from streams
/// derived from (master_seed, r); rows are stored in replication order.
ExperimentReport run_experiment(const ExperimentConfig& config);

/// Mean and sample standard deviation of the successful rows for each variant.
void summarize(ExperimentReport& report);

}  // namespace survey
