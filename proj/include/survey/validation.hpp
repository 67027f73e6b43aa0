#pragma once

// Exhaustive-enumeration oracles run as pass/fail suites on seeded random
// instances. Failures are report entries, never exceptions.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "survey/report.hpp"

namespace survey {

struct SuiteResult {
    std::string name;
    bool passed = true;
    std::size_t instances = 0;
    std::size_t skipped = 0;     ///< instances outside the suite's regime
    std::size_t checks = 0;
    std::size_t violations = 0;
    double worst = 0.0;          ///< suite-specific worst-case statistic
    std::string detail;
};

/// E_design[HT risk] equals the empirical risk to 1e-12 for all five design
/// kinds. corrupt_pi perturbs one declared inclusion probability.
SuiteResult check_unbiasedness(std::size_t instances, std::size_t max_N, std::uint64_t seed,
                               bool corrupt_pi = false);

/// Exact pi from p against enumeration marginals (1e-10) and the canonical
/// solver round trip (1e-8 on pi and on canonical p).
SuiteResult check_inclusion_exactness(std::size_t instances, std::size_t max_N, std::uint64_t seed);

/// pi_ij <= pi_i pi_j and nonpositive covariance of increasing functions on
/// disjoint blocks, for enumerated rejective designs.
SuiteResult check_negative_association(std::size_t instances, std::size_t max_N, std::uint64_t seed);

/// Sup error of both first-order approximations strictly decreases along the
/// tilings m = 1, 5, 25 of each base instance. worst is the largest error ratio err(m_{k+1})/err(m_k).
SuiteResult check_hajek_trend(std::size_t base_instances, std::uint64_t seed);

/// Per-unit and aggregate bias bounds on enumerated instances with d_N >= 1 and
/// on tiled instances up to max_tiled_N using exact pi from p.
SuiteResult check_bias_lemma(std::size_t instances, std::size_t max_N, std::uint64_t seed,
                             std::size_t max_tiled_N = 200);

/// Exact tail of sum_i (eps_i/pi_i - 1) a_i / N against bernstein_tail on a t-grid.
SuiteResult check_bernstein(std::size_t instances, std::size_t N, std::span<const std::size_t> sizes,
                            std::size_t grid_points, std::uint64_t seed);

/// Exact sup-deviation tail over a one-polarity stump class against the
/// finite-class deviation tail, rejective designs of size n on N points.
SuiteResult check_prop1_validity(std::size_t instances, std::size_t N, std::size_t n, std::size_t grid_points,
                                 std::uint64_t seed);

/// Rao-Sampford vs rejective with the same inclusion probabilities on N points,
/// n = 2: exact expected excess risk of the HT-minimising stump against the
/// assembled bound. worst is the largest smallest-valid C.
SuiteResult check_theorem2(std::size_t instances, std::size_t N, std::uint64_t seed);

/// Bound report for a seeded rejective instance of size (inputs.N, inputs.n):
/// kappa and the class size are taken from the instance, and the report carries
/// exact sup-deviation and Bernstein tails. Needs N <= 12.
BoundReport validation_bound_report(const BoundInputs& inputs, std::uint64_t seed);

struct ValidationOptions {
    std::size_t max_N = 8;
    std::size_t instances = 100;
    std::uint64_t seed = 1;
    bool corrupt_pi = false;
};

struct ValidationReport {
    ValidationOptions options;
    std::vector<SuiteResult> suites;

    bool all_passed() const;
};

/// Runs every suite above; max_N must lie in [5, 12].
ValidationReport run_validation_suite(const ValidationOptions& options);

}  // namespace survey
