#pragma once

// Auditable bound reports: every input, every term, and validity flags
// against exact or empirical tails supplied by the caller.

#include <optional>
#include <vector>

#include "survey/bounds.hpp"

namespace survey {

struct TailPoint {
    double t = 0.0;
    double probability = 0.0;  ///< exact or empirical P{statistic >= t}
};

struct TailCheck {
    double t = 0.0;
    double observed = 0.0;
    double bound = 0.0;
    bool valid = false;
};

struct EmpiricalEvidence {
    /// Tail of sup_g |HT risk - empirical risk|, checked against prop1_deviation_tail.
    std::vector<TailPoint> deviation_tail;
    /// Tail of a centered sum, checked against bernstein_tail with `bernstein` parameters.
    std::optional<BernsteinInputs> bernstein;
    std::vector<TailPoint> bernstein_tail;
    /// Expected excess risk, checked against theorem2_bound.
    std::optional<double> expected_excess;
};

struct BoundReport {
    BoundInputs inputs;
    double deviation = 0.0;
    ExcessTerms prop1;
    ExcessTerms theorem2;
    std::vector<TailCheck> deviation_checks;
    std::vector<TailCheck> bernstein_checks;
    std::optional<double> expected_excess;
    std::optional<bool> theorem2_valid;
    std::optional<double> smallest_C;

    bool all_valid() const;
};

BoundReport bound_report(const BoundInputs& inputs, const EmpiricalEvidence& evidence = {});

}  // namespace survey
