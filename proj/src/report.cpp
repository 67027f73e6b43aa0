#include "survey/report.hpp"

namespace survey {

namespace {

// Relative slack for comparing an exact probability with a closed form.
constexpr double kSlack = 1e-12;

}  // namespace

bool BoundReport::all_valid() const {
    for (const auto& c : deviation_checks) {
        if (!c.valid) return false;
    }
    for (const auto& c : bernstein_checks) {
        if (!c.valid) return false;
    }
    return theorem2_valid.value_or(true);
}

BoundReport bound_report(const BoundInputs& inputs, const EmpiricalEvidence& evidence) {
    BoundReport r;
    r.inputs = inputs;
    r.deviation = prop1_deviation_bound(inputs);
    r.prop1 = prop1_excess_bound(inputs);
    r.theorem2 = theorem2_bound(inputs);

    for (const auto& p : evidence.deviation_tail) {
        const double b = prop1_deviation_tail(inputs, p.t);
        r.deviation_checks.push_back({p.t, p.probability, b, p.probability <= b * (1.0 + kSlack) + kSlack});
    }
    if (evidence.bernstein) {
        for (const auto& p : evidence.bernstein_tail) {
            BernsteinInputs b = *evidence.bernstein;
            b.t = p.t;
            const double bound = bernstein_tail(b);
            r.bernstein_checks.push_back({p.t, p.probability, bound, p.probability <= bound * (1.0 + kSlack) + kSlack});
        }
    }
    if (evidence.expected_excess) {
        r.expected_excess = evidence.expected_excess;
        r.theorem2_valid = *evidence.expected_excess <= r.theorem2.total + kSlack;
        r.smallest_C = smallest_valid_C(inputs, *evidence.expected_excess);
    }
    return r;
}

}  // namespace survey
