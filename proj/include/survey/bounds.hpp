#pragma once

// Closed-form deviation and excess-risk bounds for HT risk minimisation.
// All logarithms are natural.

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace survey {

struct BoundInputs {
    double N = 1.0;
    double n = 1.0;
    double V = 1.0;           ///< VC dimension
    double delta = 0.05;
    double kappa = 1.0;
    double kappa_star = 1.0;
    /// Universal constant of the excess-risk bounds. Its value is not specified
    /// anywhere; 1 is a placeholder default.
    double C = 1.0;
    double tv = 0.0;
    double bias_gap = 0.0;    ///< inf_G L(g) - L*
    /// When set, replaces V log(N+1) by log(#class) for an explicit finite class.
    std::optional<double> log_class_size;

    /// Throws InvalidArgument when an invariant is violated.
    void validate() const;
    /// V log(N+1), or log(#class) when log_class_size is set.
    double complexity() const;
};

/// 2 kappa L/(3n) + sqrt(2 kappa L/n) with L = log(2/delta) + complexity.
double prop1_deviation_bound(const BoundInputs& in);

/// Tail form of the same bound: min(1, 2 e^complexity exp(-n t^2 / ((2/3) kappa t + 2 kappa))).
double prop1_deviation_tail(const BoundInputs& in, double t);

struct ExcessTerms {
    double estimation = 0.0;      ///< square-root sampling term
    double estimation_linear = 0.0;
    double vc = 0.0;              ///< C sqrt(V/N)
    double concentration = 0.0;   ///< 2 sqrt(2 log(2/delta)/N); zero in the expectation bound
    double coupling = 0.0;        ///< 2 (kappa* + kappa)(N/n) tv; zero in the rejective bound
    double bias = 0.0;
    double total = 0.0;
};

/// Excess-risk bound of the HT minimiser under rejective sampling (high probability).
ExcessTerms prop1_excess_bound(const BoundInputs& in);

/// Expected excess-risk bound for a general design coupled to a rejective one.
ExcessTerms theorem2_bound(const BoundInputs& in);

/// Smallest C >= 0 for which theorem2_bound covers `excess`.
double smallest_valid_C(const BoundInputs& in, double excess);

struct BernsteinInputs {
    double c = 1.0;
    std::vector<double> sigma_sq;
    double t = 1.0;

    void validate() const;
};

/// exp(-t^2 / ((2/3) c t + 2 sum sigma_i^2)) for sums of negatively associated variables.
double bernstein_tail(const BernsteinInputs& in);
/// Two-sided version, twice the one-sided bound (capped at 1).
double bernstein_two_sided_tail(const BernsteinInputs& in);

}  // namespace survey
