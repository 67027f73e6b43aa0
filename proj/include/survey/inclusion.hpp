#pragma once

// Relations between the canonical parameters p of a rejective design and its
// first-order inclusion probabilities pi.

#include <cstddef>
#include <span>
#include <vector>

namespace survey {

/// First-order inclusion probabilities together with n = sum(pi) and
/// kappa = (n/N) / min_i pi_i.
struct InclusionProbs {
    std::vector<double> pi;
    double n = 0.0;
    double kappa = 0.0;

    /// Throws InvalidArgument unless every pi_i lies in (0, 1].
    static InclusionProbs from(std::vector<double> pi);

    std::size_t population_size() const noexcept { return pi.size(); }
};

/// d_N, d*_N, p~ and pi~ of a (p, pi) pair.
struct PoissonDiagnostics {
    double d_N = 0.0;
    double d_N_star = 0.0;
    double p_tilde = 0.0;
    double pi_tilde = 0.0;
};

PoissonDiagnostics poisson_diagnostics(std::span<const double> p, std::span<const double> pi);

/// P(sum of independent Bernoulli(p_i) == k) for k = 0..N.
std::vector<double> poisson_size_distribution(std::span<const double> p);

/// Inclusion probabilities of the rejective design with parameters p and size n.
///
/// pi_i = p_i P(S_{-i} = n-1) / P(S = n), where S is the Poisson(p) sample size.
/// The size distribution is built by a row-normalized dynamic programme and
/// each leave-one-out term is recovered by deconvolution, run upwards for
/// p_i <= 1/2 and downwards otherwise so the recursion is contracting.
/// p need not be canonical.
InclusionProbs exact_pi_from_p(std::span<const double> p, std::size_t sample_size);

struct CanonicalSolverOptions {
    double tolerance = 1e-9;
    std::size_t max_iterations = 10'000;
};

/// Canonical parameter p (sum p == n) whose rejective design has inclusion
/// probabilities `target`. Damped fixed point on the odds:
/// logit p <- logit p + step * (logit pi_target - logit pi(p)), followed by the
/// odds-ratio renormalisation that restores sum p == n.
std::vector<double> solve_canonical_p(const InclusionProbs& target, CanonicalSolverOptions options = {});

/// Rescales the odds p_i/(1-p_i) by a common factor so that sum p == n.
/// Leaves the rejective design unchanged.
std::vector<double> normalize_canonical(std::span<const double> p, double sample_size);

struct HajekApproximation {
    std::vector<double> values;
    /// d_N (or d*_N) below 1: outside the regime where the relation is meaningful.
    bool out_of_regime = false;
};

/// First-order Hajek approximation of pi from p:
/// pi_i/(1-pi_i) = p_i/(1-p_i) * (1 - (p~ - p_i)/d_N), remainder dropped.
HajekApproximation hajek_pi_from_p(std::span<const double> p);

/// First-order Hajek approximation of p from pi:
/// pi_i/(1-pi_i) = p_i/(1-p_i) * (1 - (pi~ - pi_i)/d*_N), remainder dropped.
HajekApproximation hajek_p_from_pi(std::span<const double> pi);

/// Per-unit and aggregate bias control between 1/p and 1/pi.
struct BiasLemmaReport {
    std::vector<double> gap;          ///< |1/pi_i - 1/p_i|
    std::vector<double> unit_bound;   ///< (6/d_N)(1-pi_i)/pi_i
    std::vector<std::size_t> violations;
    double aggregate = 0.0;           ///< (1/N) sum |1/p_i - 1/pi_i|
    double aggregate_bound = 0.0;     ///< 6 N kappa / (n d_N)
    double d_N = 0.0;
    double kappa = 0.0;
    bool in_regime = false;           ///< d_N >= 1

    bool holds() const noexcept { return violations.empty() && aggregate <= aggregate_bound; }
};

BiasLemmaReport bias_lemma_bound(std::span<const double> p, const InclusionProbs& pi);

}  // namespace survey
