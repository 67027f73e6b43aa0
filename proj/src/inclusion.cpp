#include "survey/inclusion.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <unordered_map>

#include "survey/errors.hpp"

namespace survey {

namespace {

constexpr double kFlushBelow = 1e-250;
constexpr std::size_t kRenormalizeEvery = 32;

double logit(double x) { return std::log(x) - std::log1p(-x); }
double sigmoid(double u) { return u >= 0.0 ? 1.0 / (1.0 + std::exp(-u)) : std::exp(u) / (1.0 + std::exp(u)); }

void require_probabilities(std::span<const double> p) {
    if (p.empty()) throw InvalidArgument("empty parameter vector");
    for (double v : p) {
        if (!(v > 0.0 && v < 1.0)) throw InvalidArgument("parameters must lie in (0,1)");
    }
}

// Size distribution of Poisson(p) truncated to 0..max_k, scaled by an unknown
// common factor: every kRenormalizeEvery units the row is divided by its
// maximum and entries below kFlushBelow are zeroed. Returns log of the scale.
double scaled_size_pmf(std::span<const double> p, std::size_t max_k, std::vector<double>& row) {
    row.assign(max_k + 1, 0.0);
    row[0] = 1.0;
    double log_scale = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        const double pi = p[i];
        const double qi = 1.0 - pi;
        const std::size_t upper = std::min(i + 1, max_k);
        for (std::size_t k = upper; k >= 1; --k) row[k] = row[k] * qi + row[k - 1] * pi;
        row[0] *= qi;
        if ((i + 1) % kRenormalizeEvery == 0 || i + 1 == p.size()) {
            const double top = *std::max_element(row.begin(), row.begin() + static_cast<std::ptrdiff_t>(upper) + 1);
            log_scale += std::log(top);
            for (std::size_t k = 0; k <= upper; ++k) {
                row[k] /= top;
                if (row[k] < kFlushBelow) row[k] = 0.0;
            }
        }
    }
    return log_scale;
}

}  // namespace

InclusionProbs InclusionProbs::from(std::vector<double> pi) {
    if (pi.empty()) throw InvalidArgument("empty inclusion probability vector");
    double lowest = 1.0;
    for (double v : pi) {
        if (!(v > 0.0 && v <= 1.0)) throw InvalidArgument("inclusion probabilities must lie in (0,1]");
        lowest = std::min(lowest, v);
    }
    InclusionProbs out;
    out.n = std::accumulate(pi.begin(), pi.end(), 0.0);
    out.kappa = (out.n / static_cast<double>(pi.size())) / lowest;
    out.pi = std::move(pi);
    return out;
}

PoissonDiagnostics poisson_diagnostics(std::span<const double> p, std::span<const double> pi) {
    PoissonDiagnostics d;
    double p_num = 0.0;
    double pi_num = 0.0;
    for (double v : p) {
        d.d_N += v * (1.0 - v);
        p_num += v * v * (1.0 - v);
    }
    for (double v : pi) {
        d.d_N_star += v * (1.0 - v);
        pi_num += v * v * (1.0 - v);
    }
    d.p_tilde = d.d_N > 0.0 ? p_num / d.d_N : 0.0;
    d.pi_tilde = d.d_N_star > 0.0 ? pi_num / d.d_N_star : 0.0;
    return d;
}

std::vector<double> poisson_size_distribution(std::span<const double> p) {
    require_probabilities(p);
    std::vector<double> row;
    const double log_scale = scaled_size_pmf(p, p.size(), row);
    for (auto& v : row) v = v > 0.0 ? std::exp(std::log(v) + log_scale) : 0.0;
    return row;
}

std::vector<double> normalize_canonical(std::span<const double> p, double sample_size) {
    require_probabilities(p);
    const double N = static_cast<double>(p.size());
    if (!(sample_size > 0.0 && sample_size < N)) throw InvalidArgument("canonical normalisation needs 0 < n < N");

    std::vector<double> logits(p.size());
    std::transform(p.begin(), p.end(), logits.begin(), logit);
    auto total_at = [&](double shift, double& slope) {
        double total = 0.0;
        slope = 0.0;
        for (double l : logits) {
            const double q = sigmoid(l + shift);
            total += q;
            slope += q * (1.0 - q);
        }
        return total - sample_size;
    };

    // Safeguarded Newton on the common log-odds shift; f is increasing in the shift.
    double lo = -1.0;
    double hi = 1.0;
    double slope = 0.0;
    while (total_at(lo, slope) > 0.0) lo *= 2.0;
    while (total_at(hi, slope) < 0.0) hi *= 2.0;
    double shift = 0.0;
    for (int iter = 0; iter < 200; ++iter) {
        const double f = total_at(shift, slope);
        if (std::abs(f) <= 1e-13 * sample_size) break;
        if (f > 0.0) {
            hi = shift;
        } else {
            lo = shift;
        }
        double next = slope > 0.0 ? shift - f / slope : 0.5 * (lo + hi);
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        if (next == shift) break;
        shift = next;
    }
    std::vector<double> out(p.size());
    std::transform(logits.begin(), logits.end(), out.begin(), [&](double l) { return sigmoid(l + shift); });
    return out;
}

InclusionProbs exact_pi_from_p(std::span<const double> p_in, std::size_t sample_size) {
    require_probabilities(p_in);
    const std::size_t N = p_in.size();
    if (sample_size == 0 || sample_size > N) throw InvalidArgument("exact inclusion probabilities need 1 <= n <= N");
    if (sample_size == N) return InclusionProbs::from(std::vector<double>(N, 1.0));

    // Odds rescaling leaves the conditional design unchanged and puts n at the
    // centre of the Poisson size distribution.
    const std::vector<double> p = normalize_canonical(p_in, static_cast<double>(sample_size));
    const std::size_t n = sample_size;
    const bool any_large = std::any_of(p.begin(), p.end(), [](double v) { return v > 0.5; });
    const std::size_t top = any_large ? N : n;

    std::vector<double> P;
    scaled_size_pmf(p, top, P);
    const double P_n = P[n];
    if (!(P_n > 0.0) || !std::isfinite(P_n)) throw NumericInstability("size distribution vanished at n");

    // q = P(S_{-i} = n-1), computed by deconvolving unit i out of P.
    auto leave_one_out = [&](double pi) {
        if (pi <= 0.5) {
            const double q = 1.0 - pi;
            double prev = P[0] / q;
            for (std::size_t k = 1; k < n; ++k) prev = (P[k] - pi * prev) / q;
            return prev;
        }
        const double q = 1.0 - pi;
        double next = P[N] / pi;  // P(S_{-i} = N-1)
        for (std::size_t k = N - 1; k >= n; --k) next = (P[k] - q * next) / pi;
        return next;
    };

    std::unordered_map<double, double> cache;
    std::vector<double> pi(N);
    for (std::size_t i = 0; i < N; ++i) {
        auto [it, inserted] = cache.try_emplace(p[i], 0.0);
        if (inserted) it->second = leave_one_out(p[i]);
        pi[i] = p[i] * it->second / P_n;
        if (!std::isfinite(pi[i])) throw NumericInstability("non-finite inclusion probability");
        pi[i] = std::clamp(pi[i], std::numeric_limits<double>::min(), 1.0);
    }
    const double total = std::accumulate(pi.begin(), pi.end(), 0.0);
    if (std::abs(total - static_cast<double>(n)) > 1e-8 * static_cast<double>(n)) {
        throw NumericInstability("inclusion probabilities sum to " + std::to_string(total) + " instead of " +
                                 std::to_string(n));
    }
    return InclusionProbs::from(std::move(pi));
}

std::vector<double> solve_canonical_p(const InclusionProbs& target, CanonicalSolverOptions options) {
    const auto& goal = target.pi;
    for (double v : goal) {
        if (!(v > 0.0 && v < 1.0)) throw InvalidArgument("canonical solver needs target probabilities in (0,1)");
    }
    const double total = std::accumulate(goal.begin(), goal.end(), 0.0);
    const double rounded = std::round(total);
    if (rounded < 1.0 || std::abs(total - rounded) > 1e-6) {
        throw InvalidArgument("target inclusion probabilities must sum to an integer sample size");
    }
    const auto n = static_cast<std::size_t>(rounded);

    std::vector<double> goal_logit(goal.size());
    std::transform(goal.begin(), goal.end(), goal_logit.begin(), logit);
    std::vector<double> p = normalize_canonical(goal, rounded);
    std::vector<double> p_logit(p.size());

    double step = 1.0;
    double previous = std::numeric_limits<double>::infinity();
    double residual = previous;
    for (std::size_t iter = 0; iter < options.max_iterations; ++iter) {
        const auto current = exact_pi_from_p(p, n);
        residual = 0.0;
        for (std::size_t i = 0; i < p.size(); ++i) residual = std::max(residual, std::abs(current.pi[i] - goal[i]));
        if (residual <= options.tolerance) return p;
        if (residual > previous) step *= 0.5;
        previous = residual;
        for (std::size_t i = 0; i < p.size(); ++i) {
            const double now = std::clamp(current.pi[i], 1e-300, 1.0 - 1e-16);
            p_logit[i] = logit(p[i]) + step * (goal_logit[i] - logit(now));
            p[i] = sigmoid(p_logit[i]);
        }
        p = normalize_canonical(p, rounded);
    }
    throw SolverFailure("canonical parameter solver did not converge (residual " + std::to_string(residual) + ")",
                        residual, options.max_iterations);
}

HajekApproximation hajek_pi_from_p(std::span<const double> p) {
    require_probabilities(p);
    const auto diag = poisson_diagnostics(p, p);
    HajekApproximation out;
    out.out_of_regime = diag.d_N < 1.0;
    out.values.resize(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) {
        const double factor = std::max(0.0, 1.0 - (diag.p_tilde - p[i]) / diag.d_N);
        const double odds = p[i] / (1.0 - p[i]) * factor;
        out.values[i] = odds / (1.0 + odds);
    }
    return out;
}

HajekApproximation hajek_p_from_pi(std::span<const double> pi) {
    require_probabilities(pi);
    const auto diag = poisson_diagnostics(pi, pi);
    HajekApproximation out;
    out.out_of_regime = diag.d_N_star < 1.0;
    out.values.resize(pi.size());
    for (std::size_t i = 0; i < pi.size(); ++i) {
        const double factor = 1.0 - (diag.pi_tilde - pi[i]) / diag.d_N_star;
        if (factor <= 0.0) {
            out.values[i] = 1.0;
            continue;
        }
        const double odds = pi[i] / (1.0 - pi[i]) / factor;
        out.values[i] = odds / (1.0 + odds);
    }
    return out;
}

BiasLemmaReport bias_lemma_bound(std::span<const double> p, const InclusionProbs& pi) {
    require_probabilities(p);
    if (p.size() != pi.pi.size()) throw InvalidArgument("p and pi must have the same length");
    const auto N = static_cast<double>(p.size());
    const auto diag = poisson_diagnostics(p, pi.pi);

    BiasLemmaReport r;
    r.d_N = diag.d_N;
    r.kappa = pi.kappa;
    r.in_regime = diag.d_N >= 1.0;
    r.gap.resize(p.size());
    r.unit_bound.resize(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) {
        const double v = pi.pi[i];
        r.gap[i] = std::abs(1.0 / v - 1.0 / p[i]);
        r.unit_bound[i] = 6.0 / diag.d_N * (1.0 - v) / v;
        if (r.gap[i] > r.unit_bound[i] * (1.0 + 1e-12) + 1e-15) r.violations.push_back(i);
        r.aggregate += r.gap[i];
    }
    r.aggregate /= N;
    r.aggregate_bound = 6.0 * N * pi.kappa / (pi.n * diag.d_N);
    return r;
}

}  // namespace survey
