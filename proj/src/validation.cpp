#include "survey/validation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "survey/designs.hpp"
#include "survey/errors.hpp"
#include "survey/estimators.hpp"
#include "survey/inclusion.hpp"
#include "survey/population.hpp"
#include "survey/random.hpp"

namespace survey {

namespace {

std::size_t uniform_int(Rng& rng, std::size_t lo, std::size_t hi) {
    return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

std::vector<double> random_p(std::size_t N, Rng& rng, double lo = 0.05, double hi = 0.95) {
    std::uniform_real_distribution<double> u(lo, hi);
    std::vector<double> p(N);
    for (auto& v : p) v = u(rng);
    return p;
}

std::vector<double> random_canonical(std::size_t N, std::size_t n, Rng& rng) {
    return normalize_canonical(random_p(N, rng), static_cast<double>(n));
}

std::vector<double> random_losses(std::size_t N, Rng& rng) {
    std::vector<double> l(N);
    for (auto& v : l) v = static_cast<double>(rng() & 1u);
    return l;
}

std::vector<double> tile(std::span<const double> base, std::size_t m) {
    std::vector<double> out;
    out.reserve(base.size() * m);
    for (std::size_t k = 0; k < m; ++k) out.insert(out.end(), base.begin(), base.end());
    return out;
}

double sup_abs_diff(std::span<const double> a, std::span<const double> b) {
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
    return worst;
}

DesignSpec random_design(DesignKind kind, std::size_t N, Rng& rng) {
    switch (kind) {
        case DesignKind::Poisson: return DesignSpec::poisson(random_p(N, rng));
        case DesignKind::Srswor: return DesignSpec::srswor(N, uniform_int(rng, 1, N - 1));
        case DesignKind::Rejective: {
            const auto n = uniform_int(rng, 1, N - 1);
            return DesignSpec::rejective(random_canonical(N, n, rng), n);
        }
        case DesignKind::Stratified: {
            std::vector<std::size_t> units(N);
            std::iota(units.begin(), units.end(), 0);
            std::shuffle(units.begin(), units.end(), rng);
            const std::size_t cut = uniform_int(rng, 1, N - 1);
            std::vector<std::vector<std::size_t>> strata{{units.begin(), units.begin() + static_cast<std::ptrdiff_t>(cut)},
                                                         {units.begin() + static_cast<std::ptrdiff_t>(cut), units.end()}};
            std::vector<std::size_t> sizes;
            for (const auto& s : strata) sizes.push_back(uniform_int(rng, 1, s.size()));
            return DesignSpec::stratified(std::move(strata), std::move(sizes));
        }
        case DesignKind::RaoSampford: {
            const auto n = uniform_int(rng, 1, N - 1);
            return DesignSpec::rao_sampford(exact_pi_from_p(random_p(N, rng), n).pi);
        }
    }
    throw InvalidArgument("unknown design kind");
}

void finish(SuiteResult& r, std::ostringstream& detail) {
    r.passed = r.violations == 0 && r.instances > 0;
    r.detail = detail.str();
}

// Nondecreasing functions of the indicators restricted to a block.
double increasing_function(int family, SubsetMask s, std::span<const std::size_t> block, std::span<const double> w) {
    double total = 0.0;
    bool any = false;
    bool all = true;
    for (std::size_t k = 0; k < block.size(); ++k) {
        const bool in = (s >> block[k]) & 1u;
        total += in ? w[k] : 0.0;
        any = any || in;
        all = all && in;
    }
    switch (family) {
        case 0: return total;
        case 1: return any ? 1.0 : 0.0;
        case 2: return all ? 1.0 : 0.0;
        default: return total >= 0.5 * std::accumulate(w.begin(), w.end(), 0.0) ? 1.0 : 0.0;
    }
}

// P(X <= x) for a standard normal.
double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

}  // namespace

SuiteResult check_unbiasedness(std::size_t instances, std::size_t max_N, std::uint64_t seed, bool corrupt_pi) {
    SuiteResult r;
    r.name = "unbiasedness";
    std::ostringstream detail;
    constexpr DesignKind kinds[] = {DesignKind::Poisson, DesignKind::Srswor, DesignKind::Rejective,
                                    DesignKind::Stratified, DesignKind::RaoSampford};
    for (std::size_t k = 0; k < instances; ++k) {
        Rng rng = make_rng(seed, k);
        const auto N = uniform_int(rng, 4, max_N);
        const auto spec = random_design(kinds[k % 5], N, rng);
        const auto design = enumerate_design(spec);
        auto pi = declared_inclusion_probs(spec);
        if (corrupt_pi) pi[0] *= 0.9;
        for (int rep = 0; rep < 3; ++rep) {
            auto losses = random_losses(N, rng);
            if (corrupt_pi) losses[0] = 1.0;
            const double gap = std::abs(expected_ht_risk(design, losses, pi) - empirical_risk(losses).value);
            ++r.checks;
            r.worst = std::max(r.worst, gap);
            if (gap > 1e-12) {
                if (r.violations++ == 0) detail << "first violation: " << to_string(spec.kind()) << " N=" << N;
            }
        }
        ++r.instances;
    }
    detail << (r.violations ? "; " : "") << "max |E[HT] - empirical| = " << r.worst;
    finish(r, detail);
    return r;
}

SuiteResult check_inclusion_exactness(std::size_t instances, std::size_t max_N, std::uint64_t seed) {
    SuiteResult r;
    r.name = "inclusion_exactness";
    std::ostringstream detail;
    double worst_roundtrip = 0.0;
    for (std::size_t k = 0; k < instances; ++k) {
        Rng rng = make_rng(seed, k);
        const auto N = uniform_int(rng, 4, max_N);
        const auto n = uniform_int(rng, 1, N - 1);
        const auto p = random_canonical(N, n, rng);
        const auto exact = exact_pi_from_p(p, n);
        const auto marginals = enumerate_design(DesignSpec::rejective(p, n)).first_order();
        const double err = sup_abs_diff(exact.pi, marginals);
        r.worst = std::max(r.worst, err);
        ++r.checks;
        if (err > 1e-10) ++r.violations;

        try {
            const auto solved = solve_canonical_p(exact);
            const double p_err = sup_abs_diff(solved, p);
            const double pi_err = sup_abs_diff(exact_pi_from_p(solved, n).pi, exact.pi);
            worst_roundtrip = std::max({worst_roundtrip, p_err, pi_err});
            r.checks += 2;
            if (p_err > 1e-8) ++r.violations;
            if (pi_err > 1e-8) ++r.violations;
        } catch (const SolverFailure& e) {
            ++r.violations;
            detail << "solver failure at instance " << k << ": " << e.what() << "; ";
        }
        ++r.instances;
    }
    detail << "max |pi - marginal| = " << r.worst << ", max round-trip error = " << worst_roundtrip;
    finish(r, detail);
    return r;
}

SuiteResult check_negative_association(std::size_t instances, std::size_t max_N, std::uint64_t seed) {
    SuiteResult r;
    r.name = "negative_association";
    std::ostringstream detail;
    r.worst = -1.0;
    for (std::size_t k = 0; k < instances; ++k) {
        Rng rng = make_rng(seed, k);
        const auto N = uniform_int(rng, 4, max_N);
        const auto n = uniform_int(rng, 1, N - 1);
        const auto design = enumerate_design(DesignSpec::rejective(random_canonical(N, n, rng), n));
        const auto pi = design.first_order();
        const auto joint = second_order_probs(design);
        for (std::size_t i = 0; i < N; ++i) {
            for (std::size_t j = i + 1; j < N; ++j) {
                const double excess = joint(i, j) - pi[i] * pi[j];
                r.worst = std::max(r.worst, excess);
                ++r.checks;
                if (excess > 1e-12) ++r.violations;
            }
        }
        // Disjoint blocks A, B and increasing f, g: Cov(f(eps_A), g(eps_B)) <= 0.
        for (int trial = 0; trial < 8; ++trial) {
            std::vector<std::size_t> units(N);
            std::iota(units.begin(), units.end(), 0);
            std::shuffle(units.begin(), units.end(), rng);
            const auto a_size = uniform_int(rng, 1, N - 1);
            const auto b_size = uniform_int(rng, 1, N - a_size);
            const std::span<const std::size_t> A(units.data(), a_size);
            const std::span<const std::size_t> B(units.data() + a_size, b_size);
            const auto wa = random_p(a_size, rng, 0.0, 1.0);
            const auto wb = random_p(b_size, rng, 0.0, 1.0);
            const int fa = static_cast<int>(rng() % 4);
            const int fb = static_cast<int>(rng() % 4);
            const double ef = design.expectation([&](SubsetMask s) { return increasing_function(fa, s, A, wa); });
            const double eg = design.expectation([&](SubsetMask s) { return increasing_function(fb, s, B, wb); });
            const double efg = design.expectation(
                [&](SubsetMask s) { return increasing_function(fa, s, A, wa) * increasing_function(fb, s, B, wb); });
            const double cov = efg - ef * eg;
            r.worst = std::max(r.worst, cov);
            ++r.checks;
            if (cov > 1e-12) ++r.violations;
        }
        ++r.instances;
    }
    detail << "largest pi_ij - pi_i pi_j or covariance = " << r.worst;
    finish(r, detail);
    return r;
}

SuiteResult check_hajek_trend(std::size_t base_instances, std::uint64_t seed) {
    SuiteResult r;
    r.name = "hajek_trend";
    std::ostringstream detail;
    constexpr std::size_t tilings[] = {1, 5, 25};
    for (std::size_t k = 0; k < base_instances; ++k) {
        Rng rng = make_rng(seed, k);
        const auto N0 = uniform_int(rng, 6, 10);
        auto base = random_p(N0, rng, 0.1, 0.9);
        const double total = std::accumulate(base.begin(), base.end(), 0.0);
        const auto n0 = std::clamp<std::size_t>(static_cast<std::size_t>(std::lround(total)), 1, N0 - 1);
        base = normalize_canonical(base, static_cast<double>(n0));

        double prev_pi = 0.0;
        double prev_p = 0.0;
        for (std::size_t t = 0; t < 3; ++t) {
            const auto p = tile(base, tilings[t]);
            const auto exact = exact_pi_from_p(p, n0 * tilings[t]);
            const double e_pi = sup_abs_diff(hajek_pi_from_p(p).values, exact.pi);
            const double e_p = sup_abs_diff(hajek_p_from_pi(exact.pi).values, p);
            if (t > 0) {
                r.checks += 2;
                if (!(e_pi < prev_pi)) ++r.violations;
                if (!(e_p < prev_p)) ++r.violations;
                r.worst = std::max({r.worst, e_pi / prev_pi, e_p / prev_p});
            }
            if (k == 0) detail << "m=" << tilings[t] << ": " << e_pi << " / " << e_p << "; ";
            prev_pi = e_pi;
            prev_p = e_p;
        }
        ++r.instances;
    }
    finish(r, detail);
    return r;
}

SuiteResult check_bias_lemma(std::size_t instances, std::size_t max_N, std::uint64_t seed, std::size_t max_tiled_N) {
    SuiteResult r;
    r.name = "bias_lemma";
    std::ostringstream detail;
    auto record = [&](std::span<const double> p, const InclusionProbs& pi) {
        const auto rep = bias_lemma_bound(p, pi);
        if (!rep.in_regime) {
            ++r.skipped;
            return;
        }
        ++r.instances;
        r.checks += p.size() + 1;
        r.violations += rep.violations.size();
        if (rep.aggregate > rep.aggregate_bound) ++r.violations;
        for (std::size_t i = 0; i < p.size(); ++i) r.worst = std::max(r.worst, rep.gap[i] / rep.unit_bound[i]);
    };
    for (std::size_t k = 0; k < instances; ++k) {
        Rng rng = make_rng(seed, k);
        const auto N = uniform_int(rng, 4, max_N);
        const auto n = uniform_int(rng, 1, N - 1);
        const auto p = random_canonical(N, n, rng);
        const auto pi = InclusionProbs::from(enumerate_design(DesignSpec::rejective(p, n)).first_order());
        record(p, pi);

        // Tiled copies, exact pi from the size distribution.
        for (std::size_t m = 2; N * m <= max_tiled_N; m *= 2) {
            const auto big = tile(p, m);
            record(big, exact_pi_from_p(big, n * m));
        }
    }
    detail << "largest gap / unit bound = " << r.worst << ", skipped (d_N < 1) = " << r.skipped;
    finish(r, detail);
    return r;
}

SuiteResult check_bernstein(std::size_t instances, std::size_t N, std::span<const std::size_t> sizes,
                            std::size_t grid_points, std::uint64_t seed) {
    SuiteResult r;
    r.name = "bernstein";
    std::ostringstream detail;
    if (sizes.empty() || grid_points == 0) throw InvalidArgument("Bernstein suite needs sample sizes and a grid");
    const auto Nd = static_cast<double>(N);
    for (std::size_t k = 0; k < instances; ++k) {
        Rng rng = make_rng(seed, k);
        const auto n = sizes[k % sizes.size()];
        const auto design = enumerate_design(DesignSpec::rejective(random_canonical(N, n, rng), n));
        const auto pi = design.first_order();
        auto a = random_losses(N, rng);
        a[uniform_int(rng, 0, N - 1)] = 1.0;

        BernsteinInputs in;
        in.c = 0.0;
        for (std::size_t i = 0; i < N; ++i) {
            in.c = std::max(in.c, a[i] * std::max(1.0 / pi[i] - 1.0, 1.0) / Nd);
            in.sigma_sq.push_back(a[i] * a[i] * (1.0 - pi[i]) / (pi[i] * Nd * Nd));
        }
        auto sum_z = [&](SubsetMask s) {
            double z = 0.0;
            for (std::size_t i = 0; i < N; ++i) z += (((s >> i) & 1u) / pi[i] - 1.0) * a[i] / Nd;
            return z;
        };
        double top = 0.0;
        design.for_each_support([&](SubsetMask s, double) { top = std::max(top, sum_z(s)); });
        if (!(top > 0.0)) top = in.c;
        for (std::size_t g = 1; g <= grid_points; ++g) {
            in.t = top * static_cast<double>(g) / static_cast<double>(grid_points);
            const double tail = design.expectation([&](SubsetMask s) { return sum_z(s) >= in.t - 1e-15 ? 1.0 : 0.0; });
            const double bound = bernstein_tail(in);
            ++r.checks;
            r.worst = std::max(r.worst, tail / bound);
            if (tail > bound * (1.0 + 1e-12)) ++r.violations;
        }
        ++r.instances;
    }
    detail << "largest exact tail / bound = " << r.worst;
    finish(r, detail);
    return r;
}

namespace {

struct StumpInstance {
    Population pop;
    LossTable losses;
    std::vector<double> pi;
    EnumeratedDesign design;
};

StumpInstance stump_instance(std::size_t N, std::size_t n, Rng& rng) {
    std::normal_distribution<double> normal;
    std::vector<double> x(N);
    std::vector<int> y(N);
    for (std::size_t i = 0; i < N; ++i) {
        y[i] = (rng() & 1u) ? 1 : -1;
        x[i] = normal(rng) + (y[i] > 0 ? 0.5 : -0.5);
    }
    Population pop(1, std::move(x), std::move(y));
    auto stumps = stump_grid(pop, 0, 1);
    auto losses = misclassification_table(pop, stumps);
    auto design = enumerate_design(DesignSpec::rejective(random_canonical(N, n, rng), n));
    auto pi = design.first_order();
    return {std::move(pop), std::move(losses), std::move(pi), std::move(design)};
}

std::vector<TailPoint> sup_tail(const StumpInstance& inst, std::size_t grid_points) {
    double top = 0.0;
    inst.design.for_each_support(
        [&](SubsetMask s, double) { top = std::max(top, sup_deviation(inst.losses, s, inst.pi)); });
    if (!(top > 0.0)) top = 1.0;
    std::vector<double> ts(grid_points);
    for (std::size_t g = 0; g < grid_points; ++g) ts[g] = top * static_cast<double>(g + 1) / static_cast<double>(grid_points);
    const auto probs = sup_deviation_tail(inst.design, inst.losses, inst.pi, ts);
    std::vector<TailPoint> out;
    for (std::size_t g = 0; g < grid_points; ++g) out.push_back({ts[g], probs[g]});
    return out;
}

}  // namespace

SuiteResult check_prop1_validity(std::size_t instances, std::size_t N, std::size_t n, std::size_t grid_points,
                                 std::uint64_t seed) {
    SuiteResult r;
    r.name = "prop1_validity";
    std::ostringstream detail;
    for (std::size_t k = 0; k < instances; ++k) {
        Rng rng = make_rng(seed, k);
        const auto inst = stump_instance(N, n, rng);
        BoundInputs in;
        in.N = static_cast<double>(N);
        in.n = static_cast<double>(n);
        in.kappa = InclusionProbs::from(inst.pi).kappa;
        in.log_class_size = std::log(static_cast<double>(inst.losses.size()));

        EmpiricalEvidence ev;
        ev.deviation_tail = sup_tail(inst, grid_points);
        // The bound itself at confidence delta.
        const double at = prop1_deviation_bound(in);
        ev.deviation_tail.push_back({at, sup_deviation_tail(inst.design, inst.losses, inst.pi, std::span(&at, 1))[0]});
        const auto rep = bound_report(in, ev);
        for (const auto& c : rep.deviation_checks) {
            ++r.checks;
            if (c.bound > 0.0) r.worst = std::max(r.worst, c.observed / c.bound);
            if (!c.valid) ++r.violations;
        }
        ++r.instances;
    }
    detail << "largest exact tail / bound = " << r.worst;
    finish(r, detail);
    return r;
}

SuiteResult check_theorem2(std::size_t instances, std::size_t N, std::uint64_t seed) {
    SuiteResult r;
    r.name = "theorem2";
    std::ostringstream detail;
    constexpr std::size_t n = 2;
    // Y = +-1 with probability 1/2, X | Y ~ N(Y, 1); stumps on a fixed threshold grid.
    std::vector<Stump> stumps;
    for (int polarity : {1, -1}) {
        for (int k = -4; k <= 4; ++k) stumps.push_back({0, 0.5 * k, polarity});
    }
    auto true_risk = [](const Stump& s) {
        const double up = 0.5 * normal_cdf(s.threshold - 1.0) + 0.5 * (1.0 - normal_cdf(s.threshold + 1.0));
        return s.polarity > 0 ? up : 1.0 - up;
    };
    std::vector<double> risk(stumps.size());
    std::transform(stumps.begin(), stumps.end(), risk.begin(), true_risk);
    const double best = *std::min_element(risk.begin(), risk.end());

    double worst_excess_ratio = 0.0;
    for (std::size_t k = 0; k < instances; ++k) {
        Rng rng = make_rng(seed, k);
        std::normal_distribution<double> normal;
        std::vector<double> x(N);
        std::vector<int> y(N);
        for (std::size_t i = 0; i < N; ++i) {
            y[i] = (rng() & 1u) ? 1 : -1;
            x[i] = normal(rng) + y[i];
        }
        const Population pop(1, std::move(x), std::move(y));
        const auto losses = misclassification_table(pop, stumps);

        const auto rejective = enumerate_design(DesignSpec::rejective(random_canonical(N, n, rng), n));
        const auto pi_star = rejective.first_order();
        const auto sampford = enumerate_design(DesignSpec::rao_sampford(pi_star));

        const double excess = sampford.expectation(
            [&](SubsetMask s) { return risk[ht_minimizer(losses, s, pi_star)] - best; });
        BoundInputs in;
        in.N = static_cast<double>(N);
        in.n = static_cast<double>(n);
        in.V = 2.0;
        in.kappa = InclusionProbs::from(pi_star).kappa;
        in.kappa_star = in.kappa;
        in.tv = tv_distance(sampford, rejective);
        EmpiricalEvidence ev;
        ev.expected_excess = excess;
        const auto rep = bound_report(in, ev);
        ++r.checks;
        if (!rep.theorem2_valid.value_or(false)) ++r.violations;
        if (!std::isfinite(*rep.smallest_C) || *rep.smallest_C > 10.0) ++r.violations;
        r.worst = std::max(r.worst, *rep.smallest_C);
        worst_excess_ratio = std::max(worst_excess_ratio, excess / rep.theorem2.total);
        ++r.instances;
    }
    detail << "smallest valid C = " << r.worst << ", largest excess / bound (C=1) = " << worst_excess_ratio;
    finish(r, detail);
    return r;
}

BoundReport validation_bound_report(const BoundInputs& inputs, std::uint64_t seed) {
    inputs.validate();
    const auto N = static_cast<std::size_t>(inputs.N);
    const auto n = static_cast<std::size_t>(inputs.n);
    if (static_cast<double>(N) != inputs.N || static_cast<double>(n) != inputs.n) {
        throw InvalidArgument("validation needs integer N and n");
    }
    if (N > 12 || n == 0 || n >= N) throw InvalidArgument("validation needs 1 <= n < N <= 12");
    Rng rng = make_rng(seed, 0);
    const auto inst = stump_instance(N, n, rng);

    BoundInputs in = inputs;
    in.kappa = InclusionProbs::from(inst.pi).kappa;
    in.log_class_size = std::log(static_cast<double>(inst.losses.size()));

    EmpiricalEvidence ev;
    ev.deviation_tail = sup_tail(inst, 20);

    // Centered HT sum of the first stump's losses.
    const auto& a = inst.losses.front();
    BernsteinInputs b;
    b.c = 0.0;
    const double Nd = inputs.N;
    for (std::size_t i = 0; i < N; ++i) {
        b.c = std::max(b.c, std::max(1.0 / inst.pi[i] - 1.0, 1.0) / Nd);
        b.sigma_sq.push_back(a[i] * (1.0 - inst.pi[i]) / (inst.pi[i] * Nd * Nd));
    }
    auto sum_z = [&](SubsetMask s) {
        double z = 0.0;
        for (std::size_t i = 0; i < N; ++i) z += (((s >> i) & 1u) / inst.pi[i] - 1.0) * a[i] / Nd;
        return z;
    };
    for (std::size_t g = 1; g <= 20; ++g) {
        const double t = b.c * static_cast<double>(g) / 4.0;
        ev.bernstein_tail.push_back({t, inst.design.expectation([&](SubsetMask s) { return sum_z(s) >= t ? 1.0 : 0.0; })});
    }
    ev.bernstein = b;
    return bound_report(in, ev);
}

bool ValidationReport::all_passed() const {
    return std::all_of(suites.begin(), suites.end(), [](const SuiteResult& s) { return s.passed; });
}

ValidationReport run_validation_suite(const ValidationOptions& options) {
    if (options.max_N < 5 || options.max_N > 12) throw InvalidArgument("max_N must lie in [5, 12]");
    if (options.instances == 0) throw InvalidArgument("instances must be positive");
    ValidationReport report;
    report.options = options;
    const auto seed = [&](std::uint64_t suite) { return split_seed(options.seed, suite); };
    const std::size_t small_N = std::min<std::size_t>(10, options.max_N);
    std::vector<std::size_t> sizes;
    for (std::size_t n : {3, 4, 5}) {
        if (n < small_N) sizes.push_back(n);
    }

    report.suites.push_back(check_unbiasedness(options.instances, options.max_N, seed(1), options.corrupt_pi));
    report.suites.push_back(check_inclusion_exactness(options.instances, options.max_N, seed(2)));
    report.suites.push_back(check_negative_association(options.instances, options.max_N, seed(3)));
    report.suites.push_back(check_hajek_trend(10, seed(4)));
    report.suites.push_back(check_bias_lemma(options.instances, options.max_N, seed(5)));
    report.suites.push_back(check_bernstein(20, small_N, sizes, 50, seed(6)));
    report.suites.push_back(check_prop1_validity(20, small_N, 4, 50, seed(7)));
    report.suites.push_back(check_theorem2(20, 5, seed(8)));
    return report;
}

}  // namespace survey
