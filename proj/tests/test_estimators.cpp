#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "oracles.hpp"
#include "survey/designs.hpp"
#include "survey/errors.hpp"
#include "survey/estimators.hpp"
#include "survey/inclusion.hpp"

using namespace survey;

namespace {

// One feature, labels alternate; x_i = i.
Population line_population(std::size_t N) {
    std::vector<double> x(N);
    std::vector<int> y(N);
    for (std::size_t i = 0; i < N; ++i) {
        x[i] = static_cast<double>(i);
        y[i] = (i % 3 == 0) ? -1 : 1;
    }
    return Population(1, x, y);
}

Population gaussian_population(std::size_t N, Rng& rng) {
    std::normal_distribution<double> z(0.0, 1.0);
    std::vector<double> x(N);
    std::vector<int> y(N);
    for (std::size_t i = 0; i < N; ++i) {
        y[i] = i % 2 ? 1 : -1;
        x[i] = y[i] + z(rng);
    }
    return Population(1, x, y);
}

std::vector<double> random_p(std::size_t N, Rng& rng) {
    std::uniform_real_distribution<double> u(0.1, 0.9);
    std::vector<double> p(N);
    for (auto& v : p) v = u(rng);
    return p;
}

// Brute-force HT value of a mask.
double ht_of(const std::vector<double>& loss, oracle::Mask s, const std::vector<double>& w) {
    double t = 0.0;
    for (std::size_t i = 0; i < loss.size(); ++i) {
        if (oracle::has(s, i)) t += loss[i] / w[i];
    }
    return t / static_cast<double>(loss.size());
}

}  // namespace

TEST_CASE("empirical risk: perfect, constant and complementary rules") {
    const auto pop = line_population(9);
    const Classifier truth = [&](std::span<const double> x) { return pop.label(static_cast<std::size_t>(x[0])); };
    CHECK(empirical_risk(pop, truth).value == 0.0);
    CHECK(empirical_risk(pop, truth).kind == RiskKind::Empirical);

    const Population balanced(1, {0, 1, 2, 3}, {1, -1, 1, -1});
    CHECK(empirical_risk(balanced, [](auto) { return 1; }).value == 0.5);

    const Stump st{0, 3.5, 1};
    const Stump flipped{0, 3.5, -1};
    // The stump never sits on a data point, so flipping it flips every prediction.
    CHECK(empirical_risk(pop, st).value + empirical_risk(pop, flipped).value == doctest::Approx(1.0));
}

TEST_CASE("HT risk: worked four-unit example") {
    const Population pop(1, {0, 1, 2, 3}, {1, 1, 1, 1});
    const Classifier clf = [](std::span<const double> x) { return x[0] == 0.0 ? -1 : 1; };
    const std::vector<double> pi(4, 0.5);
    const auto s = SampleIndicator::from_mask(4, 0b0101);
    const auto r = ht_risk(pop, clf, s, pi);
    CHECK(r.value == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(r.kind == RiskKind::HT);
}

TEST_CASE("HT risk: equal weights give the in-sample error rate") {
    const auto pop = line_population(10);
    const Stump st{0, 4.5, 1};
    const auto loss = misclassification(pop, st);
    const std::vector<double> pi(10, 0.4);
    for (SubsetMask s = 0; s < 1024; ++s) {
        if (oracle::size_of(s) != 4) continue;
        double in_sample = 0.0;
        for (std::size_t i = 0; i < 10; ++i) in_sample += oracle::has(s, i) * loss[i];
        CHECK(weighted_sample_risk(loss, s, pi) == doctest::Approx(in_sample / 4.0).epsilon(1e-14));
    }
}

TEST_CASE("HT risk: zero weight on a sampled unit is an error, on an excluded unit it is ignored") {
    const std::vector<double> loss{1, 0, 1};
    const std::vector<double> pi{0.0, 0.5, 0.5};
    CHECK_THROWS_AS(weighted_sample_risk(loss, SampleIndicator::from_mask(3, 0b001), pi, RiskKind::HT), WeightUndefined);
    CHECK(weighted_sample_risk(loss, SampleIndicator::from_mask(3, 0b100), pi, RiskKind::HT).value ==
          doctest::Approx(2.0 / 3.0));
    try {
        weighted_sample_risk(loss, SampleIndicator::from_mask(3, 0b011), pi, RiskKind::HT);
    } catch (const WeightUndefined& e) {
        CHECK(e.unit() == 0);
    }
}

TEST_CASE("HT risk: values above one are not clipped") {
    const std::vector<double> loss{1, 1};
    const std::vector<double> pi{0.1, 0.9};
    CHECK(weighted_sample_risk(loss, SampleIndicator::from_mask(2, 0b01), pi, RiskKind::HT).value ==
          doctest::Approx(5.0));
}

TEST_CASE("HT risk: exactly unbiased under all five design kinds") {
    Rng rng(31);
    const auto pop = gaussian_population(9, rng);
    const auto grid = stump_grid(pop, 0, 1);
    const auto p = normalize_canonical(random_p(9, rng), 4.0);
    const auto pi_rej = exact_pi_from_p(p, 4).pi;
    const std::vector<DesignSpec> specs{DesignSpec::poisson(random_p(9, rng)), DesignSpec::srswor(9, 4),
                                        DesignSpec::rejective(p, 4),
                                        DesignSpec::stratified({{0, 4, 8}, {1, 2, 3, 5, 6, 7}}, {1, 3}),
                                        DesignSpec::rao_sampford(pi_rej)};
    for (const auto& spec : specs) {
        const auto d = enumerate_design(spec);
        const auto pi = declared_inclusion_probs(spec);
        for (const auto& st : grid) {
            const auto loss = misclassification(pop, st);
            const double target = empirical_risk(loss).value;
            CHECK(std::abs(expected_ht_risk(d, loss, pi) - target) <= 1e-12);
            const double brute = d.expectation([&](SubsetMask s) { return ht_of(loss, s, pi); });
            CHECK(std::abs(brute - target) <= 1e-12);
        }
    }
}

TEST_CASE("HT risk: wrong weights break unbiasedness") {
    const std::vector<double> loss{1, 0, 0, 1, 0};
    const auto d = enumerate_design(DesignSpec::srswor(5, 2));
    std::vector<double> pi(5, 0.4);
    pi[0] = 0.36;
    CHECK(std::abs(expected_ht_risk(d, loss, pi) - 0.4) > 1e-3);
}

TEST_CASE("Poisson conditional variance matches enumeration") {
    const std::vector<double> p{0.2, 0.5, 0.7, 0.35, 0.9};
    const std::vector<double> loss{1, 0, 1, 1, 0};
    const auto d = enumerate_design(DesignSpec::poisson(p));
    const double mean = d.expectation([&](SubsetMask s) { return ht_of(loss, s, p); });
    const double second = d.expectation([&](SubsetMask s) { return std::pow(ht_of(loss, s, p), 2); });
    CHECK(poisson_conditional_variance(loss, p) == doctest::Approx(second - mean * mean).epsilon(1e-12));
}

TEST_CASE("biased HT risk: equal weights coincide, and the gap is bounded by the weight gap") {
    const auto pop = line_population(8);
    const Stump st{0, 2.5, -1};
    const auto s = SampleIndicator::from_mask(8, 0b10110100);
    const std::vector<double> eq(8, 0.5);
    CHECK(biased_ht_risk(pop, st, s, eq).value == ht_risk(pop, st, s, eq).value);
    CHECK(biased_ht_risk(pop, st, s, eq).kind == RiskKind::BiasedHT);

    Rng rng(2);
    const auto p = normalize_canonical(random_p(8, rng), 4.0);
    const auto pi = exact_pi_from_p(p, 4).pi;
    double weight_gap = 0.0;
    for (std::size_t i = 0; i < 8; ++i) weight_gap += std::abs(1 / p[i] - 1 / pi[i]);
    weight_gap /= 8;
    for (const auto& g : stump_grid(pop, 0, 1)) {
        for (SubsetMask m = 0; m < 256; ++m) {
            if (oracle::size_of(m) != 4) continue;
            const auto sm = SampleIndicator::from_mask(8, m);
            CHECK(std::abs(biased_ht_risk(pop, g, sm, p).value - ht_risk(pop, g, sm, pi).value) <= weight_gap + 1e-12);
        }
    }
}

TEST_CASE("mixed risk: pointwise triangle inequality and identity at equal weights") {
    Rng rng(17);
    const auto pop = gaussian_population(7, rng);
    const auto p = normalize_canonical(random_p(7, rng), 3.0);
    const auto pi = exact_pi_from_p(p, 3).pi;
    auto pi_star = pi;
    std::rotate(pi_star.begin(), pi_star.begin() + 2, pi_star.end());
    const Stump st{0, 0.1, 1};
    for (SubsetMask m = 0; m < 128; ++m) {
        if (oracle::size_of(m) != 3) continue;
        const auto s = SampleIndicator::from_mask(7, m);
        CHECK(mixed_risk(pop, st, s, pi).value == ht_risk(pop, st, s, pi).value);
        double rhs = 0.0;
        for (std::size_t i = 0; i < 7; ++i) rhs += oracle::has(m, i) * std::abs(1 / pi_star[i] - 1 / pi[i]);
        CHECK(std::abs(ht_risk(pop, st, s, pi).value - mixed_risk(pop, st, s, pi_star).value) <= rhs / 7 + 1e-12);
    }
}

TEST_CASE("mixed risk: coupling term is at most kappa (N/n) tv in exact expectation") {
    Rng rng(23);
    for (int inst = 0; inst < 10; ++inst) {
        const std::size_t N = 5 + static_cast<std::size_t>(inst % 4);
        const std::size_t n = 2 + static_cast<std::size_t>(inst % 2);
        const auto pop = gaussian_population(N, rng);
        const auto table = misclassification_table(pop, stump_grid(pop, 0, 1));
        const auto p = normalize_canonical(random_p(N, rng), static_cast<double>(n));
        const auto rej = enumerate_design(DesignSpec::rejective(p, n));
        const auto pi = rej.first_order();
        const auto rs = enumerate_design(DesignSpec::rao_sampford(pi));
        const auto pi_star = rs.first_order();
        const double tv = tv_distance(rej, rs);

        // Maximal coupling: common part on the diagonal, residuals paired independently.
        const std::size_t S = std::size_t{1} << N;
        double coupled = 0.0;
        auto gap = [&](SubsetMask a, SubsetMask b) {
            double sup = 0.0;
            for (const auto& loss : table) sup = std::max(sup, std::abs(ht_of(loss, a, pi_star) - ht_of(loss, b, pi_star)));
            return sup;
        };
        for (SubsetMask a = 0; a < S; ++a) {
            const double ra = rej.mass(a) - std::min(rej.mass(a), rs.mass(a));
            if (ra <= 0) continue;
            for (SubsetMask b = 0; b < S; ++b) {
                const double rb = rs.mass(b) - std::min(rej.mass(b), rs.mass(b));
                if (rb > 0) coupled += ra * rb / tv * gap(a, b);
            }
        }
        const double kappa = InclusionProbs::from(pi).kappa;
        CAPTURE(inst);
        CHECK(tv > 0.0);
        CHECK(coupled <= kappa * static_cast<double>(N) / static_cast<double>(n) * tv + 1e-12);
    }
}

TEST_CASE("tv distance: metric properties") {
    Rng rng(5);
    std::vector<EnumeratedDesign> designs;
    for (int k = 0; k < 6; ++k) {
        designs.push_back(enumerate_design(DesignSpec::rejective(normalize_canonical(random_p(6, rng), 3.0), 3)));
    }
    designs.push_back(enumerate_design(DesignSpec::srswor(6, 3)));
    designs.push_back(enumerate_design(DesignSpec::poisson(random_p(6, rng))));
    for (const auto& a : designs) {
        CHECK(tv_distance(a, a) <= 1e-12);
        for (const auto& b : designs) {
            const double ab = tv_distance(a, b);
            CHECK(ab == tv_distance(b, a));
            CHECK((ab >= 0.0 && ab <= 1.0));
            for (const auto& c : designs) CHECK(tv_distance(a, c) <= ab + tv_distance(b, c) + 1e-12);
        }
    }
}

TEST_CASE("tv distance: disjoint supports give one") {
    const auto strat = enumerate_design(DesignSpec::stratified({{0, 1}, {2, 3}}, {1, 1}));
    std::vector<double> m(16, 0.0);
    m[0b0011] = 1.0;
    CHECK(tv_distance(strat, EnumeratedDesign(4, m)) == doctest::Approx(1.0));
}

TEST_CASE("tv distance: Rao-Sampford against rejective with matched marginals at N=5, n=2") {
    const auto p = normalize_canonical(std::vector<double>{0.1, 0.3, 0.5, 0.6, 0.5}, 2.0);
    const auto rej = enumerate_design(DesignSpec::rejective(p, 2));
    const auto rs = enumerate_design(DesignSpec::rao_sampford(rej.first_order()));
    const auto a = oracle::rejective_masses(p, 2);
    const auto b = oracle::sampford_algorithm_masses(rej.first_order());
    double ref = 0.0;
    for (std::size_t s = 0; s < 32; ++s) ref += 0.5 * std::abs(a[s] - b[s]);
    CHECK(tv_distance(rej, rs) == doctest::Approx(ref).epsilon(1e-10));
    CHECK(ref > 0.0);
}

TEST_CASE("tv distance: mismatched populations are rejected") {
    CHECK_THROWS_AS(tv_distance(enumerate_design(DesignSpec::srswor(4, 2)), enumerate_design(DesignSpec::srswor(5, 2))),
                    IncompatibleDesigns);
}

TEST_CASE("sup deviation: trivial cases and errors") {
    const auto pop = line_population(6);
    const std::vector<Classifier> one{Stump{0, 2.5, 1}};
    CHECK(sup_deviation(pop, one, SampleIndicator::full(6), std::vector<double>(6, 1.0)) == 0.0);
    CHECK_THROWS_AS(sup_deviation(LossTable{}, SampleIndicator::full(6), std::vector<double>(6, 1.0)), InvalidArgument);
}

TEST_CASE("sup deviation: exact tail agrees with brute force at N=10, n=4") {
    Rng rng(10);
    const auto pop = gaussian_population(10, rng);
    const auto table = misclassification_table(pop, stump_grid(pop, 0, 1));
    const auto p = normalize_canonical(random_p(10, rng), 4.0);
    const auto design = enumerate_design(DesignSpec::rejective(p, 4));
    const auto pi = design.first_order();
    const auto ref = oracle::rejective_masses(p, 4);
    std::vector<double> ts;
    for (int k = 1; k <= 20; ++k) ts.push_back(0.05 * k);
    const auto tail = sup_deviation_tail(design, table, pi, ts);
    for (std::size_t k = 0; k < ts.size(); ++k) {
        double brute = 0.0;
        for (oracle::Mask s = 0; s < 1024; ++s) {
            if (ref[s] == 0.0) continue;
            double sup = 0.0;
            for (const auto& loss : table) {
                sup = std::max(sup, std::abs(ht_of(loss, s, pi) - std::accumulate(loss.begin(), loss.end(), 0.0) / 10));
            }
            if (sup >= ts[k]) brute += ref[s];
        }
        CHECK(tail[k] == doctest::Approx(brute).epsilon(1e-10));
    }
    for (std::size_t k = 1; k < tail.size(); ++k) CHECK(tail[k] <= tail[k - 1]);
}

TEST_CASE("sup deviation: grows sublinearly in the class size") {
    Rng rng(12);
    const std::size_t N = 200;
    const auto pop = gaussian_population(N, rng);
    auto grid = stump_grid(pop, 0, 1);
    std::shuffle(grid.begin(), grid.end(), rng);
    std::vector<double> pi(N, 0.1);
    const std::vector<std::size_t> sizes{1, 4, 16, 64};
    std::vector<double> mean(sizes.size(), 0.0);
    const int reps = 300;
    for (int r = 0; r < reps; ++r) {
        const auto s = srswor_draw(N, 20, rng);
        for (std::size_t k = 0; k < sizes.size(); ++k) {
            const auto table = misclassification_table(pop, std::span<const Stump>(grid.data(), sizes[k]));
            mean[k] += sup_deviation(table, s, pi) / reps;
        }
    }
    for (std::size_t k = 1; k < sizes.size(); ++k) {
        CHECK(mean[k] >= mean[k - 1]);
        CHECK(mean[k] < mean[k - 1] * static_cast<double>(sizes[k] / sizes[k - 1]));
    }
    CHECK(mean.back() < 4.0 * mean.front());
}

TEST_CASE("HT minimiser picks the first index on ties") {
    const LossTable table{{1, 0, 1}, {0, 1, 1}, {1, 1, 0}};
    const std::vector<double> pi(3, 0.5);
    CHECK(ht_minimizer(table, 0b011, pi) == 0);
    CHECK(ht_minimizer(table, 0b100, pi) == 2);
}

TEST_CASE("risk kinds have names") {
    CHECK(to_string(RiskKind::HT) == "ht");
    CHECK(to_string(RiskKind::Mixed) != to_string(RiskKind::BiasedHT));
}
