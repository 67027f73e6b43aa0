#include "survey/designs.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <random>

#include "survey/errors.hpp"
#include "survey/inclusion.hpp"

namespace survey {

namespace {

void require_open_unit_interval(std::span<const double> values, const char* what) {
    if (values.empty()) throw InvalidDesign(std::string(what) + ": empty probability vector");
    for (double v : values) {
        if (!(v > 0.0 && v < 1.0)) {
            throw InvalidDesign(std::string(what) + ": probabilities must lie in (0,1), got " + std::to_string(v));
        }
    }
}

double sum(std::span<const double> v) { return std::accumulate(v.begin(), v.end(), 0.0); }

void require_canonical(std::span<const double> p, std::size_t n) {
    require_open_unit_interval(p, "rejective design");
    if (n == 0 || n > p.size()) throw InvalidDesign("rejective design: need 1 <= n <= N");
    const double total = sum(p);
    if (std::abs(total - static_cast<double>(n)) > kCanonicalSumTolerance * std::max(1.0, static_cast<double>(n))) {
        throw InvalidDesign("rejective design: canonical parameters must sum to n (sum p = " + std::to_string(total) +
                            ", n = " + std::to_string(n) + ")");
    }
}

std::size_t rao_sampford_size(std::span<const double> pi) {
    require_open_unit_interval(pi, "Rao-Sampford design");
    const double total = sum(pi);
    const double n = std::round(total);
    if (n < 1.0 || std::abs(total - n) > kRaoSampfordSumTolerance) {
        throw InvalidDesign("Rao-Sampford design: inclusion probabilities must sum to an integer n >= 1 (sum = " +
                            std::to_string(total) + ")");
    }
    return static_cast<std::size_t>(n);
}

std::size_t validate_strata(const std::vector<std::vector<std::size_t>>& strata, std::span<const std::size_t> sizes) {
    if (strata.empty()) throw InvalidDesign("stratified design: need at least one stratum");
    if (strata.size() != sizes.size()) throw InvalidDesign("stratified design: one sample size per stratum required");
    std::size_t population = 0;
    for (const auto& s : strata) population += s.size();
    std::vector<std::uint8_t> seen(population, 0);
    for (std::size_t k = 0; k < strata.size(); ++k) {
        if (strata[k].empty()) throw InvalidDesign("stratified design: empty stratum");
        if (sizes[k] > strata[k].size()) throw InvalidDesign("stratified design: n_k exceeds N_k");
        for (auto unit : strata[k]) {
            if (unit >= population || seen[unit]) throw InvalidDesign("stratified design: strata must partition {0..N-1}");
            seen[unit] = 1;
        }
    }
    return population;
}

// Knuth's selection sampling: each unit is kept with probability
// (still needed) / (still available).
void select_uniform(std::span<const std::size_t> units, std::size_t n, Rng& rng, SampleIndicator& out) {
    std::size_t needed = n;
    std::size_t remaining = units.size();
    for (auto u : units) {
        if (needed == 0) break;
        if (uniform01(rng) * static_cast<double>(remaining) < static_cast<double>(needed)) {
            out.insert(u);
            --needed;
        }
        --remaining;
    }
}

void require_enumerable(std::size_t n) {
    if (n > kMaxEnumerationSize) {
        throw EnumerationTooLarge("exact enumeration requires N <= " + std::to_string(kMaxEnumerationSize) + ", got " +
                                  std::to_string(n));
    }
}

double binomial(std::size_t n, std::size_t k) {
    double r = 1.0;
    for (std::size_t i = 1; i <= k; ++i) r = r * static_cast<double>(n - k + i) / static_cast<double>(i);
    return r;
}

}  // namespace

std::string_view to_string(DesignKind kind) {
    switch (kind) {
        case DesignKind::Poisson: return "poisson";
        case DesignKind::Srswor: return "srswor";
        case DesignKind::Rejective: return "rejective";
        case DesignKind::Stratified: return "stratified";
        case DesignKind::RaoSampford: return "rao_sampford";
    }
    return "unknown";
}

DesignKind design_kind_from_string(std::string_view name) {
    for (auto k : {DesignKind::Poisson, DesignKind::Srswor, DesignKind::Rejective, DesignKind::Stratified,
                   DesignKind::RaoSampford}) {
        if (to_string(k) == name) return k;
    }
    throw InvalidDesign("unknown design kind '" + std::string(name) + "'");
}

DesignSpec DesignSpec::poisson(std::vector<double> p) {
    require_open_unit_interval(p, "Poisson design");
    return DesignSpec(PoissonParams{std::move(p)});
}

DesignSpec DesignSpec::srswor(std::size_t population_size, std::size_t sample_size) {
    if (sample_size < 1 || sample_size > population_size) throw InvalidDesign("SRSWOR design: need 1 <= n <= N");
    return DesignSpec(SrsworParams{population_size, sample_size});
}

DesignSpec DesignSpec::rejective(std::vector<double> p, std::size_t sample_size) {
    require_canonical(p, sample_size);
    return DesignSpec(RejectiveParams{std::move(p), sample_size});
}

DesignSpec DesignSpec::stratified(std::vector<std::vector<std::size_t>> strata, std::vector<std::size_t> sizes) {
    validate_strata(strata, sizes);
    return DesignSpec(StratifiedParams{std::move(strata), std::move(sizes)});
}

DesignSpec DesignSpec::rao_sampford(std::vector<double> pi) {
    rao_sampford_size(pi);
    return DesignSpec(RaoSampfordParams{std::move(pi)});
}

DesignKind DesignSpec::kind() const noexcept { return static_cast<DesignKind>(params_.index()); }

std::size_t DesignSpec::population_size() const noexcept {
    return std::visit(
        [](const auto& p) -> std::size_t {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, PoissonParams> || std::is_same_v<T, RejectiveParams>) {
                return p.p.size();
            } else if constexpr (std::is_same_v<T, SrsworParams>) {
                return p.population_size;
            } else if constexpr (std::is_same_v<T, StratifiedParams>) {
                std::size_t n = 0;
                for (const auto& s : p.strata) n += s.size();
                return n;
            } else {
                return p.pi.size();
            }
        },
        params_);
}

std::optional<std::size_t> DesignSpec::fixed_size() const noexcept {
    switch (kind()) {
        case DesignKind::Poisson: return std::nullopt;
        case DesignKind::Srswor: return as<SrsworParams>().sample_size;
        case DesignKind::Rejective: return as<RejectiveParams>().sample_size;
        case DesignKind::Stratified: {
            const auto& sizes = as<StratifiedParams>().stratum_sample_sizes;
            return std::accumulate(sizes.begin(), sizes.end(), std::size_t{0});
        }
        case DesignKind::RaoSampford:
            return static_cast<std::size_t>(std::round(sum(as<RaoSampfordParams>().pi)));
    }
    return std::nullopt;
}

std::vector<double> declared_inclusion_probs(const DesignSpec& spec) {
    switch (spec.kind()) {
        case DesignKind::Poisson: return spec.as<PoissonParams>().p;
        case DesignKind::Srswor: {
            const auto& s = spec.as<SrsworParams>();
            return std::vector<double>(s.population_size,
                                       static_cast<double>(s.sample_size) / static_cast<double>(s.population_size));
        }
        case DesignKind::Rejective: {
            const auto& r = spec.as<RejectiveParams>();
            return exact_pi_from_p(r.p, r.sample_size).pi;
        }
        case DesignKind::Stratified: {
            const auto& s = spec.as<StratifiedParams>();
            std::vector<double> pi(spec.population_size());
            for (std::size_t k = 0; k < s.strata.size(); ++k) {
                const double rate =
                    static_cast<double>(s.stratum_sample_sizes[k]) / static_cast<double>(s.strata[k].size());
                for (auto u : s.strata[k]) pi[u] = rate;
            }
            return pi;
        }
        case DesignKind::RaoSampford: return spec.as<RaoSampfordParams>().pi;
    }
    return {};
}

SampleIndicator poisson_draw(std::span<const double> p, Rng& rng) {
    require_open_unit_interval(p, "Poisson design");
    SampleIndicator s(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (uniform01(rng) < p[i]) s.insert(i);
    }
    return s;
}

SampleIndicator srswor_draw(std::size_t population_size, std::size_t sample_size, Rng& rng) {
    if (sample_size < 1 || sample_size > population_size) throw InvalidDesign("SRSWOR design: need 1 <= n <= N");
    std::vector<std::size_t> units(population_size);
    std::iota(units.begin(), units.end(), std::size_t{0});
    SampleIndicator s(population_size);
    select_uniform(units, sample_size, rng, s);
    return s;
}

SampleIndicator rejective_draw(std::span<const double> p, std::size_t sample_size, Rng& rng,
                               std::size_t max_rejections) {
    require_canonical(p, sample_size);
    std::vector<std::uint8_t> bits(p.size());
    for (std::size_t attempt = 0; attempt <= max_rejections; ++attempt) {
        std::fill(bits.begin(), bits.end(), 0);
        std::size_t count = 0;
        bool overflow = false;
        for (std::size_t i = 0; i < p.size(); ++i) {
            if (uniform01(rng) < p[i]) {
                bits[i] = 1;
                if (++count > sample_size) {
                    overflow = true;
                    break;
                }
            }
        }
        if (!overflow && count == sample_size) return SampleIndicator(bits);
    }
    const double acceptance = poisson_size_distribution(p)[sample_size];
    throw RejectionBudgetExceeded("rejective sampling: rejection budget of " + std::to_string(max_rejections) +
                                      " exceeded (acceptance probability " + std::to_string(acceptance) + ")",
                                  max_rejections, acceptance);
}

SampleIndicator stratified_draw(const std::vector<std::vector<std::size_t>>& strata,
                                std::span<const std::size_t> sizes, Rng& rng) {
    const std::size_t population = validate_strata(strata, sizes);
    SampleIndicator s(population);
    for (std::size_t k = 0; k < strata.size(); ++k) select_uniform(strata[k], sizes[k], rng, s);
    return s;
}

SampleIndicator rao_sampford_draw(std::span<const double> pi, Rng& rng, std::size_t max_rejections) {
    const std::size_t n = rao_sampford_size(pi);
    std::vector<double> odds(pi.size());
    std::transform(pi.begin(), pi.end(), odds.begin(), [](double x) { return x / (1.0 - x); });
    std::discrete_distribution<std::size_t> first(pi.begin(), pi.end());
    std::discrete_distribution<std::size_t> rest(odds.begin(), odds.end());

    SampleIndicator s(pi.size());
    for (std::size_t attempt = 0; attempt <= max_rejections; ++attempt) {
        s = SampleIndicator(pi.size());
        s.insert(first(rng));
        bool distinct = true;
        for (std::size_t k = 1; k < n && distinct; ++k) {
            const auto unit = rest(rng);
            if (s.contains(unit)) {
                distinct = false;
            } else {
                s.insert(unit);
            }
        }
        if (distinct) return s;
    }
    // No acceptance in the whole budget: 1/attempts bounds the acceptance rate from above.
    throw RejectionBudgetExceeded("Rao-Sampford sampling: rejection budget of " + std::to_string(max_rejections) +
                                      " exceeded",
                                  max_rejections, 1.0 / static_cast<double>(max_rejections + 1));
}

SampleIndicator draw(const DesignSpec& spec, Rng& rng, std::size_t max_rejections) {
    switch (spec.kind()) {
        case DesignKind::Poisson: return poisson_draw(spec.as<PoissonParams>().p, rng);
        case DesignKind::Srswor: {
            const auto& s = spec.as<SrsworParams>();
            return srswor_draw(s.population_size, s.sample_size, rng);
        }
        case DesignKind::Rejective: {
            const auto& r = spec.as<RejectiveParams>();
            return rejective_draw(r.p, r.sample_size, rng, max_rejections);
        }
        case DesignKind::Stratified: {
            const auto& s = spec.as<StratifiedParams>();
            return stratified_draw(s.strata, s.stratum_sample_sizes, rng);
        }
        case DesignKind::RaoSampford: return rao_sampford_draw(spec.as<RaoSampfordParams>().pi, rng, max_rejections);
    }
    throw InvalidDesign("unknown design kind");
}

EnumeratedDesign::EnumeratedDesign(std::size_t population_size, std::vector<double> masses)
    : population_size_(population_size), masses_(std::move(masses)) {
    require_enumerable(population_size);
    if (masses_.size() != (std::size_t{1} << population_size)) {
        throw InvalidArgument("enumerated design needs one mass per subset");
    }
    for (double m : masses_) {
        if (!(m >= 0.0)) throw InvalidArgument("enumerated design masses must be nonnegative");
    }
}

std::vector<double> EnumeratedDesign::first_order() const {
    std::vector<double> pi(population_size_, 0.0);
    for_each_support([&](SubsetMask s, double m) {
        for (std::size_t i = 0; i < population_size_; ++i) {
            if (s & (SubsetMask{1} << i)) pi[i] += m;
        }
    });
    return pi;
}

EnumeratedDesign enumerate_design(const DesignSpec& spec) {
    const std::size_t N = spec.population_size();
    require_enumerable(N);
    const std::size_t count = std::size_t{1} << N;
    std::vector<double> masses(count, 0.0);
    auto on_shell = [&](SubsetMask s) { return static_cast<std::size_t>(std::popcount(s)) == *spec.fixed_size(); };
    auto normalize = [&] {
        const double total = std::accumulate(masses.begin(), masses.end(), 0.0);
        for (auto& m : masses) m /= total;
    };

    switch (spec.kind()) {
        case DesignKind::Poisson: {
            const auto& p = spec.as<PoissonParams>().p;
            for (SubsetMask s = 0; s < count; ++s) {
                double m = 1.0;
                for (std::size_t i = 0; i < N; ++i) m *= (s & (SubsetMask{1} << i)) ? p[i] : 1.0 - p[i];
                masses[s] = m;
            }
            break;
        }
        case DesignKind::Srswor: {
            const auto& sw = spec.as<SrsworParams>();
            const double m = 1.0 / binomial(sw.population_size, sw.sample_size);
            for (SubsetMask s = 0; s < count; ++s) {
                if (on_shell(s)) masses[s] = m;
            }
            break;
        }
        case DesignKind::Rejective: {
            // prod_{i in s} p_i prod_{i not in s} (1-p_i) is proportional to the product of odds on the shell.
            const auto& p = spec.as<RejectiveParams>().p;
            for (SubsetMask s = 0; s < count; ++s) {
                if (!on_shell(s)) continue;
                double m = 1.0;
                for (std::size_t i = 0; i < N; ++i) {
                    if (s & (SubsetMask{1} << i)) m *= p[i] / (1.0 - p[i]);
                }
                masses[s] = m;
            }
            normalize();
            break;
        }
        case DesignKind::Stratified: {
            const auto& st = spec.as<StratifiedParams>();
            double m = 1.0;
            for (std::size_t k = 0; k < st.strata.size(); ++k) {
                m /= binomial(st.strata[k].size(), st.stratum_sample_sizes[k]);
            }
            for (SubsetMask s = 0; s < count; ++s) {
                bool ok = true;
                for (std::size_t k = 0; k < st.strata.size() && ok; ++k) {
                    std::size_t hits = 0;
                    for (auto u : st.strata[k]) hits += (s >> u) & 1U;
                    ok = hits == st.stratum_sample_sizes[k];
                }
                if (ok) masses[s] = m;
            }
            break;
        }
        case DesignKind::RaoSampford: {
            // Sampford mass: prod_{j in s} pi_j/(1-pi_j) * sum_{i in s} (1 - pi_i).
            const auto& pi = spec.as<RaoSampfordParams>().pi;
            for (SubsetMask s = 0; s < count; ++s) {
                if (!on_shell(s)) continue;
                double odds = 1.0;
                double complement = 0.0;
                for (std::size_t i = 0; i < N; ++i) {
                    if (s & (SubsetMask{1} << i)) {
                        odds *= pi[i] / (1.0 - pi[i]);
                        complement += 1.0 - pi[i];
                    }
                }
                masses[s] = odds * complement;
            }
            normalize();
            break;
        }
    }
    return EnumeratedDesign(N, std::move(masses));
}

SquareMatrix second_order_probs(const EnumeratedDesign& design) {
    const std::size_t N = design.population_size();
    SquareMatrix out(N);
    std::vector<std::size_t> members;
    members.reserve(N);
    design.for_each_support([&](SubsetMask s, double m) {
        members.clear();
        for (std::size_t i = 0; i < N; ++i) {
            if (s & (SubsetMask{1} << i)) members.push_back(i);
        }
        for (auto i : members) {
            for (auto j : members) out(i, j) += m;
        }
    });
    return out;
}

}  // namespace survey
