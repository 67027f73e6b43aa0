#pragma once

// Fixed-size and Poisson sampling designs: random draws and, for small
// populations, the exact probability mass over all subsets.

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "survey/random.hpp"
#include "survey/sample.hpp"

namespace survey {

inline constexpr std::size_t kDefaultMaxRejections = 1'000'000;
inline constexpr std::size_t kMaxEnumerationSize = 20;
/// Tolerance on sum(p) == n for canonical rejective parameters.
inline constexpr double kCanonicalSumTolerance = 1e-6;
/// Tolerance on sum(pi) == n for Rao-Sampford inclusion vectors.
inline constexpr double kRaoSampfordSumTolerance = 1e-9;

enum class DesignKind { Poisson, Srswor, Rejective, Stratified, RaoSampford };

std::string_view to_string(DesignKind kind);
DesignKind design_kind_from_string(std::string_view name);

struct PoissonParams {
    std::vector<double> p;
};

struct SrsworParams {
    std::size_t population_size = 0;
    std::size_t sample_size = 0;
};

/// Conditional Poisson design; p is the canonical parameter (sum p == n).
struct RejectiveParams {
    std::vector<double> p;
    std::size_t sample_size = 0;
};

struct StratifiedParams {
    std::vector<std::vector<std::size_t>> strata;
    std::vector<std::size_t> stratum_sample_sizes;
};

struct RaoSampfordParams {
    std::vector<double> pi;
};

/// Validated description of a sampling design. Immutable once built; the
/// named constructors throw InvalidDesign on bad parameters.
class DesignSpec {
public:
    using Params = std::variant<PoissonParams, SrsworParams, RejectiveParams, StratifiedParams, RaoSampfordParams>;

    static DesignSpec poisson(std::vector<double> p);
    static DesignSpec srswor(std::size_t population_size, std::size_t sample_size);
    static DesignSpec rejective(std::vector<double> p, std::size_t sample_size);
    static DesignSpec stratified(std::vector<std::vector<std::size_t>> strata, std::vector<std::size_t> sizes);
    static DesignSpec rao_sampford(std::vector<double> pi);

    DesignKind kind() const noexcept;
    const Params& params() const noexcept { return params_; }
    std::size_t population_size() const noexcept;
    /// Sample size for fixed-size designs, empty for Poisson.
    std::optional<std::size_t> fixed_size() const noexcept;

    template <class T>
    const T& as() const {
        return std::get<T>(params_);
    }

private:
    explicit DesignSpec(Params params) : params_(std::move(params)) {}
    Params params_;
};

/// First-order inclusion probabilities the design is built to realize
/// (exact symmetric-function computation for rejective designs).
std::vector<double> declared_inclusion_probs(const DesignSpec& spec);

SampleIndicator poisson_draw(std::span<const double> p, Rng& rng);
SampleIndicator srswor_draw(std::size_t population_size, std::size_t sample_size, Rng& rng);
/// Poisson(p) draws repeated until the size equals n.
SampleIndicator rejective_draw(std::span<const double> p, std::size_t sample_size, Rng& rng,
                               std::size_t max_rejections = kDefaultMaxRejections);
SampleIndicator stratified_draw(const std::vector<std::vector<std::size_t>>& strata,
                                std::span<const std::size_t> sizes, Rng& rng);
/// Three-step Rao-Sampford procedure: first unit with probability pi_i/n, the
/// remaining n-1 with replacement proportionally to pi_j/(1-pi_j), accepted
/// only when all n units are distinct.
SampleIndicator rao_sampford_draw(std::span<const double> pi, Rng& rng,
                                  std::size_t max_rejections = kDefaultMaxRejections);

SampleIndicator draw(const DesignSpec& spec, Rng& rng, std::size_t max_rejections = kDefaultMaxRejections);

/// Dense symmetric matrix (row-major).
struct SquareMatrix {
    std::size_t dim = 0;
    std::vector<double> values;

    SquareMatrix() = default;
    explicit SquareMatrix(std::size_t n) : dim(n), values(n * n, 0.0) {}
    double& operator()(std::size_t i, std::size_t j) { return values[i * dim + j]; }
    double operator()(std::size_t i, std::size_t j) const { return values[i * dim + j]; }
};

/// Exact probability mass of a design over the power set of a small population.
class EnumeratedDesign {
public:
    EnumeratedDesign(std::size_t population_size, std::vector<double> masses);

    std::size_t population_size() const noexcept { return population_size_; }
    /// Mass indexed by subset bitmask; length 2^N.
    std::span<const double> masses() const noexcept { return masses_; }
    double mass(SubsetMask subset) const { return masses_[subset]; }

    /// pi_i = sum over subsets containing i.
    std::vector<double> first_order() const;

    template <class F>
    void for_each_support(F&& visit) const {
        for (SubsetMask s = 0; s < masses_.size(); ++s) {
            if (masses_[s] > 0.0) visit(s, masses_[s]);
        }
    }

    /// Design expectation of f(subset).
    template <class F>
    double expectation(F&& f) const {
        double total = 0.0;
        for_each_support([&](SubsetMask s, double m) { total += m * f(s); });
        return total;
    }

private:
    std::size_t population_size_;
    std::vector<double> masses_;
};

EnumeratedDesign enumerate_design(const DesignSpec& spec);

/// pi_{i,j} from an enumerated design, with pi_{i,i} = pi_i.
SquareMatrix second_order_probs(const EnumeratedDesign& design);

}  // namespace survey
