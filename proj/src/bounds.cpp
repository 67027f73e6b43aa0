#include "survey/bounds.hpp"

#include <algorithm>
#include <cmath>

#include "survey/errors.hpp"

namespace survey {

void BoundInputs::validate() const {
    if (!(N >= 1.0)) throw InvalidArgument("N must be at least 1");
    if (!(n > 0.0 && n <= N)) throw InvalidArgument("n must lie in (0, N]");
    if (!(V >= 1.0) || V != std::floor(V)) throw InvalidArgument("V must be an integer >= 1");
    if (!(delta > 0.0 && delta < 1.0)) throw InvalidArgument("delta must lie in (0,1)");
    if (!(kappa >= 1.0)) throw InvalidArgument("kappa must be >= 1");
    if (!(kappa_star >= 1.0)) throw InvalidArgument("kappa_star must be >= 1");
    if (!(C >= 0.0)) throw InvalidArgument("C must be nonnegative");
    if (!(tv >= 0.0 && tv <= 1.0)) throw InvalidArgument("tv must lie in [0,1]");
    if (!(bias_gap >= 0.0)) throw InvalidArgument("bias_gap must be nonnegative");
    if (log_class_size && !(*log_class_size >= 0.0)) throw InvalidArgument("log class size must be nonnegative");
}

double BoundInputs::complexity() const { return log_class_size ? *log_class_size : V * std::log(N + 1.0); }

double prop1_deviation_bound(const BoundInputs& in) {
    in.validate();
    const double L = std::log(2.0 / in.delta) + in.complexity();
    return 2.0 * in.kappa * L / (3.0 * in.n) + std::sqrt(2.0 * in.kappa * L / in.n);
}

double prop1_deviation_tail(const BoundInputs& in, double t) {
    in.validate();
    if (!(t > 0.0)) return 1.0;
    const double exponent = in.complexity() - in.n * t * t / (2.0 / 3.0 * in.kappa * t + 2.0 * in.kappa);
    return std::min(1.0, 2.0 * std::exp(exponent));
}

namespace {

double vc_term(const BoundInputs& in) { return in.C * std::sqrt(in.V / in.N); }

}  // namespace

ExcessTerms prop1_excess_bound(const BoundInputs& in) {
    in.validate();
    const double L = std::log(4.0 / in.delta) + in.complexity();
    ExcessTerms t;
    t.estimation = 2.0 * std::sqrt(2.0 * in.kappa * L / in.n);
    t.estimation_linear = 4.0 * in.kappa * L / (3.0 * in.n);
    t.vc = vc_term(in);
    t.concentration = 2.0 * std::sqrt(2.0 * std::log(2.0 / in.delta) / in.N);
    t.bias = in.bias_gap;
    t.total = t.estimation + t.estimation_linear + t.vc + t.concentration + t.bias;
    return t;
}

ExcessTerms theorem2_bound(const BoundInputs& in) {
    in.validate();
    const double L = in.complexity();
    ExcessTerms t;
    t.estimation = 2.0 * std::sqrt(2.0 * in.kappa * L / in.n);
    t.estimation_linear = 4.0 * in.kappa * L / (3.0 * in.n);
    t.vc = vc_term(in);
    t.coupling = 2.0 * (in.kappa_star + in.kappa) * (in.N / in.n) * in.tv;
    t.total = t.estimation + t.estimation_linear + t.vc + t.coupling;
    return t;
}

double smallest_valid_C(const BoundInputs& in, double excess) {
    BoundInputs zero = in;
    zero.C = 0.0;
    const double rest = theorem2_bound(zero).total;
    if (excess <= rest) return 0.0;
    return (excess - rest) / std::sqrt(in.V / in.N);
}

void BernsteinInputs::validate() const {
    if (!(c > 0.0)) throw InvalidArgument("c must be positive");
    if (!(t > 0.0)) throw InvalidArgument("t must be positive");
    for (double s : sigma_sq) {
        if (!(s >= 0.0)) throw InvalidArgument("variance bounds must be nonnegative");
    }
}

double bernstein_tail(const BernsteinInputs& in) {
    in.validate();
    double total = 0.0;
    for (double s : in.sigma_sq) total += s;
    return std::exp(-in.t * in.t / (2.0 / 3.0 * in.c * in.t + 2.0 * total));
}

double bernstein_two_sided_tail(const BernsteinInputs& in) { return std::min(1.0, 2.0 * bernstein_tail(in)); }

}  // namespace survey
