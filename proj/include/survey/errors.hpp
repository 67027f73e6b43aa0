#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace survey {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Design parameters violate their domain (probabilities outside (0,1),
/// non-partition strata, n > N, ...).
class InvalidDesign : public Error {
public:
    using Error::Error;
};

/// A rejection sampler ran out of its attempt budget.
class RejectionBudgetExceeded : public Error {
public:
    RejectionBudgetExceeded(const std::string& what, std::size_t attempts, double acceptance_rate)
        : Error(what), attempts_(attempts), acceptance_rate_(acceptance_rate) {}

    std::size_t attempts() const noexcept { return attempts_; }
    /// Exact (or estimated) probability that a single attempt is accepted.
    double acceptance_rate() const noexcept { return acceptance_rate_; }

private:
    std::size_t attempts_;
    double acceptance_rate_;
};

class EnumerationTooLarge : public Error {
public:
    using Error::Error;
};

class NumericInstability : public Error {
public:
    using Error::Error;
};

class SolverFailure : public Error {
public:
    SolverFailure(const std::string& what, double residual, std::size_t iterations)
        : Error(what), residual_(residual), iterations_(iterations) {}

    double residual() const noexcept { return residual_; }
    std::size_t iterations() const noexcept { return iterations_; }

private:
    double residual_;
    std::size_t iterations_;
};

/// A sampled unit carries a zero inclusion probability, so its HT weight is undefined.
class WeightUndefined : public Error {
public:
    WeightUndefined(const std::string& what, std::size_t unit) : Error(what), unit_(unit) {}
    std::size_t unit() const noexcept { return unit_; }

private:
    std::size_t unit_;
};

class IncompatibleDesigns : public Error {
public:
    using Error::Error;
};

class TrainingFailure : public Error {
public:
    using Error::Error;
};

class InvalidArgument : public Error {
public:
    using Error::Error;
};

}  // namespace survey
