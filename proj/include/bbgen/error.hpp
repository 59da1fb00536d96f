#pragma once

#include <stdexcept>
#include <string>

namespace bbgen {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An argument violates an operation's precondition (threshold range, weights, sizes).
class ParameterError : public Error {
public:
    using Error::Error;
};

/// Malformed or invalid input data (annotation files, degenerate boxes).
class DataError : public Error {
public:
    using Error::Error;
};

/// Rejection sampling ran out of its proposal budget.
class SamplingFailure : public Error {
public:
    SamplingFailure(const std::string& what, std::size_t proposals, std::size_t accepted)
        : Error(what), proposals_(proposals), accepted_(accepted) {}

    std::size_t proposals() const noexcept { return proposals_; }
    std::size_t accepted() const noexcept { return accepted_; }
    double acceptance_rate() const noexcept {
        return proposals_ == 0 ? 0.0 : static_cast<double>(accepted_) / static_cast<double>(proposals_);
    }

private:
    std::size_t proposals_;
    std::size_t accepted_;
};

/// Box generation could not produce a box meeting its IoU contract.
class GenerationFailure : public Error {
public:
    using Error::Error;
};

}  // namespace bbgen
