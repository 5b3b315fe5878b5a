#pragma once

#include <stdexcept>
#include <string>

namespace tailrisk {

/// Base class for all engine errors that are not plain precondition
/// violations. Precondition breaches on scalar arguments throw
/// std::domain_error / std::invalid_argument directly.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Malformed or inconsistent input files / run configuration.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Inputs parse cleanly but violate a model constraint
/// (e.g. a coupling that would push a conditional probability above 1).
class ValidationError : public Error {
public:
    using Error::Error;
};

/// Containers whose shapes must line up do not (grid mismatches etc.).
class ShapeError : public Error {
public:
    using Error::Error;
};

/// A computation cannot produce a meaningful number
/// (degenerate annuity, non-finite intermediate, ...).
class NumericalError : public Error {
public:
    using Error::Error;
};

/// Historical estimation failed (no overlap, empty conditioning set, ...).
class EstimationError : public Error {
public:
    using Error::Error;
};

} // namespace tailrisk
