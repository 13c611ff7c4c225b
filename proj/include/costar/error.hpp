#pragma once

#include <stdexcept>
#include <string>

namespace costar {

// Every failure raised by the library derives from Error. The three branches
// map onto the CLI exit codes (config 2, data 3, numeric 4).
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
    virtual int exit_code() const noexcept { return 1; }
};

class ConfigError : public Error {
public:
    using Error::Error;
    int exit_code() const noexcept override { return 2; }
};

class DataError : public Error {
public:
    using Error::Error;
    int exit_code() const noexcept override { return 3; }
};

class NumericError : public Error {
public:
    using Error::Error;
    int exit_code() const noexcept override { return 4; }
};

// Statistic requested on a graph where it is not defined (e.g. mean degree of
// an empty graph).
class UndefinedInputError : public NumericError {
public:
    using NumericError::NumericError;
};

class PreconditionError : public ConfigError {
public:
    using ConfigError::ConfigError;
};

// Unknown attribute, unknown level, malformed term list.
class SpecificationError : public ConfigError {
public:
    using ConfigError::ConfigError;
};

class SizeGuardError : public ConfigError {
public:
    using ConfigError::ConfigError;
};

class DegenerateNullError : public NumericError {
public:
    using NumericError::NumericError;
};

class SeparationError : public NumericError {
public:
    SeparationError(std::string term, const std::string& what)
        : NumericError(what), term_(std::move(term)) {}
    const std::string& term() const noexcept { return term_; }

private:
    std::string term_;
};

class RankDeficiencyError : public NumericError {
public:
    using NumericError::NumericError;
};

}  // namespace costar
