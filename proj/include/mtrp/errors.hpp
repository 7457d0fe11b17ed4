#pragma once

#include <stdexcept>
#include <string>

namespace mtrp {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

class ConfigFileMissing : public ConfigError {
public:
    using ConfigError::ConfigError;
};

class ConfigParseError : public ConfigError {
public:
    using ConfigError::ConfigError;
};

/// Raised for out-of-range configuration values; `field()` names the offending key.
class ConfigValidationError : public ConfigError {
public:
    ConfigValidationError(std::string field, const std::string& message)
        : ConfigError(field + ": " + message), field_(std::move(field)) {}

    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

class GeometryError : public Error {
public:
    using Error::Error;
};

/// A caller violated a documented precondition (dimension mismatch, zero pilot, ...).
class ContractError : public Error {
public:
    using Error::Error;
};

class ScenarioError : public Error {
public:
    using Error::Error;
};

class EstimationError : public Error {
public:
    using Error::Error;
};

class SelectionError : public Error {
public:
    using Error::Error;
};

}  // namespace mtrp
