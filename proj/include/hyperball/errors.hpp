#pragma once

#include <stdexcept>
#include <string>

namespace hyperball {

// Error categories map onto CLI exit codes: ConfigError -> 1, DataError -> 2,
// NumericError -> 3.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

class DataError : public Error {
public:
    using Error::Error;
};

class NumericError : public Error {
public:
    using Error::Error;
};

class InvalidInput : public ConfigError {
public:
    using ConfigError::ConfigError;
};

class InvalidTemperature : public ConfigError {
public:
    using ConfigError::ConfigError;
};

class ShapeError : public ConfigError {
public:
    using ConfigError::ConfigError;
};

class UnsupportedMode : public ConfigError {
public:
    using ConfigError::ConfigError;
};

class UnsupportedDimension : public ConfigError {
public:
    using ConfigError::ConfigError;
};

class IndexOutOfRange : public DataError {
public:
    using DataError::DataError;
};

class InvalidDataset : public DataError {
public:
    using DataError::DataError;
};

class ParseError : public DataError {
public:
    ParseError(const std::string& file, std::size_t line, std::size_t column, const std::string& what)
        : DataError(file + ":" + std::to_string(line) + ":" + std::to_string(column) + ": " + what),
          line_(line),
          column_(column) {}

    std::size_t line() const { return line_; }
    std::size_t column() const { return column_; }

private:
    std::size_t line_;
    std::size_t column_;
};

class UndefinedAP : public DataError {
public:
    using DataError::DataError;
};

class UndefinedCorrelation : public DataError {
public:
    using DataError::DataError;
};

class NumericalDegeneracy : public NumericError {
public:
    using NumericError::NumericError;
};

// Raised when training produces a non-finite value; names the parameter.
class NumericFailure : public NumericError {
public:
    explicit NumericFailure(std::string parameter)
        : NumericError("non-finite value in " + parameter), parameter_(std::move(parameter)) {}

    const std::string& parameter() const { return parameter_; }

private:
    std::string parameter_;
};

}  // namespace hyperball
