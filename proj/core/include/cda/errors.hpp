#pragma once

#include <stdexcept>
#include <string>

namespace cda {

// Base class for everything this library throws.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Bad configuration / arguments (CLI maps these to exit code 2).
class ConfigError : public Error {
public:
    using Error::Error;
};

// Problems reading or interpreting input data (CLI exit code 3).
class DataError : public Error {
public:
    using Error::Error;
};

// Numerical failures and contract violations (CLI exit code 4).
class NumericError : public Error {
public:
    using Error::Error;
};

class InvalidArgument : public ConfigError {
public:
    using ConfigError::ConfigError;
};

class NotPositiveDefinite : public NumericError {
public:
    using NumericError::NumericError;
};

class DegenerateSpectrum : public NumericError {
public:
    using NumericError::NumericError;
};

class DimensionMismatch : public NumericError {
public:
    using NumericError::NumericError;
};

class ZeroDirection : public NumericError {
public:
    using NumericError::NumericError;
};

class InvalidSparsity : public NumericError {
public:
    using NumericError::NumericError;
};

class InvalidEta : public NumericError {
public:
    using NumericError::NumericError;
};

class UnequalPriors : public NumericError {
public:
    using NumericError::NumericError;
};

class EmptyClass : public DataError {
public:
    using DataError::DataError;
};

class InfeasibleProportion : public DataError {
public:
    using DataError::DataError;
};

class BadMagic : public DataError {
public:
    using DataError::DataError;
};

class TruncatedFile : public DataError {
public:
    using DataError::DataError;
};

class CountMismatch : public DataError {
public:
    using DataError::DataError;
};

class MalformedLine : public DataError {
public:
    using DataError::DataError;
};

class NonDigitLabel : public DataError {
public:
    using DataError::DataError;
};

class UnknownLabel : public DataError {
public:
    using DataError::DataError;
};

class MalformedCSV : public DataError {
public:
    using DataError::DataError;
};

class NonBinaryLabels : public DataError {
public:
    using DataError::DataError;
};

} // namespace cda
