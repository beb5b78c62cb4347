#pragma once

#include <stdexcept>
#include <string>

namespace otb {

// Base class for all library errors. Subclasses distinguish the failure
// families that callers are expected to handle separately.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Two inputs that must agree (landmark schemas, image dimensions,
// embedding dimensions) do not.
class IncompatibleError : public Error {
public:
    using Error::Error;
};

// Geometric input unusable: fewer than 3 points or all collinear.
class DegenerateInputError : public Error {
public:
    using Error::Error;
};

class DuplicatePointError : public Error {
public:
    using Error::Error;
};

// Bad configuration: unknown extractor, invalid parameter ranges,
// malformed experiment config.
class ConfigError : public Error {
public:
    using Error::Error;
};

// Protocol state machine misuse (step 2 without an accept, missing AD).
class ProtocolError : public Error {
public:
    using Error::Error;
};

class PoolExhaustedError : public ProtocolError {
public:
    using ProtocolError::ProtocolError;
};

// Auxiliary data offered for a second reference enrollment.
class ReuseViolationError : public Error {
public:
    using Error::Error;
};

class OracleExhaustedError : public Error {
public:
    using Error::Error;
};

class InsufficientDataError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace otb
