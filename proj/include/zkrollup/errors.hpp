#pragma once

#include <stdexcept>
#include <string>

namespace zkr {

/// Base of every error the rollup library throws.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input: bad transaction fields, wrong sizes, unparsable encodings.
class ValidationError : public Error {
public:
    using Error::Error;
};

/// A fixed-size container received the wrong number of elements.
class SizeError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

class NotFoundError : public Error {
public:
    using Error::Error;
};

/// Storage backend unavailable or failed to read/write. Retryable.
class StorageError : public Error {
public:
    using Error::Error;
};

/// Stored bytes no longer hash to the identifier they were stored under.
class IntegrityError : public Error {
public:
    using Error::Error;
};

/// Bad configuration or parameter data, or a component that was not built in.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// The prover was asked to attest a false statement.
class ProvingError : public Error {
public:
    using Error::Error;
};

/// The simulated ledger refused a transaction at endorsement.
class EndorsementError : public Error {
public:
    using Error::Error;
};

/// The transaction pool is at capacity.
class PoolFullError : public Error {
public:
    using Error::Error;
};

}  // namespace zkr
