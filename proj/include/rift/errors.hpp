#ifndef RIFT_ERRORS_HPP
#define RIFT_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace rift {

// Base class for everything thrown by the library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// A covariance (or inverse covariance) lost positive definiteness.
class DegenerateCovariance : public Error {
public:
    explicit DegenerateCovariance(const std::string& msg) : Error(msg) {}
};

// Input sample rejected before processing (bad dimension, non-finite values).
class RejectedInput : public Error {
public:
    explicit RejectedInput(const std::string& msg) : Error(msg) {}
};

// Prediction requested from a model with no rules.
class NoModel : public Error {
public:
    explicit NoModel(const std::string& msg) : Error(msg) {}
};

// Snapshot decode failure: bad magic, unknown version, truncated payload.
class SnapshotError : public Error {
public:
    explicit SnapshotError(const std::string& msg) : Error(msg) {}
};

// Unusable run configuration (missing columns, bad keys, bad values).
class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& msg) : Error(msg) {}
};

// Unreadable or unwritable files, malformed input data.
class DataError : public Error {
public:
    explicit DataError(const std::string& msg) : Error(msg) {}
};

}  // namespace rift

#endif
