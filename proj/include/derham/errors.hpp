#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace derham {

/// Input outside a map's domain, a Moebius pole, or a malformed argument.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Fixed-point iteration stalled; usually means the map is not weakly contracting.
class ConvergenceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Requested grid would exceed the sample-count cap.
class ResourceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class OverflowError : public std::overflow_error {
public:
    using std::overflow_error::overflow_error;
};

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Schema violation in a system document. `path()` is the offending key path, e.g. "/maps/1/params".
class ParseError : public std::runtime_error {
public:
    ParseError(std::string path, const std::string& what)
        : std::runtime_error(path + ": " + what), path_(std::move(path)) {}

    const std::string& path() const noexcept { return path_; }

private:
    std::string path_;
};

}  // namespace derham
