#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace clusterfx {

// Base class for all errors raised by the library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// A CSV row that cannot be parsed; carries the 1-based line number.
class MalformedRowError : public Error {
public:
    MalformedRowError(std::size_t line, const std::string& detail)
        : Error("line " + std::to_string(line) + ": " + detail), line_(line) {}
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_ = 0;
};

// The same (group, cluster, period, visit) key appears twice.
class DuplicateKeyError : public Error {
public:
    using Error::Error;
};

// Group labels must be 1..T with every label present.
class NonContiguousGroupsError : public Error {
public:
    using Error::Error;
};

// A design cell (group, period) holds no observations.
class EmptyCellError : public Error {
public:
    EmptyCellError(int group, int period)
        : Error("cell (group " + std::to_string(group) + ", period " +
                std::to_string(period) + ") contains no observations"),
          group_(group),
          period_(period) {}
    int group() const noexcept { return group_; }
    int period() const noexcept { return period_; }

private:
    int group_ = 0;
    int period_ = 0;
};

// Vector or matrix dimensions do not match the design.
class DimensionError : public Error {
public:
    using Error::Error;
};

// The estimated variance in the hypothesis space is zero.
class DegenerateVarianceError : public Error {
public:
    using Error::Error;
};

// A requested covariance or scale matrix is not positive semidefinite.
class NotPsdError : public Error {
public:
    using Error::Error;
};

// A simulation configuration file has a bad or unknown entry.
class BadConfigError : public Error {
public:
    explicit BadConfigError(const std::string& key, const std::string& detail)
        : Error("config key '" + key + "': " + detail), key_(key) {}
    const std::string& key() const noexcept { return key_; }

private:
    std::string key_;
};

}  // namespace clusterfx
