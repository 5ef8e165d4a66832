#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace vcert {

/// Base class of every exception thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A point lies outside the reference domain [0,1]^n.
class DomainError : public Error {
public:
    using Error::Error;
};

/// Vector lengths, tensor shapes or column counts disagree.
class DimensionMismatch : public Error {
public:
    using Error::Error;
};

/// Malformed argument that is not a shape problem (bad delta, n < 1, ...).
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// A derivative was requested along an axis of polynomial degree zero.
class ConstantAxis : public Error {
public:
    ConstantAxis(std::size_t axis, const std::string& what)
        : Error(what), axis_(axis) {}

    std::size_t axis() const noexcept { return axis_; }

private:
    std::size_t axis_;
};

/// A column generator set is not separated from the origin.
class DegenerateColumn : public Error {
public:
    DegenerateColumn(std::size_t column, double norm, const std::string& what)
        : Error(what), column_(column), norm_(norm) {}

    /// Zero-based column index.
    std::size_t column() const noexcept { return column_; }
    /// Norm of the offending generator.
    double norm() const noexcept { return norm_; }

private:
    std::size_t column_;
    double norm_;
};

/// The simplex solver could not finish (iteration cap hit).
class LpError : public Error {
public:
    using Error::Error;
};

/// Input document violates the schema. `path()` names the offending field.
class ParseError : public Error {
public:
    ParseError(std::string path, const std::string& message)
        : Error(path.empty() ? message : path + ": " + message), path_(std::move(path)) {}

    const std::string& path() const noexcept { return path_; }

private:
    std::string path_;
};

} // namespace vcert
