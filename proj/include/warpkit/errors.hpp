#pragma once

#include <stdexcept>
#include <string>

namespace warpkit {

/// Base class for all engine errors. `category()` is the stable
/// machine-parsable tag the CLI prints on failure.
class Error : public std::runtime_error {
public:
    Error(std::string category, const std::string& message)
        : std::runtime_error(message), category_(std::move(category)) {}

    const std::string& category() const noexcept { return category_; }

private:
    std::string category_;
};

/// Mismatched or out-of-range sizes (grid/image/flow dimensions).
class DimensionError : public Error {
public:
    explicit DimensionError(const std::string& message) : Error("dimension", message) {}
};

/// The TPS interpolation system is not solvable (collinear or coincident centers).
class SingularSystemError : public Error {
public:
    explicit SingularSystemError(const std::string& message) : Error("singular-system", message) {}
};

/// A serialized file violates its schema. `path()` points at the offending field.
class SchemaError : public Error {
public:
    SchemaError(const std::string& field_path, const std::string& message)
        : Error("schema", field_path + ": " + message), path_(field_path) {}

    const std::string& path() const noexcept { return path_; }

private:
    std::string path_;
};

/// Filesystem or codec failure.
class IoError : public Error {
public:
    explicit IoError(const std::string& message) : Error("io", message) {}
};

/// Invalid argument value (unknown family, bad label, non-finite input, ...).
class ValueError : public Error {
public:
    explicit ValueError(const std::string& message) : Error("invalid-argument", message) {}
};

} // namespace warpkit
