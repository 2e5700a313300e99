#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace spraycard {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A numeric parameter is outside its documented domain.
class ParameterError : public Error {
public:
    using Error::Error;
};

/// Two rasters that must share a size do not.
class DimensionError : public Error {
public:
    using Error::Error;
};

/// Horizontal and vertical px->um scales disagree; the card was not
/// photographed orthogonally.
class DistortedCaptureError : public Error {
public:
    using Error::Error;
};

/// An image file could not be read or decoded.
class ImageIoError : public Error {
public:
    using Error::Error;
};

/// A synthetic card layout is invalid. `field()` names the offending
/// document path, e.g. `drops[3].diameter_um`.
class LayoutError : public Error {
public:
    LayoutError(std::string field, std::string message)
        : Error(field.empty() ? message : field + ": " + message),
          field_(std::move(field)),
          message_(std::move(message)) {}

    const std::string& field() const noexcept { return field_; }
    const std::string& message() const noexcept { return message_; }

private:
    std::string field_;
    std::string message_;
};

}  // namespace spraycard
