#pragma once

#include <stdexcept>
#include <string>

namespace stator {

// Base for all toolkit failures. Each subclass corresponds to one failure
// category; the CLI maps them onto exit codes.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

class GeometryError : public Error {
public:
    using Error::Error;
};

class DomainError : public Error {
public:
    using Error::Error;
};

class DiscretizationError : public Error {
public:
    using Error::Error;
};

class NumericalError : public Error {
public:
    using Error::Error;
};

// dt too coarse for the retained spectrum.
class StabilityError : public Error {
public:
    using Error::Error;
};

class SamplingError : public Error {
public:
    using Error::Error;
};

class UnwrapError : public Error {
public:
    UnwrapError(const std::string& what, double radius)
        : Error(what), radius_(radius) {}
    double radius() const { return radius_; }

private:
    double radius_;
};

class NoModeError : public Error {
public:
    using Error::Error;
};

} // namespace stator
