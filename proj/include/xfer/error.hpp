#pragma once

#include <stdexcept>
#include <string>

namespace xfer {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class RangeError : public Error {
public:
    using Error::Error;
};

class DimensionError : public Error {
public:
    using Error::Error;
};

class CapacityError : public Error {
public:
    using Error::Error;
};

// Raised when a trajectory produces a non-finite state.
class DivergenceError : public Error {
public:
    using Error::Error;
};

class EvaluationError : public Error {
public:
    using Error::Error;
};

// Assembly found a box whose test points all left the domain.
class EmptyRowError : public Error {
public:
    EmptyRowError(const std::string& what, std::size_t box) : Error(what), box_(box) {}
    std::size_t box() const { return box_; }

private:
    std::size_t box_;
};

class EmptyDataError : public Error {
public:
    using Error::Error;
};

class DegenerateDataError : public Error {
public:
    using Error::Error;
};

class BreakdownError : public Error {
public:
    using Error::Error;
};

class SolverError : public Error {
public:
    SolverError(const std::string& what, double residual = -1.0) : Error(what), residual_(residual) {}
    double residual() const { return residual_; }

private:
    double residual_;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace xfer
