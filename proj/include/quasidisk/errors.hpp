#pragma once

#include <stdexcept>
#include <string>

namespace quasidisk {

// Exit codes shared by the CLI and the report layer.
enum class ExitCode : int {
    kSuccess = 0,
    kCheckFailed = 1,
    kInputError = 2,
    kNonconvergence = 3,
    kIoError = 4,
    kDomainError = 5,
};

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
    virtual ExitCode exit_code() const noexcept { return ExitCode::kInputError; }
};

// Bad user input: malformed files, out-of-range parameters, violated preconditions.
class InputError : public Error {
public:
    using Error::Error;
};

// A mathematical precondition does not hold (zero of w on a grid, non-monotone lift, ...).
class DomainError : public Error {
public:
    using Error::Error;
    ExitCode exit_code() const noexcept override { return ExitCode::kDomainError; }
};

// A file could not be opened, read or written.
class IoError : public Error {
public:
    using Error::Error;
    ExitCode exit_code() const noexcept override { return ExitCode::kIoError; }
};

class NonconvergenceError : public Error {
public:
    using Error::Error;
    ExitCode exit_code() const noexcept override { return ExitCode::kNonconvergence; }
};

}  // namespace quasidisk
