#pragma once

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>

namespace czw {

using cplx = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;

// Raised for invalid inputs that violate an operation's preconditions.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Configuration and parse problems; the CLI maps these to exit code 2.
class ConfigError : public Error {
public:
    using Error::Error;
};

}  // namespace czw
