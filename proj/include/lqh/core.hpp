#pragma once

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace lqh {

using cplx = std::complex<double>;

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Re z outside the analytic strip of a cumulant generating function.
class DomainError : public Error {
public:
    using Error::Error;
};

class ParameterError : public Error {
public:
    using Error::Error;
};

class QuadratureError : public Error {
public:
    using Error::Error;
};

class DegenerateError : public Error {
public:
    using Error::Error;
};

// Malformed or inconsistent run configuration.
class ConfigError : public Error {
public:
    using Error::Error;
};

class CalibrationError : public Error {
public:
    CalibrationError(const std::string& what, std::vector<double> residuals)
        : Error(what), residuals_(std::move(residuals)) {}
    const std::vector<double>& residuals() const noexcept { return residuals_; }

private:
    std::vector<double> residuals_;
};

struct QuadratureConfig {
    double rel_tol = 1e-9;
    double abs_tol = 1e-13;
    double panel_width = 1.0;          // widest Gauss-Legendre panel inside the core interval
    double initial_halfwidth = 4.0;    // core interval before doubling starts
    double max_truncation = 1e15;
    std::size_t max_nodes = 50'000'000;
    unsigned threads = 0;              // 0 selects std::thread::hardware_concurrency()
};

}  // namespace lqh
