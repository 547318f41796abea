#pragma once

#include <stdexcept>
#include <string>

namespace optomech {

// Base for everything thrown by this library.
struct Error : std::runtime_error {
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Bad parameters or inputs; maps to exit code 1 in the CLI.
struct ValidationError : Error {
    explicit ValidationError(const std::string& what) : Error(what) {}
};

// Mismatched grids between spectra that must share one.
struct ShapeError : ValidationError {
    explicit ShapeError(const std::string& what) : ValidationError(what) {}
};

// Integration band too narrow for the requested quantity.
struct BandwidthError : ValidationError {
    explicit BandwidthError(const std::string& what) : ValidationError(what) {}
};

// Numerical failure (singular system, non-convergence); exit code 2.
struct NumericalError : Error {
    explicit NumericalError(const std::string& what) : Error(what) {}
};

// Calibration tone missing or unusable reference data.
struct CalibrationError : NumericalError {
    explicit CalibrationError(const std::string& what) : NumericalError(what) {}
};

// Fit parameterization with a singular Jacobian.
struct DegenerateFitError : NumericalError {
    explicit DegenerateFitError(const std::string& what) : NumericalError(what) {}
};

} // namespace optomech
