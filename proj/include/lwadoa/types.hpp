#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace lwadoa {

inline constexpr const char* kVersion = "0.1.0";

using Cplx = std::complex<double>;
using MatC = Eigen::MatrixXcd;
using VecC = Eigen::VectorXcd;
using MatD = Eigen::MatrixXd;
using VecD = Eigen::VectorXd;

// Base class for all library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct InvalidParamsError : Error { using Error::Error; };
struct BelowCutoffError : Error { using Error::Error; };
struct NonRadiatingError : Error { using Error::Error; };
struct DivergentBeamwidthError : Error { using Error::Error; };
struct OutOfBandError : Error { using Error::Error; };
struct NoRadiatingFrequencyError : Error { using Error::Error; };
struct InvalidFovError : Error { using Error::Error; };
struct GammaTooSmallError : Error { using Error::Error; };
struct EmptySectorError : Error { using Error::Error; };
struct IndexOutOfRangeError : Error { using Error::Error; };
struct ZeroSignalError : Error { using Error::Error; };
struct NumericalError : Error { using Error::Error; };
struct ConfigError : Error { using Error::Error; };
struct IoError : Error { using Error::Error; };

constexpr double kPi = 3.14159265358979323846;
constexpr double kDegPerRad = 180.0 / kPi;
constexpr double kRadPerDeg = kPi / 180.0;

inline double deg2rad(double deg) { return deg * kRadPerDeg; }
inline double rad2deg(double rad) { return rad * kDegPerRad; }

}  // namespace lwadoa
