#pragma once

#include <complex>
#include <limits>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace gbvp {

using cplx = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;

/// Exponent value used for the p = infinity norms.
inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A precondition or shape contract was violated by the caller.
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// The numerics failed: blow-up, singular characteristic matrix, ill-conditioning.
class NumericalError : public Error {
public:
    using Error::Error;
};

/// Hölder conjugate exponent p' with 1/p + 1/p' = 1.
inline double dual_exponent(double p) {
    if (!(p >= 1.0)) {
        throw InvalidArgument("exponent p must satisfy p >= 1");
    }
    if (p == 1.0) return kInfinity;
    if (p == kInfinity) return 1.0;
    return p / (p - 1.0);
}

}  // namespace gbvp
