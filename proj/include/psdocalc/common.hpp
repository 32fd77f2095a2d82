#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace psdocalc {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using CVec = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;
using cdouble = std::complex<double>;
using PointId = Eigen::Index;

inline constexpr const char* kVersion = "0.3.1";

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Bad argument or violated precondition.
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// A numerical check on an input or intermediate result failed.
class NumericalError : public Error {
public:
    using Error::Error;
};

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
    double rms_residual = 0.0;
    std::size_t count = 0;
};

/// Ordinary least squares y = slope * x + intercept. Needs two distinct x values.
LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

/// Spearman rank correlation (average ranks for ties).
double spearman(const std::vector<double>& a, const std::vector<double>& b);

double median(std::vector<double> values);

/// Geometric grid lo, lo*2^(1/per_octave), ... up to hi inclusive (with slack).
std::vector<double> geometric_grid(double lo, double hi, int per_octave);

double lp_norm(const Vec& f, const Vec& mu, double p);
double lp_norm(const CVec& f, const Vec& mu, double p);

/// Conjugate exponent, with 1 <-> inf.
double conjugate_exponent(double p);

bool is_inf(double p);

}  // namespace psdocalc
