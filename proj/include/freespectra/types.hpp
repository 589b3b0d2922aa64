#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace freespectra {

using cplx = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// letter index outside 1..g, or two objects disagree on g
class VariableMismatch : public Error {
public:
    using Error::Error;
};

class ShapeMismatch : public Error {
public:
    using Error::Error;
};

class DependentBasis : public Error {
public:
    using Error::Error;
};

// a product left the span of the basis
class NotAModule : public Error {
public:
    using Error::Error;
};

class OutsideDomain : public Error {
public:
    using Error::Error;
};

class UnboundedDirection : public Error {
public:
    using Error::Error;
};

class ProbeRejected : public Error {
public:
    using Error::Error;
};

class InvalidInput : public Error {
public:
    using Error::Error;
};

inline double max_abs(const Mat& m) {
    return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

inline double opnorm(const Mat& m) {
    if (m.size() == 0) return 0.0;
    Eigen::JacobiSVD<Mat> svd(m);
    return svd.singularValues()(0);
}

}  // namespace freespectra
