#pragma once

#include "svshrink/model.hpp"

#include <stdexcept>

namespace svshrink {

/// Raised when the dense SVD kernel fails to converge.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Thin SVD Y = U diag(s) V' with s descending; U is rows x k, V is cols x k.
struct SvdFactorization {
    Vector singular_values;
    Matrix left_vectors;
    Matrix right_vectors;

    Matrix reconstruct() const;
};

/// Full thin SVD through LAPACK dgesdd.
SvdFactorization svd(const Matrix& y);

/// Singular values only, descending.
Vector singular_values(const Matrix& y);

/// Leading k singular triplets from the eigendecomposition of the smaller Gram
/// matrix. Accurate for the top of the spectrum only (relative error grows as
/// (s_1 / s_i)^2 eps), which is all the Monte Carlo harness reads.
SvdFactorization leading_triplets(const Matrix& y, Eigen::Index k);

}  // namespace svshrink
