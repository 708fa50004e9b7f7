#include "svshrink/svd.hpp"

#include <lapacke.h>

#include <algorithm>
#include <string>
#include <vector>

namespace svshrink {

namespace {

void check_finite(const Matrix& y) {
    if (!y.allFinite()) throw std::invalid_argument("matrix has non-finite entries");
}

void check_info(lapack_int info, const char* routine) {
    if (info < 0) {
        throw std::invalid_argument(std::string(routine) + ": illegal argument " +
                                    std::to_string(-info));
    }
    if (info > 0) throw NumericalError(std::string(routine) + " failed to converge");
}

}  // namespace

Matrix SvdFactorization::reconstruct() const {
    return left_vectors * singular_values.asDiagonal() * right_vectors.transpose();
}

SvdFactorization svd(const Matrix& y) {
    check_finite(y);
    const lapack_int m = static_cast<lapack_int>(y.rows());
    const lapack_int n = static_cast<lapack_int>(y.cols());
    const lapack_int k = std::min(m, n);
    SvdFactorization out;
    out.singular_values.resize(k);
    out.left_vectors.resize(m, k);
    Matrix vt(k, n);
    if (k == 0) {
        out.right_vectors.resize(n, 0);
        return out;
    }
    Matrix work = y;
    const lapack_int info =
        LAPACKE_dgesdd(LAPACK_COL_MAJOR, 'S', m, n, work.data(), m, out.singular_values.data(),
                       out.left_vectors.data(), m, vt.data(), k);
    check_info(info, "dgesdd");
    out.right_vectors = vt.transpose();
    return out;
}

Vector singular_values(const Matrix& y) {
    check_finite(y);
    const lapack_int m = static_cast<lapack_int>(y.rows());
    const lapack_int n = static_cast<lapack_int>(y.cols());
    Vector s(std::min(m, n));
    if (s.size() == 0) return s;
    Matrix work = y;
    const lapack_int info = LAPACKE_dgesdd(LAPACK_COL_MAJOR, 'N', m, n, work.data(), m, s.data(),
                                           nullptr, 1, nullptr, 1);
    check_info(info, "dgesdd");
    return s;
}

SvdFactorization leading_triplets(const Matrix& y, Eigen::Index k) {
    check_finite(y);
    const bool wide = y.rows() <= y.cols();
    const Eigen::Index small = wide ? y.rows() : y.cols();
    k = std::clamp<Eigen::Index>(k, 0, small);
    SvdFactorization out;
    if (k == 0) {
        out.left_vectors.resize(y.rows(), 0);
        out.right_vectors.resize(y.cols(), 0);
        return out;
    }
    Matrix gram(small, small);
    if (wide) {
        gram.noalias() = y * y.transpose();
    } else {
        gram.noalias() = y.transpose() * y;
    }
    const lapack_int dim = static_cast<lapack_int>(small);
    const lapack_int kk = static_cast<lapack_int>(k);
    Vector w(small);
    Matrix z(small, k);
    std::vector<lapack_int> support(2 * static_cast<std::size_t>(k));
    lapack_int found = 0;
    const lapack_int info =
        LAPACKE_dsyevr(LAPACK_COL_MAJOR, 'V', 'I', 'U', dim, gram.data(), dim, 0.0, 0.0,
                       dim - kk + 1, dim, 0.0, &found, w.data(), z.data(), dim, support.data());
    check_info(info, "dsyevr");

    // dsyevr returns ascending eigenvalues.
    out.singular_values.resize(k);
    Matrix small_vectors(small, k);
    for (Eigen::Index i = 0; i < k; ++i) {
        const Eigen::Index src = k - 1 - i;
        out.singular_values(i) = std::sqrt(std::max(0.0, w(src)));
        small_vectors.col(i) = z.col(src);
    }
    Matrix other = wide ? Matrix(y.transpose() * small_vectors) : Matrix(y * small_vectors);
    for (Eigen::Index i = 0; i < k; ++i) {
        const double s = out.singular_values(i);
        if (s > 0.0) {
            other.col(i) /= s;
        } else {
            other.col(i).setZero();
        }
    }
    if (wide) {
        out.left_vectors = std::move(small_vectors);
        out.right_vectors = std::move(other);
    } else {
        out.left_vectors = std::move(other);
        out.right_vectors = std::move(small_vectors);
    }
    return out;
}

}  // namespace svshrink
