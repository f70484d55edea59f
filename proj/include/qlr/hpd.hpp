#pragma once

#include <string>

#include "qlr/qmatrix.hpp"

namespace qlr {

namespace detail {

inline void require_square(const QMatrix& M, const char* who) {
    if (M.rows() != M.cols()) throw std::invalid_argument(std::string(who) + ": matrix not square");
}

inline void require_hermitian(const QMatrix& M, const char* who) {
    double diff = 0.0;
    for (int i = 0; i < M.rows(); ++i)
        for (int j = i; j < M.cols(); ++j) diff += norm_sq(M.at(i, j) - conj(M.at(j, i)));
    if (std::sqrt(diff) > 1e-10 * (1.0 + frob_norm(M)))
        throw std::invalid_argument(std::string(who) + ": matrix not Hermitian");
}

}  // namespace detail

/// Cholesky factor L (lower triangular, real positive diagonal) of
/// M + shift I, so that L L* reproduces it. Hermitian positive definite
/// quaternion matrices admit this factorization with real diagonal pivots;
/// a nonpositive pivot means the shifted matrix is not positive definite.
inline QMatrix cholesky_hpd(const QMatrix& M, double shift = 0.0) {
    detail::require_square(M, "cholesky_hpd");
    detail::require_hermitian(M, "cholesky_hpd");
    const int n = M.rows();
    QMatrix L(n, n);
    for (int j = 0; j < n; ++j) {
        double d = M.at(j, j).w + shift;
        for (int k = 0; k < j; ++k) d -= norm_sq(L.at(j, k));
        if (!(d > 0.0)) throw NumericError("cholesky_hpd: nonpositive pivot, matrix not positive definite");
        const double ljj = std::sqrt(d);
        L.set(j, j, Quaternion::from_real(ljj));
        for (int i = j + 1; i < n; ++i) {
            Quaternion s = M.at(i, j);
            for (int k = 0; k < j; ++k) s -= L.at(i, k) * conj(L.at(j, k));
            L.set(i, j, s / ljj);
        }
    }
    return L;
}

/// Solves (M + shift I) Y = RHS for Hermitian positive definite M + shift I
/// via the quaternion Cholesky factorization.
inline QMatrix hpd_solve_left(const QMatrix& M, double shift, const QMatrix& rhs) {
    if (M.rows() != rhs.rows()) throw std::invalid_argument("hpd_solve_left: shape mismatch");
    const QMatrix L = cholesky_hpd(M, shift);
    const int n = M.rows(), k = rhs.cols();
    // Forward substitution L Z = RHS, then back substitution L* Y = Z.
    QMatrix Z(n, k);
    for (int col = 0; col < k; ++col)
        for (int i = 0; i < n; ++i) {
            Quaternion s = rhs.at(i, col);
            for (int t = 0; t < i; ++t) s -= L.at(i, t) * Z.at(t, col);
            Z.set(i, col, s / L.at(i, i).w);
        }
    QMatrix Y(n, k);
    for (int col = 0; col < k; ++col)
        for (int i = n - 1; i >= 0; --i) {
            Quaternion s = Z.at(i, col);
            for (int t = i + 1; t < n; ++t) s -= conj(L.at(t, i)) * Y.at(t, col);
            Y.set(i, col, s / L.at(i, i).w);
        }
    return Y;
}

/// Solves Y (M + shift I) = RHS. Since M + shift I is Hermitian this is the
/// conjugate transpose of a left solve on RHS*.
inline QMatrix hpd_solve_right(const QMatrix& M, double shift, const QMatrix& rhs) {
    if (M.cols() != rhs.cols()) throw std::invalid_argument("hpd_solve_right: shape mismatch");
    return conj_transpose(hpd_solve_left(M, shift, conj_transpose(rhs)));
}

}  // namespace qlr
