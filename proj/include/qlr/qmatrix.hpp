#pragma once

#include <array>
#include <cassert>
#include <cstddef>
#include <vector>

#include "qlr/quaternion.hpp"

namespace qlr {

/// Dense quaternion matrix A = A0 + A1 i + A2 j + A3 k stored as four real
/// row-major component planes (structure of arrays). All update formulas and
/// gradients act on the planes directly; `at`/`set` assemble per-entry
/// Quaternion views when scalar access is clearer.
///
/// Values are immutable by convention once built: every operation below is a
/// pure function returning a fresh matrix, so instances can be shared across
/// threads freely.
class QMatrix {
public:
    QMatrix() = default;

    QMatrix(int rows, int cols) : rows_(rows), cols_(cols) {
        if (rows < 0 || cols < 0) throw std::invalid_argument("QMatrix: negative dimension");
        const std::size_t n = std::size_t(rows) * std::size_t(cols);
        for (auto& p : planes_) p.assign(n, 0.0);
    }

    static QMatrix identity(int n) {
        QMatrix I(n, n);
        for (int i = 0; i < n; ++i) I.planes_[0][std::size_t(i) * n + i] = 1.0;
        return I;
    }

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    std::size_t size() const { return std::size_t(rows_) * std::size_t(cols_); }

    /// Component plane c: 0 = real, 1 = i, 2 = j, 3 = k.
    std::vector<double>& plane(int c) { return planes_[std::size_t(c)]; }
    const std::vector<double>& plane(int c) const { return planes_[std::size_t(c)]; }

    double p(int c, int i, int j) const { return planes_[std::size_t(c)][idx(i, j)]; }
    double& p(int c, int i, int j) { return planes_[std::size_t(c)][idx(i, j)]; }

    Quaternion at(int i, int j) const {
        const std::size_t k = idx(i, j);
        return Quaternion(planes_[0][k], planes_[1][k], planes_[2][k], planes_[3][k]);
    }

    void set(int i, int j, const Quaternion& q) {
        const std::size_t k = idx(i, j);
        planes_[0][k] = q.w;
        planes_[1][k] = q.x;
        planes_[2][k] = q.y;
        planes_[3][k] = q.z;
    }

    QMatrix& operator+=(const QMatrix& o) {
        check_same_shape(o);
        for (int c = 0; c < 4; ++c)
            for (std::size_t k = 0; k < planes_[c].size(); ++k) planes_[c][k] += o.planes_[c][k];
        return *this;
    }

    QMatrix& operator-=(const QMatrix& o) {
        check_same_shape(o);
        for (int c = 0; c < 4; ++c)
            for (std::size_t k = 0; k < planes_[c].size(); ++k) planes_[c][k] -= o.planes_[c][k];
        return *this;
    }

    QMatrix& operator*=(double s) {
        for (auto& pl : planes_)
            for (double& v : pl) v *= s;
        return *this;
    }

    friend bool operator==(const QMatrix& a, const QMatrix& b) {
        return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.planes_ == b.planes_;
    }

private:
    std::size_t idx(int i, int j) const {
        assert(i >= 0 && i < rows_ && j >= 0 && j < cols_);
        return std::size_t(i) * std::size_t(cols_) + std::size_t(j);
    }

    void check_same_shape(const QMatrix& o) const {
        if (rows_ != o.rows_ || cols_ != o.cols_)
            throw std::invalid_argument("QMatrix: shape mismatch");
    }

    int rows_ = 0;
    int cols_ = 0;
    std::array<std::vector<double>, 4> planes_;
};

inline QMatrix operator+(QMatrix a, const QMatrix& b) { return a += b; }
inline QMatrix operator-(QMatrix a, const QMatrix& b) { return a -= b; }
inline QMatrix operator*(QMatrix a, double s) { return a *= s; }
inline QMatrix operator*(double s, QMatrix a) { return a *= s; }

inline QMatrix operator-(const QMatrix& a) {
    QMatrix r = a;
    r *= -1.0;
    return r;
}

/// Quaternion matrix product, entry (i,j) = sum_k A(i,k) * B(k,j) with the
/// left-to-right factor order preserved. The four result planes are built in
/// one fused pass over (i, k, j); the reduction order over k is fixed, so the
/// result is deterministic.
inline QMatrix matmul(const QMatrix& A, const QMatrix& B) {
    if (A.cols() != B.rows()) throw std::invalid_argument("matmul: inner dimensions differ");
    const int m = A.rows(), r = A.cols(), n = B.cols();
    QMatrix C(m, n);
    const double* a0 = A.plane(0).data();
    const double* a1 = A.plane(1).data();
    const double* a2 = A.plane(2).data();
    const double* a3 = A.plane(3).data();
    const double* b0 = B.plane(0).data();
    const double* b1 = B.plane(1).data();
    const double* b2 = B.plane(2).data();
    const double* b3 = B.plane(3).data();
    double* c0 = C.plane(0).data();
    double* c1 = C.plane(1).data();
    double* c2 = C.plane(2).data();
    double* c3 = C.plane(3).data();
    for (int i = 0; i < m; ++i) {
        const std::size_t ci = std::size_t(i) * n;
        for (int k = 0; k < r; ++k) {
            const std::size_t ai = std::size_t(i) * r + k;
            const std::size_t bi = std::size_t(k) * n;
            const double w = a0[ai], x = a1[ai], y = a2[ai], z = a3[ai];
            for (int j = 0; j < n; ++j) {
                const double u0 = b0[bi + j], u1 = b1[bi + j], u2 = b2[bi + j], u3 = b3[bi + j];
                c0[ci + j] += w * u0 - x * u1 - y * u2 - z * u3;
                c1[ci + j] += w * u1 + x * u0 + y * u3 - z * u2;
                c2[ci + j] += w * u2 + y * u0 + z * u1 - x * u3;
                c3[ci + j] += w * u3 + z * u0 + x * u2 - y * u1;
            }
        }
    }
    return C;
}

inline QMatrix operator*(const QMatrix& A, const QMatrix& B) { return matmul(A, B); }

/// (A*)_ij = conj(A_ji).
inline QMatrix conj_transpose(const QMatrix& A) {
    QMatrix R(A.cols(), A.rows());
    for (int i = 0; i < A.rows(); ++i)
        for (int j = 0; j < A.cols(); ++j) {
            R.p(0, j, i) = A.p(0, i, j);
            R.p(1, j, i) = -A.p(1, i, j);
            R.p(2, j, i) = -A.p(2, i, j);
            R.p(3, j, i) = -A.p(3, i, j);
        }
    return R;
}

inline double frob_norm_sq(const QMatrix& A) {
    double s = 0.0;
    for (int c = 0; c < 4; ++c)
        for (double v : A.plane(c)) s += v * v;
    return s;
}

/// Frobenius norm: Euclidean norm of all 4 m n real components.
inline double frob_norm(const QMatrix& A) { return std::sqrt(frob_norm_sq(A)); }

}  // namespace qlr
