#pragma once

#include <algorithm>
#include <limits>
#include <numeric>
#include <utility>

#include "qlr/qmatrix.hpp"

namespace qlr {

struct QsvdOptions {
    int max_sweeps = 60;      ///< Jacobi sweep limit before declaring non-convergence
    double threshold = 1e-12; ///< relative off-diagonal threshold for skipping a rotation
};

/// A = U diag(singular_values) V* with U (m x m) and V (n x n) quaternion
/// unitary and the singular values real, nonnegative, nonincreasing.
struct QsvdResult {
    QMatrix U;
    std::vector<double> singular_values;  ///< length min(m, n)
    QMatrix V;
};

namespace detail {

/// Column-major quaternion storage used by the Jacobi kernel, so that the
/// pair rotations stream over contiguous memory.
struct QCols {
    int m = 0, n = 0;
    std::array<std::vector<double>, 4> p;

    QCols() = default;
    QCols(int m_, int n_) : m(m_), n(n_) {
        for (auto& pl : p) pl.assign(std::size_t(m) * std::size_t(n), 0.0);
    }

    static QCols from_matrix(const QMatrix& A) {
        QCols w(A.rows(), A.cols());
        for (int c = 0; c < 4; ++c)
            for (int j = 0; j < A.cols(); ++j)
                for (int i = 0; i < A.rows(); ++i)
                    w.p[c][std::size_t(j) * w.m + i] = A.p(c, i, j);
        return w;
    }

    static QCols identity(int n) {
        QCols w(n, n);
        for (int j = 0; j < n; ++j) w.p[0][std::size_t(j) * n + j] = 1.0;
        return w;
    }

    QMatrix to_matrix() const {
        QMatrix A(m, n);
        for (int c = 0; c < 4; ++c)
            for (int j = 0; j < n; ++j)
                for (int i = 0; i < m; ++i) A.p(c, i, j) = p[c][std::size_t(j) * m + i];
        return A;
    }

    double col_norm_sq(int j) const {
        const std::size_t off = std::size_t(j) * m;
        double s = 0.0;
        for (int c = 0; c < 4; ++c)
            for (int i = 0; i < m; ++i) s += p[c][off + i] * p[c][off + i];
        return s;
    }

    /// Gram entry conj(col a)^T col b, a quaternion scalar.
    Quaternion col_dot(int a, int b) const {
        const std::size_t oa = std::size_t(a) * m, ob = std::size_t(b) * m;
        const double *u0 = p[0].data() + oa, *u1 = p[1].data() + oa, *u2 = p[2].data() + oa,
                     *u3 = p[3].data() + oa;
        const double *v0 = p[0].data() + ob, *v1 = p[1].data() + ob, *v2 = p[2].data() + ob,
                     *v3 = p[3].data() + ob;
        double c0 = 0, c1 = 0, c2 = 0, c3 = 0;
        for (int i = 0; i < m; ++i) {
            c0 += u0[i] * v0[i] + u1[i] * v1[i] + u2[i] * v2[i] + u3[i] * v3[i];
            c1 += u0[i] * v1[i] - u1[i] * v0[i] - u2[i] * v3[i] + u3[i] * v2[i];
            c2 += u0[i] * v2[i] - u2[i] * v0[i] - u3[i] * v1[i] + u1[i] * v3[i];
            c3 += u0[i] * v3[i] - u3[i] * v0[i] - u1[i] * v2[i] + u2[i] * v1[i];
        }
        return Quaternion(c0, c1, c2, c3);
    }

    /// Plane rotation on columns (a, b): col_a <- col_a g - col_b sn,
    /// col_b <- col_a h + col_b cs, with g, h quaternion and cs, sn real.
    /// Scalars multiply from the right (columns span a right-linear space).
    void rotate(int a, int b, const Quaternion& g, const Quaternion& h, double cs, double sn) {
        const std::size_t oa = std::size_t(a) * m, ob = std::size_t(b) * m;
        double *u0 = p[0].data() + oa, *u1 = p[1].data() + oa, *u2 = p[2].data() + oa,
               *u3 = p[3].data() + oa;
        double *v0 = p[0].data() + ob, *v1 = p[1].data() + ob, *v2 = p[2].data() + ob,
               *v3 = p[3].data() + ob;
        for (int i = 0; i < m; ++i) {
            const double a0 = u0[i], a1 = u1[i], a2 = u2[i], a3 = u3[i];
            const double b0 = v0[i], b1 = v1[i], b2 = v2[i], b3 = v3[i];
            u0[i] = (a0 * g.w - a1 * g.x - a2 * g.y - a3 * g.z) - b0 * sn;
            u1[i] = (a0 * g.x + a1 * g.w + a2 * g.z - a3 * g.y) - b1 * sn;
            u2[i] = (a0 * g.y + a2 * g.w + a3 * g.x - a1 * g.z) - b2 * sn;
            u3[i] = (a0 * g.z + a3 * g.w + a1 * g.y - a2 * g.x) - b3 * sn;
            v0[i] = (a0 * h.w - a1 * h.x - a2 * h.y - a3 * h.z) + b0 * cs;
            v1[i] = (a0 * h.x + a1 * h.w + a2 * h.z - a3 * h.y) + b1 * cs;
            v2[i] = (a0 * h.y + a2 * h.w + a3 * h.x - a1 * h.z) + b2 * cs;
            v3[i] = (a0 * h.z + a3 * h.w + a1 * h.y - a2 * h.x) + b3 * cs;
        }
    }
};

/// One-sided Jacobi: orthogonalize the columns of W by quaternion plane
/// rotations, accumulating them into V. Each rotation diagonalizes the 2x2
/// Hermitian Gram block [[a, c], [conj(c), b]]: the quaternion phase
/// alpha = c/|c| makes the block real symmetric, then a classical Jacobi
/// angle zeroes it. Cyclic sweeps converge quadratically; the pair is
/// skipped once |c| <= threshold sqrt(a b).
inline void jacobi_orthogonalize(QCols& W, QCols& V, const QsvdOptions& opts) {
    const int n = W.n;
    for (int sweep = 0; sweep < opts.max_sweeps; ++sweep) {
        bool rotated = false;
        for (int a = 0; a < n - 1; ++a) {
            for (int b = a + 1; b < n; ++b) {
                const double app = W.col_norm_sq(a);
                const double aqq = W.col_norm_sq(b);
                if (app == 0.0 || aqq == 0.0) continue;
                const Quaternion c = W.col_dot(a, b);
                const double cmod = modulus(c);
                if (cmod <= opts.threshold * std::sqrt(app * aqq)) continue;
                rotated = true;
                const Quaternion alpha = c / cmod;
                const double tau = (aqq - app) / (2.0 * cmod);
                const double t =
                    (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
                const double cs = 1.0 / std::sqrt(1.0 + t * t);
                const double sn = t * cs;
                const Quaternion g = alpha * cs;
                const Quaternion h = alpha * sn;
                W.rotate(a, b, g, h, cs, sn);
                V.rotate(a, b, g, h, cs, sn);
            }
        }
        if (!rotated) return;
    }
    throw NumericError("qsvd: Jacobi sweep limit reached without convergence");
}

/// Extends `cols` (orthonormal quaternion columns of length m) to a full
/// orthonormal basis using canonical candidates and twice-applied
/// Gram-Schmidt. Deterministic.
inline void complete_basis(std::vector<std::vector<Quaternion>>& cols, int m) {
    for (int cand = 0; cand < m && int(cols.size()) < m; ++cand) {
        std::vector<Quaternion> v(m);
        v[cand] = Quaternion::one();
        for (int pass = 0; pass < 2; ++pass) {
            for (const auto& q : cols) {
                Quaternion proj;  // q^H v
                for (int i = 0; i < m; ++i) proj += conj(q[i]) * v[i];
                for (int i = 0; i < m; ++i) v[i] -= q[i] * proj;
            }
        }
        double nrm = 0.0;
        for (const auto& e : v) nrm += norm_sq(e);
        nrm = std::sqrt(nrm);
        if (nrm < 1e-8) continue;  // candidate already in the span
        for (auto& e : v) e /= nrm;
        cols.push_back(std::move(v));
    }
}

inline QsvdResult qsvd_tall(const QMatrix& A, const QsvdOptions& opts) {
    const int m = A.rows(), n = A.cols();  // m >= n
    QCols W = QCols::from_matrix(A);
    QCols V = QCols::identity(n);
    jacobi_orthogonalize(W, V, opts);

    std::vector<double> sigma(n);
    for (int j = 0; j < n; ++j) sigma[j] = std::sqrt(W.col_norm_sq(j));

    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return sigma[a] > sigma[b]; });

    QsvdResult res;
    res.singular_values.resize(n);
    res.V = QMatrix(n, n);
    for (int j = 0; j < n; ++j) {
        res.singular_values[j] = sigma[order[j]];
        for (int i = 0; i < n; ++i) {
            const std::size_t k = std::size_t(order[j]) * n + i;
            res.V.set(i, j, Quaternion(V.p[0][k], V.p[1][k], V.p[2][k], V.p[3][k]));
        }
    }

    // Columns with significant norm become left singular vectors; the rest
    // of U is completed to an orthonormal basis.
    const double sigma_max = res.singular_values.empty() ? 0.0 : res.singular_values[0];
    const double cutoff = std::max(m, n) * std::numeric_limits<double>::epsilon() * sigma_max;
    std::vector<std::vector<Quaternion>> ucols;
    ucols.reserve(m);
    for (int j = 0; j < n; ++j) {
        const double s = res.singular_values[j];
        if (s <= cutoff || s == 0.0) break;  // sorted, so the tail is all below
        std::vector<Quaternion> col(m);
        for (int i = 0; i < m; ++i) {
            const std::size_t k = std::size_t(order[j]) * m + i;
            col[i] = Quaternion(W.p[0][k] / s, W.p[1][k] / s, W.p[2][k] / s, W.p[3][k] / s);
        }
        ucols.push_back(std::move(col));
    }
    complete_basis(ucols, m);
    if (int(ucols.size()) != m)
        throw NumericError("qsvd: failed to complete an orthonormal basis for U");

    res.U = QMatrix(m, m);
    for (int j = 0; j < m; ++j)
        for (int i = 0; i < m; ++i) res.U.set(i, j, ucols[std::size_t(j)][std::size_t(i)]);
    return res;
}

}  // namespace detail

/// Quaternion singular value decomposition by one-sided Jacobi. Equivalent
/// to structure-preserving paired rotations on the 2m x 2n complex adjoint
/// (each quaternion rotation is the preimage of a pair of complex ones), but
/// carried out in quaternion arithmetic so repeated singular values need no
/// subspace disentangling. The adjoint's doubled spectrum is what the tests
/// check the values against.
inline QsvdResult qsvd(const QMatrix& A, const QsvdOptions& opts = {}) {
    if (A.rows() == 0 || A.cols() == 0) throw std::invalid_argument("qsvd: empty matrix");
    if (A.rows() >= A.cols()) return detail::qsvd_tall(A, opts);
    QsvdResult t = detail::qsvd_tall(conj_transpose(A), opts);
    QsvdResult res;
    res.U = std::move(t.V);
    res.V = std::move(t.U);
    res.singular_values = std::move(t.singular_values);
    return res;
}

/// Number of singular values above tol * sigma_1 (0 for the zero matrix).
inline int rank(const QMatrix& A, double tol = 1e-10) {
    if (tol <= 0.0) throw std::invalid_argument("rank: tolerance must be positive");
    const QsvdResult d = qsvd(A);
    if (d.singular_values.empty() || d.singular_values[0] == 0.0) return 0;
    const double cut = tol * d.singular_values[0];
    int r = 0;
    for (double s : d.singular_values)
        if (s > cut) ++r;
    return r;
}

/// Factors X (rank <= r) as A B with A m x r, B r x n, by splitting the
/// truncated QSVD: A = U_1 diag(sqrt(sigma)), B = diag(sqrt(sigma)) V_1*.
inline std::pair<QMatrix, QMatrix> low_rank_factor(const QMatrix& X, int r, double tol = 1e-10) {
    if (r < 1) throw std::invalid_argument("low_rank_factor: rank must be positive");
    const QsvdResult d = qsvd(X);
    const double s1 = d.singular_values.empty() ? 0.0 : d.singular_values[0];
    int numeric_rank = 0;
    for (double s : d.singular_values)
        if (s1 > 0.0 && s > tol * s1) ++numeric_rank;
    if (numeric_rank > r)
        throw std::invalid_argument("low_rank_factor: matrix rank exceeds requested rank");

    const int m = X.rows(), n = X.cols();
    QMatrix A(m, r), B(r, n);
    const int keep = std::min<int>(r, int(d.singular_values.size()));
    for (int k = 0; k < keep; ++k) {
        const double root = std::sqrt(d.singular_values[std::size_t(k)]);
        for (int i = 0; i < m; ++i) A.set(i, k, d.U.at(i, k) * root);
        for (int j = 0; j < n; ++j) B.set(k, j, conj(d.V.at(j, k)) * root);
    }
    return {A, B};
}

}  // namespace qlr
