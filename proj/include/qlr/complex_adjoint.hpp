#pragma once

#include <complex>
#include <vector>

#include "qlr/qmatrix.hpp"

namespace qlr {

/// Complex adjoint of an m x n quaternion matrix A = B1 + B2 j
/// (B1 = A0 + A1 i, B2 = A2 + A3 i): the 2m x 2n complex matrix
///
///     [  B1        B2      ]
///     [ -conj(B2)  conj(B1)]
///
/// The map is an algebra homomorphism: the adjoint of a product is the
/// product of the adjoints, which ties quaternion spectral quantities to
/// ordinary complex linear algebra.
struct ComplexAdjoint {
    int qrows = 0;  ///< quaternion row count m (complex matrix is 2m x 2n)
    int qcols = 0;
    std::vector<std::complex<double>> data;  ///< row-major, 2m x 2n

    ComplexAdjoint() = default;
    ComplexAdjoint(int m, int n)
        : qrows(m), qcols(n), data(std::size_t(2 * m) * std::size_t(2 * n)) {}

    int rows() const { return 2 * qrows; }
    int cols() const { return 2 * qcols; }

    std::complex<double>& at(int i, int j) { return data[std::size_t(i) * cols() + j]; }
    const std::complex<double>& at(int i, int j) const {
        return data[std::size_t(i) * cols() + j];
    }
};

inline ComplexAdjoint complex_adjoint(const QMatrix& A) {
    const int m = A.rows(), n = A.cols();
    ComplexAdjoint M(m, n);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < n; ++j) {
            const std::complex<double> b1(A.p(0, i, j), A.p(1, i, j));
            const std::complex<double> b2(A.p(2, i, j), A.p(3, i, j));
            M.at(i, j) = b1;
            M.at(i, j + n) = b2;
            M.at(i + m, j) = -std::conj(b2);
            M.at(i + m, j + n) = std::conj(b1);
        }
    return M;
}

inline double adjoint_block_asymmetry(const ComplexAdjoint& M) {
    const int m = M.qrows, n = M.qcols;
    double s = 0.0;
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < n; ++j) {
            s += std::norm(M.at(i + m, j + n) - std::conj(M.at(i, j)));
            s += std::norm(M.at(i + m, j) + std::conj(M.at(i, j + n)));
        }
    return std::sqrt(s);
}

/// Inverse of `complex_adjoint`. The top blocks are read back verbatim, so
/// the round trip is exact; the bottom blocks must agree with the block
/// symmetry within 1e-10 (relative to the matrix norm).
inline QMatrix from_complex_adjoint(const ComplexAdjoint& M) {
    const int m = M.qrows, n = M.qcols;
    double norm = 0.0;
    for (const auto& v : M.data) norm += std::norm(v);
    norm = std::sqrt(norm);
    if (adjoint_block_asymmetry(M) > 1e-10 * (1.0 + norm))
        throw std::invalid_argument("from_complex_adjoint: block symmetry violated");
    QMatrix A(m, n);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < n; ++j) {
            A.p(0, i, j) = M.at(i, j).real();
            A.p(1, i, j) = M.at(i, j).imag();
            A.p(2, i, j) = M.at(i, j + n).real();
            A.p(3, i, j) = M.at(i, j + n).imag();
        }
    return A;
}

}  // namespace qlr
