#pragma once

// Shared helpers for the test suites: seeded random instances and
// independent oracles (a 16-term Hamilton expansion, a plain complex GEMM)
// that never touch the code paths they are used to check.

#include <complex>
#include <random>
#include <vector>

#include "qlr/qlr.hpp"

namespace test_support {

using qlr::ComplexAdjoint;
using qlr::QMatrix;
using qlr::Quaternion;

inline double uniform_pm1(std::mt19937_64& g) { return qlr::detail::symmetric_unit(g); }

inline Quaternion random_quaternion(std::mt19937_64& g) {
    return Quaternion(uniform_pm1(g), uniform_pm1(g), uniform_pm1(g), uniform_pm1(g));
}

inline QMatrix random_qmatrix(int rows, int cols, std::mt19937_64& g) {
    return qlr::detail::random_uniform(rows, cols, g);
}

/// Brute-force Hamilton product: expand all 16 basis products e_p e_q using
/// the multiplication table alone.
inline Quaternion hamilton_oracle(const Quaternion& a, const Quaternion& b) {
    static const int comp[4][4] = {{0, 1, 2, 3}, {1, 0, 3, 2}, {2, 3, 0, 1}, {3, 2, 1, 0}};
    static const double sign[4][4] = {
        {1, 1, 1, 1}, {1, -1, 1, -1}, {1, -1, -1, 1}, {1, 1, -1, -1}};
    const double av[4] = {a.w, a.x, a.y, a.z};
    const double bv[4] = {b.w, b.x, b.y, b.z};
    double out[4] = {0, 0, 0, 0};
    for (int p = 0; p < 4; ++p)
        for (int q = 0; q < 4; ++q) out[comp[p][q]] += sign[p][q] * av[p] * bv[q];
    return Quaternion(out[0], out[1], out[2], out[3]);
}

/// Plain triple-loop complex product of two adjoint matrices (row-major),
/// used to verify the homomorphism property independently.
inline std::vector<std::complex<double>> complex_product(const ComplexAdjoint& A,
                                                         const ComplexAdjoint& B) {
    const int m = A.rows(), k = A.cols(), n = B.cols();
    std::vector<std::complex<double>> C(std::size_t(m) * std::size_t(n));
    for (int i = 0; i < m; ++i)
        for (int t = 0; t < k; ++t) {
            const std::complex<double> a = A.at(i, t);
            for (int j = 0; j < n; ++j) C[std::size_t(i) * n + j] += a * B.at(t, j);
        }
    return C;
}

inline double rel_err(double got, double want) {
    return std::abs(got - want) / std::max(1.0, std::abs(want));
}

inline double rel_diff(const QMatrix& got, const QMatrix& want) {
    return qlr::frob_norm(got - want) / (1.0 + qlr::frob_norm(want));
}

}  // namespace test_support
