#pragma once

#include <utility>

#include "qlr/mask.hpp"
#include "qlr/qmatrix.hpp"

namespace qlr {

/// Gradient of a real-valued function of a quaternion matrix variable: the
/// four partial derivative planes reassembled as a quaternion matrix,
/// grad f = df/dX0 + df/dX1 i + df/dX2 j + df/dX3 k.
///
/// The three partials of the factorization objective
/// f(A, B, X) = 1/2 ||A B - X||_F^2 stacked together.
struct GradientTriple {
    QMatrix dA;
    QMatrix dB;
    QMatrix dX;
};

/// Euclidean norm of the stacked triple.
inline double stacked_norm(const GradientTriple& g) {
    return std::sqrt(frob_norm_sq(g.dA) + frob_norm_sq(g.dB) + frob_norm_sq(g.dX));
}

/// Gradient of f(X) = 1/2 ||X B + C||_F^2, which is (X B + C) B*.
inline QMatrix grad_left_quadratic(const QMatrix& X, const QMatrix& B, const QMatrix& C) {
    return matmul(matmul(X, B) + C, conj_transpose(B));
}

/// Gradient of f(X) = 1/2 ||A X + C||_F^2, which is A* (A X + C).
inline QMatrix grad_right_quadratic(const QMatrix& A, const QMatrix& X, const QMatrix& C) {
    return matmul(conj_transpose(A), matmul(A, X) + C);
}

/// Central finite differences applied independently to each of the 4 m n
/// real components of X, reassembled as a quaternion matrix. The numeric
/// cross-check for every analytic formula in this header.
template <class F>
QMatrix finite_difference_gradient(F&& f, const QMatrix& X, double step = 1e-6) {
    if (!(step > 0.0)) throw std::invalid_argument("finite_difference_gradient: step must be positive");
    QMatrix G(X.rows(), X.cols());
    QMatrix probe = X;
    for (int c = 0; c < 4; ++c) {
        for (std::size_t k = 0; k < probe.plane(c).size(); ++k) {
            const double saved = probe.plane(c)[k];
            probe.plane(c)[k] = saved + step;
            const double fp = f(std::as_const(probe));
            probe.plane(c)[k] = saved - step;
            const double fm = f(std::as_const(probe));
            probe.plane(c)[k] = saved;
            if (!std::isfinite(fp) || !std::isfinite(fm))
                throw NumericError("finite_difference_gradient: non-finite objective value");
            G.plane(c)[k] = (fp - fm) / (2.0 * step);
        }
    }
    return G;
}

/// Partials of f(A, B, X) = 1/2 ||A B - X||_F^2:
/// dA = (A B - X) B*, dB = A* (A B - X), dX = X - A B.
inline GradientTriple objective_gradient(const QMatrix& A, const QMatrix& B, const QMatrix& X) {
    const QMatrix R = matmul(A, B) - X;
    GradientTriple g;
    g.dA = matmul(R, conj_transpose(B));
    g.dB = matmul(conj_transpose(A), R);
    g.dX = -R;
    return g;
}

/// Gradient projected onto the feasible set X_Omega = D_Omega: the A and B
/// blocks are unconstrained, while the X block is (X - A B) restricted to
/// the complement of Omega (the observed entries are pinned, so their
/// partials leave the feasible set and are zeroed; the data-fit residual on
/// Omega is reported separately, not as gradient).
inline GradientTriple projected_gradient(const QMatrix& A, const QMatrix& B, const QMatrix& X,
                                         const ObservationMask& mask) {
    GradientTriple g = objective_gradient(A, B, X);
    g.dX = restrict_to_mask(g.dX, mask, /*observed_part=*/false);
    return g;
}

}  // namespace qlr
