#pragma once

#include <cmath>
#include <ostream>
#include <stdexcept>

namespace qlr {

/// Raised when an iterative kernel fails to converge or a factorization
/// breaks down (loss of positive definiteness, singular value mismatch,
/// non-finite objective evaluations).
class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Quaternion w + x i + y j + z k over the reals, with Hamilton
/// multiplication (i^2 = j^2 = k^2 = ijk = -1, ij = -ji = k).
///
/// Components are always finite: the checking constructor rejects NaN and
/// infinity so that norms and convergence diagnostics stay meaningful.
struct Quaternion {
    double w = 0.0;  ///< real part
    double x = 0.0;  ///< coefficient of i
    double y = 0.0;  ///< coefficient of j
    double z = 0.0;  ///< coefficient of k

    constexpr Quaternion() = default;

    Quaternion(double w_, double x_, double y_, double z_) : w(w_), x(x_), y(y_), z(z_) {
        if (!(std::isfinite(w_) && std::isfinite(x_) && std::isfinite(y_) && std::isfinite(z_)))
            throw std::invalid_argument("Quaternion: components must be finite");
    }

    /// Named embedding of a real scalar (zero imaginary parts).
    static Quaternion from_real(double v) { return Quaternion(v, 0.0, 0.0, 0.0); }

    static constexpr Quaternion zero() { return Quaternion(); }
    static Quaternion one() { return from_real(1.0); }
    static Quaternion unit_i() { return Quaternion(0.0, 1.0, 0.0, 0.0); }
    static Quaternion unit_j() { return Quaternion(0.0, 0.0, 1.0, 0.0); }
    static Quaternion unit_k() { return Quaternion(0.0, 0.0, 0.0, 1.0); }

    Quaternion& operator+=(const Quaternion& o) {
        w += o.w; x += o.x; y += o.y; z += o.z;
        return *this;
    }
    Quaternion& operator-=(const Quaternion& o) {
        w -= o.w; x -= o.x; y -= o.y; z -= o.z;
        return *this;
    }
    Quaternion& operator*=(double s) {
        w *= s; x *= s; y *= s; z *= s;
        return *this;
    }
    Quaternion& operator/=(double s) { return *this *= (1.0 / s); }

    friend bool operator==(const Quaternion& a, const Quaternion& b) {
        return a.w == b.w && a.x == b.x && a.y == b.y && a.z == b.z;
    }
};

inline Quaternion operator+(Quaternion a, const Quaternion& b) { return a += b; }
inline Quaternion operator-(Quaternion a, const Quaternion& b) { return a -= b; }
inline Quaternion operator-(const Quaternion& q) { return Quaternion(-q.w, -q.x, -q.y, -q.z); }
inline Quaternion operator*(Quaternion q, double s) { return q *= s; }
inline Quaternion operator*(double s, Quaternion q) { return q *= s; }
inline Quaternion operator/(Quaternion q, double s) { return q /= s; }

/// Hamilton product. Noncommutative: use the (a, b) order you mean.
inline Quaternion operator*(const Quaternion& a, const Quaternion& b) {
    return Quaternion(a.w * b.w - a.x * b.x - a.y * b.y - a.z * b.z,
                      a.w * b.x + a.x * b.w + a.y * b.z - a.z * b.y,
                      a.w * b.y + a.y * b.w + a.z * b.x - a.x * b.z,
                      a.w * b.z + a.z * b.w + a.x * b.y - a.y * b.x);
}

/// Spelled-out alias for the Hamilton product.
inline Quaternion hamilton_mul(const Quaternion& a, const Quaternion& b) { return a * b; }

inline Quaternion conj(const Quaternion& q) { return Quaternion(q.w, -q.x, -q.y, -q.z); }

inline double norm_sq(const Quaternion& q) {
    return q.w * q.w + q.x * q.x + q.y * q.y + q.z * q.z;
}

inline double modulus(const Quaternion& q) { return std::sqrt(norm_sq(q)); }

/// Multiplicative inverse conj(q) / |q|^2. The zero quaternion has none.
inline Quaternion inverse(const Quaternion& q) {
    const double n2 = norm_sq(q);
    if (n2 == 0.0) throw std::domain_error("Quaternion: division by zero (inverse of 0)");
    return conj(q) / n2;
}

inline std::ostream& operator<<(std::ostream& os, const Quaternion& q) {
    return os << '(' << q.w << ", " << q.x << "i, " << q.y << "j, " << q.z << "k)";
}

}  // namespace qlr
