#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>

#include "qlr/mask.hpp"
#include "qlr/png_io.hpp"
#include "qlr/qmatrix.hpp"
#include "qlr/solver.hpp"

namespace qlr {

/// RGB image with samples in [0, 1], one real plane per channel (row-major,
/// height x width). 8-bit PNG samples map to v / 255 and back.
struct ColorImage {
    int width = 0;
    int height = 0;
    std::array<std::vector<double>, 3> ch;

    ColorImage() = default;
    ColorImage(int w, int h) : width(w), height(h) {
        for (auto& c : ch) c.assign(std::size_t(w) * std::size_t(h), 0.0);
    }

    double at(int c, int i, int j) const { return ch[std::size_t(c)][std::size_t(i) * width + j]; }
    double& at(int c, int i, int j) { return ch[std::size_t(c)][std::size_t(i) * width + j]; }
};

inline ColorImage from_rgb8(const Rgb8Image& img) {
    ColorImage out(img.width, img.height);
    const std::size_t n = std::size_t(img.width) * std::size_t(img.height);
    for (std::size_t k = 0; k < n; ++k)
        for (int c = 0; c < 3; ++c) out.ch[std::size_t(c)][k] = img.samples[3 * k + c] / 255.0;
    return out;
}

inline unsigned char to_byte(double v) {
    const double c = std::clamp(v, 0.0, 1.0);
    return static_cast<unsigned char>(std::lround(c * 255.0));
}

inline Rgb8Image to_rgb8(const ColorImage& img) {
    Rgb8Image out;
    out.width = img.width;
    out.height = img.height;
    const std::size_t n = std::size_t(img.width) * std::size_t(img.height);
    out.samples.resize(3 * n);
    for (std::size_t k = 0; k < n; ++k)
        for (int c = 0; c < 3; ++c) out.samples[3 * k + c] = to_byte(img.ch[std::size_t(c)][k]);
    return out;
}

/// Pure-quaternion encoding: R, G, B become the i, j, k planes of an
/// height x width quaternion matrix with zero real plane.
inline QMatrix encode(const ColorImage& img) {
    QMatrix A(img.height, img.width);
    for (int c = 0; c < 3; ++c) A.plane(c + 1) = img.ch[std::size_t(c)];
    return A;
}

struct DecodeStats {
    double real_plane_mass = 0.0;     ///< Frobenius norm of the discarded real plane
    std::int64_t clamped_samples = 0; ///< channel samples pushed back into [0, 1]
};

/// Inverse of `encode`. Solver iterates may drift off the pure-quaternion
/// manifold on the unobserved entries; the real plane is dropped here and
/// its mass reported, and channel values are clamped to [0, 1].
inline ColorImage decode(const QMatrix& A, DecodeStats* stats = nullptr) {
    ColorImage img(A.cols(), A.rows());
    std::int64_t clamped = 0;
    for (int c = 0; c < 3; ++c) {
        const auto& src = A.plane(c + 1);
        auto& dst = img.ch[std::size_t(c)];
        for (std::size_t k = 0; k < src.size(); ++k) {
            if (src[k] < 0.0 || src[k] > 1.0) ++clamped;
            dst[k] = std::clamp(src[k], 0.0, 1.0);
        }
    }
    if (stats) {
        double s = 0.0;
        for (double v : A.plane(0)) s += v * v;
        stats->real_plane_mass = std::sqrt(s);
        stats->clamped_samples = clamped;
    }
    return img;
}

/// Peak signal-to-noise ratio in dB over all 3 m n samples on the [0, 1]
/// scale. Identical images give +infinity.
inline double psnr(const ColorImage& reference, const ColorImage& candidate) {
    if (reference.width != candidate.width || reference.height != candidate.height)
        throw std::invalid_argument("psnr: image dimensions differ");
    double se = 0.0;
    for (int c = 0; c < 3; ++c)
        for (std::size_t k = 0; k < reference.ch[std::size_t(c)].size(); ++k) {
            const double d = reference.ch[std::size_t(c)][k] - candidate.ch[std::size_t(c)][k];
            se += d * d;
        }
    const double mse = se / (3.0 * reference.width * reference.height);
    if (mse == 0.0) return std::numeric_limits<double>::infinity();
    return -10.0 * std::log10(mse);
}

/// Random mask: each pixel observed i.i.d. with probability 1 - missing_ratio,
/// deterministic for a fixed seed.
inline ObservationMask make_mask(int rows, int cols, double missing_ratio, std::uint64_t seed) {
    if (!(missing_ratio >= 0.0 && missing_ratio < 1.0))
        throw std::invalid_argument("make_mask: missing ratio must lie in [0, 1)");
    ObservationMask mask(rows, cols);
    std::mt19937_64 rng(seed);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j)
            mask.set_observed(i, j, detail::unit_interval(rng) >= missing_ratio);
    return mask;
}

/// Mask from a grayscale image: strictly zero pixels are missing, everything
/// else observed (all three channels of a pixel share one flag).
inline ObservationMask make_mask(const Gray8Image& img) {
    ObservationMask mask(img.height, img.width);
    for (int i = 0; i < img.height; ++i)
        for (int j = 0; j < img.width; ++j)
            mask.set_observed(i, j, img.samples[std::size_t(i) * img.width + j] != 0);
    return mask;
}

}  // namespace qlr
