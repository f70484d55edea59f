#pragma once

#include <cstdint>
#include <vector>

#include "qlr/qmatrix.hpp"

namespace qlr {

/// Boolean m x n set of observed entries (the index set Omega) with access
/// to its complement. One flag per quaternion entry; for color images that
/// means all three channels of a pixel are observed or missing together.
class ObservationMask {
public:
    ObservationMask() = default;

    ObservationMask(int rows, int cols, bool observed = false)
        : rows_(rows), cols_(cols), obs_(std::size_t(rows) * std::size_t(cols), observed ? 1 : 0) {
        if (rows <= 0 || cols <= 0)
            throw std::invalid_argument("ObservationMask: dimensions must be positive");
    }

    static ObservationMask all_observed(int rows, int cols) {
        return ObservationMask(rows, cols, true);
    }
    static ObservationMask none_observed(int rows, int cols) {
        return ObservationMask(rows, cols, false);
    }

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    std::size_t size() const { return obs_.size(); }

    bool is_observed(int i, int j) const { return obs_[std::size_t(i) * cols_ + j] != 0; }
    void set_observed(int i, int j, bool v) { obs_[std::size_t(i) * cols_ + j] = v ? 1 : 0; }

    const std::vector<std::uint8_t>& flags() const { return obs_; }

    std::int64_t observed_count() const {
        std::int64_t c = 0;
        for (auto v : obs_) c += v;
        return c;
    }
    std::int64_t complement_count() const { return std::int64_t(obs_.size()) - observed_count(); }

    bool matches(const QMatrix& A) const { return rows_ == A.rows() && cols_ == A.cols(); }

private:
    int rows_ = 0;
    int cols_ = 0;
    std::vector<std::uint8_t> obs_;
};

/// Entrywise selection: observed entries from `on_observed`, the rest from
/// `on_complement`. Copies are verbatim, so pinned data stays bit-exact.
inline QMatrix merge_by_mask(const ObservationMask& mask, const QMatrix& on_observed,
                             const QMatrix& on_complement) {
    if (!mask.matches(on_observed) || !mask.matches(on_complement))
        throw std::invalid_argument("merge_by_mask: shape mismatch");
    QMatrix R = on_complement;
    const auto& f = mask.flags();
    for (int c = 0; c < 4; ++c) {
        const auto& src = on_observed.plane(c);
        auto& dst = R.plane(c);
        for (std::size_t k = 0; k < f.size(); ++k)
            if (f[k]) dst[k] = src[k];
    }
    return R;
}

/// Zeroes either the observed part or its complement.
inline QMatrix restrict_to_mask(const QMatrix& A, const ObservationMask& mask, bool observed_part) {
    if (!mask.matches(A)) throw std::invalid_argument("restrict_to_mask: shape mismatch");
    QMatrix R = A;
    const auto& f = mask.flags();
    for (int c = 0; c < 4; ++c) {
        auto& dst = R.plane(c);
        for (std::size_t k = 0; k < f.size(); ++k)
            if ((f[k] != 0) != observed_part) dst[k] = 0.0;
    }
    return R;
}

inline double masked_frob_norm_sq(const QMatrix& A, const ObservationMask& mask,
                                  bool observed_part) {
    if (!mask.matches(A)) throw std::invalid_argument("masked_frob_norm_sq: shape mismatch");
    const auto& f = mask.flags();
    double s = 0.0;
    for (int c = 0; c < 4; ++c) {
        const auto& pl = A.plane(c);
        for (std::size_t k = 0; k < f.size(); ++k)
            if ((f[k] != 0) == observed_part) s += pl[k] * pl[k];
    }
    return s;
}

inline double masked_frob_norm(const QMatrix& A, const ObservationMask& mask, bool observed_part) {
    return std::sqrt(masked_frob_norm_sq(A, mask, observed_part));
}

}  // namespace qlr
