#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <ostream>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "qlr/gradient.hpp"
#include "qlr/hpd.hpp"
#include "qlr/mask.hpp"
#include "qlr/qmatrix.hpp"

namespace qlr {

/// Parameters of the alternating completion solver. A value of 0 for
/// `lambda` means "derive a problem-scaled default"; call `resolve_lambda`
/// (or use `run`, which does) before stepping manually.
struct SolverConfig {
    int rank = 1;                 ///< target factor rank r, must satisfy r < min(m, n)
    double lambda = 0.0;          ///< proximal regularization weight, > 0 once resolved
    int max_iterations = 500;
    double step_tolerance = 1e-8; ///< relative stacked step-norm stopping threshold
    std::uint64_t seed = 0;       ///< factor initialization seed
    bool track_rate = false;      ///< record iterate distances and fit a linear rate
};

/// The triple Z = (A, B, X) evolved by the solver. X agrees with the data
/// on the observed entries exactly after every update.
struct SolverState {
    QMatrix A;  ///< m x r left factor
    QMatrix B;  ///< r x n right factor
    QMatrix X;  ///< m x n completion variable
    int iteration = 0;
};

enum class SolveStatus { converged, max_iterations, numeric_failure };

inline const char* status_name(SolveStatus s) {
    switch (s) {
        case SolveStatus::converged: return "converged";
        case SolveStatus::max_iterations: return "max-iterations";
        default: return "numeric-failure";
    }
}

struct IterationRecord {
    int k = 0;
    double objective = 0.0;
    double step_norm = 0.0;      ///< stacked ||Z_k - Z_{k+1}||_F (0 for the initial record)
    double residual = 0.0;       ///< projected-gradient norm at this iterate
    double descent_slack = 0.0;  ///< f(Z_k) - f(Z_{k+1}) - (lambda_0/2) step^2
};

struct RateFit {
    double sigma = 0.0;  ///< fitted geometric factor, < 1 for R-linear traces
    double beta = 0.0;   ///< fitted scale: distance ~ beta sigma^k
    double r2 = 0.0;     ///< goodness of the log-linear fit
    bool degenerate = true;
};

struct ConvergenceReport {
    std::vector<IterationRecord> records;  ///< records[0] describes the initial iterate
    SolveStatus status = SolveStatus::max_iterations;
    std::string failure_reason;
    double initial_objective = 0.0;
    double lambda = 0.0;   ///< resolved regularization weight
    double lambda0 = 0.0;  ///< min(lambda, 1), the sufficient-decrease constant
    double sum_sq_steps = 0.0;
    std::vector<double> iterate_distance;  ///< ||Z_k - Z_final||, filled when track_rate
    RateFit rate;
};

inline double stacked_norm(const SolverState& z) {
    return std::sqrt(frob_norm_sq(z.A) + frob_norm_sq(z.B) + frob_norm_sq(z.X));
}

inline double state_distance(const SolverState& a, const SolverState& b) {
    return std::sqrt(frob_norm_sq(a.A - b.A) + frob_norm_sq(a.B - b.B) +
                     frob_norm_sq(a.X - b.X));
}

/// f(A, B, X) = 1/2 ||A B - X||_F^2.
inline double objective_value(const QMatrix& A, const QMatrix& B, const QMatrix& X) {
    return 0.5 * frob_norm_sq(matmul(A, B) - X);
}

inline double objective_value(const SolverState& z) { return objective_value(z.A, z.B, z.X); }

inline GradientTriple objective_gradient(const SolverState& z) {
    return objective_gradient(z.A, z.B, z.X);
}

inline GradientTriple projected_gradient(const SolverState& z, const ObservationMask& mask) {
    return projected_gradient(z.A, z.B, z.X, mask);
}

/// Projected-gradient norm: the stationarity certificate driven to zero by
/// the iteration.
inline double stationarity_residual(const SolverState& z, const ObservationMask& mask) {
    return stacked_norm(projected_gradient(z, mask));
}

namespace detail {

// Deterministic uniform draws built on the raw mt19937_64 stream, so seeds
// reproduce bit-for-bit across standard libraries.
inline double unit_interval(std::mt19937_64& g) { return double(g() >> 11) * 0x1.0p-53; }
inline double symmetric_unit(std::mt19937_64& g) { return 2.0 * unit_interval(g) - 1.0; }

inline QMatrix random_uniform(int rows, int cols, std::mt19937_64& g) {
    QMatrix A(rows, cols);
    for (std::size_t k = 0; k < A.size(); ++k)
        for (int c = 0; c < 4; ++c) A.plane(c)[k] = symmetric_unit(g);
    return A;
}

inline void validate(const QMatrix& D, const ObservationMask& mask, const SolverConfig& cfg) {
    if (D.rows() <= 0 || D.cols() <= 0) throw std::invalid_argument("solver: empty data matrix");
    if (!mask.matches(D)) throw std::invalid_argument("solver: mask shape does not match data");
    if (cfg.rank < 1 || cfg.rank >= std::min(D.rows(), D.cols()))
        throw std::invalid_argument("solver: rank must satisfy 1 <= r < min(m, n)");
    if (!(cfg.lambda > 0.0)) throw std::invalid_argument("solver: lambda must be positive");
    if (!(cfg.step_tolerance > 0.0))
        throw std::invalid_argument("solver: step tolerance must be positive");
    if (cfg.max_iterations < 0)
        throw std::invalid_argument("solver: max_iterations must be nonnegative");
}

}  // namespace detail

/// Fills in the default regularization weight 1e-2 ||D_Omega||_F / sqrt(m n)
/// when none was given.
inline SolverConfig resolve_lambda(const QMatrix& D, const ObservationMask& mask,
                                   SolverConfig cfg) {
    if (cfg.lambda > 0.0) return cfg;
    const double scale = masked_frob_norm(D, mask, true);
    cfg.lambda = 1e-2 * scale / std::sqrt(double(D.rows()) * double(D.cols()));
    if (!(cfg.lambda > 0.0)) cfg.lambda = 1e-2;  // all-zero observed data
    return cfg;
}

/// Exact minimizer of the X subproblem: the data on the observed entries,
/// the current product A B on the complement.
inline QMatrix update_X(const QMatrix& A, const QMatrix& B, const QMatrix& D,
                        const ObservationMask& mask) {
    return merge_by_mask(mask, D, matmul(A, B));
}

/// Closed-form minimizer of
/// g(A) = 1/2 ||A B - X||_F^2 + (lambda/2) ||A - A_prev||_F^2:
/// A' = (X B* + lambda A_prev)(B B* + lambda I)^{-1}.
inline QMatrix update_A(const SolverState& state, const SolverConfig& cfg) {
    const QMatrix Bt = conj_transpose(state.B);
    return hpd_solve_right(matmul(state.B, Bt), cfg.lambda,
                           matmul(state.X, Bt) + cfg.lambda * state.A);
}

/// Mirror image of `update_A` for the right factor, using the already
/// updated A carried by `state`:
/// B' = (A* A + lambda I)^{-1}(A* X + lambda B_prev).
inline QMatrix update_B(const SolverState& state, const SolverConfig& cfg) {
    const QMatrix At = conj_transpose(state.A);
    return hpd_solve_left(matmul(At, state.A), cfg.lambda,
                          matmul(At, state.X) + cfg.lambda * state.B);
}

/// Seeded start: factor entries i.i.d. uniform on [-1, 1] per real
/// component, A rescaled so the first product sits at the scale of the
/// observed data, X produced by `update_X`.
inline SolverState initialize(const QMatrix& D, const ObservationMask& mask,
                              const SolverConfig& cfg) {
    detail::validate(D, mask, cfg);
    std::mt19937_64 rng(cfg.seed);
    QMatrix A = detail::random_uniform(D.rows(), cfg.rank, rng);
    QMatrix B = detail::random_uniform(cfg.rank, D.cols(), rng);
    const double data_scale = masked_frob_norm(D, mask, true);
    A *= data_scale / (frob_norm(matmul(A, B)) + 1e-30);
    SolverState z;
    z.X = update_X(A, B, D, mask);
    z.A = std::move(A);
    z.B = std::move(B);
    z.iteration = 0;
    return z;
}

/// One full iteration in the fixed order X -> A -> B: the incoming state
/// already carries the X solved for its (A, B) pair, so the step computes
/// A_{k+1}, B_{k+1} and then the X that completes the next iterate. The
/// record carries the new objective, the stacked step norm, the projected
/// gradient norm and the sufficient-decrease slack.
inline std::pair<SolverState, IterationRecord> step(const SolverState& state, const QMatrix& D,
                                                    const ObservationMask& mask,
                                                    const SolverConfig& cfg) {
    detail::validate(D, mask, cfg);
    const double lambda0 = std::min(cfg.lambda, 1.0);
    const double f_old = objective_value(state);

    SolverState next;
    next.A = update_A(state, cfg);
    {
        SolverState mid = state;
        mid.A = next.A;
        next.B = update_B(mid, cfg);
    }
    const QMatrix P = matmul(next.A, next.B);
    next.X = merge_by_mask(mask, D, P);
    next.iteration = state.iteration + 1;

    // P - X is exactly zero off Omega, so it is the masked residual and the
    // projected gradient's X block vanishes identically here.
    const QMatrix R = P - next.X;
    const double f_new = 0.5 * frob_norm_sq(R);
    const double residual = std::sqrt(frob_norm_sq(matmul(R, conj_transpose(next.B))) +
                                      frob_norm_sq(matmul(conj_transpose(next.A), R)));
    const double step_norm = state_distance(state, next);

    IterationRecord rec;
    rec.k = next.iteration;
    rec.objective = f_new;
    rec.step_norm = step_norm;
    rec.residual = residual;
    rec.descent_slack = f_old - f_new - 0.5 * lambda0 * step_norm * step_norm;
    return {std::move(next), rec};
}

/// Least-squares fit of log ||Z_k - Z_ref|| against k over the tail half of
/// the recorded iterates, skipping anything at or below the machine floor.
/// Returns a degenerate fit when fewer than 10 informative iterates exist.
inline RateFit fit_linear_rate(const ConvergenceReport& report, const SolverState& reference) {
    RateFit fit;
    const auto& d = report.iterate_distance;
    if (report.records.size() < 10 || d.size() < 10) return fit;
    const double floor = 1e-14 * (1.0 + stacked_norm(reference));
    std::size_t usable = 0;
    while (usable < d.size() && d[usable] > floor) ++usable;
    if (usable < 10) return fit;

    const std::size_t begin = usable / 2;
    const std::size_t count = usable - begin;
    double sk = 0, sy = 0, skk = 0, sky = 0;
    for (std::size_t k = begin; k < usable; ++k) {
        const double y = std::log(d[k]);
        sk += double(k);
        sy += y;
        skk += double(k) * double(k);
        sky += double(k) * y;
    }
    const double denom = double(count) * skk - sk * sk;
    if (denom <= 0.0) return fit;
    const double slope = (double(count) * sky - sk * sy) / denom;
    const double intercept = (sy - slope * sk) / double(count);

    double ss_res = 0, ss_tot = 0;
    const double mean = sy / double(count);
    for (std::size_t k = begin; k < usable; ++k) {
        const double y = std::log(d[k]);
        const double pred = intercept + slope * double(k);
        ss_res += (y - pred) * (y - pred);
        ss_tot += (y - mean) * (y - mean);
    }
    fit.sigma = std::exp(slope);
    fit.beta = std::exp(intercept);
    fit.r2 = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 0.0;
    fit.degenerate = false;
    return fit;
}

/// Full solve: iterate `step` until the stacked step norm drops below
/// step_tolerance * (1 + ||Z||) or the iteration budget runs out. Numeric
/// failures (factorization breakdown, descent violation) end the run with a
/// numeric-failure status instead of propagating. With track_rate set the
/// run is replayed once afterwards to record iterate distances to the final
/// state and fit the linear rate.
inline std::pair<SolverState, ConvergenceReport> run(const QMatrix& D,
                                                     const ObservationMask& mask,
                                                     const SolverConfig& cfg_in) {
    const SolverConfig cfg = resolve_lambda(D, mask, cfg_in);
    SolverState state = initialize(D, mask, cfg);

    ConvergenceReport rep;
    rep.lambda = cfg.lambda;
    rep.lambda0 = std::min(cfg.lambda, 1.0);
    rep.initial_objective = objective_value(state);
    rep.records.push_back(
        {0, rep.initial_objective, 0.0, stationarity_residual(state, mask), 0.0});
    rep.status = SolveStatus::max_iterations;
    const double slack_tol = 1e-10 * (1.0 + rep.initial_objective);

    for (int it = 1; it <= cfg.max_iterations; ++it) {
        std::pair<SolverState, IterationRecord> next;
        try {
            next = step(state, D, mask, cfg);
        } catch (const NumericError& e) {
            rep.status = SolveStatus::numeric_failure;
            rep.failure_reason = e.what();
            break;
        }
        const IterationRecord rec = next.second;
        rep.records.push_back(rec);
        rep.sum_sq_steps += rec.step_norm * rec.step_norm;
        const double stop_scale = 1.0 + stacked_norm(state);
        state = std::move(next.first);
        if (rec.descent_slack < -slack_tol) {
            rep.status = SolveStatus::numeric_failure;
            rep.failure_reason = "descent inequality violated";
            break;
        }
        if (rec.step_norm <= cfg.step_tolerance * stop_scale) {
            rep.status = SolveStatus::converged;
            break;
        }
    }

    if (cfg.track_rate && rep.status != SolveStatus::numeric_failure &&
        rep.records.size() > 1) {
        // Deterministic replay against the now-known final iterate.
        rep.iterate_distance.resize(rep.records.size());
        SolverState z = initialize(D, mask, cfg);
        rep.iterate_distance[0] = state_distance(z, state);
        for (std::size_t k = 1; k < rep.records.size(); ++k) {
            z = step(z, D, mask, cfg).first;
            rep.iterate_distance[k] = state_distance(z, state);
        }
        rep.rate = fit_linear_rate(rep, state);
    }
    return {std::move(state), std::move(rep)};
}

/// Line-delimited per-iteration trace (the CSV consumed alongside the
/// summary document).
inline void write_trace_csv(const ConvergenceReport& rep, std::ostream& os) {
    os << "k,objective,step_norm,residual\n";
    char buf[160];
    for (const auto& r : rep.records) {
        std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g,%.17g\n", r.k, r.objective, r.step_norm,
                      r.residual);
        os << buf;
    }
}

}  // namespace qlr
