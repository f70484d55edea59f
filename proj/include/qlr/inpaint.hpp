#pragma once

#include <cstdio>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>

#include "qlr/image.hpp"
#include "qlr/solver.hpp"

namespace qlr {

/// One inpainting invocation: where the data comes from, how the mask is
/// produced, solver settings, and where the results go. Exactly one of
/// `mask_file` / `use_ratio` must be set.
struct InpaintJob {
    std::string input_path;

    std::string mask_file;
    bool use_ratio = false;
    double mask_ratio = 0.0;
    std::uint64_t mask_seed = 0;

    SolverConfig solver;

    std::string output_path;
    std::string report_path;        ///< summary document; trace CSV written alongside
    std::string ground_truth_path;  ///< optional clean image for PSNR

    int max_dimension = 1024;  ///< larger inputs are rejected, not downscaled
};

enum ExitCode : int {
    exit_ok = 0,
    exit_bad_arguments = 2,
    exit_io_failure = 3,
    exit_numeric_failure = 4,
};

/// The per-iteration trace sits next to the summary: same stem, .csv.
inline std::string trace_csv_path(const std::string& report_path) {
    const auto slash = report_path.find_last_of("/\\");
    const auto dot = report_path.find_last_of('.');
    if (dot != std::string::npos && (slash == std::string::npos || dot > slash))
        return report_path.substr(0, dot) + ".csv";
    return report_path + ".csv";
}

namespace detail {

inline std::string fmt_g(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline void write_summary(std::ostream& os, const InpaintJob& job, const SolverConfig& cfg,
                          const ConvergenceReport& rep, const DecodeStats& stats,
                          std::optional<double> psnr_db) {
    os << "input: " << job.input_path << '\n';
    os << "output: " << job.output_path << '\n';
    if (job.use_ratio)
        os << "mask_source: ratio " << fmt_g(job.mask_ratio) << " seed " << job.mask_seed << '\n';
    else
        os << "mask_source: file " << job.mask_file << '\n';
    os << "rank: " << cfg.rank << '\n';
    os << "lambda: " << fmt_g(rep.lambda) << '\n';
    os << "lambda0: " << fmt_g(rep.lambda0) << '\n';
    os << "step_tolerance: " << fmt_g(cfg.step_tolerance) << '\n';
    os << "max_iterations: " << cfg.max_iterations << '\n';
    os << "seed: " << cfg.seed << '\n';
    os << "status: " << status_name(rep.status) << '\n';
    if (!rep.failure_reason.empty()) os << "failure_reason: " << rep.failure_reason << '\n';
    const IterationRecord& last = rep.records.back();
    os << "iterations: " << last.k << '\n';
    os << "initial_objective: " << fmt_g(rep.initial_objective) << '\n';
    os << "final_objective: " << fmt_g(last.objective) << '\n';
    os << "stationarity_residual: " << fmt_g(last.residual) << '\n';
    if (rep.rate.degenerate) {
        os << "rate_sigma: degenerate\nrate_beta: degenerate\nrate_r2: degenerate\n";
    } else {
        os << "rate_sigma: " << fmt_g(rep.rate.sigma) << '\n';
        os << "rate_beta: " << fmt_g(rep.rate.beta) << '\n';
        os << "rate_r2: " << fmt_g(rep.rate.r2) << '\n';
    }
    os << "real_plane_leakage: " << fmt_g(stats.real_plane_mass) << '\n';
    os << "clamped_samples: " << stats.clamped_samples << '\n';
    if (psnr_db)
        os << "psnr_db: " << (std::isinf(*psnr_db) ? std::string("inf") : fmt_g(*psnr_db)) << '\n';
    else
        os << "psnr_db: n/a\n";
    os << "trace_csv: " << trace_csv_path(job.report_path) << '\n';
}

inline void write_report_files(const InpaintJob& job, const SolverConfig& cfg,
                               const ConvergenceReport& rep, const DecodeStats& stats,
                               std::optional<double> psnr_db) {
    if (job.report_path.empty()) return;
    std::ofstream summary(job.report_path);
    if (!summary) throw IoError("cannot open for writing: " + job.report_path);
    write_summary(summary, job, cfg, rep, stats, psnr_db);
    const std::string csv_path = trace_csv_path(job.report_path);
    std::ofstream csv(csv_path);
    if (!csv) throw IoError("cannot open for writing: " + csv_path);
    write_trace_csv(rep, csv);
}

}  // namespace detail

/// End-to-end inpainting: decode, mask, solve, recompose, report. Observed
/// pixels pass through to the output byte-for-byte; only missing pixels are
/// filled from the solver's completion. Returns a process exit code; all
/// failures are logged instead of thrown.
inline int run_job(const InpaintJob& job, std::ostream& log) {
    try {
        if (job.use_ratio == !job.mask_file.empty()) {
            log << "error: exactly one of a mask file or a missing ratio must be given\n";
            return exit_bad_arguments;
        }
        if (job.use_ratio && !(job.mask_ratio >= 0.0 && job.mask_ratio < 1.0)) {
            log << "error: missing ratio must lie in [0, 1)\n";
            return exit_bad_arguments;
        }
        if (job.output_path.empty()) {
            log << "error: no output path given\n";
            return exit_bad_arguments;
        }

        const Rgb8Image input = read_rgb8_png(job.input_path);
        if (input.width > job.max_dimension || input.height > job.max_dimension) {
            log << "error: input is " << input.width << "x" << input.height
                << ", larger than the configured limit of " << job.max_dimension
                << "; not downscaling\n";
            return exit_bad_arguments;
        }

        ObservationMask mask;
        if (job.use_ratio) {
            mask = make_mask(input.height, input.width, job.mask_ratio, job.mask_seed);
        } else {
            const Gray8Image mimg = read_gray8_png(job.mask_file);
            if (mimg.width != input.width || mimg.height != input.height) {
                log << "error: mask is " << mimg.width << "x" << mimg.height
                    << " but the image is " << input.width << "x" << input.height << '\n';
                return exit_bad_arguments;
            }
            mask = make_mask(mimg);
        }

        const ColorImage original = from_rgb8(input);
        const QMatrix D = encode(original);
        const SolverConfig cfg = resolve_lambda(D, mask, job.solver);
        auto [state, rep] = run(D, mask, cfg);

        DecodeStats stats;
        const ColorImage completed = decode(state.X, &stats);

        // Observed pixels verbatim from the input bytes, missing pixels from
        // the completion.
        Rgb8Image out = input;
        for (int i = 0; i < input.height; ++i)
            for (int j = 0; j < input.width; ++j) {
                if (mask.is_observed(i, j)) continue;
                const std::size_t k = (std::size_t(i) * input.width + j) * 3;
                for (int c = 0; c < 3; ++c) out.samples[k + c] = to_byte(completed.at(c, i, j));
            }

        std::optional<double> quality;
        if (!job.ground_truth_path.empty()) {
            const Rgb8Image truth = read_rgb8_png(job.ground_truth_path);
            if (truth.width != input.width || truth.height != input.height) {
                log << "error: ground truth dimensions do not match the input\n";
                return exit_bad_arguments;
            }
            quality = psnr(from_rgb8(truth), from_rgb8(out));
        }

        if (rep.status == SolveStatus::numeric_failure) {
            detail::write_report_files(job, cfg, rep, stats, quality);
            log << "error: solver failed (" << rep.failure_reason << "), no image written\n";
            return exit_numeric_failure;
        }

        write_rgb8_png(job.output_path, out);
        detail::write_report_files(job, cfg, rep, stats, quality);

        const IterationRecord& last = rep.records.back();
        log << "inpaint: status=" << status_name(rep.status) << " iterations=" << last.k
            << " objective=" << detail::fmt_g(last.objective)
            << " residual=" << detail::fmt_g(last.residual);
        if (quality)
            log << " psnr=" << (std::isinf(*quality) ? std::string("inf") : detail::fmt_g(*quality))
                << "dB";
        log << '\n';
        return exit_ok;
    } catch (const IoError& e) {
        log << "error: " << e.what() << '\n';
        return exit_io_failure;
    } catch (const NumericError& e) {
        log << "error: " << e.what() << '\n';
        return exit_numeric_failure;
    } catch (const std::invalid_argument& e) {
        log << "error: " << e.what() << '\n';
        return exit_bad_arguments;
    }
}

}  // namespace qlr
