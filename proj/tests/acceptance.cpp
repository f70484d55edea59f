// Acceptance suite: one pass/fail line per criterion, run all or one with
// --only N. The CLI binary under test is passed with --cli; scratch files go
// under --workdir (a temp directory by default).

#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "eigen_oracle.hpp"
#include "qlr/qlr.hpp"
#include "support.hpp"

using namespace qlr;
namespace fs = std::filesystem;

namespace {

struct Checker {
    std::vector<std::string> fails;

    void require(bool ok, const std::string& msg) {
        if (!ok) fails.push_back(msg);
    }

    template <class T>
    void require_le(T value, T bound, const std::string& what) {
        if (!(value <= bound)) {
            std::ostringstream os;
            os << what << ": " << value << " > " << bound;
            fails.push_back(os.str());
        }
    }
};

std::string g_cli_path;
fs::path g_workdir;

QMatrix normalized(QMatrix A) {
    const double n = frob_norm(A);
    if (n > 0) A *= 1.0 / n;
    return A;
}

QMatrix random_qmatrix(int rows, int cols, std::mt19937_64& rng) {
    return qlr::detail::random_uniform(rows, cols, rng);
}

// ---------------------------------------------------------------------------
// 1. Quaternion algebra: exact multiplication table plus identities on 1000
//    random triples at 1e-12 relative accuracy.
void criterion_1(Checker& t) {
    const Quaternion one = Quaternion::one();
    const Quaternion qi = Quaternion::unit_i();
    const Quaternion qj = Quaternion::unit_j();
    const Quaternion qk = Quaternion::unit_k();
    t.require(qi * qi == -one && qj * qj == -one && qk * qk == -one, "squares of units");
    t.require(qi * qj == qk && qj * qi == -qk, "ij = k, ji = -k");
    t.require(qj * qk == qi && qk * qj == -qi, "jk = i, kj = -i");
    t.require(qk * qi == qj && qi * qk == -qj, "ki = j, ik = -j");
    t.require(qi * qj * qk == -one, "ijk = -1");

    std::mt19937_64 rng(101);
    for (int n = 0; n < 1000; ++n) {
        const Quaternion a = test_support::random_quaternion(rng);
        const Quaternion b = test_support::random_quaternion(rng);
        const Quaternion c = test_support::random_quaternion(rng);
        const double scale = 1.0 + modulus(a) * modulus(b) * modulus(c);
        t.require(modulus((a * b) * c - a * (b * c)) <= 1e-12 * scale, "associativity");
        t.require(std::abs(modulus(a * b) - modulus(a) * modulus(b)) <=
                      1e-12 * (1.0 + modulus(a) * modulus(b)),
                  "|ab| = |a||b|");
        t.require(modulus(conj(a * b) - conj(b) * conj(a)) <= 1e-12 * (1.0 + modulus(a * b)),
                  "conj(ab) = conj(b) conj(a)");
        if (!t.fails.empty()) return;
    }
}

// ---------------------------------------------------------------------------
// 2. QSVD: reconstruction, unitarity and adjoint pair structure for 100
//    random matrices up to 20 x 15.
void criterion_2(Checker& t) {
    std::mt19937_64 rng(202);
    for (int n = 0; n < 100; ++n) {
        const int rows = 2 + int(rng() % 19);  // up to 20
        const int cols = 2 + int(rng() % 14);  // up to 15
        const QMatrix A = random_qmatrix(rows, cols, rng);
        const QsvdResult d = qsvd(A);

        QMatrix S(rows, cols);
        for (std::size_t k = 0; k < d.singular_values.size(); ++k)
            S.set(int(k), int(k), Quaternion::from_real(d.singular_values[k]));
        const double recon = frob_norm(matmul(matmul(d.U, S), conj_transpose(d.V)) - A);
        t.require_le(recon, 1e-10 * frob_norm(A), "reconstruction error");

        const double ures =
            frob_norm(matmul(conj_transpose(d.U), d.U) - QMatrix::identity(rows));
        const double vres =
            frob_norm(matmul(conj_transpose(d.V), d.V) - QMatrix::identity(cols));
        t.require_le(ures, 1e-10, "U unitarity residual");
        t.require_le(vres, 1e-10, "V unitarity residual");

        const std::vector<double> adj = test_support::adjoint_singular_values(A);
        const double s1 = adj.empty() ? 0.0 : adj[0];
        if (adj.size() != 2 * d.singular_values.size()) {
            t.require(false, "adjoint spectrum size is not doubled");
            return;
        }
        for (std::size_t k = 0; k < d.singular_values.size(); ++k) {
            t.require_le(std::abs(adj[2 * k] - adj[2 * k + 1]), 1e-8 * (1.0 + s1),
                         "adjoint singular values pair");
            t.require_le(std::abs(d.singular_values[k] - 0.5 * (adj[2 * k] + adj[2 * k + 1])),
                         1e-8 * (1.0 + s1), "collapsed pair matches quaternion sigma");
        }
        if (!t.fails.empty()) return;
    }
}

// ---------------------------------------------------------------------------
// 3. Rank laws on 200 random products and low-rank factorization round trips.
void criterion_3(Checker& t) {
    std::mt19937_64 rng(303);
    for (int n = 0; n < 200; ++n) {
        const int m = 2 + int(rng() % 11);
        const int nn = 2 + int(rng() % 11);
        const int r = 1 + int(rng() % std::min(m, nn));
        const QMatrix A = random_qmatrix(m, r, rng);
        const QMatrix B = random_qmatrix(r, nn, rng);
        const QMatrix P = matmul(A, B);
        const int rp = rank(P);
        t.require(rp <= r, "rank(AB) <= r");
        t.require(rp <= std::min(rank(A), rank(B)), "rank(AB) <= min(rank A, rank B)");

        if (n % 5 == 0) {
            auto [FA, FB] = low_rank_factor(P, r);
            t.require_le(frob_norm(matmul(FA, FB) - P), 1e-8 * (1e-30 + frob_norm(P)),
                         "factorization round trip");
        }
        if (!t.fails.empty()) return;
    }
}

// ---------------------------------------------------------------------------
// 4. Analytic gradients against central finite differences on 50 random
//    instances with dimensions up to 6.
void criterion_4(Checker& t) {
    std::mt19937_64 rng(404);
    for (int n = 0; n < 50; ++n) {
        const int m = 2 + int(rng() % 5);
        const int r = 1 + int(rng() % 3);
        const int nn = 2 + int(rng() % 5);
        const QMatrix X = random_qmatrix(m, r, rng);
        const QMatrix B = random_qmatrix(r, nn, rng);
        const QMatrix C = random_qmatrix(m, nn, rng);

        const QMatrix gl = grad_left_quadratic(X, B, C);
        const QMatrix gl_fd = finite_difference_gradient(
            [&](const QMatrix& Z) { return 0.5 * frob_norm_sq(matmul(Z, B) + C); }, X, 1e-6);
        t.require_le(frob_norm(gl - gl_fd), 1e-6 * (1.0 + frob_norm(gl)), "left quadratic");

        const QMatrix A2 = random_qmatrix(m, r, rng);
        const QMatrix X2 = random_qmatrix(r, nn, rng);
        const QMatrix gr = grad_right_quadratic(A2, X2, C);
        const QMatrix gr_fd = finite_difference_gradient(
            [&](const QMatrix& Z) { return 0.5 * frob_norm_sq(matmul(A2, Z) + C); }, X2, 1e-6);
        t.require_le(frob_norm(gr - gr_fd), 1e-6 * (1.0 + frob_norm(gr)), "right quadratic");

        const QMatrix Xf = random_qmatrix(m, nn, rng);
        const GradientTriple g = objective_gradient(A2, X2, Xf);
        const QMatrix dA_fd = finite_difference_gradient(
            [&](const QMatrix& Z) { return objective_value(Z, X2, Xf); }, A2, 1e-6);
        const QMatrix dB_fd = finite_difference_gradient(
            [&](const QMatrix& Z) { return objective_value(A2, Z, Xf); }, X2, 1e-6);
        const QMatrix dX_fd = finite_difference_gradient(
            [&](const QMatrix& Z) { return objective_value(A2, X2, Z); }, Xf, 1e-6);
        t.require_le(frob_norm(g.dA - dA_fd), 1e-6 * (1.0 + frob_norm(g.dA)), "objective dA");
        t.require_le(frob_norm(g.dB - dB_fd), 1e-6 * (1.0 + frob_norm(g.dB)), "objective dB");
        t.require_le(frob_norm(g.dX - dX_fd), 1e-6 * (1.0 + frob_norm(g.dX)), "objective dX");
        if (!t.fails.empty()) return;
    }
}

// ---------------------------------------------------------------------------
// 5. Subproblem optimality: after each factor update the corresponding
//    proximal gradient vanishes, on every iteration of 20 random runs.
void criterion_5(Checker& t) {
    std::mt19937_64 rng(505);
    const double ratios[3] = {0.0, 0.3, 0.7};
    for (int n = 0; n < 20; ++n) {
        const int m = 8 + int(rng() % 17);
        const int nn = 8 + int(rng() % 17);
        const int r = 1 + int(rng() % 3);
        const QMatrix D = normalized(random_qmatrix(m, nn, rng));
        const ObservationMask mask = make_mask(m, nn, ratios[n % 3], 1000 + n);
        SolverConfig cfg;
        cfg.rank = r;
        cfg.seed = n;
        cfg = resolve_lambda(D, mask, cfg);
        SolverState z = initialize(D, mask, cfg);

        for (int it = 0; it < 30; ++it) {
            const double scale = 1.0 + stacked_norm(z);
            const QMatrix A2 = update_A(z, cfg);
            const QMatrix gA = grad_left_quadratic(A2, z.B, -z.X) + cfg.lambda * (A2 - z.A);
            t.require_le(frob_norm(gA), 1e-8 * scale, "grad g(A') residual");

            SolverState mid = z;
            mid.A = A2;
            const QMatrix B2 = update_B(mid, cfg);
            const QMatrix gB = grad_right_quadratic(A2, B2, -z.X) + cfg.lambda * (B2 - z.B);
            t.require_le(frob_norm(gB), 1e-8 * scale, "grad h(B') residual");

            z.A = A2;
            z.B = B2;
            z.X = update_X(A2, B2, D, mask);
            if (!t.fails.empty()) return;
        }
    }
}

// ---------------------------------------------------------------------------
// 6. Descent and summability on 20 random problems with mask ratios
//    {0, 0.3, 0.7}.
void criterion_6(Checker& t) {
    std::mt19937_64 rng(606);
    const double ratios[3] = {0.0, 0.3, 0.7};
    for (int n = 0; n < 20; ++n) {
        const int m = 16 + int(rng() % 49);  // up to 64
        const int nn = 16 + int(rng() % 49);
        const int r = 1 + int(rng() % 5);
        const QMatrix D = normalized(random_qmatrix(m, nn, rng));
        const ObservationMask mask = make_mask(m, nn, ratios[n % 3], 2000 + n);
        SolverConfig cfg;
        cfg.rank = r;
        cfg.seed = 50 + n;
        cfg.max_iterations = 150;
        cfg.step_tolerance = 1e-9;
        const auto [z, rep] = run(D, mask, cfg);

        t.require(rep.status != SolveStatus::numeric_failure, "run healthy");
        const double slack_tol = 1e-10 * (1.0 + rep.initial_objective);
        for (const auto& recd : rep.records)
            t.require(recd.descent_slack >= -slack_tol, "per-step descent slack");
        t.require_le(rep.sum_sq_steps, (2.0 / rep.lambda0) * rep.initial_objective + 1e-8,
                     "step summability bound");
        if (!t.fails.empty()) return;
    }
}

// ---------------------------------------------------------------------------
// 7. Stationarity at convergence: step-norm stops imply a small projected
//    gradient, and constructed stationary points are fixed points of step.
void criterion_7(Checker& t) {
    std::mt19937_64 rng(707);
    int converged_runs = 0;
    for (int n = 0; n < 10; ++n) {
        const int m = 8 + int(rng() % 13);
        const int nn = 8 + int(rng() % 13);
        const int r = 1 + int(rng() % 2);
        const QMatrix D = normalized(random_qmatrix(m, nn, rng));
        const ObservationMask mask = make_mask(m, nn, (n % 2) ? 0.3 : 0.0, 3000 + n);
        SolverConfig cfg;
        cfg.rank = r;
        cfg.seed = 90 + n;
        cfg.max_iterations = 5000;
        cfg.step_tolerance = 1e-8;
        const auto [z, rep] = run(D, mask, cfg);
        if (rep.status != SolveStatus::converged) continue;
        ++converged_runs;
        t.require_le(stationarity_residual(z, mask),
                     10.0 * cfg.step_tolerance * (1.0 + stacked_norm(z)),
                     "projected gradient at the stopping point");
    }
    t.require(converged_runs >= 5, "enough runs hit the step-norm rule");

    for (int n = 0; n < 5; ++n) {
        const int m = 6 + int(rng() % 9);
        const int nn = 6 + int(rng() % 9);
        const int r = 1 + int(rng() % 2);
        const QMatrix D0 = normalized(matmul(random_qmatrix(m, r, rng), random_qmatrix(r, nn, rng)));
        auto [A, B] = low_rank_factor(D0, r);
        SolverState z;
        z.A = A;
        z.B = B;
        z.X = matmul(A, B);
        const ObservationMask mask = make_mask(m, nn, 0.3, 4000 + n);
        SolverConfig cfg;
        cfg.rank = r;
        cfg = resolve_lambda(z.X, mask, cfg);
        const auto [next, rec] = step(z, z.X, mask, cfg);
        t.require_le(state_distance(z, next), 1e-10, "constructed stationary point is fixed");
    }
}

// Shared setup for criteria 8 and 9.
struct RecoveryProblem {
    QMatrix D;
    ObservationMask mask;
    SolverConfig cfg;
};

RecoveryProblem make_recovery_problem(bool track_rate) {
    std::mt19937_64 rng(808);
    RecoveryProblem p{normalized(matmul(random_qmatrix(64, 3, rng), random_qmatrix(3, 64, rng))),
                      make_mask(64, 64, 0.3, 77), SolverConfig{}};
    p.cfg.rank = 3;
    p.cfg.seed = 7;
    p.cfg.max_iterations = 500;
    p.cfg.step_tolerance = 1e-12;
    p.cfg.track_rate = track_rate;
    return p;
}

// ---------------------------------------------------------------------------
// 8. Exact recovery of a synthetic rank-3 64 x 64 matrix with 30% missing.
void criterion_8(Checker& t) {
    const RecoveryProblem p = make_recovery_problem(false);
    const auto [z, rep] = run(p.D, p.mask, p.cfg);
    t.require(rep.status != SolveStatus::numeric_failure, "run healthy");
    t.require(int(rep.records.size()) - 1 <= 500, "within 500 iterations");
    t.require_le(rep.records.back().objective, 1e-10 * frob_norm_sq(p.D), "final objective");
    const double err = masked_frob_norm(z.X - p.D, p.mask, false);
    const double scale = masked_frob_norm(p.D, p.mask, false);
    t.require_le(err, 1e-4 * scale, "reconstruction error on the complement");
}

// ---------------------------------------------------------------------------
// 9. R-linear regime: the criterion-8 run has a clean geometric tail.
void criterion_9(Checker& t) {
    const RecoveryProblem p = make_recovery_problem(true);
    const auto [z, rep] = run(p.D, p.mask, p.cfg);
    t.require(rep.status != SolveStatus::numeric_failure, "run healthy");
    t.require(!rep.rate.degenerate, "rate fit is not degenerate");
    if (rep.rate.degenerate) return;
    t.require(rep.rate.sigma < 1.0, "sigma < 1");
    t.require(rep.rate.sigma > 0.0, "sigma > 0");
    t.require(rep.rate.r2 >= 0.95, "fit quality R^2 >= 0.95");
}

// ---------------------------------------------------------------------------
// 10. CLI end to end on a synthetic rank-2 256 x 256 image.
Rgb8Image synthetic_rank2_image(int n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    QMatrix X(n, n);
    for (int term = 0; term < 2; ++term) {
        std::vector<Quaternion> a(static_cast<std::size_t>(n), Quaternion());
        std::vector<double> b(static_cast<std::size_t>(n), 0.0);
        for (int i = 0; i < n; ++i)
            a[std::size_t(i)] =
                Quaternion(0.0, qlr::detail::unit_interval(rng), qlr::detail::unit_interval(rng),
                           qlr::detail::unit_interval(rng));
        for (int j = 0; j < n; ++j) b[std::size_t(j)] = qlr::detail::unit_interval(rng);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                X.set(i, j, X.at(i, j) + a[std::size_t(i)] * b[std::size_t(j)]);
    }
    double peak = 0.0;
    for (int c = 1; c < 4; ++c)
        for (double v : X.plane(c)) peak = std::max(peak, v);
    X *= 1.0 / (1.05 * peak);
    return to_rgb8(decode(X));
}

int run_cli(const std::string& args) {
    const std::string cmd = g_cli_path + " " + args + " >/dev/null 2>&1";
    const int rc = std::system(cmd.c_str());
    if (rc == -1) return -1;
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

void criterion_10(Checker& t) {
    if (g_cli_path.empty()) {
        t.require(false, "no --cli path given");
        return;
    }
    const int side = 256;
    const std::uint64_t seed = 9;
    const double ratio = 0.3;

    const fs::path truth_png = g_workdir / "truth.png";
    const Rgb8Image truth = synthetic_rank2_image(side, 4242);
    write_rgb8_png(truth_png.string(), truth);

    const fs::path out = g_workdir / "out.png";
    const fs::path rep = g_workdir / "rep.txt";
    const fs::path csv = g_workdir / "rep.csv";

    // the same invocation run twice; bytes captured between the runs
    const std::string invocation = "inpaint " + truth_png.string() +
                                   " --mask-ratio 0.3 -r 2 --seed 9 --tol 1e-9 --max-iters 400 "
                                   "--ground-truth " +
                                   truth_png.string() + " -o " + out.string() + " --report " +
                                   rep.string();
    t.require(run_cli(invocation) == 0, "first CLI run exits 0");
    if (!t.fails.empty()) return;
    const std::string out_bytes = slurp(out);
    const std::string rep_bytes = slurp(rep);
    const std::string csv_bytes = slurp(csv);
    t.require(run_cli(invocation) == 0, "second CLI run exits 0");
    if (!t.fails.empty()) return;

    const Rgb8Image got = read_rgb8_png(out.string());
    const double quality = psnr(from_rgb8(truth), from_rgb8(got));
    t.require(quality >= 40.0, "PSNR >= 40 dB (got " + std::to_string(quality) + ")");

    const ObservationMask mask = make_mask(side, side, ratio, seed);
    bool passthrough = true;
    for (int i = 0; i < side && passthrough; ++i)
        for (int j = 0; j < side; ++j) {
            if (!mask.is_observed(i, j)) continue;
            const std::size_t k = (std::size_t(i) * side + j) * 3;
            for (int c = 0; c < 3; ++c)
                if (got.samples[k + c] != truth.samples[k + c]) {
                    passthrough = false;
                    break;
                }
            if (!passthrough) break;
        }
    t.require(passthrough, "observed pixels are bit-identical to the input");

    t.require(slurp(out) == out_bytes, "output images are byte-identical across runs");
    t.require(slurp(rep) == rep_bytes, "reports are byte-identical across runs");
    t.require(slurp(csv) == csv_bytes, "iteration traces are byte-identical across runs");
}

struct Criterion {
    int id;
    const char* name;
    double budget_seconds;  // 0 = unbudgeted
    std::function<void(Checker&)> fn;
};

}  // namespace

int main(int argc, char** argv) {
    int only = 0;
    for (int i = 1; i < argc; ++i) {
        const std::string arg = argv[i];
        if (arg == "--only" && i + 1 < argc) only = std::atoi(argv[++i]);
        else if (arg == "--cli" && i + 1 < argc) g_cli_path = argv[++i];
        else if (arg == "--workdir" && i + 1 < argc) g_workdir = argv[++i];
    }
    if (g_workdir.empty())
        g_workdir = fs::temp_directory_path() / ("qlr_acceptance_" + std::to_string(::getpid()));
    fs::create_directories(g_workdir);

    const std::vector<Criterion> criteria = {
        {1, "quaternion algebra", 1.0, criterion_1},
        {2, "qsvd reconstruction and adjoint pairing", 30.0, criterion_2},
        {3, "rank laws and factorization round trip", 10.0, criterion_3},
        {4, "gradients against finite differences", 10.0, criterion_4},
        {5, "subproblem optimality", 0.0, criterion_5},
        {6, "descent and summability", 60.0, criterion_6},
        {7, "stationarity at convergence", 0.0, criterion_7},
        {8, "exact recovery", 0.0, criterion_8},
        {9, "R-linear rate fit", 0.0, criterion_9},
        {10, "CLI end to end", 60.0, criterion_10},
    };

    int failures = 0;
    for (const auto& c : criteria) {
        if (only != 0 && c.id != only) continue;
        Checker t;
        const auto start = std::chrono::steady_clock::now();
        try {
            c.fn(t);
        } catch (const std::exception& e) {
            t.require(false, std::string("unexpected exception: ") + e.what());
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (c.budget_seconds > 0.0 && secs >= c.budget_seconds) {
            std::ostringstream os;
            os << "runtime " << secs << " s exceeded the " << c.budget_seconds << " s budget";
            t.fails.push_back(os.str());
        }
        const bool pass = t.fails.empty();
        failures += pass ? 0 : 1;
        std::printf("[%s] criterion %2d: %s (%.2f s)\n", pass ? "PASS" : "FAIL", c.id, c.name,
                    secs);
        for (std::size_t k = 0; k < t.fails.size() && k < 5; ++k)
            std::printf("       - %s\n", t.fails[k].c_str());
    }
    return failures;
}
