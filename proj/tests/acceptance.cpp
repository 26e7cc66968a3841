// Acceptance suite: exact-math properties, figure reproductions at desk scale
// (T = 2000, 20 scenarios, fixed master seed) and the statistical checks.
// Prints one PASS/FAIL line per criterion; exits nonzero if any fails.
//
//   acceptance [--seed <u64>] [--only exact|fig1|fig2|fig3|fig4|stat]

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "pobandit/environment.hpp"
#include "pobandit/experiments.hpp"
#include "pobandit/numerics.hpp"
#include "pobandit/policy.hpp"
#include "pobandit/results_csv.hpp"
#include "pobandit/simulator.hpp"

using namespace pobandit;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::uint64_t g_seed = kDefaultSeed;
int g_failures = 0;

void report(const std::string& name, const std::function<Outcome()>& check) {
    const auto start = std::chrono::steady_clock::now();
    Outcome outcome;
    try {
        outcome = check();
    } catch (const std::exception& e) {
        outcome = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (!outcome.pass) ++g_failures;
    std::printf("[%s] %s -- %s (%.1fs)\n", outcome.pass ? "PASS" : "FAIL", name.c_str(), outcome.detail.c_str(), secs);
    std::fflush(stdout);
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

std::string list(const std::vector<double>& v) {
    std::string out = "[";
    for (std::size_t i = 0; i < v.size(); ++i) out += (i ? ", " : "") + fmt(v[i]);
    return out + "]";
}

// Nondecreasing except for at most one adjacent drop of at most `slack`
// relative to the larger value.
bool ordered_with_one_inversion(const std::vector<double>& v, double slack) {
    int inversions = 0;
    for (std::size_t i = 0; i + 1 < v.size(); ++i) {
        if (v[i + 1] < v[i]) {
            ++inversions;
            if ((v[i] - v[i + 1]) > slack * std::abs(v[i])) return false;
        }
    }
    return inversions <= 1;
}

std::vector<double> negated(std::vector<double> v) {
    for (double& x : v) x = -x;
    return v;
}

ExperimentPreset desk(std::string_view name) {
    ExperimentPreset p = preset(name, Scale::desk);
    p.master_seed = g_seed;
    return p;
}

using PointMap = std::map<std::string, AggregateSeries>;

PointMap by_key(const std::vector<PointResult>& results) {
    PointMap map;
    for (const auto& r : results) map.emplace(r.point.key(), r.series);
    return map;
}

double at(const SeriesStats& s, std::size_t t) { return s.mean.at(t - 1); }

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream b;
    b << in.rdbuf();
    return b.str();
}

// ---------------------------------------------------------------- exact math

void exact_suite() {
    report("exact.1 D closed form (100 orthonormal 5x20 A, |D - A^T/2| <= 1e-9)", [] {
        RngStream rng(g_seed, 1001);
        double worst = 0.0;
        for (int i = 0; i < 100; ++i) {
            const Matrix A = make_A_orthonormal(5, 20, rng);
            const Matrix D = derive_D(oracle::identity_spec(A, Vector::Ones(20)));
            worst = std::max(worst, operator_norm(D - 0.5 * A.transpose()));
        }
        return Outcome{worst <= 1e-9, "worst " + fmt(worst)};
    });

    report("exact.2 recursive/batch equivalence (200 sequences x 50, d_y=5)", [] {
        RngStream rng(g_seed, 1002);
        double worst = 0.0;
        for (int s = 0; s < 200; ++s) {
            PosteriorState state(5, 0.0);
            std::vector<Vector> ys;
            std::vector<double> rs;
            for (int t = 0; t < 50; ++t) {
                ys.push_back(standard_normal_vector(5, rng) * 2.0);
                rs.push_back(3.0 * rng.standard_normal());
                state.update(ys.back(), rs.back());
            }
            const Vector batch = oracle::batch_ridge(ys, rs);
            worst = std::max(worst, (state.eta_hat() - batch).norm() / (1.0 + batch.norm()));
        }
        return Outcome{worst <= 1e-8, "worst relative gap " + fmt(worst)};
    });

    report("exact.3 estimability constructor (ell in {0.25,0.5,0.75,1}, 50 draws each, 1e-6)", [] {
        RngStream rng(g_seed, 1003);
        double worst = 0.0;
        for (double target : {0.25, 0.5, 0.75, 1.0}) {
            for (int i = 0; i < 50; ++i) {
                const Vector mu = draw_mu_star(20, std::sqrt(20.0), rng);
                const Matrix A = make_A_with_estimability(mu, target, 5, 20, rng);
                worst = std::max(worst, std::abs(derive_model(oracle::identity_spec(A, mu)).ell - target));
            }
        }
        return Outcome{worst <= 1e-6, "worst |ell - target| " + fmt(worst)};
    });

    report("exact.4a projection invariants (1000 cases: symmetric, idempotent, P m = m)", [] {
        RngStream rng(g_seed, 1004);
        double worst = 0.0;
        for (int i = 0; i < 1000; ++i) {
            const auto rows = 2 + static_cast<Eigen::Index>(rng.next_u64() % 9);
            const auto cols = 1 + static_cast<Eigen::Index>(rng.next_u64() % 6);
            Matrix m = oracle::gaussian(rows, cols, rng);
            if (cols > 1 && i % 3 == 0) m.col(cols - 1) = m.col(0) * 2.0;  // rank-deficient case
            const Matrix P = projection_onto_columns(m);
            worst = std::max({worst, (P - P.transpose()).cwiseAbs().maxCoeff(), (P * P - P).cwiseAbs().maxCoeff(),
                              (P * m - m).cwiseAbs().maxCoeff() / (1.0 + m.cwiseAbs().maxCoeff())});
        }
        return Outcome{worst <= 1e-9, "worst violation " + fmt(worst)};
    });

    report("exact.4b SPD invariants (1000 cases: lower-triangular, positive diagonal, L L^T = m)", [] {
        RngStream rng(g_seed, 1005);
        double worst = 0.0;
        bool shape_ok = true;
        for (int i = 0; i < 1000; ++i) {
            const auto n = 1 + static_cast<Eigen::Index>(rng.next_u64() % 12);
            const Matrix m = oracle::random_spd(n, rng);
            const Matrix L = cholesky(m);
            shape_ok = shape_ok && L.isLowerTriangular(0.0) && (L.diagonal().array() > 0.0).all();
            worst = std::max(worst, ((L * L.transpose() - m).cwiseAbs().array() / m.cwiseAbs().maxCoeff()).maxCoeff());
        }
        return Outcome{shape_ok && worst <= 1e-9, "worst relative error " + fmt(worst)};
    });

    report("exact.4c argmax invariants (1000 cases: brute force, scale invariance, lowest-index ties)", [] {
        RngStream rng(g_seed, 1006);
        int mismatches = 0;
        for (int i = 0; i < 1000; ++i) {
            const auto d = 1 + static_cast<Eigen::Index>(rng.next_u64() % 8);
            const std::size_t n = 1 + rng.next_u64() % 30;
            std::vector<Vector> ys;
            for (std::size_t k = 0; k < n; ++k) ys.push_back(standard_normal_vector(d, rng));
            if (n > 2 && i % 4 == 0) ys[n - 1] = ys[n / 2];  // exact tie
            const Vector eta = standard_normal_vector(d, rng);
            const double c = std::exp(3.0 * rng.standard_normal());
            const std::size_t a = select_arm(eta, ys);
            if (a != oracle::brute_force_argmax(eta, ys) || select_arm(Vector(c * eta), ys) != a) ++mismatches;
        }
        return Outcome{mismatches == 0, std::to_string(mismatches) + " mismatches"};
    });

    report("exact.5 determinism (fig1 desk twice + serial vs parallel: byte-identical CSV)", [] {
        namespace fs = std::filesystem;
        const fs::path root = fs::temp_directory_path() / ("pobandit_accept_" + std::to_string(g_seed));
        fs::remove_all(root);
        ExperimentPreset p = desk("fig1_arms");
        p.threads = 1;
        run_experiment(p, root / "serial_a");
        run_experiment(p, root / "serial_b");
        p.threads = 4;
        run_experiment(p, root / "parallel");
        const std::string a = slurp(root / "serial_a" / "fig1_arms" / "results.csv");
        const std::string b = slurp(root / "serial_b" / "fig1_arms" / "results.csv");
        const std::string c = slurp(root / "parallel" / "fig1_arms" / "results.csv");
        const bool same = !a.empty() && a == b && a == c;
        fs::remove_all(root);
        return Outcome{same, std::to_string(a.size()) + " bytes per run"};
    });
}

// ----------------------------------------------------------------- figures

void fig1_suite() {
    const PointMap points = by_key(run_points(desk("fig1_arms")));
    const std::size_t T = 2000;
    std::vector<double> regret, eta;
    for (int n : {5, 10, 20, 50}) {
        const AggregateSeries& s = points.at("N=" + std::to_string(n));
        regret.push_back(at(s.norm_regret, T));
        eta.push_back(at(s.eta_err, T));
    }
    report("fig1.a normalized regret at t=2000 nondecreasing in N (one inversion <= 5%)", [&] {
        return Outcome{ordered_with_one_inversion(regret, 0.05), "N=5,10,20,50: " + list(regret)};
    });
    report("fig1.b eta_err at t=2000 within a 25% band across N", [&] {
        const double lo = *std::min_element(eta.begin(), eta.end());
        const double hi = *std::max_element(eta.begin(), eta.end());
        return Outcome{hi - lo <= 0.25 * lo, list(eta) + ", spread " + fmt((hi - lo) / lo)};
    });
}

void fig2_suite() {
    const PointMap points = by_key(run_points(desk("fig2_estimability")));
    auto series = [&](double ell, double c_B) -> const AggregateSeries& {
        return points.at("ell=" + format_shortest(ell) + ";c_B=" + format_shortest(c_B));
    };
    report("fig2.a ell=1: mu_err(2000) <= 50% of mu_err(50)", [&] {
        const auto& s = series(1.0, 0.0);
        const double early = at(s.mu_err, 50), late = at(s.mu_err, 2000);
        return Outcome{late <= 0.5 * early, "t=50 " + fmt(early) + ", t=2000 " + fmt(late)};
    });
    report("fig2.b ell<1: mu_err(2000) >= 80% of mu_err(200) (plateau)", [&] {
        bool ok = true;
        std::string detail;
        for (double ell : {0.25, 0.5, 0.75}) {
            const auto& s = series(ell, 0.0);
            const double ratio = at(s.mu_err, 2000) / at(s.mu_err, 200);
            ok = ok && ratio >= 0.8;
            detail += "ell=" + fmt(ell) + " ratio " + fmt(ratio) + "; ";
        }
        return Outcome{ok, detail};
    });
    report("fig2.c normalized regret at t=2000 nonincreasing in ell (c_B=0)", [&] {
        std::vector<double> r;
        for (double ell : {0.25, 0.5, 0.75, 1.0}) r.push_back(at(series(ell, 0.0).norm_regret, 2000));
        bool ok = true;
        for (std::size_t i = 0; i + 1 < r.size(); ++i) ok = ok && r[i + 1] <= r[i];
        return Outcome{ok, "ell=0.25..1: " + list(r)};
    });
    report("fig2.d ell=1: normalized regret c_B=0 <= c_B=100", [&] {
        const double greedy = at(series(1.0, 0.0).norm_regret, 2000);
        const double wide = at(series(1.0, 100.0).norm_regret, 2000);
        return Outcome{greedy <= wide, "c_B=0 " + fmt(greedy) + ", c_B=100 " + fmt(wide)};
    });
}

void fig3_suite() {
    const PointMap points = by_key(run_points(desk("fig3_snr")));
    const std::vector<double> levels{0.25, 1.0, 4.0};
    auto series = [&](double snr_y, double snr_r) -> const AggregateSeries& {
        return points.at("snr_y=" + format_shortest(snr_y) + ";snr_r=" + format_shortest(snr_r));
    };
    report("fig3.a normalized regret at T decreasing in SNR_r for each SNR_y (one inversion <= 5%)", [&] {
        bool ok = true;
        std::string detail;
        for (double sy : levels) {
            std::vector<double> r;
            for (double sr : levels) r.push_back(at(series(sy, sr).norm_regret, 2000));
            ok = ok && ordered_with_one_inversion(negated(r), 0.05);
            detail += "SNR_y=" + fmt(sy) + ": " + list(r) + " ";
        }
        return Outcome{ok, detail};
    });
    report("fig3.b eta_err at T nonincreasing as SNR_y decreases (10% slack)", [&] {
        bool ok = true;
        std::string detail;
        for (double sr : levels) {
            std::vector<double> e;
            for (auto it = levels.rbegin(); it != levels.rend(); ++it) e.push_back(at(series(*it, sr).eta_err, 2000));
            for (std::size_t i = 0; i + 1 < e.size(); ++i) ok = ok && e[i + 1] <= 1.10 * e[i];
            detail += "SNR_r=" + fmt(sr) + " (SNR_y=4,1,1/4): " + list(e) + " ";
        }
        return Outcome{ok, detail};
    });
}

void fig4_suite() {
    const PointMap points = by_key(run_points(desk("fig4_dimension")));
    std::vector<double> mu, reward, regret;
    for (int dy : {5, 20, 100}) {
        const AggregateSeries& s = points.at("d_y=" + std::to_string(dy));
        mu.push_back(at(s.mu_err, 2000));
        reward.push_back(at(s.cum_reward, 2000));
        regret.push_back(at(s.norm_regret, 2000));
    }
    auto strictly_increasing = [](const std::vector<double>& v) {
        for (std::size_t i = 0; i + 1 < v.size(); ++i)
            if (!(v[i + 1] > v[i])) return false;
        return true;
    };
    report("fig4.a mu_err at t=2000 decreasing in d_y (5, 20, 100)", [&] {
        return Outcome{strictly_increasing(negated(mu)), list(mu)};
    });
    report("fig4.b cumulative reward at t=2000 increasing in d_y", [&] {
        return Outcome{strictly_increasing(reward), list(reward)};
    });
    report("fig4.c normalized regret at t=2000 increasing in d_y", [&] {
        return Outcome{strictly_increasing(regret), list(regret)};
    });
}

// ------------------------------------------------------------- statistical

void stat_suite() {
    report("stat.1 mvn_sample: 1e5 draws of N(0, [[2,1],[1,2]]), covariance within 0.05", [] {
        RngStream rng(g_seed, 2001);
        Matrix cov(2, 2);
        cov << 2, 1, 1, 2;
        const GaussianSampler sampler(cov);
        std::vector<Vector> xs;
        for (int i = 0; i < 100000; ++i) xs.push_back(sampler.sample(Vector::Zero(2), rng));
        const double err = (oracle::sample_covariance(xs) - cov).cwiseAbs().maxCoeff();
        return Outcome{err <= 0.05, "max abs error " + fmt(err)};
    });
    report("stat.2 sample_parameter: 1e5 draws, B=diag(2,1), c_B=4, covariance within 0.1 of diag(2,4)", [] {
        RngStream rng(g_seed, 2002);
        PosteriorState state(2, 4.0);
        state.update((Vector(2) << 1.0, 0.0).finished(), 0.0);
        std::vector<Vector> xs;
        for (int i = 0; i < 100000; ++i) xs.push_back(sample_parameter(state, rng));
        Matrix target(2, 2);
        target << 2, 0, 0, 4;
        const double err = (oracle::sample_covariance(xs) - target).cwiseAbs().maxCoeff();
        return Outcome{err <= 0.1, "max abs error " + fmt(err)};
    });
    report("stat.3 standard normals: 1e6 draws, mean within 0.01, variance within 0.02", [] {
        RngStream rng(g_seed, 2003);
        double sum = 0.0, sum_sq = 0.0;
        const int n = 1000000;
        for (int i = 0; i < n; ++i) {
            const double z = rng.standard_normal();
            sum += z;
            sum_sq += z * z;
        }
        const double mean = sum / n;
        const double var = sum_sq / n - mean * mean;
        return Outcome{std::abs(mean) <= 0.01 && std::abs(var - 1.0) <= 0.02, "mean " + fmt(mean) + ", var " + fmt(var)};
    });
}

}  // namespace

int main(int argc, char** argv) {
    std::string only;
    for (int i = 1; i < argc; ++i) {
        const std::string arg = argv[i];
        if (arg == "--seed" && i + 1 < argc) {
            g_seed = std::stoull(argv[++i]);
        } else if (arg == "--only" && i + 1 < argc) {
            only = argv[++i];
        } else {
            std::cerr << "usage: acceptance [--seed <u64>] [--only exact|fig1|fig2|fig3|fig4|stat]\n";
            return 2;
        }
    }
    std::printf("acceptance suite, master seed %llu\n", static_cast<unsigned long long>(g_seed));
    const std::vector<std::pair<std::string, void (*)()>> suites{
        {"exact", exact_suite}, {"fig1", fig1_suite}, {"fig2", fig2_suite},
        {"fig3", fig3_suite},   {"fig4", fig4_suite}, {"stat", stat_suite}};
    for (const auto& [name, suite] : suites) {
        if (only.empty() || only == name) suite();
    }
    std::printf("%s: %d criteria failed\n", g_failures == 0 ? "ALL PASSED" : "FAILED", g_failures);
    return g_failures == 0 ? 0 : 1;
}
