// Acceptance suite: prints one PASS/FAIL line per criterion and exits nonzero
// if any fail.

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "ftcal/ftcal.hpp"

using namespace ftcal;
using Clock = std::chrono::steady_clock;

namespace {

int failures = 0;

void report(int criterion, const std::string& what, bool ok, double seconds,
            const std::string& detail = "") {
    std::cout << (ok ? "PASS" : "FAIL") << "  [" << criterion << "] " << what << "  ("
              << seconds << " s)";
    if (!detail.empty()) std::cout << "  " << detail;
    std::cout << "\n";
    if (!ok) ++failures;
}

double elapsed(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

// Shared synthetic dataset: cubic-perturbed transducer, 5000 train / 2000
// validation samples over the bench envelope.
struct Bench {
    GroundTruthTransducer transducer;
    Dataset train;
    Dataset validation;

    Bench() {
        transducer = default_transducer(2.0);
        std::vector<double> norms;
        for (int kg = 0; kg <= 10; ++kg) norms.push_back((kg + 0.8) * 9.81);
        auto traj = grid_trajectory(norms, 580, transducer.envelope);
        auto lift = lifting_trajectory(98.1, 620, transducer.envelope);
        traj.insert(traj.end(), lift.begin(), lift.end());
        Dataset all = simulate(transducer, traj, 2024);
        auto [tr, va] = split_dataset(all, 5000.0 / all.size(), SplitMode::Random, 7);
        train = std::move(tr);
        validation = std::move(va);
    }
};

ModelSpec spec_for(int np, double lambda = 0) {
    ModelSpec s;
    s.np = np;
    s.ny = 6;
    s.nu = 7;
    s.lambda = lambda;
    return s;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void criterion_1() {
    auto t0 = Clock::now();
    const std::int64_t expected[] = {48, 216, 720, 1980, 4752};
    bool ok = true;
    for (int np = 1; np <= 5; ++np) ok &= count_coefficients(np, 6, 7) == expected[np - 1];
    ok &= monomial_count_at_degree(6, 2) == 21;
    ok &= monomial_count_at_degree(6, 3) == 56;
    double s = elapsed(t0);
    report(1, "coefficient counts exact", ok && s < 1e-3, s);
}

void criterion_2_and_3(const Bench& bench) {
    auto t0 = Clock::now();
    std::vector<double> val_rmse, train_rmse;
    for (int np = 1; np <= 5; ++np) {
        auto model = fit_model(bench.train, spec_for(np));
        train_rmse.push_back(evaluate(model, bench.train).force_norm_rmse);
        if (np <= 4) val_rmse.push_back(evaluate(model, bench.validation).force_norm_rmse);
    }
    double s2 = elapsed(t0);

    bool decreasing = val_rmse[1] < val_rmse[0] && val_rmse[2] < val_rmse[1];
    double best_high = std::min(val_rmse[2], val_rmse[3]);
    double improvement = 1.0 - best_high / val_rmse[0];
    bool beats = improvement >= 0.40;
    std::ostringstream d2;
    d2 << "val RMSE deg1..4: " << val_rmse[0] << " " << val_rmse[1] << " " << val_rmse[2]
       << " " << val_rmse[3] << ", improvement " << improvement * 100 << "%";
    report(2, "validation trend on synthetic cubic transducer",
           decreasing && beats && s2 < 60, s2, d2.str());

    bool monotone = true;
    for (std::size_t i = 1; i < train_rmse.size(); ++i)
        monotone &= train_rmse[i] <= train_rmse[i - 1] + 1e-9;
    report(3, "nested-model training monotonicity", monotone && s2 < 120, s2);
}

void criterion_4() {
    auto t0 = Clock::now();
    bool ok = true;
    std::mt19937_64 rng(77);
    std::normal_distribution<double> dist(0, 1);
    for (int inst = 0; inst < 100; ++inst) {
        int n = 30 + inst % 40;
        int p = 3 + inst % 6;
        RegressorMatrix A(n, p);
        TargetVector b(n);
        for (int k = 0; k < n; ++k) {
            A(k, 0) = 1;
            for (int j = 1; j < p; ++j) A(k, j) = dist(rng);
            b(k) = dist(rng);
        }
        auto r = fit_ols(A, b);
        double resid = (A.transpose() * (A * r.coefficients - b)).lpNorm<Eigen::Infinity>();
        double scale = (A.transpose() * b).lpNorm<Eigen::Infinity>();
        ok &= resid <= 1e-6 * scale;
    }

    // LASSO at lambda = 0 matches OLS; objective non-increasing every sweep
    for (int inst = 0; inst < 5; ++inst) {
        int n = 80;
        int p = 7;
        RegressorMatrix A(n, p);
        TargetVector b(n);
        for (int k = 0; k < n; ++k) {
            A(k, 0) = 1;
            for (int j = 1; j < p; ++j) A(k, j) = dist(rng);
            b(k) = dist(rng);
        }
        auto [An, stats] = normalize_features(A);
        auto ols = fit_ols(An, b);
        auto l0 = fit_lasso(An, b, 0, stats);
        ok &= (l0.coefficients - ols.coefficients).norm() / ols.coefficients.norm() <= 1e-6;
        auto l1 = fit_lasso(An, b, 3.0, stats);
        for (std::size_t sweep = 1; sweep < l1.objective_trace.size(); ++sweep)
            ok &= l1.objective_trace[sweep] <= l1.objective_trace[sweep - 1] + 1e-12;
    }

    ok &= soft_threshold(3, 1) == 2.0;
    ok &= soft_threshold(-3, 1) == -2.0;
    ok &= soft_threshold(0.5, 1) == 0.0;

    double s = elapsed(t0);
    report(4, "solver correctness properties", ok && s < 10, s);
}

void criterion_5(const Bench& bench) {
    auto t0 = Clock::now();
    const std::vector<double> ladder = {0.5, 1, 10, 50, 100, 200};
    std::vector<std::int64_t> effective;
    std::vector<double> residual;
    auto rows = bench.train.model_inputs(7);
    ModelSpec base = spec_for(4);
    RegressorMatrix A = build_regressor(rows, base);
    auto [An, stats] = normalize_features(A);
    for (double lam : ladder) {
        auto model = fit_model(bench.train, spec_for(4, lam));
        effective.push_back(count_effective(model, 1e-9));
        double resid = 0;
        for (int i = 0; i < 6; ++i) {
            TargetVector b(An.rows());
            for (Eigen::Index k = 0; k < An.rows(); ++k) b(k) = bench.train.outputs[k][i];
            // residual measured in normalized feature space, where lambda lives
            auto norm_fit = fit_lasso(An, b, lam, stats);
            resid += 0.5 * (An * norm_fit.coefficients - b).squaredNorm();
        }
        residual.push_back(resid);
    }
    bool counts_ok = true, resid_ok = true;
    for (std::size_t i = 1; i < ladder.size(); ++i) {
        counts_ok &= effective[i] <= effective[i - 1] + 2;
        resid_ok &= residual[i] >= residual[i - 1] - 1e-6 * residual[i - 1];
    }
    std::ostringstream d;
    d << "effective counts:";
    for (auto e : effective) d << " " << e;
    d << ", residuals:";
    for (auto r : residual) d << " " << r;
    double s = elapsed(t0);
    report(5, "sparsity trend over the lambda ladder", counts_ok && resid_ok && s < 300, s,
           d.str());
}

void criterion_6(const Bench& bench) {
    auto t0 = Clock::now();
    auto model = fit_model(bench.train, spec_for(4, 50));
    auto pruned = prune(model, 1e-9);
    auto rows = bench.validation.model_inputs(7);
    double max_change = 0;
    for (const auto& u : rows) {
        Wrench a = model.predict(u);
        Wrench b = pruned.predict(u);
        for (int c = 0; c < 6; ++c) max_change = std::max(max_change, std::abs(a[c] - b[c]));
    }
    double s = elapsed(t0);
    std::ostringstream d;
    d << "max prediction change " << max_change;
    report(6, "prune neutrality at 1e-9", max_change <= 1e-6, s, d.str());
}

void criterion_7() {
    auto t0 = Clock::now();
    GroundTruthTransducer t = default_transducer(0);
    t.quad = {};
    t.cubic = {};
    t.drift = {};
    auto traj = grid_trajectory({20, 45, 70, 95, 110}, 60, t.envelope);
    Dataset d = simulate(t, traj, 1);
    ModelSpec spec;
    spec.np = 1;
    spec.ny = 6;
    spec.nu = 6;
    auto model = fit_model(d, spec);
    auto [C, o] = model.affine_view();
    double gain_err = ((C * t.gain) - Eigen::MatrixXd::Identity(6, 6)).lpNorm<Eigen::Infinity>();
    double off = o.lpNorm<Eigen::Infinity>();
    double s = elapsed(t0);
    std::ostringstream det;
    det << "|CG - I| " << gain_err << ", |o| " << off;
    report(7, "affine recovery against the known gain", gain_err <= 1e-6 && off <= 1e-6, s,
           det.str());
}

void criterion_8(const Bench& bench) {
    auto t0 = Clock::now();
    auto model = fit_model(bench.train, spec_for(4, 10), {.deterministic = true});
    auto text = serialize(model).dump();
    auto model2 = deserialize(nlohmann::json::parse(text));
    bool bits_ok = true;
    for (int i = 0; i < 6; ++i)
        for (Eigen::Index j = 0; j < model.coefficients[i].size(); ++j)
            bits_ok &= model2.coefficients[i][j] == model.coefficients[i][j];
    bits_ok &= serialize(model2).dump() == text;

    const std::string dir = "/tmp/ftcal_acceptance";
    (void)!std::system(("mkdir -p " + dir).c_str());
    const std::string cli = FTCAL_CLI_PATH;
    std::string sim = cli + " simulate --out " + dir +
                      "/d.csv --seed 3 --directions 25 --points 51 >/dev/null 2>&1";
    (void)!std::system(sim.c_str());
    std::string sweep_cmd = cli + " sweep --data " + dir +
                            "/d.csv --split 0.7 --deterministic --out " + dir;
    (void)!std::system((sweep_cmd + "/s1.csv >/dev/null 2>&1").c_str());
    (void)!std::system((sweep_cmd + "/s2.csv >/dev/null 2>&1").c_str());
    bool sweep_ok = !slurp(dir + "/s1.csv").empty() &&
                    slurp(dir + "/s1.csv") == slurp(dir + "/s2.csv");
    double s = elapsed(t0);
    report(8, "round-trip and determinism", bits_ok && sweep_ok, s);
}

void criterion_9(const Bench& bench) {
    // 10,000-sample degree-5 training set
    auto t0_gen = Clock::now();
    std::vector<double> norms;
    for (int kg = 0; kg <= 10; ++kg) norms.push_back((kg + 0.8) * 9.81);
    auto traj = grid_trajectory(norms, 850, bench.transducer.envelope);
    auto lift = lifting_trajectory(98.1, 10000 - static_cast<int>(traj.size()),
                                   bench.transducer.envelope);
    traj.insert(traj.end(), lift.begin(), lift.end());
    Dataset big = simulate(bench.transducer, traj, 5);
    (void)t0_gen;

    auto t0 = Clock::now();
    auto model = fit_model(big, spec_for(5));
    double s = elapsed(t0);
    bool ok = s < 30 && model.coefficients[0].size() == 792;
    report(9, "degree-5 fit on 10,000 samples", ok, s);
}

}  // namespace

int main() {
    std::cout.precision(6);
    Bench bench;
    criterion_1();
    criterion_2_and_3(bench);
    criterion_4();
    criterion_5(bench);
    criterion_6(bench);
    criterion_7();
    criterion_8(bench);
    criterion_9(bench);
    if (failures) {
        std::cout << failures << " criterion(s) FAILED\n";
        return 1;
    }
    std::cout << "all criteria passed\n";
    return 0;
}
