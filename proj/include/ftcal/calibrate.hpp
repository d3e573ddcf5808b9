#pragma once

#include <chrono>
#include <ctime>
#include <future>
#include <string>
#include <vector>

#include "ftcal/data.hpp"
#include "ftcal/features.hpp"
#include "ftcal/model.hpp"
#include "ftcal/solver.hpp"

namespace ftcal {

namespace detail {

inline std::string iso_timestamp() {
    auto now = std::chrono::system_clock::now();
    std::time_t t = std::chrono::system_clock::to_time_t(now);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
    return buf;
}

// QR once, solve all targets. Falls back to a minimum-norm solve per target
// on rank deficiency.
inline std::pair<Eigen::MatrixXd, std::vector<std::string>>
fit_ols_multi(const RegressorMatrix& A, const Eigen::MatrixXd& B) {
    if (!A.allFinite() || !B.allFinite()) throw DataError("non-finite values in regression inputs");
    std::vector<std::string> warnings;
    if (A.rows() >= A.cols()) {
        Eigen::HouseholderQR<RegressorMatrix> qr(A);
        const auto& R = qr.matrixQR();
        double dmax = 0, dmin = std::numeric_limits<double>::infinity();
        for (Eigen::Index j = 0; j < A.cols(); ++j) {
            dmax = std::max(dmax, std::abs(R(j, j)));
            dmin = std::min(dmin, std::abs(R(j, j)));
        }
        if (dmax > 0 && dmin > dmax * 1e-12) return {qr.solve(B), warnings};
    }
    Eigen::CompleteOrthogonalDecomposition<RegressorMatrix> cod(A);
    if (cod.rank() < std::min(A.rows(), A.cols()))
        warnings.push_back("rank-deficient regressor (rank " + std::to_string(cod.rank()) +
                           " of " + std::to_string(A.cols()) +
                           "); minimum-norm solution returned");
    return {cod.solve(B), warnings};
}

}  // namespace detail

struct FitOptions {
    bool deterministic = false;  // omit the wall-clock timestamp from metadata
    bool parallel = true;        // fit output channels concurrently (LASSO only)
};

// The full identification pipeline: regressor, normalization, per-output fit,
// coefficients mapped back to original units.
inline CalibrationModel fit_model(const Dataset& dataset, const ModelSpec& spec,
                                  const FitOptions& opts = {}) {
    spec.validate();
    auto rows = dataset.model_inputs(spec.nu);

    RegressorMatrix A = spec.is_arx() ? build_regressor_arx(rows, dataset.outputs, spec)
                                      : build_regressor(rows, spec);
    auto [An, stats] = normalize_features(A);

    const auto depth = static_cast<std::size_t>(std::max(spec.na, spec.nb));
    const auto n = static_cast<Eigen::Index>(A.rows());
    Eigen::MatrixXd B(n, spec.ny);
    for (Eigen::Index k = 0; k < n; ++k)
        for (int i = 0; i < spec.ny; ++i)
            B(k, i) = dataset.outputs[static_cast<std::size_t>(k) + depth][i];

    CalibrationModel model = CalibrationModel::empty(spec);
    model.normalization = stats;
    std::vector<std::string> warnings;

    if (spec.lambda == 0) {
        auto [X, warn] = detail::fit_ols_multi(An, B);
        warnings = std::move(warn);
        for (int i = 0; i < spec.ny; ++i)
            model.coefficients[i] = denormalize_coefficients(X.col(i), stats);
    } else {
        auto fit_one = [&](int i) { return fit_lasso(An, B.col(i), spec.lambda, stats); };
        std::vector<FitResult> results(spec.ny);
        if (opts.parallel && spec.ny > 1) {
            std::vector<std::future<FitResult>> futs;
            for (int i = 0; i < spec.ny; ++i)
                futs.push_back(std::async(std::launch::async, fit_one, i));
            for (int i = 0; i < spec.ny; ++i) results[i] = futs[i].get();
        } else {
            for (int i = 0; i < spec.ny; ++i) results[i] = fit_one(i);
        }
        for (int i = 0; i < spec.ny; ++i) {
            model.coefficients[i] = denormalize_coefficients(results[i].coefficients, stats);
            for (const auto& w : results[i].warnings)
                warnings.push_back("output " + std::to_string(i + 1) + ": " + w);
        }
    }

    model.metadata.dataset_hash = dataset_hash(dataset);
    model.metadata.created_at = opts.deterministic ? "" : detail::iso_timestamp();
    model.metadata.solver_warnings = warnings;
    model.validate();
    return model;
}

}  // namespace ftcal
