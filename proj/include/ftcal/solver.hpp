#pragma once

#include <cmath>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ftcal/errors.hpp"
#include "ftcal/features.hpp"

namespace ftcal {

// Per-column z-score statistics of a regressor matrix. The offset column is
// neither centered nor scaled; zero-variance non-offset columns are flagged
// degenerate and excluded from fitting.
struct NormalizationStats {
    Eigen::VectorXd mean;
    Eigen::VectorXd scale;
    std::vector<bool> is_offset;
    std::vector<bool> is_degenerate;

    Eigen::Index cols() const { return mean.size(); }

    static NormalizationStats identity(Eigen::Index n, Eigen::Index offset_col = 0) {
        NormalizationStats s;
        s.mean = Eigen::VectorXd::Zero(n);
        s.scale = Eigen::VectorXd::Ones(n);
        s.is_offset.assign(n, false);
        s.is_degenerate.assign(n, false);
        if (offset_col >= 0 && offset_col < n) s.is_offset[offset_col] = true;
        return s;
    }
};

// Fitted coefficients plus diagnostics. Warnings do not abort the fit.
struct FitResult {
    Eigen::VectorXd coefficients;
    std::vector<std::string> warnings;
    int sweeps = 0;                       // coordinate-descent sweeps (LASSO only)
    std::vector<double> objective_trace;  // objective after each sweep (LASSO only)
};

constexpr double kLassoSweepTol = 1e-10;
constexpr int kLassoMaxSweeps = 10000;

inline double soft_threshold(double z, double gamma) {
    double m = std::abs(z) - gamma;
    return m > 0 ? (z > 0 ? m : -m) : 0.0;
}

// Center and scale each non-offset column to mean 0, population std 1.
// Degenerate (zero-variance) columns are zeroed out so any coefficient fitted
// on them stays 0.
inline std::pair<RegressorMatrix, NormalizationStats>
normalize_features(const RegressorMatrix& A, Eigen::Index offset_col = 0) {
    const auto n = A.rows();
    if (n < 2) throw InsufficientDataError("feature normalization needs at least 2 rows");
    NormalizationStats stats = NormalizationStats::identity(A.cols(), offset_col);
    RegressorMatrix out = A;
    for (Eigen::Index j = 0; j < A.cols(); ++j) {
        if (stats.is_offset[j]) continue;
        double mean = A.col(j).mean();
        double var = (A.col(j).array() - mean).square().sum() / static_cast<double>(n);
        double sd = std::sqrt(var);
        if (sd == 0.0) {
            stats.is_degenerate[j] = true;
            out.col(j).setZero();
            continue;
        }
        stats.mean[j] = mean;
        stats.scale[j] = sd;
        out.col(j) = (A.col(j).array() - mean) / sd;
    }
    return {std::move(out), std::move(stats)};
}

namespace detail {

inline void check_finite(const RegressorMatrix& A, const TargetVector& b) {
    if (A.rows() != b.size())
        throw ShapeError("regressor rows (" + std::to_string(A.rows()) +
                         ") != target length (" + std::to_string(b.size()) + ")");
    if (!A.allFinite() || !b.allFinite())
        throw DataError("non-finite values in regression inputs");
}

}  // namespace detail

// Unconstrained least squares min 1/2 ||Ax - b||^2 via Householder QR.
// Rank-deficient systems fall back to a complete orthogonal decomposition,
// which yields the minimum-norm solution, and attach a warning.
inline FitResult fit_ols(const RegressorMatrix& A, const TargetVector& b) {
    detail::check_finite(A, b);
    FitResult res;
    if (A.rows() >= A.cols()) {
        Eigen::HouseholderQR<RegressorMatrix> qr(A);
        const auto& R = qr.matrixQR();
        double dmax = 0;
        for (Eigen::Index j = 0; j < A.cols(); ++j) dmax = std::max(dmax, std::abs(R(j, j)));
        double dmin = dmax;
        for (Eigen::Index j = 0; j < A.cols(); ++j) dmin = std::min(dmin, std::abs(R(j, j)));
        if (dmax > 0 && dmin > dmax * 1e-12) {
            res.coefficients = qr.solve(b);
            return res;
        }
    }
    Eigen::CompleteOrthogonalDecomposition<RegressorMatrix> cod(A);
    res.coefficients = cod.solve(b);
    if (cod.rank() < std::min(A.rows(), A.cols()))
        res.warnings.push_back("rank-deficient regressor (rank " +
                               std::to_string(cod.rank()) + " of " +
                               std::to_string(A.cols()) + "); minimum-norm solution returned");
    return res;
}

// LASSO min 1/2 ||Ax - b||^2 + lambda * sum_{j penalized} |x_j| via cyclic
// coordinate descent on the Gram matrix. Expects normalized features; the
// offset column and degenerate columns are never penalized (degenerate
// columns are pinned to 0). Converges when the largest per-sweep coefficient
// change drops below kLassoSweepTol.
inline FitResult fit_lasso(const RegressorMatrix& A, const TargetVector& b, double lambda,
                           const NormalizationStats& stats) {
    detail::check_finite(A, b);
    if (lambda < 0) throw SpecError("lambda must be non-negative");
    if (static_cast<Eigen::Index>(stats.cols()) != A.cols())
        throw ShapeError("normalization stats do not match regressor layout");

    const auto p = A.cols();
    Eigen::MatrixXd G = A.transpose() * A;       // Gram matrix
    Eigen::VectorXd c = A.transpose() * b;
    const double btb = b.squaredNorm();

    FitResult res;
    Eigen::VectorXd x = Eigen::VectorXd::Zero(p);
    Eigen::VectorXd g = Eigen::VectorXd::Zero(p);  // g = G x, kept incrementally

    auto objective = [&](const Eigen::VectorXd& xx, const Eigen::VectorXd& gx) {
        double quad = 0.5 * (xx.dot(gx) - 2.0 * c.dot(xx) + btb);
        double l1 = 0;
        for (Eigen::Index j = 0; j < p; ++j)
            if (!stats.is_offset[j] && !stats.is_degenerate[j]) l1 += std::abs(xx[j]);
        return quad + lambda * l1;
    };

    auto update = [&](Eigen::Index j) -> double {
        double gjj = G(j, j);
        if (stats.is_degenerate[j] || gjj <= 0) return 0;
        double z = c[j] - g[j] + gjj * x[j];
        double xj = stats.is_offset[j] ? z / gjj : soft_threshold(z, lambda) / gjj;
        double delta = xj - x[j];
        if (delta != 0) {
            g += G.col(j) * delta;
            x[j] = xj;
        }
        return std::abs(delta);
    };

    std::vector<Eigen::Index> active;
    int sweep = 0;
    for (; sweep < kLassoMaxSweeps; ++sweep) {
        double max_delta = 0;
        for (Eigen::Index j = 0; j < p; ++j) max_delta = std::max(max_delta, update(j));
        res.objective_trace.push_back(objective(x, g));
        if (max_delta < kLassoSweepTol) {
            ++sweep;
            break;
        }
        // converge the active set before the next full pass; every update is a
        // descent step, so the per-sweep objective stays non-increasing
        active.clear();
        for (Eigen::Index j = 0; j < p; ++j)
            if (x[j] != 0 || stats.is_offset[j]) active.push_back(j);
        for (int inner = 0; inner < kLassoMaxSweeps; ++inner) {
            double inner_delta = 0;
            for (Eigen::Index j : active) inner_delta = std::max(inner_delta, update(j));
            if (inner_delta < kLassoSweepTol) break;
        }
    }
    res.sweeps = sweep;
    res.coefficients = std::move(x);
    if (sweep == kLassoMaxSweeps)
        res.warnings.push_back("LASSO did not converge in " + std::to_string(kLassoMaxSweeps) +
                               " sweeps; final objective " +
                               std::to_string(res.objective_trace.back()));
    return res;
}

// Map coefficients fitted on normalized features back to original units. The
// offset absorbs the mean shifts of every centered column.
inline Eigen::VectorXd denormalize_coefficients(const Eigen::VectorXd& x_norm,
                                                const NormalizationStats& stats) {
    if (x_norm.size() != stats.cols())
        throw ShapeError("coefficient vector does not match normalization stats layout");
    Eigen::VectorXd x(x_norm.size());
    double offset_shift = 0;
    for (Eigen::Index j = 0; j < x_norm.size(); ++j) {
        if (stats.is_offset[j]) {
            x[j] = x_norm[j];  // adjusted below
        } else if (stats.is_degenerate[j]) {
            x[j] = 0;
        } else {
            x[j] = x_norm[j] / stats.scale[j];
            offset_shift += x_norm[j] * stats.mean[j] / stats.scale[j];
        }
    }
    for (Eigen::Index j = 0; j < x_norm.size(); ++j)
        if (stats.is_offset[j]) x[j] -= offset_shift;
    return x;
}

}  // namespace ftcal
