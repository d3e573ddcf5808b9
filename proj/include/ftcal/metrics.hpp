#pragma once

#include <array>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "ftcal/data.hpp"
#include "ftcal/errors.hpp"
#include "ftcal/model.hpp"

namespace ftcal {

inline void check_series(const std::vector<double>& expected,
                         const std::vector<double>& predicted) {
    if (expected.size() != predicted.size())
        throw ShapeError("series lengths differ: " + std::to_string(expected.size()) + " vs " +
                         std::to_string(predicted.size()));
    if (expected.empty()) throw InsufficientDataError("empty series");
}

// sqrt(mean((y - yhat)^2))
inline double rmse(const std::vector<double>& expected, const std::vector<double>& predicted) {
    check_series(expected, predicted);
    double acc = 0;
    for (std::size_t k = 0; k < expected.size(); ++k) {
        double e = expected[k] - predicted[k];
        acc += e * e;
    }
    return std::sqrt(acc / static_cast<double>(expected.size()));
}

namespace detail {

inline std::vector<double> norms(const std::vector<Wrench>& ws, bool force) {
    std::vector<double> out;
    out.reserve(ws.size());
    for (const auto& w : ws) out.push_back(force ? w.force_norm() : w.torque_norm());
    return out;
}

}  // namespace detail

// RMSE between per-sample Euclidean norms of the force triplets [N].
inline double force_norm_rmse(const std::vector<Wrench>& expected,
                              const std::vector<Wrench>& predicted) {
    if (expected.size() != predicted.size()) throw ShapeError("wrench lists differ in length");
    return rmse(detail::norms(expected, true), detail::norms(predicted, true));
}

// Same over the torque triplets [Nm].
inline double torque_norm_rmse(const std::vector<Wrench>& expected,
                               const std::vector<Wrench>& predicted) {
    if (expected.size() != predicted.size()) throw ShapeError("wrench lists differ in length");
    return rmse(detail::norms(expected, false), detail::norms(predicted, false));
}

// 1 - sqrt(MSE / population variance of the expected series). 1 is a perfect
// fit, 0 no better than the mean predictor; can be negative.
inline double best_fit(const std::vector<double>& expected,
                       const std::vector<double>& predicted) {
    check_series(expected, predicted);
    double mean = 0;
    for (double v : expected) mean += v;
    mean /= static_cast<double>(expected.size());
    double var = 0;
    for (double v : expected) var += (v - mean) * (v - mean);
    var /= static_cast<double>(expected.size());
    if (var <= 0) throw UndefinedMetricError("BestFit undefined for a constant expected series");
    double mse = 0;
    for (std::size_t k = 0; k < expected.size(); ++k) {
        double e = expected[k] - predicted[k];
        mse += e * e;
    }
    mse /= static_cast<double>(expected.size());
    return 1.0 - std::sqrt(mse / var);
}

struct EvalReport {
    std::array<double, 6> channel_rmse{};
    std::array<std::optional<double>, 6> channel_best_fit{};  // nullopt: constant channel
    double force_norm_rmse = 0;   // N
    double torque_norm_rmse = 0;  // Nm
    double max_abs_force_norm_error = 0;   // N
    double max_abs_torque_norm_error = 0;  // Nm
    std::int64_t effective_coefficients = 0;
    std::int64_t total_coefficients = 0;
    std::size_t samples = 0;
};

// Run the model over a dataset and fill every report field. ARX models use
// the dataset's own previous outputs as history (one-step-ahead evaluation).
inline EvalReport evaluate(const CalibrationModel& model, const Dataset& dataset) {
    auto rows = dataset.model_inputs(model.spec.nu);
    const std::size_t depth = static_cast<std::size_t>(std::max(model.spec.na, model.spec.nb));
    if (rows.size() <= depth)
        throw InsufficientDataError("dataset too short for the model's lag orders");

    std::vector<Wrench> expected, predicted;
    for (std::size_t k = depth; k < rows.size(); ++k) {
        History h;
        const History* hp = nullptr;
        if (model.spec.is_arx()) {
            for (std::size_t j = k - depth; j < k; ++j) {
                h.inputs.push_back(rows[j]);
                h.outputs.push_back(dataset.outputs[j]);
            }
            hp = &h;
        }
        expected.push_back(dataset.outputs[k]);
        predicted.push_back(model.predict(rows[k], hp));
    }

    EvalReport r;
    r.samples = expected.size();
    for (int c = 0; c < 6; ++c) {
        std::vector<double> e, p;
        for (std::size_t k = 0; k < expected.size(); ++k) {
            e.push_back(expected[k][c]);
            p.push_back(predicted[k][c]);
        }
        r.channel_rmse[c] = rmse(e, p);
        try {
            r.channel_best_fit[c] = best_fit(e, p);
        } catch (const UndefinedMetricError&) {
            r.channel_best_fit[c] = std::nullopt;
        }
    }
    r.force_norm_rmse = ftcal::force_norm_rmse(expected, predicted);
    r.torque_norm_rmse = ftcal::torque_norm_rmse(expected, predicted);
    for (std::size_t k = 0; k < expected.size(); ++k) {
        r.max_abs_force_norm_error =
            std::max(r.max_abs_force_norm_error,
                     std::abs(expected[k].force_norm() - predicted[k].force_norm()));
        r.max_abs_torque_norm_error =
            std::max(r.max_abs_torque_norm_error,
                     std::abs(expected[k].torque_norm() - predicted[k].torque_norm()));
    }
    r.effective_coefficients = count_effective(model, 1e-9);
    r.total_coefficients =
        static_cast<std::int64_t>(model.columns.size()) * model.spec.ny;
    return r;
}

inline nlohmann::json report_to_json(const EvalReport& r) {
    nlohmann::json j;
    j["channel_rmse"] = r.channel_rmse;
    auto& bf = j["channel_best_fit"] = nlohmann::json::array();
    for (const auto& v : r.channel_best_fit)
        bf.push_back(v ? nlohmann::json(*v) : nlohmann::json());
    j["force_norm_rmse"] = r.force_norm_rmse;
    j["torque_norm_rmse"] = r.torque_norm_rmse;
    j["max_abs_force_norm_error"] = r.max_abs_force_norm_error;
    j["max_abs_torque_norm_error"] = r.max_abs_torque_norm_error;
    j["effective_coefficients"] = r.effective_coefficients;
    j["total_coefficients"] = r.total_coefficients;
    j["samples"] = r.samples;
    return j;
}

// Flat CSV row for batch sweeps; pair with report_csv_header().
inline std::string report_csv_header() {
    return "degree,lambda,total_coefficients,effective_coefficients,"
           "train_force_norm_rmse,val_force_norm_rmse,"
           "train_torque_norm_rmse,val_torque_norm_rmse";
}

}  // namespace ftcal
