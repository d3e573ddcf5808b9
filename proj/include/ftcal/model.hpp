#pragma once

#include <cmath>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "ftcal/errors.hpp"
#include "ftcal/features.hpp"
#include "ftcal/solver.hpp"

namespace ftcal {

constexpr int kModelSchemaVersion = 1;

struct ModelMetadata {
    std::string dataset_hash;
    std::string created_at;  // empty under --deterministic
    std::vector<std::string> solver_warnings;
};

// Lagged context for ARX prediction: past inputs/outputs, most recent last.
struct History {
    std::vector<RawSample> inputs;   // u(k-1), ..., oldest first
    std::vector<Wrench> outputs;     // y(k-1), ..., oldest first
};

// A fitted calibration model: exponent table plus one coefficient vector per
// output channel, in original (unnormalized) units. Immutable in practice;
// prediction is pure.
struct CalibrationModel {
    ModelSpec spec;
    std::vector<Monomial> monomials;                 // shared across outputs
    std::vector<Column> columns;                     // layout implied by spec
    std::vector<Eigen::VectorXd> coefficients;       // one per output, original units
    NormalizationStats normalization;                // from the training fit
    ModelMetadata metadata;

    static CalibrationModel empty(const ModelSpec& spec) {
        spec.validate();
        CalibrationModel m;
        m.spec = spec;
        m.monomials = enumerate_monomials(spec.nu, spec.np);
        m.columns = column_layout(spec, m.monomials);
        m.coefficients.assign(spec.ny,
                              Eigen::VectorXd::Zero(static_cast<Eigen::Index>(m.columns.size())));
        m.normalization =
            NormalizationStats::identity(static_cast<Eigen::Index>(m.columns.size()));
        return m;
    }

    void validate() const {
        spec.validate();
        if (static_cast<int>(coefficients.size()) != spec.ny)
            throw ShapeError("expected " + std::to_string(spec.ny) + " coefficient vectors, got " +
                             std::to_string(coefficients.size()));
        for (const auto& x : coefficients) {
            if (x.size() != static_cast<Eigen::Index>(columns.size()))
                throw ShapeError("coefficient vector length " + std::to_string(x.size()) +
                                 " does not match column count " + std::to_string(columns.size()));
            if (!x.allFinite()) throw DataError("non-finite model coefficient");
        }
    }

    Wrench predict(const RawSample& u, const History* history = nullptr) const {
        if (static_cast<int>(u.size()) != spec.nu)
            throw ShapeError("sample has " + std::to_string(u.size()) + " channels, expected " +
                             std::to_string(spec.nu));
        const int depth = std::max(spec.na, spec.nb);
        if (spec.is_arx()) {
            if (!history || static_cast<int>(history->inputs.size()) < spec.nb ||
                static_cast<int>(history->outputs.size()) < spec.na)
                throw InsufficientDataError("ARX prediction needs at least nb past inputs and "
                                            "na past outputs");
            (void)depth;
        }
        Eigen::VectorXd phi(static_cast<Eigen::Index>(columns.size()));
        for (std::size_t c = 0; c < columns.size(); ++c) {
            const Column& col = columns[c];
            double v = 1.0;
            switch (col.kind) {
                case Column::Kind::Constant: v = 1.0; break;
                case Column::Kind::OutputLag:
                    // outputs are most-recent-last: y(k-j) sits j from the end
                    v = history->outputs[history->outputs.size() - col.lag][col.channel];
                    break;
                case Column::Kind::InputMonomial: {
                    const RawSample& s =
                        col.lag == 0 ? u : history->inputs[history->inputs.size() - col.lag];
                    v = monomials[col.monomial].eval(s);
                    break;
                }
            }
            phi[static_cast<Eigen::Index>(c)] = v;
        }
        Wrench y;
        for (int i = 0; i < spec.ny && i < 6; ++i) y[i] = coefficients[i].dot(phi);
        return y;
    }

    // Affine view: for np=1, na=nb=0 the model is y = C u + o.
    std::pair<Eigen::MatrixXd, Eigen::VectorXd> affine_view() const {
        if (spec.np != 1 || spec.is_arx())
            throw SpecError("affine view only defined for np=1 instantaneous models");
        Eigen::MatrixXd C(spec.ny, spec.nu);
        Eigen::VectorXd o(spec.ny);
        for (int i = 0; i < spec.ny; ++i) {
            o[i] = coefficients[i][0];
            for (int l = 0; l < spec.nu; ++l) C(i, l) = coefficients[i][1 + l];
        }
        return {C, o};
    }
};

// Coefficients expressed in normalized-feature units, the scale in which the
// solver worked and in which magnitude thresholds are meaningful (stored
// original-unit values shrink like bit^-degree and would make any fixed
// threshold vacuous). Inverse of denormalize_coefficients.
inline Eigen::VectorXd normalized_view(const CalibrationModel& model, int output) {
    const auto& x = model.coefficients[output];
    const auto& s = model.normalization;
    Eigen::VectorXd xn(x.size());
    double offset_shift = 0;
    for (Eigen::Index j = 0; j < x.size(); ++j) {
        if (s.is_offset[j])
            xn[j] = x[j];  // adjusted below
        else if (s.is_degenerate[j])
            xn[j] = 0;
        else {
            xn[j] = x[j] * s.scale[j];
            offset_shift += x[j] * s.mean[j];
        }
    }
    for (Eigen::Index j = 0; j < x.size(); ++j)
        if (s.is_offset[j]) xn[j] += offset_shift;
    return xn;
}

// Number of coefficients with |value| > threshold in normalized units,
// offsets included, summed over all outputs.
inline std::int64_t count_effective(const CalibrationModel& model, double threshold) {
    if (threshold < 0) throw SpecError("threshold must be non-negative");
    std::int64_t n = 0;
    for (int i = 0; i < model.spec.ny; ++i) {
        Eigen::VectorXd xn = normalized_view(model, i);
        for (Eigen::Index j = 0; j < xn.size(); ++j)
            if (std::abs(xn[j]) > threshold) ++n;
    }
    return n;
}

// Zero out every coefficient with normalized-unit |value| <= threshold;
// layout unchanged. Kept coefficients stay bit-identical; the offset absorbs
// the mean shift of each removed column.
inline CalibrationModel prune(const CalibrationModel& model, double threshold) {
    if (threshold < 0) throw SpecError("threshold must be non-negative");
    CalibrationModel out = model;
    const auto& s = model.normalization;
    for (int i = 0; i < model.spec.ny; ++i) {
        Eigen::VectorXd xn = normalized_view(model, i);
        auto& x = out.coefficients[i];
        double offset_adjust = 0;
        bool drop_offset = false;
        for (Eigen::Index j = 0; j < xn.size(); ++j) {
            if (std::abs(xn[j]) > threshold) continue;
            if (s.is_offset[j]) {
                drop_offset = true;
            } else if (x[j] != 0) {
                offset_adjust += x[j] * s.mean[j];
                x[j] = 0;
            }
        }
        for (Eigen::Index j = 0; j < xn.size(); ++j) {
            if (!s.is_offset[j]) continue;
            if (drop_offset) {
                // normalized offset goes to exactly 0
                double shift = 0;
                for (Eigen::Index k = 0; k < xn.size(); ++k)
                    if (!s.is_offset[k] && !s.is_degenerate[k]) shift += x[k] * s.mean[k];
                x[j] = -shift;
            } else if (offset_adjust != 0) {
                x[j] += offset_adjust;
            }
        }
    }
    return out;
}

// --- JSON document format (schema v1) ---------------------------------------
//
// {
//   "schema_version": 1,
//   "spec": {"np":..,"ny":..,"nu":..,"lambda":..,"na":..,"nb":..},
//   "monomials": [[e1,..,e_nu], ...],
//   "coefficients": [[..per column..], ...],          // one array per output
//   "normalization": {"mean":[..],"scale":[..],"is_offset":[..],"is_degenerate":[..]},
//   "metadata": {"dataset_hash":"..","created_at":"..","solver_warnings":[..]}
// }
//
// Doubles are written with round-trip-exact decimal encoding, so reload is
// bit-identical.

inline nlohmann::json serialize(const CalibrationModel& model) {
    model.validate();
    nlohmann::json j;
    j["schema_version"] = kModelSchemaVersion;
    j["spec"] = {{"np", model.spec.np},   {"ny", model.spec.ny}, {"nu", model.spec.nu},
                 {"lambda", model.spec.lambda}, {"na", model.spec.na}, {"nb", model.spec.nb}};
    auto& monos = j["monomials"] = nlohmann::json::array();
    for (const auto& m : model.monomials) monos.push_back(m.exponents);
    auto& coeffs = j["coefficients"] = nlohmann::json::array();
    for (const auto& x : model.coefficients)
        coeffs.push_back(std::vector<double>(x.begin(), x.end()));
    const auto& s = model.normalization;
    j["normalization"] = {
        {"mean", std::vector<double>(s.mean.begin(), s.mean.end())},
        {"scale", std::vector<double>(s.scale.begin(), s.scale.end())},
        {"is_offset", s.is_offset},
        {"is_degenerate", s.is_degenerate}};
    j["metadata"] = {{"dataset_hash", model.metadata.dataset_hash},
                     {"created_at", model.metadata.created_at},
                     {"solver_warnings", model.metadata.solver_warnings}};
    return j;
}

inline CalibrationModel deserialize(const nlohmann::json& j) {
    try {
        if (!j.contains("schema_version"))
            throw ParseError("model document missing schema_version");
        if (int v = j.at("schema_version").get<int>(); v != kModelSchemaVersion)
            throw VersionError("unsupported model schema version " + std::to_string(v));
        CalibrationModel m;
        const auto& js = j.at("spec");
        m.spec.np = js.at("np").get<int>();
        m.spec.ny = js.at("ny").get<int>();
        m.spec.nu = js.at("nu").get<int>();
        m.spec.lambda = js.at("lambda").get<double>();
        m.spec.na = js.at("na").get<int>();
        m.spec.nb = js.at("nb").get<int>();
        m.spec.validate();
        for (const auto& e : j.at("monomials")) {
            Monomial mono{e.get<std::vector<int>>()};
            if (static_cast<int>(mono.exponents.size()) != m.spec.nu)
                throw ShapeError("monomial exponent vector width does not match nu");
            m.monomials.push_back(std::move(mono));
        }
        auto expected = enumerate_monomials(m.spec.nu, m.spec.np);
        if (m.monomials != expected)
            throw ShapeError("monomial table does not match the canonical enumeration for spec");
        m.columns = column_layout(m.spec, m.monomials);
        for (const auto& c : j.at("coefficients")) {
            auto v = c.get<std::vector<double>>();
            m.coefficients.push_back(
                Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size())));
        }
        const auto& jn = j.at("normalization");
        auto mean = jn.at("mean").get<std::vector<double>>();
        auto scale = jn.at("scale").get<std::vector<double>>();
        m.normalization.mean =
            Eigen::Map<const Eigen::VectorXd>(mean.data(), static_cast<Eigen::Index>(mean.size()));
        m.normalization.scale = Eigen::Map<const Eigen::VectorXd>(
            scale.data(), static_cast<Eigen::Index>(scale.size()));
        m.normalization.is_offset = jn.at("is_offset").get<std::vector<bool>>();
        m.normalization.is_degenerate = jn.at("is_degenerate").get<std::vector<bool>>();
        if (m.normalization.mean.size() != static_cast<Eigen::Index>(m.columns.size()) ||
            m.normalization.scale.size() != m.normalization.mean.size() ||
            m.normalization.is_offset.size() != m.columns.size() ||
            m.normalization.is_degenerate.size() != m.columns.size())
            throw ShapeError("normalization stats length does not match column count");
        if (j.contains("metadata")) {
            const auto& jm = j.at("metadata");
            m.metadata.dataset_hash = jm.value("dataset_hash", "");
            m.metadata.created_at = jm.value("created_at", "");
            m.metadata.solver_warnings =
                jm.value("solver_warnings", std::vector<std::string>{});
        }
        m.validate();
        return m;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("malformed model document: ") + e.what());
    }
}

}  // namespace ftcal
