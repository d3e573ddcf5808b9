#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <random>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "ftcal/data.hpp"
#include "ftcal/errors.hpp"
#include "ftcal/types.hpp"

namespace ftcal {

// Operating envelope of the bench sensor: per-component force/torque ranges
// plus the internal temperature range.
struct Envelope {
    std::array<double, 6> lo{-30.45, -120.48, -113.24, -4.35, -4.68, -12.59};
    std::array<double, 6> hi{123.91, 34.03, 113.65, 26.99, 25.55, 7.27};
    double temp_lo = 25.0;
    double temp_hi = 44.0;

    bool contains(const Wrench& w, double temp) const {
        for (int i = 0; i < 6; ++i)
            if (w[i] < lo[i] || w[i] > hi[i]) return false;
        return temp >= temp_lo && temp <= temp_hi;
    }

    void require(const Wrench& w, double temp) const {
        if (!contains(w, temp)) {
            std::string s = "wrench/temperature outside operating envelope: [";
            for (int i = 0; i < 6; ++i) s += std::to_string(w[i]) + (i < 5 ? ", " : "], ");
            s += std::to_string(temp) + " degC";
            throw EnvelopeError(s);
        }
    }
};

// One trajectory point: commanded wrench plus sensor temperature.
struct TrajectoryPoint {
    Wrench wrench;
    double temperature = 25.0;
};

using Trajectory = std::vector<TrajectoryPoint>;

namespace detail {

// Box-Muller on explicit 64-bit draws, so generated datasets are identical
// across standard libraries.
class Gaussian {
public:
    explicit Gaussian(std::uint64_t seed) : rng_(seed) {}

    double operator()() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform01();
        double u2 = uniform01();
        double r = std::sqrt(-2.0 * std::log(u1));
        spare_ = r * std::sin(2.0 * M_PI * u2);
        have_spare_ = true;
        return r * std::cos(2.0 * M_PI * u2);
    }

private:
    double uniform01() {
        // (0, 1]: avoids log(0)
        return (static_cast<double>(rng_() >> 11) + 1.0) * 0x1p-53;
    }
    std::mt19937_64 rng_;
    double spare_ = 0;
    bool have_spare_ = false;
};

}  // namespace detail

// Hidden forward map wrench -> raw counts. Calibration fits the reverse
// direction, so this generator is an independent oracle for the whole
// pipeline: the fitted model must approximate the inverse of this map.
struct GroundTruthTransducer {
    Eigen::Matrix<double, 6, 6> gain;   // bit/N, bit/Nm; invertible
    std::array<double, 6> quad{};       // quadratic distortion, fraction of full scale
    std::array<double, 6> cubic{};      // cubic distortion, fraction of full scale
    std::array<double, 6> drift{};      // bit/degC per channel
    double noise_scale = 0;             // bit (std of additive Gaussian noise)
    double full_scale = 32768;          // bit
    Envelope envelope;

    void validate() const {
        Eigen::JacobiSVD<Eigen::Matrix<double, 6, 6>> svd(gain);
        double smin = svd.singularValues()(5);
        double smax = svd.singularValues()(0);
        if (smin <= 0 || smax / smin >= 1e3)
            throw SpecError("transducer gain matrix must be invertible with condition < 1e3");
        for (int i = 0; i < 6; ++i)
            if (std::abs(quad[i]) > 0.1 || std::abs(cubic[i]) > 0.1)
                throw SpecError("nonlinear perturbation must stay within 10% of full scale");
    }

    // Noise-free forward response for one trajectory point.
    RawSample respond(const Wrench& w, double temperature) const {
        Eigen::Matrix<double, 6, 1> f;
        for (int i = 0; i < 6; ++i) f(i) = w[i];
        Eigen::Matrix<double, 6, 1> a = gain * f;
        RawSample counts(6);
        for (int i = 0; i < 6; ++i) {
            double s = a(i) / full_scale;  // affine response as a fraction of full scale
            counts[i] = a(i) + full_scale * (quad[i] * s * s + cubic[i] * s * s * s) +
                        drift[i] * (temperature - 25.0);
        }
        return counts;
    }
};

// Drive the transducer through a trajectory; pairs the noisy counts with the
// commanded wrench as ground truth. Pure function of (transducer, trajectory,
// seed).
inline Dataset simulate(const GroundTruthTransducer& t, const Trajectory& trajectory,
                        std::uint64_t seed) {
    t.validate();
    detail::Gaussian noise(seed);
    Dataset d;
    d.source = "simulated";
    for (const auto& point : trajectory) {
        t.envelope.require(point.wrench, point.temperature);
        RawSample counts = t.respond(point.wrench, point.temperature);
        if (t.noise_scale > 0)
            for (double& c : counts) c += t.noise_scale * noise();
        d.inputs.push_back(std::move(counts));
        d.temperatures.push_back(point.temperature);
        d.outputs.push_back(point.wrench);
    }
    return d;
}

// Constant-force-norm direction sweeps over a spherical quadrant (Fx >= 0,
// Fy <= 0), one sweep per weight group; torques follow from a fixed lever arm.
// Temperature ramps linearly across the whole trajectory.
inline Trajectory grid_trajectory(const std::vector<double>& force_norms, int directions,
                                  const Envelope& env = {}) {
    if (force_norms.empty() || directions < 1)
        throw SpecError("grid trajectory needs at least one force norm and one direction");
    Trajectory traj;
    const double golden = 0.6180339887498949;
    const std::size_t total = force_norms.size() * static_cast<std::size_t>(directions);
    std::size_t k = 0;
    for (double norm : force_norms) {
        for (int i = 0; i < directions; ++i, ++k) {
            double t = (i + 0.5) / directions;
            double polar = M_PI * t;
            double azimuth = -M_PI_2 * std::fmod((i + 1) * golden, 1.0);
            Wrench w;
            w[0] = norm * std::sin(polar) * std::cos(azimuth);   // Fx >= 0
            w[1] = norm * std::sin(polar) * std::sin(azimuth);   // Fy <= 0
            w[2] = norm * std::cos(polar);
            // load point varies per direction so the torques span all three
            // axes instead of being a fixed linear image of the force
            double rx = 0.04 * (0.3 + 0.7 * std::fmod(i * 0.7548776662466927, 1.0));
            double ry = 0.03 * (0.3 + 0.7 * std::fmod(i * 0.5698402909980532, 1.0));
            double rz = 0.20 * (0.3 + 0.7 * std::fmod(i * 0.3287880283419204, 1.0));
            w[3] = ry * w[2] - rz * w[1];
            w[4] = rz * w[0] - rx * w[2];
            w[5] = rx * w[1] - ry * w[0];
            double temp =
                env.temp_lo + (env.temp_hi - env.temp_lo) *
                                  (total > 1 ? static_cast<double>(k) / (total - 1) : 0.0);
            env.require(w, temp);
            traj.push_back({w, temp});
        }
    }
    return traj;
}

// Load lifted along -Z ramping to the peak and back, with a small lever-arm
// torque about Y. The apex is hit exactly.
inline Trajectory lifting_trajectory(double peak_force, int n_points,
                                     const Envelope& env = {}) {
    if (peak_force <= 0 || n_points < 1)
        throw SpecError("lifting trajectory needs a positive peak force and point count");
    Trajectory traj;
    for (int i = 0; i < n_points; ++i) {
        double tri = 1.0;
        if (n_points == 2) {
            tri = static_cast<double>(i);
        } else if (n_points > 2) {
            int m = std::max(1, (n_points - 1) / 2);
            tri = std::min(1.0, static_cast<double>(std::min(i, n_points - 1 - i)) / m);
        }
        // arm configuration wanders slightly while lifted, exciting the
        // torque channels
        double rx = 0.04 * (0.3 + 0.7 * std::fmod(i * 0.7548776662466927, 1.0));
        double ry = 0.03 * (0.3 + 0.7 * std::fmod(i * 0.5698402909980532, 1.0));
        Wrench w;
        w[2] = -peak_force * tri;
        w[3] = ry * w[2];
        w[4] = -rx * w[2];
        double temp = env.temp_lo +
                      (env.temp_hi - env.temp_lo) *
                          (n_points > 1 ? static_cast<double>(i) / (n_points - 1) : 0.0);
        env.require(w, temp);
        traj.push_back({w, temp});
    }
    return traj;
}

// A plausible bench transducer: diagonally dominant gains with mild
// cross-coupling, per-channel distortion and temperature drift.
inline GroundTruthTransducer default_transducer(double noise_scale = 0.005 * 32768 * 0.01) {
    GroundTruthTransducer t;
    t.gain.setZero();
    const double fg = 150;   // bit/N
    const double tg = 700;   // bit/Nm
    for (int i = 0; i < 6; ++i) t.gain(i, i) = (i < 3 ? fg : tg) * (1.0 + 0.05 * i);
    // cross-coupling between neighboring bridges
    for (int i = 0; i < 6; ++i)
        for (int j = 0; j < 6; ++j)
            if (i != j) t.gain(i, j) = (i < 3 ? fg : tg) * 0.03 * ((i + 2 * j) % 5 - 2) / 2.0;
    t.quad = {0.04, -0.03, 0.05, 0.03, -0.04, 0.04};
    t.cubic = {0.06, 0.05, -0.07, -0.05, 0.06, 0.05};
    t.drift = {8, -6, 7, 5, -4, 6};
    t.noise_scale = noise_scale;
    return t;
}

inline nlohmann::json transducer_to_json(const GroundTruthTransducer& t) {
    nlohmann::json j;
    auto& g = j["gain"] = nlohmann::json::array();
    for (int i = 0; i < 6; ++i) {
        std::vector<double> row(6);
        for (int c = 0; c < 6; ++c) row[c] = t.gain(i, c);
        g.push_back(row);
    }
    j["quad"] = t.quad;
    j["cubic"] = t.cubic;
    j["drift"] = t.drift;
    j["noise_scale"] = t.noise_scale;
    j["full_scale"] = t.full_scale;
    return j;
}

inline GroundTruthTransducer transducer_from_json(const nlohmann::json& j) {
    try {
        GroundTruthTransducer t;
        const auto& g = j.at("gain");
        if (g.size() != 6) throw ShapeError("gain matrix must be 6x6");
        for (int i = 0; i < 6; ++i) {
            auto row = g.at(i).get<std::vector<double>>();
            if (row.size() != 6) throw ShapeError("gain matrix must be 6x6");
            for (int c = 0; c < 6; ++c) t.gain(i, c) = row[c];
        }
        t.quad = j.value("quad", t.quad);
        t.cubic = j.value("cubic", t.cubic);
        t.drift = j.value("drift", t.drift);
        t.noise_scale = j.value("noise_scale", 0.0);
        t.full_scale = j.value("full_scale", 32768.0);
        t.validate();
        return t;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("malformed transducer config: ") + e.what());
    }
}

}  // namespace ftcal
