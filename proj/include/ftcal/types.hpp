#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "ftcal/errors.hpp"

namespace ftcal {

// One raw sensor reading: gauge channels in bit counts, optionally followed
// by an internal temperature reading (degC) as the last channel.
using RawSample = std::vector<double>;

// 3 forces [N] + 3 torques [Nm].
struct Wrench {
    std::array<double, 6> v{};

    double& operator[](std::size_t i) { return v[i]; }
    double operator[](std::size_t i) const { return v[i]; }

    double force_norm() const {
        return std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
    }
    double torque_norm() const {
        return std::sqrt(v[3] * v[3] + v[4] * v[4] + v[5] * v[5]);
    }

    friend bool operator==(const Wrench&, const Wrench&) = default;
};

// Hyperparameters describing one model class.
struct ModelSpec {
    int np = 1;        // polynomial degree
    int ny = 6;        // output count
    int nu = 6;        // input count (7 with temperature)
    double lambda = 0; // L1 weight, 0 = plain least squares
    int na = 0;        // output-lag order
    int nb = 0;        // input-lag order

    bool is_arx() const { return na > 0 || nb > 0; }

    void validate() const {
        if (np < 1) throw SpecError("polynomial degree np must be >= 1");
        if (ny < 1) throw SpecError("output count ny must be >= 1");
        if (nu < 1) throw SpecError("input count nu must be >= 1");
        if (lambda < 0) throw SpecError("lambda must be non-negative");
        if (na < 0 || nb < 0) throw SpecError("lag orders na, nb must be non-negative");
    }
};

}  // namespace ftcal
