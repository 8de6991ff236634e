#pragma once

// Shared helpers for the test binaries: seeded random admissible states and
// small independent oracles.

#include <array>
#include <cmath>
#include <numbers>
#include <random>

#include <Eigen/Dense>

#include "rotlab/chart.hpp"
#include "rotlab/minkowski.hpp"

namespace testing_support {

using rotlab::ChartState;
using rotlab::FourVector;

struct Rng {
    std::mt19937_64 gen;
    explicit Rng(std::uint64_t seed) : gen(seed) {}
    double uniform(double a, double b) { return std::uniform_real_distribution<double>(a, b)(gen); }
    double normal() { return std::normal_distribution<double>(0.0, 1.0)(gen); }
    Eigen::Vector3d direction() {
        Eigen::Vector3d v(normal(), normal(), normal());
        return v.normalized();
    }
    FourVector four() { return {normal(), normal(), normal(), normal()}; }
};

/// Random admissible chart state away from the poles. speed_max bounds |v|,
/// rot_scale scales the angular velocities.
inline ChartState random_state(Rng& rng, double speed_max = 0.6, double rot_scale = 1.0) {
    ChartState s;
    s.x = Eigen::Vector3d(rng.normal(), rng.normal(), rng.normal());
    s.theta = rng.uniform(0.4, std::numbers::pi - 0.4);
    s.phi = rng.uniform(0.0, 2.0 * std::numbers::pi);
    s.v = rng.direction() * rng.uniform(0.0, speed_max);
    s.dtheta = rot_scale * rng.normal();
    s.dphi = rot_scale * rng.normal();
    s.t = rng.uniform(-1.0, 1.0);
    return s;
}

/// Rescales the angular velocities so that Q takes the requested value.
inline ChartState with_q(ChartState s, double Q, double length) {
    const double denom = 1.0 - s.n().dot(s.v);
    const double nd = s.n_dot_norm();
    const double target = std::sqrt(Q) * denom / length;
    s.dtheta *= target / nd;
    s.dphi *= target / nd;
    return s;
}

inline double rel(double a, double b) { return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300}); }

/// Sign of a permutation of (0,1,2,3) by counting inversions; 0 if repeated.
inline int perm_sign(int a, int b, int c, int d) {
    const int p[4] = {a, b, c, d};
    int inv = 0;
    for (int i = 0; i < 4; ++i)
        for (int j = i + 1; j < 4; ++j) {
            if (p[i] == p[j]) return 0;
            if (p[i] > p[j]) ++inv;
        }
    return inv % 2 ? -1 : 1;
}

inline double metric(int mu) { return mu == 0 ? 1.0 : -1.0; }

}  // namespace testing_support
