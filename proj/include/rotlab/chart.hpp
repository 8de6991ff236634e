#pragma once

// Physical chart on R^3 x S^2: q = (x1, x2, x3, theta, phi) in the gauge
// tau = x^0, k^0 = 1, plus Cartesian views used to move between frames.

#include <array>

#include <Eigen/Dense>

namespace rotlab {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Vec5 = Eigen::Matrix<double, 5, 1>;
using Mat5 = Eigen::Matrix<double, 5, 5>;

struct ChartState {
    Vec3 x = Vec3::Zero();
    double theta = 0.5 * 3.14159265358979323846;
    double phi = 0.0;
    Vec3 v = Vec3::Zero();
    double dtheta = 0.0;
    double dphi = 0.0;
    double t = 0.0;

    std::array<double, 5> q() const { return {x[0], x[1], x[2], theta, phi}; }
    std::array<double, 5> qd() const { return {v[0], v[1], v[2], dtheta, dphi}; }
    static ChartState from_arrays(const std::array<double, 5>& q, const std::array<double, 5>& qd, double t);

    Vec3 n() const;
    /// dn/dt
    Vec3 n_dot() const;
    /// |dn/dt| = sqrt(dtheta^2 + dphi^2 sin^2 theta)
    double n_dot_norm() const;
};

/// Throws SingularityError when |v| >= 1 or 1 - n.v <= tol.
void check_admissible(const ChartState& s, double tol = 1e-12);

/// Unit vector (sin th cos ph, sin th sin ph, cos th) for any scalar type.
template <class T>
std::array<T, 3> direction(const T& theta, const T& phi) {
    using std::cos;
    using std::sin;
    const T st = sin(theta);
    return {st * cos(phi), st * sin(phi), cos(theta)};
}

/// Kinematics of a sample with accelerations, in Cartesian form.
struct CartesianMotion {
    double t = 0.0;
    Vec3 x = Vec3::Zero(), v = Vec3::Zero(), a = Vec3::Zero();
    Vec3 n = Vec3::UnitX(), nd = Vec3::Zero(), ndd = Vec3::Zero();
};

/// Chart state together with its generalized accelerations.
struct ChartMotion {
    ChartState state;
    Vec5 qdd = Vec5::Zero();
};

CartesianMotion to_cartesian(const ChartMotion& m);
/// Inverse map; phi is wrapped to [0, 2 pi). Requires n away from the poles.
ChartMotion to_chart(const CartesianMotion& c);

/// Proper rotation of the spatial frame.
struct Rotation {
    Mat3 R = Mat3::Identity();

    /// Fixed quarter turn about the x axis; moves the chart poles onto the
    /// equator.
    static Rotation pole_switch();

    Rotation then(const Rotation& next) const { return {next.R * R}; }
    Rotation inverse() const { return {R.transpose()}; }
    CartesianMotion apply(const CartesianMotion& c) const;
};

/// Rotates a chart state (positions, velocities, accelerations) by R.
ChartMotion rotate(const ChartMotion& m, const Rotation& r);
ChartState rotate(const ChartState& s, const Rotation& r);

/// The (theta, phi) chart degenerates near the poles; below this sin(theta)
/// chart-dependent quantities are evaluated in a rotated frame.
inline constexpr double kPoleSinThreshold = 0.1;
bool near_pole(const ChartState& s);

}  // namespace rotlab
