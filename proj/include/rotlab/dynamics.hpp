#pragma once

// Euler-Lagrange dynamics on the five physical degrees of freedom:
// acceleration solve H qdd = Z, adaptive integration for regular shapes with
// conservation monitors, and residuals of candidate solutions.

#include <cstddef>
#include <iosfwd>
#include <limits>
#include <string>
#include <vector>

#include "rotlab/chart.hpp"
#include "rotlab/el_system.hpp"
#include "rotlab/minkowski.hpp"

namespace rotlab {

/// Z = dL/dq - (d2L/dqd dq) qd - d2L/dqd dt in the state's own chart.
Vec5 el_rhs(const ELSystem& sys, const ChartState& s);

struct AccelerationResult {
    Vec5 qdd = Vec5::Zero();
    double condition = 0.0;      // sigma_max / sigma_min
    bool ill_conditioned = false;  // condition > 1e12
    double solve_residual = 0.0;   // |H qdd - Z| / |Z|
    bool pole_frame = false;       // evaluated in the rotated frame
};

inline constexpr double kIllConditioned = 1e12;

/// Unique accelerations of a regular state. States with sin(theta) below the
/// pole threshold are solved in the quarter-turned frame and mapped back.
/// Throws DegenerateHessian when rank H < 5, i.e. some sigma <= rank_tol
/// sigma_max. With the default rank_tol every condition number above 1e8 is
/// already a rank drop; the ill-conditioning flag matters for smaller rank_tol.
AccelerationResult accelerations(const ELSystem& sys, const ChartState& s, double rank_tol = 1e-8);

struct MonitorRecord {
    FourVector P;
    AntisymmetricTensor2 M;
    FourVector W;
    double PP = 0.0;
    double WW = 0.0;
    double Q = 0.0;
    double tanh_psi = 0.0;  // NaN where the shape makes it superluminal
    double residual_norm = 0.0;
};

/// Noether charges and invariants from Cartesian kinematics (frame free).
MonitorRecord monitor(const RotatorModel& model, const CartesianMotion& c, double residual_norm = 0.0);

struct TrajectorySample {
    double t = 0.0;
    ChartState state;
    Vec5 qdd = Vec5::Zero();
    MonitorRecord monitor;
};

enum class StopReason { completed, singularity, step_underflow };

struct Trajectory {
    std::vector<TrajectorySample> samples;
    std::size_t steps = 0;
    std::size_t rejected = 0;
    std::size_t ill_conditioned = 0;
    double rel_tol = 0.0;
    double abs_tol = 0.0;
    /// Sum over accepted steps of the embedded error estimate (max norm).
    double error_estimate = 0.0;
    std::vector<double> frame_switches;
    StopReason stop = StopReason::completed;
    std::string diagnostic;
};

struct IntegratorOptions {
    double rel_tol = 1e-10;
    double abs_tol = 1e-12;
    double initial_step = 0.0;  // 0: automatic
    double max_step = std::numeric_limits<double>::infinity();
    double min_step = 1e-14;
    /// > 0: record only at multiples of sample_dt (steps are clipped to land
    /// on them); otherwise every accepted step is recorded.
    double sample_dt = 0.0;
    std::size_t max_steps = 50'000'000;
    double rank_tol = 1e-8;
};

/// Adaptive Dormand-Prince 5(4) integration from s0 to t_end. Kinematic
/// singularities (1 - n.v -> 0, |v| -> 1, Q leaving the shape domain) halt the
/// run with a diagnostic. Throws DegenerateHessian if s0 is degenerate.
Trajectory integrate(const ELSystem& sys, const ChartState& s0, double t_end, const IntegratorOptions& opt = {});

/// H qdd - Z per candidate sample (pole-frame aware).
std::vector<Vec5> residual(const ELSystem& sys, const std::vector<ChartMotion>& candidate);
Vec5 residual(const ELSystem& sys, const ChartMotion& m);
/// Same, starting from Cartesian kinematics so that samples at or near the
/// chart poles never pass through the degenerate angles.
Vec5 residual(const ELSystem& sys, const CartesianMotion& c);

/// t, x1..x3, theta, phi, dx1..dx3, dtheta, dphi, P0..P3, PP, WW, Q, tanhPsi,
/// residual_norm at 17 significant digits.
void write_csv(std::ostream& os, const Trajectory& traj);
std::string csv_header();

}  // namespace rotlab
