#pragma once

// Exact free motions of the fundamental rotator. The centre of momentum moves
// inertially while the null direction k sweeps a great circle at a rate set by
// an arbitrary phase profile phi(t); the equations of motion do not fix phi.

#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "rotlab/chart.hpp"
#include "rotlab/dual.hpp"
#include "rotlab/el_system.hpp"
#include "rotlab/minkowski.hpp"
#include "rotlab/rotator_model.hpp"

namespace rotlab {

/// Constant data of a free solution: PP = m^2, WW = -m^4 l^2/4, WP = 0,
/// NN = -1, NW = NP = 0.
struct FreeSolutionFrame {
    double m = 1.0;
    double l = 1.0;
    FourVector P, W, N, x0;

    /// Largest violation of the six bilinear conditions, each relative to
    /// its natural scale.
    double condition_error() const;
    /// N rotated by pi/2 in the plane orthogonal to P and W:
    /// eps^{mu nu alpha beta} N_nu W_alpha P_beta / (m^3 l / 2).
    FourVector binormal() const;
};

/// Rest frame with W along the spin axis and N at a seed-dependent angle in
/// the plane orthogonal to it, then boosted by beta. A zero axis falls back
/// to z. Throws DomainError for |beta| >= 1.
FreeSolutionFrame frame_from_parameters(double m, double l, const std::array<double, 3>& beta,
                                        const std::array<double, 3>& axis, std::uint64_t seed,
                                        const FourVector& x0 = {});

/// n(phi) = N cos phi - binormal sin phi
FourVector great_circle_n(const FreeSolutionFrame& frame, double phi);

/// phi as a function of the centre-of-momentum time t, with two derivatives.
class PhaseProfile {
public:
    /// phi = omega t + phi0
    static PhaseProfile linear(double omega, double phi0 = 0.0);
    /// phi = omega t + amp sin(nu t) + phi0
    static PhaseProfile modulated(double omega, double amp, double nu, double phi0 = 0.0);
    /// Natural cubic spline through (t_i, phi_i); t strictly increasing,
    /// at least three knots. Evaluation outside [t_0, t_n] is a DomainError.
    static PhaseProfile spline(std::vector<double> t, std::vector<double> phi);
    /// Two whitespace-separated columns t, phi; '#' starts a comment.
    static PhaseProfile spline_file(const std::filesystem::path& file);
    /// "linear:omega=0.5", "modulated:omega=0.5,amp=0.3,nu=0.2" or
    /// "spline:<file>" (relative paths resolved against base_dir).
    static PhaseProfile parse(const std::string& tag, const std::filesystem::path& base_dir = {});

    Jet operator()(double t) const;
    const std::string& tag() const { return tag_; }

    /// Rejects the profile unless |l phidot/2| < 1 on every grid point and
    /// phidot keeps one sign (either identically zero or never zero). The
    /// message names the first offending t. Returns the sign of phidot
    /// (0 for the inertial branch).
    int validate(const std::vector<double>& grid, double l) const;

private:
    std::function<Jet(double)> eval_;
    std::string tag_;
};

/// One point of a free solution. The covariant part is parametrized by the
/// centre-of-momentum time t; the lab part by x^0.
struct FreeSample {
    double t = 0.0;
    Jet phase{};
    CovariantKinematics covariant;  // x, dx/dt, k, dk/dt
    double lab_time = 0.0;
    double dlab_dt = 0.0;           // dx^0/dt
    CartesianMotion lab;            // derivatives with respect to x^0
    ChartMotion chart;              // lab chart (phi undefined near the poles)
};

struct FreeTrajectory {
    FreeSolutionFrame frame;
    PhaseProfile profile;
    int branch = 1;        // +1: f = sqrt(1 + sqrt Q), -1: f = sqrt(1 - sqrt Q)
    int phase_sign = 0;    // sign of phidot, 0 on the inertial branch
    std::vector<FreeSample> samples;

    RotatorModel model() const;
};

/// x = (P/m) t + branch (l/2) r(t) + x0, k = P/m + sign(phidot) n(t) with
/// r = N sin phi + s binormal cos phi and n the matching great circle,
/// s = branch sign(phidot). With this orientation the Noether W of every
/// branch and rotation sense equals frame.W.
FreeSample free_sample(const FreeSolutionFrame& frame, const PhaseProfile& profile, int branch, int phase_sign,
                       double t);
/// Validates the profile on the grid, then samples it. Throws
/// InadmissibleError on a bad profile and DomainError for branch not +-1.
FreeTrajectory free_trajectory(const FreeSolutionFrame& frame, const PhaseProfile& profile,
                               const std::vector<double>& grid, int branch = 1);

/// EL residual of a sample. On the inertial branch (phidot = 0) the
/// fundamental shapes have no derivative at Q = 0; the sample is then checked
/// against the point-particle limit, whose equations are a = 0, ndot = 0.
Vec5 free_residual(const FreeTrajectory& traj, const FreeSample& s);

struct FrequencyRelation {
    double lhs;  // |phidot|
    double rhs;  // (2/l) tanh Psi, Psi the rapidity of xdot relative to P
};
FrequencyRelation frequency_relation_check(const FreeSolutionFrame& frame, const FreeSample& s);

struct ActionDecomposition {
    double direct;         // adaptive quadrature of L dx^0 over the trajectory
    double inertial;       // -m (t_end - t_0)
    double phase;          // -branch m (l/2) * trapezoid of |phidot| on the grid
    double phase_integral; // int |phidot| dt from the same trapezoid
};
ActionDecomposition action_decomposition(const FreeTrajectory& traj);

/// Two profiles with equal phi and phidot at t = 0, one linear and one
/// modulated (omega' = omega - amp nu), sampled on the same grid.
struct IndeterminacyWitness {
    FreeTrajectory uniform;
    FreeTrajectory modulated;
    double initial_gap;      // max |q, qdot| difference at t = 0 in the lab chart
    double final_gap;        // max |x| difference at the last grid point
    double max_residual;     // over both trajectories
};
IndeterminacyWitness indeterminacy_witness(const FreeSolutionFrame& frame, double omega, double amp, double nu,
                                           const std::vector<double>& grid, int branch = 1);

/// Uniform grid t0, t0 + dt, ..., t1 (last point included).
std::vector<double> uniform_grid(double t0, double t1, std::size_t points);

}  // namespace rotlab
