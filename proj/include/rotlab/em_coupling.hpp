#pragma once

// Minimal coupling to uniform fields: the Hessian-constraint contraction
// F k xdot, the evolution laws of PP and Q, and the co-rotating circular
// motions of the degenerate rotator in a uniform magnetic field.

#include <string>
#include <vector>

#include "rotlab/chart.hpp"
#include "rotlab/el_system.hpp"
#include "rotlab/field.hpp"
#include "rotlab/rotator_model.hpp"

namespace rotlab {

/// e v.A - e Phi in the field's gauge.
double interaction_lagrangian(double e, const UniformField& fld, const ChartState& s);

/// F_{mu nu} k^mu xdot^nu
double constraint_F(const CovariantKinematics& c, const UniformField& fld);
/// (n - v).(E + v x H); equals -constraint_F on the lifted state.
double constraint_chart(const ChartState& s, const UniformField& fld);

/// dQ/ds along the motion (ds = sqrt(1 - v.v) dt), obtained by dividing the
/// evolution law by the universal factor. Throws DomainError for the
/// degenerate family, where the factor vanishes and Q is left undetermined.
double q_evolution_rhs(const RotatorModel& model, const ChartState& s, const UniformField& fld, double e);

/// d(PP)/dt = 2 e F_{mu nu} P^mu xdot^nu with xdot = (1, v) and P the
/// rotator's own momentum.
double pp_evolution_rhs(const RotatorModel& model, const ChartState& s, const UniformField& fld, double e);

/// Co-rotating circle x = R (cos(phi - eps pi/2), sin(phi - eps pi/2), 0),
/// theta = pi/2, v = eps R phidot n, in H = (0, 0, H), for the rotator
/// f = sqrt(1 + sqrt Q). Two frequencies phidot_+ and phidot_- exist.
struct CircularSolutionSpec {
    double R = 1.0;
    int branch = -1;   // which of phidot_+ / phidot_-
    int epsilon = 1;   // orientation of the position relative to n
    double m = 1.0;
    double l = 1.0;
    double e = 1.0;
    double H = 1.0;
};

struct CircularSolution {
    double mu = 0.0;
    double phidot = 0.0;
    double speed = 0.0;  // R |phidot|
};

/// mu = sqrt(1 + (m/(eHR))^2) |1 -+ 2R/l| - 1 (sign -+ for the plus/minus
/// branch), without admissibility checks.
double circular_mu(const CircularSolutionSpec& spec);

/// The only orientation eps carrying a solution: sign(eH), flipped when
/// 1 -+ 2R/l is negative (plus branch with R > l/2, where the circle found
/// is the mirror image of the one with eps = sign(eH)).
int circle_orientation(const CircularSolutionSpec& spec);

/// phidot = eps (+-) (2/l)/mu. Throws InadmissibleError when mu <= 0, when
/// eps differs from circle_orientation or when R |phidot| >= 1.
CircularSolution magnetic_circular_solution(const CircularSolutionSpec& spec);
double magnetic_circular_frequency(const CircularSolutionSpec& spec);

RotatorModel circle_model(const CircularSolutionSpec& spec);
UniformField circle_field(const CircularSolutionSpec& spec);
ELSystem circle_system(const CircularSolutionSpec& spec);

/// Sample of the circle (with accelerations) at lab time t.
ChartMotion circle_motion(const CircularSolutionSpec& spec, double t, double phi0 = 0.0);
std::vector<ChartMotion> circle_candidate(const CircularSolutionSpec& spec, const std::vector<double>& times,
                                          double phi0 = 0.0);

struct ProbeReport {
    bool kernel_empty = false;
    /// Angle in [0, pi/2] between the kernel vector and the frequency-change
    /// direction a = eps R n d_x + d_phi of the co-rotating family.
    double angle = 0.0;
    std::string note;
};

/// Checks whether a change of rotation frequency alone (the only velocity
/// variation compatible with the constraint on a co-rotating circle) can lie
/// along the Hessian kernel. Order-one angles mean the frequency is fixed.
ProbeReport corotation_uniqueness_probe(const ELSystem& sys, const ChartState& s, double R, int epsilon);
ProbeReport corotation_uniqueness_probe(const CircularSolutionSpec& spec);

struct BranchScanRow {
    double R = 0.0;
    double H = 0.0;
    int branch = 0;
    double mu = 0.0;
    double phidot = 0.0;
    double speed = 0.0;
    bool admissible = false;
    double residual_norm = 0.0;  // max over one period; NaN when inadmissible
    std::string status;
};

/// Sweeps (R, H) for both branches with eps = circle_orientation.
std::vector<BranchScanRow> branch_scan(double m, double l, double e, const std::vector<double>& radii,
                                       const std::vector<double>& fields);
std::string branch_scan_header();
std::string branch_scan_row(const BranchScanRow& row);

}  // namespace rotlab
