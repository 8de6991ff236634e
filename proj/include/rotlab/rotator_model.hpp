#pragma once

// The rotator family L = -m sqrt(xdot.xdot) f(Q), Q = -l^2 (kdot.kdot)/(k.xdot)^2,
// reduced to the physical chart, together with its covariant lift, Noether
// charges and Casimir invariants.

#include <array>

#include "rotlab/chart.hpp"
#include "rotlab/minkowski.hpp"
#include "rotlab/shape.hpp"

namespace rotlab {

struct RotatorModel {
    ShapeFunction shape = ShapeFunction::smooth();
    double mass = 1.0;
    double length = 1.0;

    RotatorModel(ShapeFunction f, double m, double l);
};

struct CovariantKinematics {
    FourVector x, xdot, k, kdot;
};

struct ChargeSet {
    FourVector P;
    FourVector Pi;
    AntisymmetricTensor2 M;
    FourVector W;
    double PP = 0.0;
    double WW = 0.0;
};

struct CasimirPair {
    double PP;
    double WW;
};

/// Q = l^2 |ndot|^2 / (1 - n.v)^2 from the chart.
double q_invariant(const ChartState& s, double length);
/// Q = -l^2 (kdot.kdot) / (k.xdot)^2 from covariant kinematics.
double q_invariant(const CovariantKinematics& c, double length);

/// L_N = -m sqrt(1 - v.v) f(Q) for any scalar type; q and qd in chart order.
template <class T>
T reduced_lagrangian(const RotatorModel& model, const std::array<T, 5>& q, const std::array<T, 5>& qd) {
    using std::sin;
    using std::sqrt;
    const auto n = direction(q[3], q[4]);
    const T vv = qd[0] * qd[0] + qd[1] * qd[1] + qd[2] * qd[2];
    const T nv = n[0] * qd[0] + n[1] * qd[1] + n[2] * qd[2];
    const T st = sin(q[3]);
    const T ndnd = qd[3] * qd[3] + qd[4] * qd[4] * st * st;
    const T denom = 1.0 - nv;
    const T Q = (model.length * model.length) * ndnd / (denom * denom);
    return -model.mass * sqrt(1.0 - vv) * model.shape.value(Q);
}

double lagrangian(const RotatorModel& model, const ChartState& s);

/// x = (t, x), xdot = (1, v), k = (1, n), kdot = (0, ndot).
CovariantKinematics lift_state(const ChartState& s);

/// Noether charges P, Pi, M, W and the Casimirs computed from them.
/// Q = 0: Pi is the analytic limit 0 for shapes smooth at Q = 0; for the
/// others the limit depends on the direction of approach and a
/// SingularityError is raised.
ChargeSet momenta(const RotatorModel& model, const CovariantKinematics& c);

/// PP = m^2 (f^2 - 4 Q f f'),  WW = -4 m^4 l^2 Q f^2 f'^2
CasimirPair casimirs_closed_form(const RotatorModel& model, double Q);

/// tanh Psi = 2 Q f' / (f - 2 Q f'), rotation speed relative to the
/// instantaneous centre-of-momentum frame.
double rotation_speed(const ShapeFunction& f, double Q);

}  // namespace rotlab
