#include "rotlab/rotator_model.hpp"

#include <cmath>

#include "rotlab/errors.hpp"

namespace rotlab {

RotatorModel::RotatorModel(ShapeFunction f, double m, double l) : shape(std::move(f)), mass(m), length(l) {
    if (!(m > 0.0)) throw DomainError("rotator: mass must be > 0");
    if (!(l > 0.0)) throw DomainError("rotator: length must be > 0");
}

double q_invariant(const ChartState& s, double length) {
    const double denom = 1.0 - s.n().dot(s.v);
    if (!(denom > 1e-12)) throw SingularityError("Q: null direction collinear with velocity (1 - n.v -> 0)");
    const double nd = s.n_dot_norm();
    return length * length * nd * nd / (denom * denom);
}

double q_invariant(const CovariantKinematics& c, double length) {
    const double kx = dot(c.k, c.xdot);
    if (!(std::abs(kx) > 1e-12)) throw SingularityError("Q: k.xdot = 0");
    return -length * length * dot(c.kdot, c.kdot) / (kx * kx);
}

double lagrangian(const RotatorModel& model, const ChartState& s) {
    check_admissible(s);
    const double Q = q_invariant(s, model.length);
    model.shape.check_domain(Q);
    return reduced_lagrangian(model, s.q(), s.qd());
}

CovariantKinematics lift_state(const ChartState& s) {
    const Vec3 n = s.n();
    const Vec3 nd = s.n_dot();
    CovariantKinematics c;
    c.x = {s.t, s.x[0], s.x[1], s.x[2]};
    c.xdot = {1.0, s.v[0], s.v[1], s.v[2]};
    c.k = {1.0, n[0], n[1], n[2]};
    c.kdot = {0.0, nd[0], nd[1], nd[2]};
    return c;
}

ChargeSet momenta(const RotatorModel& model, const CovariantKinematics& c) {
    const double m = model.mass;
    const double xx = dot(c.xdot, c.xdot);
    if (!(xx > 0.0)) throw SingularityError("momenta: xdot must be timelike");
    const double kx = dot(c.k, c.xdot);
    if (!(std::abs(kx) > 1e-12)) throw SingularityError("momenta: k.xdot = 0");
    const double sx = std::sqrt(xx);
    const double Q = q_invariant(c, model.length);
    model.shape.check_domain(Q);

    ChargeSet out;
    if (Q == 0.0) {
        if (!model.shape.smooth_at_zero())
            throw SingularityError("momenta: rotationless state of a shape non-smooth at Q = 0; Pi has no limit");
        const double f0 = model.shape.value(0.0);
        out.P = (m * f0 / sx) * c.xdot;
        out.Pi = FourVector{};
    } else {
        const ShapeValues fv = model.shape.eval(Q);
        const double g = 2.0 * m * Q * fv.df * sx;
        out.P = (m * fv.f / sx) * c.xdot - (g / kx) * c.k;
        out.Pi = (g / dot(c.kdot, c.kdot)) * c.kdot;
    }
    out.M = AntisymmetricTensor2::wedge(c.x, out.P);
    out.M += AntisymmetricTensor2::wedge(c.k, out.Pi);
    out.W = pauli_lubanski(out.M, out.P);
    out.PP = dot(out.P, out.P);
    out.WW = dot(out.W, out.W);
    return out;
}

CasimirPair casimirs_closed_form(const RotatorModel& model, double Q) {
    const double m = model.mass, l = model.length;
    if (Q == 0.0 && !model.shape.smooth_at_zero()) {
        // Q f' ~ sqrt(Q) -> 0
        const double f0 = model.shape.value(0.0);
        return {m * m * f0 * f0, 0.0};
    }
    const ShapeValues fv = model.shape.eval(Q);
    return {m * m * (fv.f * fv.f - 4.0 * Q * fv.f * fv.df),
            -4.0 * m * m * m * m * l * l * Q * fv.f * fv.f * fv.df * fv.df};
}

double rotation_speed(const ShapeFunction& f, double Q) {
    if (Q == 0.0) {
        f.check_domain(Q);
        return 0.0;
    }
    const ShapeValues fv = f.eval(Q);
    const double num = 2.0 * Q * fv.df;
    const double den = fv.f - num;
    if (den == 0.0) throw DomainError("rotation speed: f - 2 Q f' = 0");
    const double th = num / den;
    if (!(std::abs(th) < 1.0)) throw DomainError("rotation speed: superluminal shape/Q combination");
    return th;
}

}  // namespace rotlab
