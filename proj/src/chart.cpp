#include "rotlab/chart.hpp"

#include <cmath>
#include <numbers>

#include "rotlab/dual.hpp"
#include "rotlab/errors.hpp"

namespace rotlab {

ChartState ChartState::from_arrays(const std::array<double, 5>& q, const std::array<double, 5>& qd, double t) {
    ChartState s;
    s.x = Vec3(q[0], q[1], q[2]);
    s.theta = q[3];
    s.phi = q[4];
    s.v = Vec3(qd[0], qd[1], qd[2]);
    s.dtheta = qd[3];
    s.dphi = qd[4];
    s.t = t;
    return s;
}

Vec3 ChartState::n() const {
    const auto d = direction(theta, phi);
    return {d[0], d[1], d[2]};
}

Vec3 ChartState::n_dot() const {
    const double st = std::sin(theta), ct = std::cos(theta);
    const double sp = std::sin(phi), cp = std::cos(phi);
    return dtheta * Vec3(ct * cp, ct * sp, -st) + dphi * st * Vec3(-sp, cp, 0.0);
}

double ChartState::n_dot_norm() const {
    const double st = std::sin(theta);
    return std::sqrt(dtheta * dtheta + dphi * dphi * st * st);
}

void check_admissible(const ChartState& s, double tol) {
    if (!(s.v.squaredNorm() < 1.0)) throw SingularityError("state: |v| >= 1 (light speed reached)");
    if (!(1.0 - s.n().dot(s.v) > tol))
        throw SingularityError("state: null direction collinear with velocity (1 - n.v -> 0)");
}

CartesianMotion to_cartesian(const ChartMotion& m) {
    const ChartState& s = m.state;
    CartesianMotion c;
    c.t = s.t;
    c.x = s.x;
    c.v = s.v;
    c.a = m.qdd.head<3>();
    const Dual2 th = jet_from({s.theta, s.dtheta, m.qdd[3]});
    const Dual2 ph = jet_from({s.phi, s.dphi, m.qdd[4]});
    const auto n = direction(th, ph);
    for (int i = 0; i < 3; ++i) {
        const Jet j = jet_of(n[i]);
        c.n[i] = j.value;
        c.nd[i] = j.first;
        c.ndd[i] = j.second;
    }
    return c;
}

ChartMotion to_chart(const CartesianMotion& c) {
    ChartMotion m;
    ChartState& s = m.state;
    s.t = c.t;
    s.x = c.x;
    s.v = c.v;
    m.qdd.head<3>() = c.a;
    Dual2 n[3];
    for (int i = 0; i < 3; ++i) n[i] = jet_from({c.n[i], c.nd[i], c.ndd[i]});
    const Jet th = jet_of(acos(n[2]));
    const Jet ph = jet_of(atan2(n[1], n[0]));
    s.theta = th.value;
    s.dtheta = th.first;
    m.qdd[3] = th.second;
    s.phi = ph.value < 0.0 ? ph.value + 2.0 * std::numbers::pi : ph.value;
    s.dphi = ph.first;
    m.qdd[4] = ph.second;
    return m;
}

Rotation Rotation::pole_switch() {
    Rotation r;
    r.R << 1.0, 0.0, 0.0,
           0.0, 0.0, -1.0,
           0.0, 1.0, 0.0;
    return r;
}

CartesianMotion Rotation::apply(const CartesianMotion& c) const {
    CartesianMotion o;
    o.t = c.t;
    o.x = R * c.x;
    o.v = R * c.v;
    o.a = R * c.a;
    o.n = R * c.n;
    o.nd = R * c.nd;
    o.ndd = R * c.ndd;
    return o;
}

ChartMotion rotate(const ChartMotion& m, const Rotation& r) { return to_chart(r.apply(to_cartesian(m))); }

ChartState rotate(const ChartState& s, const Rotation& r) { return rotate(ChartMotion{s, Vec5::Zero()}, r).state; }

bool near_pole(const ChartState& s) { return std::abs(std::sin(s.theta)) < kPoleSinThreshold; }

}  // namespace rotlab
