#include "rotlab/el_system.hpp"

namespace rotlab {

namespace {

// Starting steps for the extrapolated FD Hessian: a tenth of the distance to
// the nearest place where L stops being smooth in the velocities (the light
// cone, n.v = 1, and for shapes with odd powers of sqrt Q the rotationless
// point or the edge of the fundamental- domain).
std::array<double, 5> fd_start_steps(const RotatorModel& m, const ChartState& s) {
    double dv = 1.0 - s.v.norm();
    double dn = std::max(1.0, std::max(std::abs(s.dtheta), std::abs(s.dphi)));
    if (!m.shape.smooth_at_zero()) {
        // sqrt Q = l |ndot| / (1 - n.v) moves with both groups of velocities
        dn = s.n_dot_norm();
        dv = std::min(dv, 1.0 - s.n().dot(s.v));
        if (m.shape.kind() == ShapeKind::fundamental_minus) {
            const double rq = std::sqrt(q_invariant(s, m.length));
            const double edge = rq > 0.0 ? std::min(1.0, (1.0 - rq) / rq) : 1.0;
            dn *= edge;
            dv *= edge;
        }
    }
    const double st = std::max(std::abs(std::sin(s.theta)), 1e-3);
    return {0.1 * dv, 0.1 * dv, 0.1 * dv, 0.1 * dn, 0.1 * dn / st};
}

}  // namespace

ELSystem ELSystem::rotated(const Rotation& r) const {
    std::optional<UniformField> f;
    if (field_) f = field_->rotated(r.R);
    return ELSystem(model_, f, charge_, engine_);
}

ELTerms<5> ELSystem::terms(const ChartState& s) const {
    check_admissible(s);
    model_.shape.check_domain(q_invariant(s, model_.length));
    const auto p = phase_point(s);
    if (engine_ == DerivativeEngine::finite_difference) {
        const auto h0 = fd_start_steps(model_, s);
        return el_terms_fd<5>(*this, p, &h0);
    }
    return el_terms<5>(*this, p);
}

Mat5 ELSystem::hessian(const ChartState& s) const {
    check_admissible(s);
    model_.shape.check_domain(q_invariant(s, model_.length));
    const auto p = phase_point(s);
    if (engine_ == DerivativeEngine::finite_difference)
        return hessian_fd_extrapolated<5>(*this, p, fd_start_steps(model_, s));
    return velocity_hessian<5>(*this, p);
}

}  // namespace rotlab
