#include "rotlab/toy_rotator.hpp"

#include <algorithm>
#include <numbers>

#include "rotlab/errors.hpp"

namespace rotlab {

namespace {

void check_state(const ToyState& s) {
    if (!(s.r > 0.0)) throw DomainError("toy: r must be > 0");
    if (s.dpsi == 0.0) throw SingularityError("toy: psid = 0 is the non-smooth point of |psid|");
}

void check_params(const ToyParams& p) {
    if (!(p.m > 0.0) || !(p.l > 0.0)) throw DomainError("toy: m and l must be > 0");
}

PhasePoint<4> point(const ToyState& s) { return {s.q(), s.qd(), s.t}; }

}  // namespace

std::string to_string(ToyVariant v) {
    switch (v) {
        case ToyVariant::free: return "free";
        case ToyVariant::electric: return "electric";
        case ToyVariant::magnetic: return "magnetic";
    }
    return "?";
}

ToyVariant parse_toy_variant(const std::string& name) {
    if (name == "free") return ToyVariant::free;
    if (name == "electric") return ToyVariant::electric;
    if (name == "magnetic") return ToyVariant::magnetic;
    throw DomainError("toy: unknown variant '" + name + "'");
}

std::string to_string(ToyCase c) {
    switch (c) {
        case ToyCase::indeterminate: return "indeterminate";
        case ToyCase::a: return "a";
        case ToyCase::b: return "b";
        case ToyCase::c: return "c";
    }
    return "?";
}

ToyCase parse_toy_case(const std::string& name) {
    if (name == "indeterminate") return ToyCase::indeterminate;
    if (name == "a") return ToyCase::a;
    if (name == "b") return ToyCase::b;
    if (name == "c") return ToyCase::c;
    throw DomainError("toy: unknown case '" + name + "'");
}

int ToyState::epsilon() const {
    if (dpsi == 0.0) throw SingularityError("toy: eps = sign(psid) undefined at psid = 0");
    return dpsi > 0.0 ? 1 : -1;
}

double toy_lagrangian(const ToyParams& p, const ToyState& s) {
    check_params(p);
    check_state(s);
    return toy_lagrangian(p, s.q(), s.qd());
}

ELTerms<4> toy_terms(const ToyParams& p, const ToyState& s) {
    check_params(p);
    check_state(s);
    return el_terms<4>(ToyLagrangian{p}, point(s));
}

Mat4 toy_hessian(const ToyParams& p, const ToyState& s) { return toy_terms(p, s).hessian; }

Mat4 toy_hessian_fd(const ToyParams& p, const ToyState& s) {
    check_params(p);
    check_state(s);
    const double step = std::min(0.1, 0.25 * std::abs(s.dpsi));
    return hessian_fd<4>(ToyLagrangian{p}, point(s), step);
}

Vec4 toy_kernel(const ToyParams& p, const ToyState& s) {
    check_params(p);
    check_state(s);
    const double d = s.psi - s.phi;
    return {s.r * std::cos(d), std::sin(d), 0.0, 2.0 * s.r * s.epsilon() / p.l};
}

double toy_constraint(const ToyParams& p, const ToyState& s) { return toy_kernel(p, s).dot(toy_terms(p, s).z); }

double toy_constraint_closed_form(const ToyParams& p, const ToyState& s) {
    if (p.variant != ToyVariant::magnetic) return 0.0;
    const double d = s.psi - s.phi;
    return -p.Kt * s.r * (s.r * s.dphi * std::cos(d) - s.dr * std::sin(d));
}

Vec4 toy_residual(const ToyParams& p, const ToyMotion& m) {
    const ELTerms<4> t = toy_terms(p, m.state);
    return t.hessian * m.qdd - t.z;
}

double toy_frequency(const ToyParams& p, ToyCase c, double R) {
    check_params(p);
    if (p.variant != ToyVariant::magnetic) throw DomainError("toy: cases a, b, c need the magnetic variant");
    if (!(p.Kt > 0.0)) throw DomainError("toy: Kt must be > 0");
    if (!(R > 0.0)) throw DomainError("toy: R must be > 0");
    const double half = 0.5 * p.l;
    switch (c) {
        case ToyCase::a:
            return p.Kt * R / (p.m * (R + half));
        case ToyCase::b:
            if (!(R < half)) throw DomainError("toy: case b needs R < l/2");
            return p.Kt * R / (p.m * (half - R));
        case ToyCase::c:
            if (!(R > half)) throw DomainError("toy: case c needs R > l/2");
            return p.Kt * R / (p.m * (R - half));
        case ToyCase::indeterminate:
            break;
    }
    throw DomainError("toy: the indeterminate family has no fixed frequency");
}

ToyCandidate toy_circle(const ToyParams& p, ToyCase c, double R, const std::vector<double>& times) {
    ToyCandidate out;
    out.which = c;
    out.R = R;
    out.omega = toy_frequency(p, c, R);
    const double rate = c == ToyCase::b ? -out.omega : out.omega;
    const double shift = c == ToyCase::c ? 0.5 * std::numbers::pi : -0.5 * std::numbers::pi;
    out.epsilon = rate > 0.0 ? 1 : -1;
    for (double t : times) {
        ToyMotion m;
        ToyState& s = m.state;
        s.t = t;
        s.r = R;
        s.phi = rate * t;
        s.psi = s.phi + shift;
        s.dphi = rate;
        s.dpsi = rate;
        out.samples.push_back(m);
    }
    return out;
}

ToyCandidate toy_indeterminate(const ToyParams& p, const PhaseProfile& nu, const std::vector<double>& times) {
    check_params(p);
    if (p.variant == ToyVariant::magnetic)
        throw DomainError("toy: the indeterminate family exists only without the magnetic term");
    // no light-speed bound in the non-relativistic model
    const int eps = nu.validate(times, 0.0);
    if (eps == 0) throw InadmissibleError("toy: the indeterminate family needs nud != 0");
    ToyCandidate out;
    out.which = ToyCase::indeterminate;
    out.R = 0.5 * p.l;
    out.epsilon = eps;
    const double g = p.variant == ToyVariant::electric ? -p.K / p.m : 0.0;
    for (double t : times) {
        const Jet j = nu(t);
        ToyMotion m;
        ToyState& s = m.state;
        s.t = t;
        s.r = out.R;
        s.phi = j.value;
        s.psi = j.value + eps * 0.5 * std::numbers::pi;
        s.z = 0.5 * g * t * t;
        s.dphi = j.first;
        s.dpsi = j.first;
        s.dz = g * t;
        m.qdd << 0.0, j.second, g, j.second;
        out.samples.push_back(m);
    }
    return out;
}

}  // namespace rotlab
