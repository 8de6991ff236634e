#pragma once

// Non-relativistic toy with the same kind of degeneracy: a point particle in
// cylindrical coordinates (r, phi, z) coupled to an internal angle psi,
//
//   L = m/2 (rd^2 + r^2 phid^2 + zd^2) + c m l^2 psid^2
//       - m l/2 |psid| (rd cos(psi - phi) + r phid sin(psi - phi)) - V,
//
// with c = 1/8 (singular 4x4 Hessian) and V = K z (electric) or
// V = Kt r^2 phid / 2 (magnetic).

#include <array>
#include <cmath>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "rotlab/analytic_solutions.hpp"
#include "rotlab/dual.hpp"
#include "rotlab/euler_lagrange.hpp"

namespace rotlab {

using Vec4 = Eigen::Vector4d;
using Mat4 = Eigen::Matrix4d;

enum class ToyVariant { free, electric, magnetic };

std::string to_string(ToyVariant v);
ToyVariant parse_toy_variant(const std::string& name);

struct ToyParams {
    double m = 1.0;
    double l = 2.0;
    double K = 0.0;      // electric: V = K z
    double Kt = 0.0;     // magnetic: V = Kt r^2 phid / 2
    double coef = 0.125; // psid^2 coefficient in units of m l^2
    ToyVariant variant = ToyVariant::free;
};

/// q = (r, phi, z, psi)
struct ToyState {
    double r = 1.0, phi = 0.0, z = 0.0, psi = 0.0;
    double dr = 0.0, dphi = 0.0, dz = 0.0, dpsi = 1.0;
    double t = 0.0;

    std::array<double, 4> q() const { return {r, phi, z, psi}; }
    std::array<double, 4> qd() const { return {dr, dphi, dz, dpsi}; }
    /// sign of psid; throws SingularityError at psid = 0
    int epsilon() const;
};

struct ToyMotion {
    ToyState state;
    Vec4 qdd = Vec4::Zero();
};

template <class T>
T toy_lagrangian(const ToyParams& p, const std::array<T, 4>& q, const std::array<T, 4>& qd) {
    using std::abs;
    using std::cos;
    using std::sin;
    const T& r = q[0];
    const T d = q[3] - q[1];
    T L = 0.5 * p.m * (qd[0] * qd[0] + r * r * qd[1] * qd[1] + qd[2] * qd[2]) +
          (p.coef * p.m * p.l * p.l) * qd[3] * qd[3] -
          (0.5 * p.m * p.l) * abs(qd[3]) * (qd[0] * cos(d) + r * qd[1] * sin(d));
    switch (p.variant) {
        case ToyVariant::free:
            break;
        case ToyVariant::electric:
            L = L - p.K * q[2];
            break;
        case ToyVariant::magnetic:
            L = L - (0.5 * p.Kt) * r * r * qd[1];
            break;
    }
    return L;
}

/// Throws SingularityError at psid = 0 (|psid| is not differentiable there)
/// and DomainError for r <= 0.
double toy_lagrangian(const ToyParams& p, const ToyState& s);

/// Callable adapter for the Euler-Lagrange helpers.
struct ToyLagrangian {
    ToyParams params;
    template <class T>
    T operator()(const std::array<T, 4>& q, const std::array<T, 4>& qd, const T& /*t*/) const {
        return toy_lagrangian(params, q, qd);
    }
};

ELTerms<4> toy_terms(const ToyParams& p, const ToyState& s);
Mat4 toy_hessian(const ToyParams& p, const ToyState& s);
/// Central differences with a step below |psid| (exact for this quadratic
/// Lagrangian up to rounding).
Mat4 toy_hessian_fd(const ToyParams& p, const ToyState& s);

/// w = r cos(psi - phi) d_r + sin(psi - phi) d_phi + (2 r eps / l) d_psi
Vec4 toy_kernel(const ToyParams& p, const ToyState& s);

/// w.Z: identically zero for the free and electric variants; for the
/// magnetic one it equals toy_constraint_closed_form.
double toy_constraint(const ToyParams& p, const ToyState& s);
/// -Kt r (r phid cos(psi - phi) - rd sin(psi - phi)) (zero unless magnetic)
double toy_constraint_closed_form(const ToyParams& p, const ToyState& s);

/// H qdd - Z
Vec4 toy_residual(const ToyParams& p, const ToyMotion& m);

enum class ToyCase { indeterminate, a, b, c };

std::string to_string(ToyCase c);
ToyCase parse_toy_case(const std::string& name);

struct ToyCandidate {
    ToyCase which = ToyCase::a;
    double omega = 0.0;  // fixed frequency of cases a, b, c
    double R = 0.0;
    int epsilon = 1;
    std::vector<ToyMotion> samples;
};

/// Fixed-frequency circles in the magnetic variant:
///   a: omega = Kt R / (m (R + l/2)),  phi = omega t,  psi = phi - pi/2, R > 0
///   b: omega = Kt R / (m (l/2 - R)),  phi = -omega t, psi = phi - pi/2, R < l/2
///   c: omega = Kt R / (m (R - l/2)),  phi = omega t,  psi = phi + pi/2, R > l/2
/// Throws DomainError for R outside the case's range or non-positive
/// constants.
double toy_frequency(const ToyParams& p, ToyCase c, double R);
ToyCandidate toy_circle(const ToyParams& p, ToyCase c, double R, const std::vector<double>& times);

/// r = l/2, phi = nu(t), psi = nu(t) + eps pi/2 with eps = sign(nud), and
/// z = -K t^2/(2m) in the electric variant (z = 0 otherwise). The profile
/// must keep nud away from zero.
ToyCandidate toy_indeterminate(const ToyParams& p, const PhaseProfile& nu, const std::vector<double>& times);

}  // namespace rotlab
