#include "rotlab/em_coupling.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "rotlab/dynamics.hpp"
#include "rotlab/errors.hpp"
#include "rotlab/hessian_lab.hpp"

namespace rotlab {

double interaction_lagrangian(double e, const UniformField& fld, const ChartState& s) {
    return fld.interaction(e, s.q(), s.qd());
}

double constraint_F(const CovariantKinematics& c, const UniformField& fld) {
    return fld.tensor().contract(c.k, c.xdot);
}

double constraint_chart(const ChartState& s, const UniformField& fld) {
    return (s.n() - s.v).dot(fld.E + s.v.cross(fld.H));
}

double q_evolution_rhs(const RotatorModel& model, const ChartState& s, const UniformField& fld, double e) {
    if (model.shape.degenerate_family())
        throw DomainError("Q evolution: indeterminate, the universal factor vanishes identically for " +
                          model.shape.tag());
    const double Q = q_invariant(s, model.length);
    const double factor = universal_factor(model.shape, Q);
    if (factor == 0.0) throw DomainError("Q evolution: universal factor vanishes at this Q");
    const CovariantKinematics c = lift_state(s);
    const double f = model.shape.eval(Q).f;
    return 2.0 * Q / f * (e / model.mass) * constraint_F(c, fld) / dot(c.k, c.xdot) / factor;
}

double pp_evolution_rhs(const RotatorModel& model, const ChartState& s, const UniformField& fld, double e) {
    const CovariantKinematics c = lift_state(s);
    const ChargeSet ch = momenta(model, c);
    return 2.0 * e * fld.tensor().contract(ch.P, c.xdot);
}

double circular_mu(const CircularSolutionSpec& spec) {
    if (!(spec.R > 0.0)) throw DomainError("circle: R must be > 0");
    if (!(spec.m > 0.0) || !(spec.l > 0.0)) throw DomainError("circle: m and l must be > 0");
    if (spec.branch != 1 && spec.branch != -1) throw DomainError("circle: branch must be +1 or -1");
    const double eHR = spec.e * spec.H * spec.R;
    if (eHR == 0.0) throw InadmissibleError("circle: no co-rotating circle without field and charge");
    const double k = spec.m / eHR;
    return std::sqrt(1.0 + k * k) * std::abs(1.0 - spec.branch * 2.0 * spec.R / spec.l) - 1.0;
}

int circle_orientation(const CircularSolutionSpec& spec) {
    const int s_eh = spec.e * spec.H > 0.0 ? 1 : -1;
    return 1.0 - spec.branch * 2.0 * spec.R / spec.l < 0.0 ? -s_eh : s_eh;
}

CircularSolution magnetic_circular_solution(const CircularSolutionSpec& spec) {
    const double mu = circular_mu(spec);
    const int orient = circle_orientation(spec);
    if (spec.epsilon != orient) {
        std::ostringstream msg;
        msg << "circle: no co-rotating solution with eps = " << spec.epsilon << " (needs eps = " << orient << ")";
        throw InadmissibleError(msg.str());
    }
    if (!(mu > 0.0)) {
        std::ostringstream msg;
        msg << "circle: branch " << (spec.branch > 0 ? "plus" : "minus") << " inadmissible at these parameters (mu = "
            << mu << " <= 0)";
        throw InadmissibleError(msg.str());
    }
    CircularSolution out;
    out.mu = mu;
    out.phidot = orient * spec.branch * (2.0 / spec.l) / mu;
    out.speed = spec.R * std::abs(out.phidot);
    if (!(out.speed < 1.0)) {
        std::ostringstream msg;
        msg << "circle: superluminal solution, R |phidot| = " << out.speed;
        throw InadmissibleError(msg.str());
    }
    return out;
}

double magnetic_circular_frequency(const CircularSolutionSpec& spec) { return magnetic_circular_solution(spec).phidot; }

RotatorModel circle_model(const CircularSolutionSpec& spec) {
    return RotatorModel(ShapeFunction::fundamental_plus(), spec.m, spec.l);
}

UniformField circle_field(const CircularSolutionSpec& spec) {
    UniformField f;
    f.H = Vec3(0.0, 0.0, spec.H);
    return f;
}

ELSystem circle_system(const CircularSolutionSpec& spec) {
    return ELSystem(circle_model(spec), circle_field(spec), spec.e);
}

ChartMotion circle_motion(const CircularSolutionSpec& spec, double t, double phi0) {
    const double w = magnetic_circular_frequency(spec);
    const double eps = spec.epsilon;
    const double phi = w * t + phi0;
    const double c = std::cos(phi), s = std::sin(phi);
    ChartMotion m;
    m.state.t = t;
    m.state.theta = 0.5 * std::numbers::pi;
    m.state.phi = phi;
    m.state.dphi = w;
    m.state.dtheta = 0.0;
    // cos(phi - eps pi/2) = eps sin(phi), sin(phi - eps pi/2) = -eps cos(phi)
    m.state.x = spec.R * Vec3(eps * s, -eps * c, 0.0);
    m.state.v = eps * spec.R * w * Vec3(c, s, 0.0);
    m.qdd.head<3>() = eps * spec.R * w * w * Vec3(-s, c, 0.0);
    return m;
}

std::vector<ChartMotion> circle_candidate(const CircularSolutionSpec& spec, const std::vector<double>& times,
                                          double phi0) {
    std::vector<ChartMotion> out;
    out.reserve(times.size());
    for (double t : times) out.push_back(circle_motion(spec, t, phi0));
    return out;
}

ProbeReport corotation_uniqueness_probe(const ELSystem& sys, const ChartState& s, double R, int epsilon) {
    ProbeReport r;
    const auto k = kernel(sys.hessian(s));
    if (k.empty()) {
        r.kernel_empty = true;
        r.note = "kernel empty, trivially unique";
        return r;
    }
    Vec5 a;
    a << epsilon * R * s.n(), 0.0, 1.0;
    const double c = std::abs(k.front().dot(a)) / (k.front().norm() * a.norm());
    r.angle = std::acos(std::min(1.0, c));
    r.note = r.angle > 0.1 ? "frequency change not along the kernel: frequency fixed"
                           : "frequency change along the kernel: frequency indeterminate";
    return r;
}

ProbeReport corotation_uniqueness_probe(const CircularSolutionSpec& spec) {
    return corotation_uniqueness_probe(circle_system(spec), circle_motion(spec, 0.0).state, spec.R, spec.epsilon);
}

std::vector<BranchScanRow> branch_scan(double m, double l, double e, const std::vector<double>& radii,
                                       const std::vector<double>& fields) {
    std::vector<BranchScanRow> rows;
    for (double H : fields) {
        for (double R : radii) {
            for (int branch : {1, -1}) {
                BranchScanRow row;
                row.R = R;
                row.H = H;
                row.branch = branch;
                row.residual_norm = std::numeric_limits<double>::quiet_NaN();
                CircularSolutionSpec spec{R, branch, 1, m, l, e, H};
                spec.epsilon = circle_orientation(spec);
                try {
                    row.mu = circular_mu(spec);
                    const CircularSolution sol = magnetic_circular_solution(spec);
                    row.phidot = sol.phidot;
                    row.speed = sol.speed;
                    row.admissible = true;
                    const ELSystem sys = circle_system(spec);
                    const double period = 2.0 * std::numbers::pi / std::abs(sol.phidot);
                    double worst = 0.0;
                    for (int i = 0; i < 5; ++i)
                        worst = std::max(worst, residual(sys, circle_motion(spec, 0.2 * i * period)).norm());
                    row.residual_norm = worst;
                    row.status = "ok";
                } catch (const PhysicsError& ex) {
                    if (row.mu > 0.0 && std::abs(e * H * R) > 0.0) {
                        const double w = spec.epsilon * branch * (2.0 / l) / row.mu;
                        row.phidot = w;
                        row.speed = R * std::abs(w);
                    }
                    row.status = ex.what();
                }
                rows.push_back(row);
            }
        }
    }
    return rows;
}

std::string branch_scan_header() { return "R,H,branch,mu,phidot,speed,admissible,residual_norm"; }

std::string branch_scan_row(const BranchScanRow& r) {
    std::ostringstream os;
    os.precision(17);
    os << r.R << ',' << r.H << ',' << (r.branch > 0 ? "plus" : "minus") << ',' << r.mu << ',' << r.phidot << ','
       << r.speed << ',' << (r.admissible ? 1 : 0) << ',' << r.residual_norm;
    return os.str();
}

}  // namespace rotlab
