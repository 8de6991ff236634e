#include "rotlab/dynamics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <iomanip>
#include <numbers>
#include <ostream>
#include <sstream>

#include <boost/numeric/odeint/stepper/runge_kutta_dopri5.hpp>

#include "rotlab/errors.hpp"
#include "rotlab/hessian_lab.hpp"

namespace rotlab {

namespace {

struct Solved {
    AccelerationResult acc;
    double abs_residual = 0.0;
};

// H qdd = Z in the state's own chart, no pole handling.
Solved solve_direct(const ELSystem& sys, const ChartState& s, double rank_tol) {
    const ELTerms<5> t = sys.terms(s);
    Eigen::JacobiSVD<Mat5> svd(t.hessian);
    const auto& sv = svd.singularValues();
    const int rank = numeric_rank(sv, rank_tol);
    if (rank < 5) {
        std::vector<std::vector<double>> kern;
        const auto ks = kernel(t.hessian, rank_tol);
        for (const auto& k : ks) kern.emplace_back(k.data(), k.data() + k.size());
        double cval = -ks.front().dot(t.z);
        if (sys.model().shape.degenerate_family() && s.n_dot_norm() > 0.0) cval = *constraint_functional(sys, s);
        std::ostringstream msg;
        msg << "degenerate Hessian (rank " << rank << " of 5) for shape " << sys.model().shape.tag()
            << ": accelerations are not determined by the state";
        throw DegenerateHessian(msg.str(), std::move(kern), cval, rank);
    }
    Solved out;
    out.acc.qdd = t.hessian.fullPivLu().solve(t.z);
    out.acc.condition = sv[0] / sv[4];
    out.acc.ill_conditioned = out.acc.condition > kIllConditioned;
    out.abs_residual = (t.hessian * out.acc.qdd - t.z).norm();
    const double zn = t.z.norm();
    out.acc.solve_residual = zn > 0.0 ? out.abs_residual / zn : out.abs_residual;
    return out;
}

double wrap_angle(double phi) {
    const double two_pi = 2.0 * std::numbers::pi;
    double w = std::fmod(phi, two_pi);
    if (w < 0.0) w += two_pi;
    return w;
}

using State = std::array<double, 10>;

ChartState unpack(const State& y, double t) {
    ChartState s;
    s.x = Vec3(y[0], y[1], y[2]);
    s.theta = y[3];
    s.phi = y[4];
    s.v = Vec3(y[5], y[6], y[7]);
    s.dtheta = y[8];
    s.dphi = y[9];
    s.t = t;
    return s;
}

State pack(const ChartState& s) {
    return {s.x[0], s.x[1], s.x[2], s.theta, s.phi, s.v[0], s.v[1], s.v[2], s.dtheta, s.dphi};
}

CovariantKinematics lift_cartesian(const CartesianMotion& c) {
    CovariantKinematics k;
    k.x = {c.t, c.x[0], c.x[1], c.x[2]};
    k.xdot = {1.0, c.v[0], c.v[1], c.v[2]};
    k.k = {1.0, c.n[0], c.n[1], c.n[2]};
    k.kdot = {0.0, c.nd[0], c.nd[1], c.nd[2]};
    return k;
}

}  // namespace

Vec5 el_rhs(const ELSystem& sys, const ChartState& s) { return sys.terms(s).z; }

AccelerationResult accelerations(const ELSystem& sys, const ChartState& s, double rank_tol) {
    if (!near_pole(s)) return solve_direct(sys, s, rank_tol).acc;
    const Rotation r = Rotation::pole_switch();
    const ChartState sr = rotate(s, r);
    AccelerationResult a = solve_direct(sys.rotated(r), sr, rank_tol).acc;
    a.qdd = rotate(ChartMotion{sr, a.qdd}, r.inverse()).qdd;
    a.pole_frame = true;
    return a;
}

MonitorRecord monitor(const RotatorModel& model, const CartesianMotion& c, double residual_norm) {
    const CovariantKinematics k = lift_cartesian(c);
    const ChargeSet ch = momenta(model, k);
    MonitorRecord m;
    m.P = ch.P;
    m.M = ch.M;
    m.W = ch.W;
    m.PP = ch.PP;
    m.WW = ch.WW;
    m.Q = q_invariant(k, model.length);
    try {
        m.tanh_psi = rotation_speed(model.shape, m.Q);
    } catch (const PhysicsError&) {
        m.tanh_psi = std::numeric_limits<double>::quiet_NaN();
    }
    m.residual_norm = residual_norm;
    return m;
}

Trajectory integrate(const ELSystem& sys, const ChartState& s0, double t_end, const IntegratorOptions& opt) {
    if (!(t_end > s0.t)) throw DomainError("integrate: t_end must exceed the initial time");
    if (!(opt.rel_tol > 0.0) || !(opt.abs_tol >= 0.0)) throw DomainError("integrate: tolerances must be positive");

    // frame: lab -> integration coordinates, either identity or the quarter turn
    bool switched = false;
    const Rotation quarter = Rotation::pole_switch();
    ELSystem lab_sys = sys;
    ELSystem rot_sys = sys.rotated(quarter);
    auto active = [&]() -> const ELSystem& { return switched ? rot_sys : lab_sys; };

    ChartState start = s0;
    check_admissible(start);
    if (near_pole(start)) {
        start = rotate(start, quarter);
        switched = true;
    }

    Trajectory traj;
    traj.rel_tol = opt.rel_tol;
    traj.abs_tol = opt.abs_tol;

    auto rhs = [&](const State& y, State& dy, double t) {
        const Solved sol = solve_direct(active(), unpack(y, t), opt.rank_tol);
        for (int i = 0; i < 5; ++i) {
            dy[i] = y[5 + i];
            dy[5 + i] = sol.acc.qdd[i];
        }
    };

    auto record = [&](const State& y, double t) {
        const ChartState s = unpack(y, t);
        const Solved sol = solve_direct(active(), s, opt.rank_tol);
        if (sol.acc.ill_conditioned) ++traj.ill_conditioned;
        CartesianMotion c = to_cartesian(ChartMotion{s, sol.acc.qdd});
        TrajectorySample smp;
        smp.t = t;
        if (switched) {
            c = quarter.inverse().apply(c);
            const ChartMotion lab = to_chart(c);
            smp.state = lab.state;
            smp.qdd = lab.qdd;
        } else {
            smp.state = s;
            smp.qdd = sol.acc.qdd;
        }
        smp.state.phi = wrap_angle(smp.state.phi);
        smp.monitor = monitor(sys.model(), c, sol.abs_residual);
        traj.samples.push_back(smp);
    };

    auto to_other_frame = [&](const State& y, double t) {
        const Rotation r = switched ? quarter.inverse() : quarter;
        return pack(rotate(unpack(y, t), r));
    };

    // throws DegenerateHessian for singular shapes before anything else
    solve_direct(active(), start, opt.rank_tol);

    boost::numeric::odeint::runge_kutta_dopri5<State> stepper;
    State y = pack(start), dydt{}, ynew{}, dynew{}, err{};
    double t = start.t;
    rhs(y, dydt, t);
    record(y, t);

    auto scaled_error = [&](const State& a, const State& b, const State& e) {
        double worst = 0.0;
        for (int i = 0; i < 10; ++i) {
            const double sc = opt.abs_tol + opt.rel_tol * std::max(std::abs(a[i]), std::abs(b[i]));
            worst = std::max(worst, std::abs(e[i]) / sc);
        }
        return worst;
    };

    double h = opt.initial_step;
    if (!(h > 0.0)) {
        double yn = 0.0, fn = 0.0;
        for (int i = 0; i < 10; ++i) {
            const double sc = opt.abs_tol + opt.rel_tol * std::abs(y[i]);
            yn = std::max(yn, std::abs(y[i]) / sc);
            fn = std::max(fn, std::abs(dydt[i]) / sc);
        }
        h = (yn < 1e-5 || fn < 1e-5) ? 1e-6 : 0.01 * yn / fn;
        h = std::min(h, 0.1 * (t_end - t));
    }

    std::size_t next_sample = 1;
    int consecutive_failures = 0;
    while (t < t_end) {
        if (traj.steps + traj.rejected >= opt.max_steps) {
            traj.stop = StopReason::step_underflow;
            traj.diagnostic = "step budget exhausted at t = " + std::to_string(t);
            break;
        }
        double target = t_end;
        if (opt.sample_dt > 0.0) target = std::min(t_end, start.t + static_cast<double>(next_sample) * opt.sample_dt);
        h = std::min({h, opt.max_step, target - t});
        const bool lands = (target - t) <= h * (1.0 + 1e-12);
        const double t_new = lands ? target : t + h;
        h = t_new - t;

        try {
            stepper.do_step(rhs, y, dydt, t, ynew, dynew, h, err);
        } catch (const DegenerateHessian&) {
            throw;
        } catch (const PhysicsError& e) {
            ++traj.rejected;
            h *= 0.25;
            if (h < opt.min_step * std::max(1.0, std::abs(t)) || ++consecutive_failures > 60) {
                traj.stop = StopReason::singularity;
                traj.diagnostic = std::string("halted at t = ") + std::to_string(t) + ": " + e.what();
                break;
            }
            continue;
        }
        const double en = scaled_error(y, ynew, err);
        if (!(en <= 1.0)) {
            ++traj.rejected;
            h *= std::isfinite(en) ? std::max(0.2, 0.9 * std::pow(en, -0.2)) : 0.2;
            if (h < opt.min_step * std::max(1.0, std::abs(t))) {
                traj.stop = StopReason::step_underflow;
                traj.diagnostic = "step size underflow at t = " + std::to_string(t);
                break;
            }
            continue;
        }

        const ChartState sn = unpack(ynew, t_new);
        if (near_pole(sn)) {
            // re-express the start of the step in the other frame and retry
            y = to_other_frame(y, t);
            switched = !switched;
            rhs(y, dydt, t);
            traj.frame_switches.push_back(t);
            ++traj.rejected;
            continue;
        }

        consecutive_failures = 0;
        double err_max = 0.0;
        for (double e : err) err_max = std::max(err_max, std::abs(e));
        traj.error_estimate += err_max;
        t = t_new;
        y = ynew;
        dydt = dynew;
        ++traj.steps;
        if (lands && opt.sample_dt > 0.0 && target < t_end) ++next_sample;
        if (opt.sample_dt <= 0.0 || lands) record(y, t);

        const double nv = 1.0 - sn.n().dot(sn.v);
        if (!(sn.v.squaredNorm() < 1.0 - 1e-12)) {
            traj.stop = StopReason::singularity;
            traj.diagnostic = "halted at t = " + std::to_string(t) + ": |v| reached the speed of light";
            break;
        }
        if (!(nv > 1e-9)) {
            traj.stop = StopReason::singularity;
            traj.diagnostic = "halted at t = " + std::to_string(t) + ": 1 - n.v -> 0";
            break;
        }
        h *= en > 0.0 ? std::min(5.0, std::max(0.2, 0.9 * std::pow(en, -0.2))) : 5.0;
    }
    if (traj.stop == StopReason::completed && (traj.samples.empty() || traj.samples.back().t != t)) record(y, t);
    return traj;
}

Vec5 residual(const ELSystem& sys, const ChartMotion& m) {
    if (near_pole(m.state)) {
        const Rotation r = Rotation::pole_switch();
        return residual(sys.rotated(r), rotate(m, r));
    }
    const ELTerms<5> t = sys.terms(m.state);
    return t.hessian * m.qdd - t.z;
}

Vec5 residual(const ELSystem& sys, const CartesianMotion& c) {
    if (std::abs(c.n[2]) > std::sqrt(1.0 - kPoleSinThreshold * kPoleSinThreshold)) {
        const Rotation r = Rotation::pole_switch();
        return residual(sys.rotated(r), to_chart(r.apply(c)));
    }
    return residual(sys, to_chart(c));
}

std::vector<Vec5> residual(const ELSystem& sys, const std::vector<ChartMotion>& candidate) {
    std::vector<Vec5> out;
    out.reserve(candidate.size());
    for (const auto& m : candidate) out.push_back(residual(sys, m));
    return out;
}

std::string csv_header() {
    return "t,x1,x2,x3,theta,phi,dx1,dx2,dx3,dtheta,dphi,P0,P1,P2,P3,PP,WW,Q,tanhPsi,residual_norm";
}

void write_csv(std::ostream& os, const Trajectory& traj) {
    const auto old = os.precision(17);
    os << csv_header() << '\n';
    for (const auto& s : traj.samples) {
        const ChartState& c = s.state;
        const MonitorRecord& m = s.monitor;
        os << s.t << ',' << c.x[0] << ',' << c.x[1] << ',' << c.x[2] << ',' << c.theta << ',' << c.phi << ','
           << c.v[0] << ',' << c.v[1] << ',' << c.v[2] << ',' << c.dtheta << ',' << c.dphi << ',' << m.P[0] << ','
           << m.P[1] << ',' << m.P[2] << ',' << m.P[3] << ',' << m.PP << ',' << m.WW << ',' << m.Q << ','
           << m.tanh_psi << ',' << m.residual_norm << '\n';
    }
    os.precision(old);
}

}  // namespace rotlab
