#include "tasks.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

#include "rotlab/analytic_solutions.hpp"
#include "rotlab/em_coupling.hpp"
#include "rotlab/errors.hpp"
#include "rotlab/hessian_lab.hpp"
#include "rotlab/rotator_model.hpp"

namespace rotlab::cli {

using nlohmann::ordered_json;

void Report::result(const std::string& key, ordered_json value, const std::string& op) {
    results_[key] = ordered_json{{"value", std::move(value)}, {"op", op}};
}

bool Report::check_at_most(const std::string& key, double value, double bound, const std::string& op) {
    const bool pass = value <= bound;
    checks_[key] = ordered_json{{"value", value}, {"relation", "<="}, {"bound", bound}, {"pass", pass}, {"op", op}};
    if (!pass) ++failed_;
    return pass;
}

bool Report::check_at_least(const std::string& key, double value, double bound, const std::string& op) {
    const bool pass = value >= bound;
    checks_[key] = ordered_json{{"value", value}, {"relation", ">="}, {"bound", bound}, {"pass", pass}, {"op", op}};
    if (!pass) ++failed_;
    return pass;
}

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string num(double x) {
    if (std::isnan(x)) return "nan";
    std::ostringstream os;
    os.imbue(std::locale::classic());
    os.precision(17);
    os << x;
    return os.str();
}

// Data files are opened through here so that every one lands in the report.
class Output {
public:
    Output(const std::filesystem::path& dir, std::string name, Report& rep)
        : dir_(dir), name_(std::move(name)), rep_(rep) {}

    std::ofstream open(const std::string& suffix) {
        const std::string file = name_ + "." + suffix;
        std::ofstream os(dir_ / file);
        if (!os) throw std::runtime_error("cannot write " + (dir_ / file).string());
        os.imbue(std::locale::classic());
        os.precision(17);
        rep_.file(file);
        return os;
    }

private:
    std::filesystem::path dir_;
    std::string name_;
    Report& rep_;
};

ordered_json to_json(const Eigen::VectorXd& v) {
    ordered_json a = ordered_json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
    return a;
}

ordered_json to_json(const FourVector& v) { return ordered_json{v[0], v[1], v[2], v[3]}; }

ordered_json to_json(const ChartState& s) {
    return ordered_json{{"x", {s.x[0], s.x[1], s.x[2]}},
                        {"theta", s.theta},
                        {"phi", s.phi},
                        {"v", {s.v[0], s.v[1], s.v[2]}},
                        {"dtheta", s.dtheta},
                        {"dphi", s.dphi},
                        {"t", s.t}};
}

RotatorModel rotator(const Scenario& sc) { return RotatorModel(ShapeFunction::parse(sc.shape), sc.m, sc.l); }

ELSystem rotator_system(const Scenario& sc) {
    std::optional<UniformField> fld;
    double e = 0.0;
    if (sc.field) {
        fld = sc.field->field;
        e = sc.field->e;
    }
    return ELSystem(rotator(sc), fld, e, sc.engine);
}

// Random chart states away from the poles, redrawn until they are admissible
// and rotating with Q inside the shape's domain.
std::vector<ChartState> initial_states(const Scenario& sc, const RotatorModel& model) {
    if (sc.state.explicit_state) return {*sc.state.explicit_state};
    const RandomStateSpec& rs = *sc.state.random;
    std::mt19937_64 gen(sc.seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<ChartState> out;
    int attempts = 0;
    while (static_cast<int>(out.size()) < sc.state.count) {
        if (++attempts > 100000 + 100 * sc.state.count)
            throw DomainError("no admissible random state for shape " + sc.shape);
        ChartState s;
        s.x = Vec3(normal(gen), normal(gen), normal(gen));
        s.theta = 0.4 + (std::numbers::pi - 0.8) * unit(gen);
        s.phi = 2.0 * std::numbers::pi * unit(gen);
        Vec3 dir(normal(gen), normal(gen), normal(gen));
        s.v = dir.normalized() * (rs.speed_max * unit(gen));
        s.dtheta = rs.rot_scale * normal(gen);
        s.dphi = rs.rot_scale * normal(gen);
        try {
            check_admissible(s);
            const double Q = q_invariant(s, model.length);
            if (!(Q > 0.0)) continue;
            model.shape.check_domain(Q);
        } catch (const PhysicsError&) {
            continue;
        }
        out.push_back(s);
    }
    return out;
}

double rel_drift(double x, double x0) { return std::abs(x - x0) / std::max(std::abs(x0), 1e-300); }

// ---------------------------------------------------------------- simulate

void task_simulate(const Scenario& sc, Report& rep, Output& out, ordered_json& diagnostic) {
    const ELSystem sys = rotator_system(sc);
    const ChartState s0 = initial_states(sc, sys.model()).front();
    rep.result("initial_state", to_json(s0), "cli.initial_state");
    IntegratorOptions opt = sc.integrator;
    opt.rank_tol = sc.rank_tol;
    const Trajectory traj = integrate(sys, s0, sc.t_end, opt);
    {
        std::ofstream os = out.open("trajectory.csv");
        write_csv(os, traj);
    }
    const std::string op = "dynamics.integrate";
    rep.result("samples", traj.samples.size(), op);
    rep.result("steps", traj.steps, op);
    rep.result("rejected_steps", traj.rejected, op);
    rep.result("ill_conditioned_steps", traj.ill_conditioned, op);
    rep.result("frame_switches", traj.frame_switches.size(), op);
    rep.result("error_estimate", traj.error_estimate, op);
    rep.result("t_final", traj.samples.empty() ? s0.t : traj.samples.back().t, op);

    // largest deviation from the initial value over the run, relative to the
    // initial value's largest component
    double dP = 0.0, dM = 0.0, dWW = 0.0, dPP = 0.0, dQ = 0.0;
    if (!traj.samples.empty()) {
        const MonitorRecord& m0 = traj.samples.front().monitor;
        const double sP = std::max(max_abs(m0.P), 1e-300);
        double sM = 1e-300;
        for (double c : m0.M.components()) sM = std::max(sM, std::abs(c));
        for (const auto& s : traj.samples) {
            const MonitorRecord& m = s.monitor;
            dP = std::max(dP, max_abs(m.P - m0.P) / sP);
            for (std::size_t i = 0; i < 6; ++i)
                dM = std::max(dM, std::abs(m.M.components()[i] - m0.M.components()[i]) / sM);
            dWW = std::max(dWW, rel_drift(m.WW, m0.WW));
            dPP = std::max(dPP, rel_drift(m.PP, m0.PP));
            dQ = std::max(dQ, rel_drift(m.Q, m0.Q));
        }
    }
    const std::string mop = "dynamics.monitor";
    rep.result("drift", ordered_json{{"P", dP}, {"M", dM}, {"WW", dWW}, {"PP", dPP}, {"Q", dQ}}, mop);
    rep.result("stop", traj.stop == StopReason::completed     ? "completed"
                       : traj.stop == StopReason::singularity ? "singularity"
                                                               : "step_underflow",
               op);
    if (traj.stop != StopReason::completed) {
        diagnostic = ordered_json{{"kind", traj.stop == StopReason::singularity ? "SingularityError" : "StepUnderflow"},
                                  {"message", traj.diagnostic},
                                  {"op", op}};
    }
}

// ---------------------------------------------------------- hessian, kernel

void task_hessian(const Scenario& sc, Report& rep) {
    const ELSystem sys = rotator_system(sc);
    const auto states = initial_states(sc, sys.model());
    ordered_json rows = ordered_json::array();
    int rmin = 5, rmax = 0;
    for (const auto& s : states) {
        const HessianReport hr = hessian_report(sys, s, sc.rank_tol);
        ordered_json kern = ordered_json::array();
        for (const auto& k : hr.kernel) kern.push_back(to_json(k));
        const auto& sv = hr.singular_values;
        ordered_json row{{"state", to_json(s)},
                         {"Q", hr.Q},
                         {"det", hr.det},
                         {"det_closed_form", hr.det_closed_form},
                         {"universal_factor", hr.universal_factor},
                         {"singular_values", to_json(sv)},
                         {"sigma_ratio", sv[sv.size() - 1] / sv[0]},
                         {"rank", hr.rank},
                         {"kernel", kern}};
        if (hr.constraint_residual) row["constraint_value"] = *hr.constraint_residual;
        rows.push_back(row);
        rmin = std::min(rmin, hr.rank);
        rmax = std::max(rmax, hr.rank);
    }
    const std::string op = "hessian_lab.hessian_report";
    rep.result("states", rows, op);
    rep.result("rank_min", rmin, op);
    rep.result("rank_max", rmax, op);
    rep.result("degenerate_family", sys.model().shape.degenerate_family(), "shape.degenerate_family");
}

void task_kernel(const Scenario& sc, Report& rep) {
    const ELSystem sys = rotator_system(sc);
    const auto states = initial_states(sc, sys.model());
    if (!sys.model().shape.degenerate_family()) {
        ordered_json ranks = ordered_json::array();
        for (const auto& s : states) ranks.push_back(numeric_rank(singular_values(sys.hessian(s)), sc.rank_tol));
        rep.result("kernel_empty", true, "hessian_lab.kernel");
        rep.result("ranks", ranks, "hessian_lab.numeric_rank");
        return;
    }
    ordered_json rows = ordered_json::array();
    double worst_null = 0.0, worst_cos = 0.0, worst_constraint = 0.0;
    for (const auto& s : states) {
        const Mat5 H = sys.hessian(s);
        const KernelVector w = analytic_kernel(sys.model(), s);
        const double null = (H * w.unit).norm() / (H.norm() * w.unit.norm());
        const auto numeric = kernel(H, sc.rank_tol);
        double cosine = kNaN;
        if (!numeric.empty()) cosine = std::abs(numeric.front().dot(w.unit)) / (numeric.front().norm() * w.unit.norm());

        const double cf = constraint_functional(sys, s).value_or(kNaN);
        double closed = 0.0;
        if (sys.coupled())
            closed = -sys.charge() * 0.5 * sys.model().length * s.n_dot_norm() * constraint_chart(s, *sys.field());
        const double scale = w.scaled.norm() * std::max(el_rhs(sys, s).norm(), 1e-300);
        const double gap = std::abs(cf - closed) / scale;

        rows.push_back(ordered_json{{"state", to_json(s)},
                                    {"analytic_kernel", to_json(w.unit)},
                                    {"numeric_kernel_dim", numeric.size()},
                                    {"null_residual", null},
                                    {"cosine", cosine},
                                    {"constraint_value", cf},
                                    {"constraint_closed_form", closed}});
        worst_null = std::max(worst_null, null);
        worst_cos = std::isnan(cosine) ? 1.0 : std::max(worst_cos, 1.0 - cosine);
        worst_constraint = std::max(worst_constraint, gap);
    }
    rep.result("states", rows, "hessian_lab.analytic_kernel");
    rep.check_at_most("null_residual", worst_null, 1e-9, "hessian_lab.analytic_kernel");
    rep.check_at_most("one_minus_cosine", worst_cos, 1e-8, "hessian_lab.kernel");
    rep.check_at_most("constraint_vs_closed_form", worst_constraint, 1e-9, "hessian_lab.constraint_functional");
}

// ------------------------------------------------------------- verify-free

void task_verify_free(const Scenario& sc, Report& rep, Output& out) {
    const FreeSpec& fs = *sc.free;
    const int branch = sc.shape == "fundamental+" ? 1 : -1;
    const FourVector x0(fs.x0[0], fs.x0[1], fs.x0[2], fs.x0[3]);
    const FreeSolutionFrame frame = frame_from_parameters(sc.m, sc.l, fs.boost, fs.axis, sc.seed, x0);
    const PhaseProfile profile = PhaseProfile::parse(fs.profile, sc.base_dir);
    const auto grid = uniform_grid(fs.grid.t0, fs.grid.t1, fs.grid.points);
    const FreeTrajectory traj = free_trajectory(frame, profile, grid, branch);
    const RotatorModel model = traj.model();

    rep.result("frame",
               ordered_json{{"P", to_json(frame.P)}, {"W", to_json(frame.W)}, {"N", to_json(frame.N)},
                            {"condition_error", frame.condition_error()}},
               "analytic_solutions.frame_from_parameters");
    rep.result("phase_sign", traj.phase_sign, "analytic_solutions.free_trajectory");

    double res = 0.0, freq = 0.0, dP = 0.0, dW = 0.0;
    {
        std::ofstream os = out.open("free.csv");
        os << "t,lab_time,x1,x2,x3,v1,v2,v3,n1,n2,n3,phi,phidot,residual_norm\n";
        for (const auto& s : traj.samples) {
            const double r = free_residual(traj, s).norm();
            res = std::max(res, r);
            const CartesianMotion& c = s.lab;
            os << num(s.t) << ',' << num(s.lab_time) << ',' << num(c.x[0]) << ',' << num(c.x[1]) << ','
               << num(c.x[2]) << ',' << num(c.v[0]) << ',' << num(c.v[1]) << ',' << num(c.v[2]) << ','
               << num(c.n[0]) << ',' << num(c.n[1]) << ',' << num(c.n[2]) << ',' << num(s.phase.value) << ','
               << num(s.phase.first) << ',' << num(r) << '\n';
            if (traj.phase_sign != 0) {
                const FrequencyRelation fr = frequency_relation_check(frame, s);
                freq = std::max(freq, std::abs(fr.lhs - fr.rhs));
                const MonitorRecord m = monitor(model, c);
                dP = std::max(dP, max_abs(m.P - frame.P) / max_abs(frame.P));
                dW = std::max(dW, max_abs(m.W - frame.W) / max_abs(frame.W));
            }
        }
    }
    rep.check_at_most("max_residual", res, 1e-8, "analytic_solutions.free_residual");
    if (traj.phase_sign != 0) {
        rep.check_at_most("frequency_relation", freq, 1e-10, "analytic_solutions.frequency_relation_check");
        rep.check_at_most("noether_P_vs_frame", dP, 1e-9, "dynamics.monitor");
        rep.check_at_most("noether_W_vs_frame", dW, 1e-9, "dynamics.monitor");
    }

    const ActionDecomposition a = action_decomposition(traj);
    rep.result("action",
               ordered_json{{"direct", a.direct},
                            {"inertial", a.inertial},
                            {"phase", a.phase},
                            {"phase_integral", a.phase_integral},
                            {"split_gap", std::abs(a.direct - (a.inertial + a.phase))}},
               "analytic_solutions.action_decomposition");

    if (fs.witness) {
        const auto& w = *fs.witness;
        const IndeterminacyWitness iw = indeterminacy_witness(frame, w.omega, w.amp, w.nu, grid, branch);
        const std::string op = "analytic_solutions.indeterminacy_witness";
        rep.result("witness",
                   ordered_json{{"uniform", iw.uniform.profile.tag()},
                                {"modulated", iw.modulated.profile.tag()},
                                {"initial_gap", iw.initial_gap},
                                {"final_gap", iw.final_gap}},
                   op);
        rep.check_at_most("witness_initial_gap", iw.initial_gap, 1e-12, op);
        rep.check_at_most("witness_max_residual", iw.max_residual, 1e-8, op);
    }
}

// --------------------------------------------------------- verify-magnetic

void task_verify_magnetic(const Scenario& sc, Report& rep, Output& out) {
    const MagneticSpec& ms = *sc.magnetic;
    CircularSolutionSpec spec;
    spec.R = ms.R;
    spec.branch = ms.branch;
    spec.m = sc.m;
    spec.l = sc.l;
    spec.e = ms.e;
    spec.H = ms.H;
    spec.epsilon = ms.epsilon ? *ms.epsilon : circle_orientation(spec);
    rep.result("epsilon", spec.epsilon, ms.epsilon ? "cli.scenario" : "em_coupling.circle_orientation");

    if (ms.scan) {
        const auto rows = branch_scan(sc.m, sc.l, ms.e, ms.scan->radii, ms.scan->fields);
        std::ofstream os = out.open("branch_scan.csv");
        os << branch_scan_header() << '\n';
        std::size_t admissible = 0;
        for (const auto& r : rows) {
            os << branch_scan_row(r) << '\n';
            admissible += r.admissible ? 1 : 0;
        }
        rep.result("scan_rows", rows.size(), "em_coupling.branch_scan");
        rep.result("scan_admissible", admissible, "em_coupling.branch_scan");
    }

    rep.result("mu", circular_mu(spec), "em_coupling.circular_mu");
    const CircularSolution sol = magnetic_circular_solution(spec);
    const std::string op = "em_coupling.magnetic_circular_solution";
    rep.result("phidot", sol.phidot, op);
    rep.result("speed", sol.speed, op);

    const ELSystem sys = circle_system(spec);
    const UniformField fld = circle_field(spec);
    const double period = 2.0 * std::numbers::pi / std::abs(sol.phidot);
    std::vector<double> times;
    for (std::size_t i = 0; i <= ms.samples; ++i)
        times.push_back(ms.periods * period * static_cast<double>(i) / static_cast<double>(ms.samples));
    const auto cand = circle_candidate(spec, times, ms.phi0);

    double res = 0.0, cons = 0.0;
    {
        std::ofstream os = out.open("circle.csv");
        os << "t,x1,x2,x3,theta,phi,dx1,dx2,dx3,dtheta,dphi,residual_norm,constraint_F\n";
        for (const auto& m : cand) {
            const double r = residual(sys, m).norm();
            const double c = constraint_F(lift_state(m.state), fld);
            res = std::max(res, r);
            cons = std::max(cons, std::abs(c));
            const ChartState& s = m.state;
            os << num(s.t) << ',' << num(s.x[0]) << ',' << num(s.x[1]) << ',' << num(s.x[2]) << ',' << num(s.theta)
               << ',' << num(s.phi) << ',' << num(s.v[0]) << ',' << num(s.v[1]) << ',' << num(s.v[2]) << ','
               << num(s.dtheta) << ',' << num(s.dphi) << ',' << num(r) << ',' << num(c) << '\n';
        }
    }
    rep.check_at_most("max_residual", res, 1e-8, "dynamics.residual");
    rep.check_at_most("max_constraint_F", cons, 1e-12, "em_coupling.constraint_F");

    const ProbeReport probe = corotation_uniqueness_probe(spec);
    rep.result("probe",
               ordered_json{{"kernel_empty", probe.kernel_empty}, {"angle", probe.angle}, {"note", probe.note}},
               "em_coupling.corotation_uniqueness_probe");
}

// --------------------------------------------------------------------- toy

void task_toy(const Scenario& sc, Report& rep, Output& out) {
    const ToySpec& ts = *sc.toy;
    const auto grid = uniform_grid(ts.grid.t0, ts.grid.t1, ts.grid.points);
    ToyCandidate cand;
    if (ts.which == ToyCase::indeterminate) {
        cand = toy_indeterminate(ts.params, PhaseProfile::parse(ts.nu, sc.base_dir), grid);
        rep.result("epsilon", cand.epsilon, "toy_rotator.toy_indeterminate");
    } else {
        cand = toy_circle(ts.params, ts.which, ts.R, grid);
        rep.result("omega", cand.omega, "toy_rotator.toy_frequency");
        rep.result("epsilon", cand.epsilon, "toy_rotator.toy_circle");
    }

    double res = 0.0, cons = 0.0;
    {
        std::ofstream os = out.open("toy.csv");
        os << "t,r,phi,z,psi,dr,dphi,dz,dpsi,residual_norm,constraint\n";
        for (const auto& m : cand.samples) {
            const double r = toy_residual(ts.params, m).norm();
            const double c = toy_constraint(ts.params, m.state);
            res = std::max(res, r);
            cons = std::max(cons, std::abs(c));
            const ToyState& s = m.state;
            os << num(s.t) << ',' << num(s.r) << ',' << num(s.phi) << ',' << num(s.z) << ',' << num(s.psi) << ','
               << num(s.dr) << ',' << num(s.dphi) << ',' << num(s.dz) << ',' << num(s.dpsi) << ',' << num(r) << ','
               << num(c) << '\n';
        }
    }
    rep.check_at_most("max_residual", res, 1e-10, "toy_rotator.toy_residual");
    rep.result("max_constraint", cons, "toy_rotator.toy_constraint");

    const Mat4 H = toy_hessian_fd(ts.params, cand.samples.front().state);
    const Eigen::JacobiSVD<Mat4> svd(H);
    const double ratio = svd.singularValues()[3] / svd.singularValues()[0];
    rep.result("sigma_ratio", ratio, "toy_rotator.toy_hessian_fd");
}

// ------------------------------------------------------------------ scan-f

// Generic state (off the poles, moving, not co-rotating) whose angular
// velocities are rescaled to hit each requested Q.
ChartState scan_state(double Q, double l) {
    ChartState s;
    s.x = Vec3(0.3, -0.2, 0.1);
    s.theta = 1.1;
    s.phi = 0.4;
    s.v = Vec3(0.2, -0.1, 0.15);
    s.dtheta = 0.6;
    s.dphi = 0.8;
    const double k = std::sqrt(Q) * (1.0 - s.n().dot(s.v)) / (l * s.n_dot_norm());
    s.dtheta *= k;
    s.dphi *= k;
    return s;
}

std::string status_of(const std::exception& e) {
    if (dynamic_cast<const DomainError*>(&e)) return "domain_error";
    if (dynamic_cast<const SingularityError*>(&e)) return "singularity";
    if (dynamic_cast<const InadmissibleError*>(&e)) return "inadmissible";
    if (dynamic_cast<const DegenerateHessian*>(&e)) return "degenerate";
    return "error";
}

void task_scan_f(const Scenario& sc, Report& rep, Output& out) {
    const ScanSpec& ss = *sc.scan;
    std::vector<double> qs;
    for (std::size_t i = 0; i < ss.points; ++i) {
        const double u = ss.points == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(ss.points - 1);
        qs.push_back(ss.log_spacing ? ss.q_min * std::pow(ss.q_max / ss.q_min, u)
                                    : ss.q_min + (ss.q_max - ss.q_min) * u);
    }
    std::ofstream os = out.open("scan_f.csv");
    os << "shape,Q,factor,det,sigma_ratio,status\n";
    ordered_json summary = ordered_json::object();
    std::size_t failed_points = 0;
    double worst_degenerate = 0.0;
    bool any_degenerate = false;
    for (const auto& tag : ss.shapes) {
        const ShapeFunction f = ShapeFunction::parse(tag);
        const ELSystem sys(RotatorModel(f, sc.m, sc.l), std::nullopt, 0.0, sc.engine);
        double fmin = kNaN, fmax = kNaN;
        std::size_t ok = 0;
        for (double Q : qs) {
            double factor = kNaN, det = kNaN, ratio = kNaN;
            std::string status = "ok";
            try {
                f.check_domain(Q);
                factor = universal_factor(f, Q);
                const Mat5 H = sys.hessian(scan_state(Q, sc.l));
                det = H.determinant();
                const Eigen::VectorXd sv = singular_values(H);
                ratio = sv[sv.size() - 1] / sv[0];
            } catch (const std::exception& e) {
                status = status_of(e);
            }
            os << tag << ',' << num(Q) << ',' << num(factor) << ',' << num(det) << ',' << num(ratio) << ',' << status
               << '\n';
            if (status != "ok") {
                ++failed_points;
                continue;
            }
            ++ok;
            fmin = std::isnan(fmin) ? factor : std::min(fmin, factor);
            fmax = std::isnan(fmax) ? factor : std::max(fmax, factor);
            if (f.degenerate_family()) {
                any_degenerate = true;
                worst_degenerate = std::max(worst_degenerate, std::abs(factor));
            }
        }
        summary[tag] = ordered_json{{"points_ok", ok}, {"factor_min", fmin}, {"factor_max", fmax}};
    }
    rep.result("shapes", summary, "hessian_lab.universal_factor");
    rep.result("points_with_status", failed_points, "cli.scan_f");
    if (any_degenerate)
        rep.check_at_most("degenerate_family_max_factor", worst_degenerate, 1e-12, "hessian_lab.universal_factor");
}

ordered_json diagnostic_of(const PhysicsError& e) {
    ordered_json d{{"kind", "PhysicsError"}, {"message", e.what()}};
    if (const auto* dh = dynamic_cast<const DegenerateHessian*>(&e)) {
        d["kind"] = "DegenerateHessian";
        d["rank"] = dh->rank();
        d["kernel"] = dh->kernel();
        d["constraint_value"] = dh->constraint_value();
    } else if (dynamic_cast<const DomainError*>(&e)) {
        d["kind"] = "DomainError";
    } else if (dynamic_cast<const SingularityError*>(&e)) {
        d["kind"] = "SingularityError";
    } else if (dynamic_cast<const InadmissibleError*>(&e)) {
        d["kind"] = "InadmissibleError";
    }
    return d;
}

}  // namespace

RunOutcome run_scenario(const Scenario& sc) {
    RunOutcome res;
    Report rep;
    ordered_json diagnostic;
    res.status = "ok";
    try {
        std::filesystem::create_directories(sc.output_dir);
        Output out(sc.output_dir, sc.name, rep);
        if (sc.task == "simulate")
            task_simulate(sc, rep, out, diagnostic);
        else if (sc.task == "hessian")
            task_hessian(sc, rep);
        else if (sc.task == "kernel")
            task_kernel(sc, rep);
        else if (sc.task == "verify-free")
            task_verify_free(sc, rep, out);
        else if (sc.task == "verify-magnetic")
            task_verify_magnetic(sc, rep, out);
        else if (sc.task == "toy")
            task_toy(sc, rep, out);
        else if (sc.task == "scan-f")
            task_scan_f(sc, rep, out);
        else
            throw std::logic_error("unhandled task " + sc.task);

        if (!diagnostic.is_null()) {
            res.status = "refused";
            res.exit_code = exit_physics_refusal;
            res.message = diagnostic["message"].get<std::string>();
        } else if (!rep.all_passed()) {
            res.status = "check_failed";
            res.exit_code = exit_internal;
            res.message = "report checks failed";
        }
    } catch (const PhysicsError& e) {
        res.status = "refused";
        res.exit_code = exit_physics_refusal;
        res.message = e.what();
        diagnostic = diagnostic_of(e);
    } catch (const std::exception& e) {
        res.status = "error";
        res.exit_code = exit_internal;
        res.message = e.what();
        diagnostic = ordered_json{{"kind", "InternalError"}, {"message", e.what()}};
    }

    ordered_json doc;
    doc["rotlab_report"] = kReportVersion;
    doc["scenario"] = sc.resolved;
    doc["status"] = res.status;
    doc["exit_code"] = res.exit_code;
    if (!diagnostic.is_null()) doc["diagnostic"] = diagnostic;
    doc["results"] = rep.results();
    doc["checks"] = rep.checks();
    doc["files"] = rep.files();
    res.report = doc;

    res.report_path = sc.output_dir / (sc.name + ".report.json");
    std::error_code ec;
    std::filesystem::create_directories(sc.output_dir, ec);
    std::ofstream os(res.report_path);
    if (!os) {
        res.exit_code = exit_internal;
        res.status = "error";
        res.message = "cannot write " + res.report_path.string();
        return res;
    }
    os << doc.dump(2) << '\n';
    return res;
}

}  // namespace rotlab::cli
