#include "rotlab/analytic_solutions.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <gsl/gsl_spline.h>

#include "rotlab/dynamics.hpp"
#include "rotlab/errors.hpp"

namespace rotlab {

namespace {

double norm3(const std::array<double, 3>& a) { return std::sqrt(a[0] * a[0] + a[1] * a[1] + a[2] * a[2]); }

using Dual4 = std::array<Dual2, 4>;

Dual4 lift(const FourVector& a) { return {jet_constant(a[0]), jet_constant(a[1]), jet_constant(a[2]), jet_constant(a[3])}; }

FourVector value_part(const Dual4& a) { return {a[0].v.v, a[1].v.v, a[2].v.v, a[3].v.v}; }
FourVector first_part(const Dual4& a) { return {a[0].v.d, a[1].v.d, a[2].v.d, a[3].v.d}; }

double parse_number(const std::string& text, const std::string& tag) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(text, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != text.size()) throw DomainError("phase profile '" + tag + "': bad number '" + text + "'");
    return v;
}

// "omega=0.5,amp=0.3" -> lookup by key; every key must be known and present.
std::vector<double> parse_keys(const std::string& body, const std::vector<std::string>& keys, const std::string& tag) {
    std::vector<double> out(keys.size(), std::numeric_limits<double>::quiet_NaN());
    std::stringstream ss(body);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto eq = item.find('=');
        if (eq == std::string::npos) throw DomainError("phase profile '" + tag + "': expected key=value");
        const std::string key = item.substr(0, eq);
        const auto it = std::find(keys.begin(), keys.end(), key);
        if (it == keys.end()) throw DomainError("phase profile '" + tag + "': unknown key '" + key + "'");
        out[it - keys.begin()] = parse_number(item.substr(eq + 1), tag);
    }
    for (std::size_t i = 0; i < keys.size(); ++i)
        if (std::isnan(out[i])) throw DomainError("phase profile '" + tag + "': missing " + keys[i]);
    return out;
}

std::string fmt(double x) {
    std::ostringstream os;
    os.precision(17);
    os << x;
    return os.str();
}

}  // namespace

double FreeSolutionFrame::condition_error() const {
    const double m2 = m * m;
    const double w2 = 0.25 * m2 * m2 * l * l;
    const double w = std::sqrt(w2);
    double e = 0.0;
    e = std::max(e, std::abs(dot(P, P) - m2) / m2);
    e = std::max(e, std::abs(dot(W, W) + w2) / w2);
    e = std::max(e, std::abs(dot(W, P)) / (w * m));
    e = std::max(e, std::abs(dot(N, N) + 1.0));
    e = std::max(e, std::abs(dot(N, W)) / w);
    e = std::max(e, std::abs(dot(N, P)) / m);
    return e;
}

FourVector FreeSolutionFrame::binormal() const { return epsilon_contract3(N, W, P) / (0.5 * m * m * m * l); }

FreeSolutionFrame frame_from_parameters(double m, double l, const std::array<double, 3>& beta,
                                        const std::array<double, 3>& axis, std::uint64_t seed, const FourVector& x0) {
    if (!(m > 0.0) || !(l > 0.0)) throw DomainError("frame: m and l must be > 0");
    const LorentzBoost boost(beta);

    Vec3 a(axis[0], axis[1], axis[2]);
    if (!(norm3(axis) > 1e-300) || !std::isfinite(norm3(axis))) a = Vec3::UnitZ();
    a.normalize();
    // any unit vector orthogonal to a, then turned by a seeded angle about a
    const Vec3 helper = std::abs(a[0]) < 0.9 ? Vec3::UnitX() : Vec3::UnitY();
    const Vec3 e1 = a.cross(helper).normalized();
    const Vec3 e2 = a.cross(e1);
    std::mt19937_64 rng(seed);
    const double angle = std::uniform_real_distribution<double>(0.0, 2.0 * std::numbers::pi)(rng);
    const Vec3 t = std::cos(angle) * e1 + std::sin(angle) * e2;

    FreeSolutionFrame f;
    f.m = m;
    f.l = l;
    f.x0 = x0;
    f.P = boost.apply(FourVector(m, 0.0, 0.0, 0.0));
    const double s = 0.5 * m * m * l;
    f.W = boost.apply(FourVector(0.0, s * a[0], s * a[1], s * a[2]));
    f.N = boost.apply(FourVector(0.0, t[0], t[1], t[2]));
    if (!(f.condition_error() <= 1e-12)) throw DomainError("frame: normalization conditions lost to rounding");
    return f;
}

FourVector great_circle_n(const FreeSolutionFrame& frame, double phi) {
    return std::cos(phi) * frame.N - std::sin(phi) * frame.binormal();
}

PhaseProfile PhaseProfile::linear(double omega, double phi0) {
    PhaseProfile p;
    p.eval_ = [omega, phi0](double t) { return Jet{omega * t + phi0, omega, 0.0}; };
    p.tag_ = "linear:omega=" + fmt(omega);
    if (phi0 != 0.0) p.tag_ += ",phi0=" + fmt(phi0);
    return p;
}

PhaseProfile PhaseProfile::modulated(double omega, double amp, double nu, double phi0) {
    PhaseProfile p;
    p.eval_ = [=](double t) {
        const double s = std::sin(nu * t);
        const double c = std::cos(nu * t);
        return Jet{omega * t + amp * s + phi0, omega + amp * nu * c, -amp * nu * nu * s};
    };
    p.tag_ = "modulated:omega=" + fmt(omega) + ",amp=" + fmt(amp) + ",nu=" + fmt(nu);
    if (phi0 != 0.0) p.tag_ += ",phi0=" + fmt(phi0);
    return p;
}

PhaseProfile PhaseProfile::spline(std::vector<double> t, std::vector<double> phi) {
    if (t.size() != phi.size()) throw DomainError("spline profile: t and phi differ in length");
    if (t.size() < 3) throw DomainError("spline profile: need at least three knots");
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (!std::isfinite(t[i]) || !std::isfinite(phi[i])) throw DomainError("spline profile: non-finite knot");
        if (i > 0 && !(t[i] > t[i - 1])) throw DomainError("spline profile: t must be strictly increasing");
    }
    // the spline keeps pointers into its own copy; no accelerator so that
    // concurrent evaluation is safe
    std::shared_ptr<gsl_spline> sp(gsl_spline_alloc(gsl_interp_cspline, t.size()), gsl_spline_free);
    gsl_spline_init(sp.get(), t.data(), phi.data(), t.size());
    const double lo = t.front();
    const double hi = t.back();
    PhaseProfile p;
    p.eval_ = [sp, lo, hi](double x) {
        if (x < lo || x > hi) throw DomainError("spline profile: t = " + fmt(x) + " outside the knots");
        return Jet{gsl_spline_eval(sp.get(), x, nullptr), gsl_spline_eval_deriv(sp.get(), x, nullptr),
                   gsl_spline_eval_deriv2(sp.get(), x, nullptr)};
    };
    p.tag_ = "spline:<" + std::to_string(t.size()) + " knots>";
    return p;
}

PhaseProfile PhaseProfile::spline_file(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw DomainError("spline profile: cannot read " + file.string());
    std::vector<double> t, phi;
    std::string line;
    while (std::getline(in, line)) {
        if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
        std::istringstream ls(line);
        double a = 0.0, b = 0.0;
        if (!(ls >> a)) continue;
        if (!(ls >> b)) throw DomainError("spline profile: " + file.string() + ": expected two columns");
        t.push_back(a);
        phi.push_back(b);
    }
    PhaseProfile p = spline(std::move(t), std::move(phi));
    p.tag_ = "spline:" + file.string();
    return p;
}

PhaseProfile PhaseProfile::parse(const std::string& tag, const std::filesystem::path& base_dir) {
    const auto colon = tag.find(':');
    if (colon == std::string::npos) throw DomainError("phase profile '" + tag + "': expected kind:parameters");
    const std::string kind = tag.substr(0, colon);
    const std::string body = tag.substr(colon + 1);
    if (kind == "linear") {
        const auto v = parse_keys(body, {"omega"}, tag);
        return linear(v[0]);
    }
    if (kind == "modulated") {
        const auto v = parse_keys(body, {"omega", "amp", "nu"}, tag);
        return modulated(v[0], v[1], v[2]);
    }
    if (kind == "spline") {
        std::filesystem::path file(body);
        if (file.is_relative() && !base_dir.empty()) file = base_dir / file;
        return spline_file(file);
    }
    throw DomainError("phase profile '" + tag + "': unknown kind '" + kind + "'");
}

Jet PhaseProfile::operator()(double t) const {
    if (!eval_) throw DomainError("phase profile: empty");
    return eval_(t);
}

int PhaseProfile::validate(const std::vector<double>& grid, double l) const {
    if (grid.empty()) throw DomainError("phase profile: empty grid");
    int sign = 0;
    bool any_zero = false;
    double zero_at = 0.0;
    for (double t : grid) {
        const Jet j = (*this)(t);
        if (!std::isfinite(j.value) || !std::isfinite(j.first) || !std::isfinite(j.second))
            throw InadmissibleError("phase profile: non-finite value at t = " + fmt(t));
        if (!(std::abs(0.5 * l * j.first) < 1.0))
            throw InadmissibleError("phase profile: |l phidot/2| = " + fmt(std::abs(0.5 * l * j.first)) +
                                    " >= 1 at t = " + fmt(t));
        const int s = j.first > 0.0 ? 1 : (j.first < 0.0 ? -1 : 0);
        if (s == 0) {
            if (!any_zero) zero_at = t;
            any_zero = true;
        } else if (sign == 0) {
            sign = s;
        } else if (s != sign) {
            throw InadmissibleError("phase profile: phidot changes sign at t = " + fmt(t));
        }
        if (sign != 0 && any_zero)
            throw InadmissibleError("phase profile: phidot vanishes at t = " + fmt(zero_at) +
                                    " on a rotating profile");
    }
    return sign;
}

RotatorModel FreeTrajectory::model() const {
    return RotatorModel(branch > 0 ? ShapeFunction::fundamental_plus() : ShapeFunction::fundamental_minus(), frame.m,
                        frame.l);
}

FreeSample free_sample(const FreeSolutionFrame& frame, const PhaseProfile& profile, int branch, int phase_sign,
                       double t) {
    if (branch != 1 && branch != -1) throw DomainError("free solution: branch must be +1 or -1");
    const int sg = phase_sign >= 0 ? 1 : -1;  // any fixed n on the inertial branch
    const double m = frame.m;
    const double half_l = 0.5 * frame.l;

    FreeSample out;
    out.t = t;
    out.phase = profile(t);
    const Dual2 ph = jet_from(out.phase);
    const Dual2 tt = jet_variable(t);
    const Dual2 c = cos(ph);
    const Dual2 s = sin(ph);

    const FourVector B = (branch * sg) * frame.binormal();
    const Dual4 P = lift(frame.P), N = lift(frame.N), Bv = lift(B), X0 = lift(frame.x0);
    Dual4 x, k;
    for (int mu = 0; mu < 4; ++mu) {
        const Dual2 r = N[mu] * s + Bv[mu] * c;
        const Dual2 n = N[mu] * c - Bv[mu] * s;
        x[mu] = P[mu] * tt / m + (branch * half_l) * r + X0[mu];
        k[mu] = P[mu] / m + double(sg) * n;
    }
    out.covariant.x = value_part(x);
    out.covariant.xdot = first_part(x);
    out.covariant.k = value_part(k);
    out.covariant.kdot = first_part(k);

    // lab time T = x^0: d/dT = (1/T') d/dt, d2/dT2 = (f'' T' - f' T'') / T'^3
    const Jet T = jet_of(x[0]);
    if (!(T.first > 0.0)) throw SingularityError("free solution: x^0 not increasing");
    out.lab_time = T.value;
    out.dlab_dt = T.first;
    auto lab = [&](const Dual2& f, double& value, double& d1, double& d2) {
        const Jet j = jet_of(f);
        value = j.value;
        d1 = j.first / T.first;
        d2 = (j.second * T.first - j.first * T.second) / (T.first * T.first * T.first);
    };
    CartesianMotion& cm = out.lab;
    cm.t = T.value;
    for (int i = 0; i < 3; ++i) {
        lab(x[i + 1], cm.x[i], cm.v[i], cm.a[i]);
        lab(k[i + 1] / k[0], cm.n[i], cm.nd[i], cm.ndd[i]);
    }
    out.chart = to_chart(cm);
    return out;
}

FreeTrajectory free_trajectory(const FreeSolutionFrame& frame, const PhaseProfile& profile,
                               const std::vector<double>& grid, int branch) {
    if (branch != 1 && branch != -1) throw DomainError("free solution: branch must be +1 or -1");
    FreeTrajectory traj;
    traj.frame = frame;
    traj.profile = profile;
    traj.branch = branch;
    traj.phase_sign = profile.validate(grid, frame.l);
    traj.samples.reserve(grid.size());
    for (double t : grid) traj.samples.push_back(free_sample(frame, profile, branch, traj.phase_sign, t));
    return traj;
}

Vec5 free_residual(const FreeTrajectory& traj, const FreeSample& s) {
    if (traj.phase_sign == 0) {
        Vec5 r;
        r << s.lab.a, s.lab.nd.norm(), s.lab.ndd.norm();
        return r;
    }
    return residual(ELSystem(traj.model()), s.lab);
}

FrequencyRelation frequency_relation_check(const FreeSolutionFrame& frame, const FreeSample& s) {
    const double psi = rapidity(s.covariant.xdot, frame.P);
    return {std::abs(s.phase.first), (2.0 / frame.l) * std::tanh(psi)};
}

ActionDecomposition action_decomposition(const FreeTrajectory& traj) {
    const auto& smp = traj.samples;
    if (smp.size() < 2) throw DomainError("action: need at least two samples");
    const RotatorModel model = traj.model();
    auto integrand = [&](double t) {
        const FreeSample s = free_sample(traj.frame, traj.profile, traj.branch, traj.phase_sign, t);
        return lagrangian(model, s.chart.state) * s.dlab_dt;
    };
    ActionDecomposition out{};
    double direct = 0.0;
    double phase = 0.0;
    for (std::size_t i = 1; i < smp.size(); ++i) {
        const double a = smp[i - 1].t;
        const double b = smp[i].t;
        direct += boost::math::quadrature::gauss_kronrod<double, 15>::integrate(integrand, a, b, 8, 1e-13);
        phase += 0.5 * (b - a) * (std::abs(smp[i - 1].phase.first) + std::abs(smp[i].phase.first));
    }
    out.direct = direct;
    out.inertial = -traj.frame.m * (smp.back().t - smp.front().t);
    out.phase_integral = phase;
    out.phase = -traj.branch * traj.frame.m * 0.5 * traj.frame.l * phase;
    return out;
}

IndeterminacyWitness indeterminacy_witness(const FreeSolutionFrame& frame, double omega, double amp, double nu,
                                           const std::vector<double>& grid, int branch) {
    IndeterminacyWitness w{free_trajectory(frame, PhaseProfile::linear(omega), grid, branch),
                           free_trajectory(frame, PhaseProfile::modulated(omega - amp * nu, amp, nu), grid, branch),
                           0.0, 0.0, 0.0};
    const FreeSample a = free_sample(frame, w.uniform.profile, branch, w.uniform.phase_sign, 0.0);
    const FreeSample b = free_sample(frame, w.modulated.profile, branch, w.modulated.phase_sign, 0.0);
    const auto qa = a.chart.state.q(), qb = b.chart.state.q();
    const auto va = a.chart.state.qd(), vb = b.chart.state.qd();
    for (int i = 0; i < 5; ++i) w.initial_gap = std::max({w.initial_gap, std::abs(qa[i] - qb[i]), std::abs(va[i] - vb[i])});
    w.final_gap = (w.uniform.samples.back().lab.x - w.modulated.samples.back().lab.x).norm();
    for (const FreeTrajectory* tr : {&w.uniform, &w.modulated})
        for (const auto& s : tr->samples) w.max_residual = std::max(w.max_residual, free_residual(*tr, s).norm());
    return w;
}

std::vector<double> uniform_grid(double t0, double t1, std::size_t points) {
    if (points < 2) throw DomainError("grid: need at least two points");
    std::vector<double> g(points);
    for (std::size_t i = 0; i < points; ++i)
        g[i] = i + 1 == points ? t1 : t0 + (t1 - t0) * double(i) / double(points - 1);
    return g;
}

}  // namespace rotlab
