#include "doctest.h"

#include <cmath>
#include <numbers>
#include <sstream>

#include "rotlab/dynamics.hpp"
#include "rotlab/errors.hpp"
#include "rotlab/hessian_lab.hpp"
#include "support.hpp"

using namespace rotlab;
using namespace testing_support;

namespace {

RotatorModel smooth_model(double m = 1.0, double l = 1.0) { return RotatorModel(ShapeFunction::smooth(), m, l); }

Mat3 random_rotation(Rng& rng) {
    Eigen::Quaterniond q(rng.normal(), rng.normal(), rng.normal(), rng.normal());
    return q.normalized().toRotationMatrix();
}

double drift(const std::vector<double>& series) {
    double scale = 0.0;
    for (double v : series) scale = std::max(scale, std::abs(v));
    double worst = 0.0;
    for (double v : series) worst = std::max(worst, std::abs(v - series.front()));
    return worst / scale;
}

}  // namespace

TEST_CASE("el_rhs: inertial states of the smooth shape are force free") {
    Rng rng(41);
    const ELSystem sys(smooth_model(1.3, 0.7));
    for (int i = 0; i < 50; ++i) {
        ChartState s = random_state(rng);
        s.dtheta = s.dphi = 0.0;
        CHECK(el_rhs(sys, s).norm() <= 1e-13);
    }
}

TEST_CASE("el_rhs: static state in a uniform electric field feels the Lorentz force") {
    Rng rng(42);
    for (int i = 0; i < 50; ++i) {
        ChartState s = random_state(rng);
        s.v.setZero();
        const RotatorModel model(ShapeFunction::rational_sqrt(), 1.0, 1.1);
        UniformField fld;
        fld.E = Vec3(rng.normal(), rng.normal(), rng.normal());
        fld.H = Vec3(rng.normal(), rng.normal(), rng.normal());
        const double e = rng.uniform(-1.0, 1.0);
        const Vec5 zf = el_rhs(ELSystem(model), s);
        const Vec5 z = el_rhs(ELSystem(model, fld, e), s);
        const Vec5 dz = z - zf;
        CHECK((dz.head<3>() - e * fld.E).norm() <= 1e-12 * std::max(1.0, zf.norm()));
        CHECK(dz.tail<2>().norm() <= 1e-12 * std::max(1.0, zf.norm()));
    }
}

TEST_CASE("el_rhs: forward mode and finite differences agree") {
    Rng rng(43);
    const RotatorModel model(ShapeFunction::rational_sqrt(), 1.0, 0.8);
    UniformField fld;
    fld.E = Vec3(0.3, -0.2, 0.5);
    fld.H = Vec3(-0.4, 0.1, 0.7);
    const ELSystem ad(model, fld, 0.8);
    const ELSystem fd(model, fld, 0.8, DerivativeEngine::finite_difference);
    for (int i = 0; i < 30; ++i) {
        const ChartState s = random_state(rng);
        const Vec5 za = el_rhs(ad, s), zf = el_rhs(fd, s);
        CHECK((za - zf).norm() <= 1e-5 * za.norm());
    }
}

TEST_CASE("accelerations") {
    Rng rng(44);
    SUBCASE("smooth shape: unique solution") {
        const ELSystem sys(smooth_model(1.2, 0.9));
        for (int i = 0; i < 100; ++i) {
            const ChartState s = with_q(random_state(rng), rng.uniform(0.05, 0.9), 0.9);
            const AccelerationResult a = accelerations(sys, s);
            const ELTerms<5> t = sys.terms(s);
            CHECK((t.hessian * a.qdd - t.z).norm() <= 1e-12 * t.z.norm());
            CHECK(a.solve_residual <= 1e-12);
            CHECK_FALSE(a.ill_conditioned);
        }
    }
    SUBCASE("fundamental shape: degenerate Hessian carries the kernel") {
        const ELSystem sys(RotatorModel(ShapeFunction::fundamental_plus(), 1.0, 1.0));
        const ChartState s = random_state(rng);
        try {
            accelerations(sys, s);
            FAIL("expected DegenerateHessian");
        } catch (const DegenerateHessian& e) {
            CHECK(e.rank() == 4);
            REQUIRE(e.kernel().size() == 1);
            const KernelVector w = analytic_kernel(sys.model(), s);
            double dot = 0.0;
            for (int i = 0; i < 5; ++i) dot += e.kernel()[0][i] * w.unit[i];
            CHECK(std::abs(dot) >= 1.0 - 1e-8);
            CHECK(std::abs(e.constraint_value()) <= 1e-9);
        }
    }
    SUBCASE("condition numbers above the threshold are flagged") {
        // rational_sqrt: the angular block grows like 1/sqrt(Q) as Q -> 0
        const ELSystem sys(RotatorModel(ShapeFunction::rational_sqrt(), 1.0, 1.0));
        const ChartState s = with_q(random_state(rng), 1e-26, 1.0);
        CHECK_THROWS_AS(accelerations(sys, s), DegenerateHessian);
        const AccelerationResult a = accelerations(sys, s, 1e-16);
        CHECK(a.condition > kIllConditioned);
        CHECK(a.ill_conditioned);
        const ChartState ok = with_q(random_state(rng), 0.3, 1.0);
        CHECK_FALSE(accelerations(sys, ok, 1e-16).ill_conditioned);
    }
}

TEST_CASE("accelerations are equivariant under rigid rotations") {
    Rng rng(45);
    const RotatorModel model = smooth_model(1.0, 1.3);
    UniformField fld;
    fld.E = Vec3(0.2, 0.1, -0.3);
    fld.H = Vec3(0.5, -0.2, 0.4);
    const ELSystem sys(model, fld, 0.7);
    for (int i = 0; i < 50; ++i) {
        const ChartState s = with_q(random_state(rng), rng.uniform(0.05, 0.8), model.length);
        const Rotation r{random_rotation(rng)};
        const ChartState sr = rotate(s, r);
        const AccelerationResult a = accelerations(sys, s);
        const AccelerationResult ar = accelerations(sys.rotated(r), sr);
        const CartesianMotion c = r.apply(to_cartesian(ChartMotion{s, a.qdd}));
        const CartesianMotion cr = to_cartesian(ChartMotion{sr, ar.qdd});
        const double scale = std::max(1.0, c.a.norm() + c.ndd.norm());
        CHECK((c.a - cr.a).norm() <= 1e-9 * scale);
        CHECK((c.ndd - cr.ndd).norm() <= 1e-9 * scale);
    }
}

TEST_CASE("accelerations near the poles use the rotated frame") {
    const ELSystem sys(smooth_model());
    ChartState s;
    s.theta = 0.05;
    s.phi = 1.0;
    s.v = Vec3(0.1, 0.2, -0.1);
    s.dtheta = 0.3;
    s.dphi = 2.0;
    const AccelerationResult a = accelerations(sys, s);
    CHECK(a.pole_frame);
    CHECK(residual(sys, ChartMotion{s, a.qdd}).norm() <= 1e-8 * std::max(1.0, el_rhs(sys, s).norm()));
}

TEST_CASE("free integration of a regular rotator conserves its charges") {
    Rng rng(46);
    const double l = 1.0;
    const ELSystem sys(smooth_model(1.0, l));
    const ChartState s0 = with_q(random_state(rng, 0.5), 0.4, l);
    IntegratorOptions opt;
    opt.rel_tol = 1e-10;
    const Trajectory tr = integrate(sys, s0, s0.t + 100.0 * l, opt);
    REQUIRE(tr.stop == StopReason::completed);
    CHECK(tr.samples.back().t == doctest::Approx(s0.t + 100.0 * l));
    std::vector<std::vector<double>> P(4), M(6);
    std::vector<double> Q, WW;
    for (const auto& smp : tr.samples) {
        for (int k = 0; k < 4; ++k) P[k].push_back(smp.monitor.P[k]);
        for (int k = 0; k < 6; ++k) M[k].push_back(smp.monitor.M.components()[k]);
        Q.push_back(smp.monitor.Q);
        WW.push_back(smp.monitor.WW);
    }
    double pmax = 0.0;
    for (int k = 0; k < 4; ++k) pmax = std::max(pmax, std::abs(P[k].front()));
    for (int k = 0; k < 4; ++k) {
        double worst = 0.0;
        for (double v : P[k]) worst = std::max(worst, std::abs(v - P[k].front()));
        CHECK(worst / pmax <= 1e-8);
    }
    CHECK(drift(Q) <= 1e-8);
    CHECK(drift(WW) <= 1e-7);
    for (int k = 0; k < 6; ++k) CHECK(drift(M[k]) <= 1e-7);
    for (std::size_t i = 1; i < tr.samples.size(); ++i) CHECK(tr.samples[i].t > tr.samples[i - 1].t);
}

TEST_CASE("halving the step changes the end state by less than the error estimate") {
    Rng rng(47);
    const ELSystem sys(smooth_model(1.0, 1.0));
    const ChartState s0 = with_q(random_state(rng), 0.3, 1.0);
    IntegratorOptions opt;
    opt.rel_tol = 1e-8;
    const Trajectory a = integrate(sys, s0, s0.t + 10.0, opt);
    IntegratorOptions half = opt;
    half.max_step = 0.5 * 10.0 / static_cast<double>(a.steps);
    const Trajectory b = integrate(sys, s0, s0.t + 10.0, half);
    CHECK(b.steps > a.steps);
    const auto& ea = a.samples.back().state;
    const auto& eb = b.samples.back().state;
    const auto qa = ea.q(), qb = eb.q(), va = ea.qd(), vb = eb.qd();
    double diff = 0.0;
    for (int i = 0; i < 5; ++i) {
        double dphi = qa[i] - qb[i];
        if (i == 4) dphi = std::remainder(dphi, 2.0 * std::numbers::pi);
        diff = std::max({diff, std::abs(dphi), std::abs(va[i] - vb[i])});
    }
    CHECK(diff < a.error_estimate);
}

TEST_CASE("integration through a chart pole switches frames and keeps conservation") {
    const ELSystem sys(smooth_model());
    ChartState s0;
    s0.theta = std::numbers::pi / 2;
    s0.phi = 0.3;
    s0.v = Vec3(0.05, -0.02, 0.0);
    s0.dtheta = -0.5;
    s0.dphi = 0.0;
    const Trajectory tr = integrate(sys, s0, 20.0);
    REQUIRE(tr.stop == StopReason::completed);
    CHECK_FALSE(tr.frame_switches.empty());
    const auto& P0 = tr.samples.front().monitor.P;
    for (const auto& smp : tr.samples)
        for (int k = 0; k < 4; ++k) CHECK(std::abs(smp.monitor.P[k] - P0[k]) <= 1e-8 * max_abs(P0));
}

TEST_CASE("integration halts on singularity events") {
    SUBCASE("Q leaves the declared shape domain") {
        Rng rng(48);
        ChartState s0 = with_q(random_state(rng), 0.2, 1.0);
        s0.v.setZero();
        const RotatorModel model(ShapeFunction::custom({1.0, 0.0, 1.0}, 0.19, 0.21), 1.0, 1.0);
        UniformField fld;
        fld.E = 3.0 * s0.n();
        const Trajectory tr = integrate(ELSystem(model, fld, 1.0), s0, s0.t + 50.0);
        CHECK(tr.stop == StopReason::singularity);
        CHECK(tr.diagnostic.find("domain") != std::string::npos);
        CHECK(tr.samples.back().t < s0.t + 50.0);
    }
    SUBCASE("degenerate shapes refuse to start") {
        Rng rng(49);
        CHECK_THROWS_AS(integrate(ELSystem(RotatorModel(ShapeFunction::fundamental_plus(), 1, 1)), random_state(rng), 1.0),
                        DegenerateHessian);
    }
}

TEST_CASE("sampled output lands on the grid") {
    Rng rng(50);
    const ELSystem sys(smooth_model());
    const ChartState s0 = with_q(random_state(rng), 0.2, 1.0);
    IntegratorOptions opt;
    opt.sample_dt = 0.25;
    const Trajectory tr = integrate(sys, s0, s0.t + 2.0, opt);
    REQUIRE(tr.samples.size() == 9);
    for (std::size_t i = 0; i < tr.samples.size(); ++i)
        CHECK(tr.samples[i].t == doctest::Approx(s0.t + 0.25 * static_cast<double>(i)).epsilon(1e-14));
}

TEST_CASE("residual") {
    const ELSystem sys(smooth_model());
    ChartMotion inertial;
    inertial.state.theta = 1.1;
    inertial.state.v = Vec3(0.2, 0.1, 0.3);
    CHECK(residual(sys, inertial).norm() <= 1e-14);

    Rng rng(51);
    const ChartState s = with_q(random_state(rng), 0.5, 1.0);
    const AccelerationResult a = accelerations(sys, s);
    CHECK(residual(sys, ChartMotion{s, a.qdd}).norm() <= 1e-12 * el_rhs(sys, s).norm());
    CHECK(residual(sys, ChartMotion{s, 1.01 * a.qdd}).norm() > 1e-4 * el_rhs(sys, s).norm());
}

TEST_CASE("CSV export") {
    Rng rng(52);
    const ChartState s0 = with_q(random_state(rng), 0.2, 1.0);
    IntegratorOptions opt;
    opt.sample_dt = 0.5;
    const Trajectory tr = integrate(ELSystem(smooth_model()), s0, s0.t + 1.0, opt);
    std::ostringstream os;
    write_csv(os, tr);
    std::istringstream is(os.str());
    std::string line;
    std::getline(is, line);
    CHECK(line == "t,x1,x2,x3,theta,phi,dx1,dx2,dx3,dtheta,dphi,P0,P1,P2,P3,PP,WW,Q,tanhPsi,residual_norm");
    int rows = 0;
    while (std::getline(is, line)) {
        ++rows;
        CHECK(std::count(line.begin(), line.end(), ',') == 19);
        std::istringstream fields(line);
        std::string first;
        std::getline(fields, first, ',');
        CHECK(std::stod(first) == tr.samples[static_cast<std::size_t>(rows - 1)].t);
    }
    CHECK(rows == 3);
}
