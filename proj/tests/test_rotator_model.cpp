#include "doctest.h"

#include <cmath>
#include <numbers>

#include "rotlab/rotator_model.hpp"
#include "support.hpp"

using namespace rotlab;
using namespace testing_support;

namespace {

// central differences of f = value(Q), independent of the closed-form eval
ShapeValues fd_shape(const ShapeFunction& f, double Q) {
    const double h = 2e-3 * Q;
    const double fp = f.value(Q + h), fm = f.value(Q - h), f0 = f.value(Q);
    const double fp2 = f.value(Q + 2 * h), fm2 = f.value(Q - 2 * h);
    return {f0, (8 * (fp - fm) - (fp2 - fm2)) / (12 * h), (-fp2 + 16 * fp - 30 * f0 + 16 * fm - fm2) / (12 * h * h)};
}

std::vector<ShapeFunction> all_shapes() {
    return {ShapeFunction::fundamental_plus(), ShapeFunction::fundamental_minus(), ShapeFunction::sqrt_poly(0.7),
            ShapeFunction::rational_sqrt(),     ShapeFunction::smooth(),            ShapeFunction::custom({1.0, 0.3, 0.2}, 0.0, 10.0),
            ShapeFunction::custom({1.0, 0.0, 0.5}, 0.0, 10.0)};
}

}  // namespace

TEST_CASE("shape_eval examples") {
    const auto fp = ShapeFunction::fundamental_plus().eval(1.0);
    CHECK(fp.f == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
    CHECK(fp.df == doctest::Approx(1.0 / (4.0 * std::sqrt(2.0))).epsilon(1e-15));
    // d/dQ of 1/(4 sqrt(Q) sqrt(1+sqrt Q)) at Q = 1: -1/(8 sqrt 2) - 1/(32 sqrt 2)
    CHECK(fp.d2f == doctest::Approx(-5.0 / (32.0 * std::sqrt(2.0))).epsilon(1e-14));

    const auto sm = ShapeFunction::smooth().eval(0.0);
    CHECK(sm.f == 1.0);
    CHECK(sm.df == 0.5);
    CHECK(sm.d2f == -0.25);

    for (double Q : {0.01, 0.3, 1.0, 7.0}) {
        const auto a = ShapeFunction::sqrt_poly(1.0).eval(Q);
        const auto b = ShapeFunction::fundamental_plus().eval(Q);
        CHECK(a.f == doctest::Approx(b.f).epsilon(1e-15));
        CHECK(a.df == doctest::Approx(b.df).epsilon(1e-15));
        CHECK(a.d2f == doctest::Approx(b.d2f).epsilon(1e-15));
    }
}

TEST_CASE("shape_eval matches finite differences for every shape") {
    for (const auto& f : all_shapes()) {
        for (double Q : {0.05, 0.2, 0.5, 0.8}) {
            const auto v = f.eval(Q);
            const auto o = fd_shape(f, Q);
            CHECK(v.f == doctest::Approx(o.f).epsilon(1e-14));
            CHECK(v.df == doctest::Approx(o.df).epsilon(1e-8));
            CHECK(v.d2f == doctest::Approx(o.d2f).epsilon(1e-5));
        }
    }
}

TEST_CASE("shape_eval errors") {
    CHECK_THROWS_AS(ShapeFunction::smooth().eval(-0.1), DomainError);
    CHECK_THROWS_AS(ShapeFunction::fundamental_minus().eval(1.0), DomainError);
    CHECK_THROWS_AS(ShapeFunction::fundamental_minus().eval(2.0), DomainError);
    CHECK_THROWS_AS(ShapeFunction::fundamental_plus().eval(0.0), SingularityError);
    CHECK_THROWS_AS(ShapeFunction::rational_sqrt().eval(0.0), SingularityError);
    CHECK_THROWS_AS(ShapeFunction::custom({1.0, 0.5}, 0.0, 2.0).eval(3.0), DomainError);
    CHECK_NOTHROW(ShapeFunction::custom({1.0, 0.0, 0.5}, 0.0, 2.0).eval(0.0));
}

TEST_CASE("shape tags round-trip") {
    for (const std::string tag : {"fundamental+", "fundamental-", "rational_sqrt", "smooth", "sqrt_poly:a=0.5",
                                  "custom:1,0.5,0.25;qmax=3"}) {
        const auto f = ShapeFunction::parse(tag);
        CHECK(ShapeFunction::parse(f.tag()).tag() == f.tag());
    }
    CHECK(ShapeFunction::parse("sqrt_poly:a=2").a() == 2.0);
    CHECK_THROWS_AS(ShapeFunction::parse("sqrt_poly:a=x"), ScenarioError);
    CHECK_THROWS_AS(ShapeFunction::parse("quartic"), ScenarioError);
}

TEST_CASE("q_invariant") {
    ChartState s;
    s.theta = std::numbers::pi / 2;
    s.phi = 0.0;
    s.dphi = 0.5;
    CHECK(q_invariant(s, 2.0) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(q_invariant(ChartState{}, 1.3) == 0.0);

    ChartState bad;
    bad.theta = std::numbers::pi / 2;
    bad.v = Vec3(1.0, 0.0, 0.0);
    CHECK_THROWS_AS(q_invariant(bad, 1.0), SingularityError);
}

TEST_CASE("q_invariant: chart and covariant formulas agree, also after boosts") {
    Rng rng(21);
    for (int i = 0; i < 300; ++i) {
        const ChartState s = random_state(rng);
        const double l = rng.uniform(0.3, 2.0);
        const double Qc = q_invariant(s, l);
        const CovariantKinematics c = lift_state(s);
        CHECK(q_invariant(c, l) == doctest::Approx(Qc).epsilon(1e-12));

        // boost, then re-impose the gauge x^0 = t', k^0 = 1 in the new frame
        const Vec3 b = rng.direction() * rng.uniform(0.0, 0.8);
        const LorentzBoost L({b[0], b[1], b[2]});
        const FourVector xd = L.apply(c.xdot), k = L.apply(c.k), kd = L.apply(c.kdot);
        CartesianMotion cm;
        cm.v = Vec3(xd[1], xd[2], xd[3]) / xd[0];
        cm.n = Vec3(k[1], k[2], k[3]) / k[0];
        cm.nd = (Vec3(kd[1], kd[2], kd[3]) * k[0] - Vec3(k[1], k[2], k[3]) * kd[0]) / (k[0] * k[0]) / xd[0];
        if (std::abs(cm.n[2]) > 0.99) continue;
        const ChartState sb = to_chart(cm).state;
        CHECK(q_invariant(sb, l) == doctest::Approx(Qc).epsilon(1e-10));
    }
}

TEST_CASE("lagrangian examples") {
    const RotatorModel fp(ShapeFunction::fundamental_plus(), 1.0, 2.0);
    ChartState s;
    s.theta = std::numbers::pi / 2;
    s.dphi = 0.5;
    CHECK(lagrangian(fp, s) == doctest::Approx(-std::sqrt(2.0)).epsilon(1e-15));

    const RotatorModel sm(ShapeFunction::smooth(), 1.7, 1.0);
    CHECK(lagrangian(sm, ChartState{}) == doctest::Approx(-1.7).epsilon(1e-15));

    ChartState fast;
    fast.theta = 1.0;
    fast.v = Vec3(0.0, 0.0, -(1.0 - 1e-6));
    const double L = lagrangian(sm, fast);
    CHECK(L < 0.0);
    CHECK(L > -1.7 * 2e-3);

    CHECK_THROWS_AS(RotatorModel(ShapeFunction::smooth(), 0.0, 1.0), DomainError);
    CHECK_THROWS_AS(RotatorModel(ShapeFunction::smooth(), 1.0, -1.0), DomainError);
}

TEST_CASE("lift_state") {
    ChartState pole;
    pole.theta = 0.0;
    const auto c0 = lift_state(pole);
    CHECK(c0.k[0] == 1.0);
    CHECK(std::abs(c0.k[1]) < 1e-15);
    CHECK(std::abs(c0.k[2]) < 1e-15);
    CHECK(c0.k[3] == 1.0);

    Rng rng(22);
    for (int i = 0; i < 200; ++i) {
        const ChartState s = random_state(rng);
        const auto c = lift_state(s);
        CHECK(std::abs(dot(c.k, c.k)) < 1e-15);
        CHECK(dot(c.k, c.xdot) == doctest::Approx(1.0 - s.n().dot(s.v)).epsilon(1e-14));
        CHECK(c.xdot[0] == 1.0);
        CHECK(c.x[0] == s.t);
        CHECK(std::abs(dot(c.k, c.kdot)) < 1e-14);
    }
}

TEST_CASE("Noether charges match the closed-form Casimirs for all shapes") {
    Rng rng(23);
    for (const auto& f : all_shapes()) {
        const RotatorModel model(f, rng.uniform(0.5, 2.0), rng.uniform(0.5, 2.0));
        for (int i = 0; i < 300; ++i) {
            ChartState s = random_state(rng);
            s = with_q(s, rng.uniform(0.02, 0.9), model.length);
            const double Q = q_invariant(s, model.length);
            const ChargeSet ch = momenta(model, lift_state(s));
            const CasimirPair cf = casimirs_closed_form(model, Q);
            CHECK(rel(ch.PP, cf.PP) <= 1e-10);
            CHECK(rel(ch.WW, cf.WW) <= 1e-9);
            CHECK(rel(dot(ch.P, ch.P), ch.PP) == 0.0);
            const ShapeValues v = f.eval(Q);
            CHECK(rel(ch.PP, model.mass * model.mass * v.f * (v.f - 4.0 * Q * v.df)) <= 1e-10);
            CHECK(std::abs(dot(ch.W, ch.P)) <= 1e-10 * std::max(1.0, max_abs(ch.W) * max_abs(ch.P)));
            const FourVector W = pauli_lubanski(ch.M, ch.P);
            for (int k = 0; k < 4; ++k) CHECK(W[k] == ch.W[k]);
        }
    }
}

TEST_CASE("fundamental branches have fixed Casimirs") {
    Rng rng(24);
    for (const auto& f : {ShapeFunction::fundamental_plus(), ShapeFunction::fundamental_minus()}) {
        const double m = 1.3, l = 0.8;
        const RotatorModel model(f, m, l);
        for (int i = 0; i < 10000; ++i) {
            ChartState s = random_state(rng);
            if (f.kind() == ShapeKind::fundamental_minus) s = with_q(s, rng.uniform(0.001, 0.95), l);
            const ChargeSet ch = momenta(model, lift_state(s));
            REQUIRE(rel(ch.PP, m * m) <= 1e-10);
            REQUIRE(rel(ch.WW, -0.25 * std::pow(m, 4) * l * l) <= 1e-10);
        }
        const CasimirPair cf = casimirs_closed_form(model, 0.37);
        CHECK(rel(cf.PP, m * m) <= 1e-14);
        CHECK(rel(cf.WW, -0.25 * std::pow(m, 4) * l * l) <= 1e-14);
    }
    const CasimirPair sp = casimirs_closed_form(RotatorModel(ShapeFunction::sqrt_poly(1.5), 1.0, 1.0), 0.6);
    CHECK(sp.PP == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(sp.WW == doctest::Approx(-0.25 * std::pow(1.5, 4)).epsilon(1e-14));
}

TEST_CASE("casimirs_closed_form examples") {
    const RotatorModel rs(ShapeFunction::rational_sqrt(), 1.0, 1.0);
    CHECK(std::abs(casimirs_closed_form(rs, 1.0).PP) < 1e-15);
    const RotatorModel sm(ShapeFunction::smooth(), 2.0, 1.0);
    CHECK(std::abs(casimirs_closed_form(sm, 1.0).PP) < 1e-14);
    // smooth: PP = m^2 (1 - Q)
    CHECK(casimirs_closed_form(sm, 0.3).PP == doctest::Approx(4.0 * 0.7).epsilon(1e-14));
}

TEST_CASE("inertial state momenta") {
    const RotatorModel sm(ShapeFunction::smooth(), 1.5, 1.0);
    ChartState s;
    s.theta = 1.0;
    s.v = Vec3(0.3, -0.2, 0.1);
    const ChargeSet ch = momenta(sm, lift_state(s));
    const double g = 1.0 / std::sqrt(1.0 - s.v.squaredNorm());
    CHECK(ch.P[0] == doctest::Approx(1.5 * g).epsilon(1e-15));
    CHECK(ch.P[1] == doctest::Approx(1.5 * g * 0.3).epsilon(1e-15));
    for (int k = 0; k < 4; ++k) CHECK(ch.Pi[k] == 0.0);

    const RotatorModel fp(ShapeFunction::fundamental_plus(), 1.0, 1.0);
    CHECK_THROWS_AS(momenta(fp, lift_state(s)), SingularityError);
}

TEST_CASE("rotation_speed") {
    CHECK(rotation_speed(ShapeFunction::fundamental_plus(), 1.0) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
    CHECK(rotation_speed(ShapeFunction::smooth(), 0.0) == 0.0);
    for (double Q : {4.0, 100.0, 1e4, 1e8}) {
        const double sq = std::sqrt(Q);
        CHECK(rotation_speed(ShapeFunction::fundamental_plus(), Q) == doctest::Approx(sq / (2.0 + sq)).epsilon(1e-13));
    }
    CHECK(rotation_speed(ShapeFunction::fundamental_plus(), 1e12) > 0.999);
    CHECK(rotation_speed(ShapeFunction::fundamental_plus(), 1e12) < 1.0);
    // smooth shape: tanh Psi = Q, superluminal beyond Q = 1
    CHECK(rotation_speed(ShapeFunction::smooth(), 0.4) == doctest::Approx(0.4).epsilon(1e-15));
    CHECK_THROWS_AS(rotation_speed(ShapeFunction::smooth(), 1.2), DomainError);
}
