#include "rotlab/minkowski.hpp"

#include <algorithm>
#include <cmath>

#include "rotlab/errors.hpp"

namespace rotlab {

FourVector& FourVector::operator+=(const FourVector& o) {
    for (std::size_t i = 0; i < 4; ++i) c[i] += o.c[i];
    return *this;
}
FourVector& FourVector::operator-=(const FourVector& o) {
    for (std::size_t i = 0; i < 4; ++i) c[i] -= o.c[i];
    return *this;
}
FourVector& FourVector::operator*=(double s) {
    for (auto& x : c) x *= s;
    return *this;
}

FourVector operator+(FourVector a, const FourVector& b) { return a += b; }
FourVector operator-(FourVector a, const FourVector& b) { return a -= b; }
FourVector operator-(const FourVector& a) { return {-a[0], -a[1], -a[2], -a[3]}; }
FourVector operator*(double s, FourVector a) { return a *= s; }
FourVector operator*(FourVector a, double s) { return a *= s; }
FourVector operator/(FourVector a, double s) { return a *= 1.0 / s; }

double dot(const FourVector& a, const FourVector& b) {
    return a[0] * b[0] - a[1] * b[1] - a[2] * b[2] - a[3] * b[3];
}

double max_abs(const FourVector& a) {
    double m = 0.0;
    for (double x : a.c) m = std::max(m, std::abs(x));
    return m;
}

Causal classify(const FourVector& a, double tol) {
    const double aa = dot(a, a);
    if (std::abs(aa) <= tol) return Causal::null;
    return aa > 0.0 ? Causal::timelike : Causal::spacelike;
}

namespace {

constexpr int slot(int mu, int nu) {
    // (01,02,03,12,13,23) for mu < nu
    if (mu == 0) return nu - 1;
    if (mu == 1) return nu + 1;
    return 5;
}

}  // namespace

AntisymmetricTensor2 AntisymmetricTensor2::wedge(const FourVector& a, const FourVector& b) {
    const FourVector al = a.lowered();
    const FourVector bl = b.lowered();
    AntisymmetricTensor2 t;
    for (int mu = 0; mu < 4; ++mu)
        for (int nu = mu + 1; nu < 4; ++nu) t.c_[slot(mu, nu)] = al[mu] * bl[nu] - al[nu] * bl[mu];
    return t;
}

AntisymmetricTensor2 AntisymmetricTensor2::field(const std::array<double, 3>& E, const std::array<double, 3>& B) {
    AntisymmetricTensor2 F;
    F.set(0, 1, E[0]);
    F.set(0, 2, E[1]);
    F.set(0, 3, E[2]);
    F.set(1, 2, -B[2]);
    F.set(1, 3, B[1]);
    F.set(2, 3, -B[0]);
    return F;
}

double AntisymmetricTensor2::operator()(int mu, int nu) const {
    if (mu == nu) return 0.0;
    return mu < nu ? c_[slot(mu, nu)] : -c_[slot(nu, mu)];
}

void AntisymmetricTensor2::set(int mu, int nu, double value) {
    if (mu == nu) return;
    if (mu < nu)
        c_[slot(mu, nu)] = value;
    else
        c_[slot(nu, mu)] = -value;
}

AntisymmetricTensor2& AntisymmetricTensor2::operator+=(const AntisymmetricTensor2& o) {
    for (std::size_t i = 0; i < 6; ++i) c_[i] += o.c_[i];
    return *this;
}

double AntisymmetricTensor2::contract(const FourVector& a, const FourVector& b) const {
    double s = 0.0;
    for (int mu = 0; mu < 4; ++mu)
        for (int nu = 0; nu < 4; ++nu) s += (*this)(mu, nu) * a[mu] * b[nu];
    return s;
}

int levi_civita(int a, int b, int c, int d) {
    const int p[4] = {a, b, c, d};
    for (int i = 0; i < 4; ++i)
        for (int j = i + 1; j < 4; ++j)
            if (p[i] == p[j]) return 0;
    int sign = 1;
    for (int i = 0; i < 4; ++i)
        for (int j = i + 1; j < 4; ++j)
            if (p[i] > p[j]) sign = -sign;
    return sign;
}

FourVector epsilon_contract3(const FourVector& a, const FourVector& b, const FourVector& c) {
    const FourVector al = a.lowered();
    const FourVector bl = b.lowered();
    const FourVector cl = c.lowered();
    FourVector v;
    for (int mu = 0; mu < 4; ++mu) {
        double s = 0.0;
        for (int nu = 0; nu < 4; ++nu) {
            if (nu == mu) continue;
            for (int al_ = 0; al_ < 4; ++al_) {
                if (al_ == mu || al_ == nu) continue;
                const int be = 6 - mu - nu - al_;
                s += levi_civita(mu, nu, al_, be) * al[nu] * bl[al_] * cl[be];
            }
        }
        v[mu] = s;
    }
    return v;
}

FourVector pauli_lubanski(const AntisymmetricTensor2& M, const FourVector& P) {
    const FourVector Pl = P.lowered();
    FourVector W;
    for (int mu = 0; mu < 4; ++mu) {
        double s = 0.0;
        for (int a = 0; a < 4; ++a) {
            if (a == mu) continue;
            for (int b = 0; b < 4; ++b) {
                if (b == mu || b == a) continue;
                const int g = 6 - mu - a - b;
                s += levi_civita(mu, a, b, g) * M(a, b) * Pl[g];
            }
        }
        W[mu] = -0.5 * s;
    }
    return W;
}

double rapidity(const FourVector& u, const FourVector& P) {
    const double uu = dot(u, u);
    const double pp = dot(P, P);
    if (!(uu > 0.0) || !(pp > 0.0)) throw DomainError("rapidity: both vectors must be timelike");
    const double c = dot(u, P) / std::sqrt(uu * pp);
    return std::acosh(std::max(c, 1.0));
}

LorentzBoost::LorentzBoost(const std::array<double, 3>& beta) {
    const double bb = beta[0] * beta[0] + beta[1] * beta[1] + beta[2] * beta[2];
    if (!(bb < 1.0)) throw DomainError("boost: |beta| must be < 1");
    const double gamma = 1.0 / std::sqrt(1.0 - bb);
    L_[0][0] = gamma;
    for (int i = 0; i < 3; ++i) {
        L_[0][i + 1] = gamma * beta[i];
        L_[i + 1][0] = gamma * beta[i];
        for (int j = 0; j < 3; ++j)
            L_[i + 1][j + 1] = (i == j ? 1.0 : 0.0) + (bb > 0.0 ? (gamma - 1.0) * beta[i] * beta[j] / bb : 0.0);
    }
}

FourVector LorentzBoost::apply(const FourVector& a) const {
    FourVector r;
    for (int mu = 0; mu < 4; ++mu)
        for (int nu = 0; nu < 4; ++nu) r[mu] += L_[mu][nu] * a[nu];
    return r;
}

AntisymmetricTensor2 LorentzBoost::apply(const AntisymmetricTensor2& M) const {
    // Lower-index tensors transform with the inverse-transpose; for a pure
    // boost that is g L g.
    std::array<std::array<double, 4>, 4> Lt{};
    const double g[4] = {1.0, -1.0, -1.0, -1.0};
    for (int mu = 0; mu < 4; ++mu)
        for (int nu = 0; nu < 4; ++nu) Lt[mu][nu] = g[mu] * L_[mu][nu] * g[nu];
    AntisymmetricTensor2 out;
    for (int mu = 0; mu < 4; ++mu)
        for (int nu = mu + 1; nu < 4; ++nu) {
            double s = 0.0;
            for (int a = 0; a < 4; ++a)
                for (int b = 0; b < 4; ++b) s += Lt[mu][a] * Lt[nu][b] * M(a, b);
            out.set(mu, nu, s);
        }
    return out;
}

}  // namespace rotlab
