#pragma once

// Minkowski four-vectors with signature (+,-,-,-) and epsilon^{0123} = +1.

#include <array>
#include <cstddef>

namespace rotlab {

/// Contravariant components a^mu, index 0 is time.
struct FourVector {
    std::array<double, 4> c{};

    constexpr FourVector() = default;
    constexpr FourVector(double a0, double a1, double a2, double a3) : c{a0, a1, a2, a3} {}

    constexpr double& operator[](std::size_t i) { return c[i]; }
    constexpr double operator[](std::size_t i) const { return c[i]; }

    /// Covariant components a_mu = g_{mu nu} a^nu.
    constexpr FourVector lowered() const { return {c[0], -c[1], -c[2], -c[3]}; }

    FourVector& operator+=(const FourVector& o);
    FourVector& operator-=(const FourVector& o);
    FourVector& operator*=(double s);
};

FourVector operator+(FourVector a, const FourVector& b);
FourVector operator-(FourVector a, const FourVector& b);
FourVector operator-(const FourVector& a);
FourVector operator*(double s, FourVector a);
FourVector operator*(FourVector a, double s);
FourVector operator/(FourVector a, double s);

/// a^0 b^0 - a.b
double dot(const FourVector& a, const FourVector& b);

/// Largest absolute component; used for relative tolerances.
double max_abs(const FourVector& a);

enum class Causal { timelike, null, spacelike };
Causal classify(const FourVector& a, double tol = 1e-12);

/// Rank-2 antisymmetric tensor with lower indices, stored as the six
/// components (01, 02, 03, 12, 13, 23).
class AntisymmetricTensor2 {
public:
    AntisymmetricTensor2() = default;

    /// T_{mu nu} = a_mu b_nu - a_nu b_mu built from contravariant a, b.
    static AntisymmetricTensor2 wedge(const FourVector& a, const FourVector& b);

    /// Electromagnetic field tensor F_{mu nu} = d_mu A_nu - d_nu A_mu:
    /// F_{0i} = E_i, F_{ij} = -eps_{ijk} B_k.
    static AntisymmetricTensor2 field(const std::array<double, 3>& E, const std::array<double, 3>& B);

    double operator()(int mu, int nu) const;
    void set(int mu, int nu, double value);

    const std::array<double, 6>& components() const { return c_; }

    AntisymmetricTensor2& operator+=(const AntisymmetricTensor2& o);

    /// T_{mu nu} a^mu b^nu
    double contract(const FourVector& a, const FourVector& b) const;

private:
    std::array<double, 6> c_{};
};

/// v^mu = eps^{mu nu alpha beta} a_nu b_alpha c_beta
FourVector epsilon_contract3(const FourVector& a, const FourVector& b, const FourVector& c);

/// W^mu = -1/2 eps^{mu alpha beta gamma} M_{alpha beta} P_gamma
FourVector pauli_lubanski(const AntisymmetricTensor2& M, const FourVector& P);

/// Hyperbolic angle between two future timelike vectors. The cosh argument is
/// clamped to [1, inf) to absorb rounding.
double rapidity(const FourVector& u, const FourVector& P);

/// Pure boost with 3-velocity beta (|beta| < 1) acting on contravariant vectors.
class LorentzBoost {
public:
    explicit LorentzBoost(const std::array<double, 3>& beta);
    FourVector apply(const FourVector& a) const;
    AntisymmetricTensor2 apply(const AntisymmetricTensor2& M) const;

private:
    std::array<std::array<double, 4>, 4> L_{};
};

/// Levi-Civita symbol value for an index tuple (0 for repeated indices).
int levi_civita(int a, int b, int c, int d);

}  // namespace rotlab
