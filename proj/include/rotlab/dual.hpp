#pragma once

// Forward-mode dual numbers. Nesting Dual<Dual<double>> gives exact second
// derivatives: seed the outer and inner tangents along two directions and read
// the mixed partial from .d.d.

#include <cmath>
#include <type_traits>

namespace rotlab {

template <class T>
struct Dual {
    T v{};
    T d{};

    constexpr Dual() = default;
    constexpr Dual(double x) : v(x), d(0.0) {}  // NOLINT: implicit lift of constants
    constexpr Dual(T value, T tangent) : v(value), d(tangent) {}

    Dual& operator+=(const Dual& o) { v += o.v; d += o.d; return *this; }
    Dual& operator-=(const Dual& o) { v -= o.v; d -= o.d; return *this; }
    Dual& operator*=(const Dual& o) { d = d * o.v + v * o.d; v *= o.v; return *this; }
    Dual& operator/=(const Dual& o) { *this = *this / o; return *this; }
};

template <class T> struct is_dual : std::false_type {};
template <class T> struct is_dual<Dual<T>> : std::true_type {};

/// Innermost floating value of a (possibly nested) dual.
inline double value_of(double x) { return x; }
template <class T> double value_of(const Dual<T>& x) { return value_of(x.v); }

template <class T> Dual<T> operator-(const Dual<T>& a) { return {-a.v, -a.d}; }
template <class T> Dual<T> operator+(const Dual<T>& a, const Dual<T>& b) { return {a.v + b.v, a.d + b.d}; }
template <class T> Dual<T> operator-(const Dual<T>& a, const Dual<T>& b) { return {a.v - b.v, a.d - b.d}; }
template <class T> Dual<T> operator*(const Dual<T>& a, const Dual<T>& b) { return {a.v * b.v, a.d * b.v + a.v * b.d}; }
template <class T> Dual<T> operator/(const Dual<T>& a, const Dual<T>& b) {
    T inv = T(1.0) / b.v;
    T q = a.v * inv;
    return {q, (a.d - q * b.d) * inv};
}

template <class T> Dual<T> operator+(const Dual<T>& a, double b) { return {a.v + b, a.d}; }
template <class T> Dual<T> operator+(double a, const Dual<T>& b) { return {a + b.v, b.d}; }
template <class T> Dual<T> operator-(const Dual<T>& a, double b) { return {a.v - b, a.d}; }
template <class T> Dual<T> operator-(double a, const Dual<T>& b) { return {a - b.v, -b.d}; }
template <class T> Dual<T> operator*(const Dual<T>& a, double b) { return {a.v * b, a.d * b}; }
template <class T> Dual<T> operator*(double a, const Dual<T>& b) { return {a * b.v, a * b.d}; }
template <class T> Dual<T> operator/(const Dual<T>& a, double b) { return {a.v / b, a.d / b}; }
template <class T> Dual<T> operator/(double a, const Dual<T>& b) { return Dual<T>(a) / b; }

template <class T> bool operator<(const Dual<T>& a, const Dual<T>& b) { return value_of(a) < value_of(b); }
template <class T> bool operator<(const Dual<T>& a, double b) { return value_of(a) < b; }
template <class T> bool operator>(const Dual<T>& a, double b) { return value_of(a) > b; }

using std::acos;
using std::atan2;
using std::cos;
using std::sin;
using std::sqrt;

template <class T> Dual<T> sqrt(const Dual<T>& a) {
    T s = sqrt(a.v);
    return {s, a.d / (2.0 * s)};
}
template <class T> Dual<T> sin(const Dual<T>& a) { return {sin(a.v), a.d * cos(a.v)}; }
template <class T> Dual<T> cos(const Dual<T>& a) { return {cos(a.v), -(a.d * sin(a.v))}; }
template <class T> Dual<T> acos(const Dual<T>& a) { return {acos(a.v), -(a.d / sqrt(1.0 - a.v * a.v))}; }
template <class T> Dual<T> atan2(const Dual<T>& y, const Dual<T>& x) {
    T r2 = x.v * x.v + y.v * y.v;
    return {atan2(y.v, x.v), (x.v * y.d - y.v * x.d) / r2};
}
/// |a| with the derivative of the branch selected by the sign of the value.
/// Callers must keep away from a = 0.
template <class T> Dual<T> abs(const Dual<T>& a) { return value_of(a) < 0.0 ? -a : a; }

using Dual1 = Dual<double>;
using Dual2 = Dual<Dual<double>>;

/// Second-order Taylor jet of a scalar function of one variable, read off a
/// Dual2 evaluated at t = Dual2{{t,1},{1,0}}.
struct Jet {
    double value;
    double first;
    double second;
};

inline Dual2 jet_variable(double t) { return Dual2{Dual1{t, 1.0}, Dual1{1.0, 0.0}}; }
inline Dual2 jet_constant(double c) { return Dual2{Dual1{c, 0.0}, Dual1{0.0, 0.0}}; }
inline Dual2 jet_from(const Jet& j) { return Dual2{Dual1{j.value, j.first}, Dual1{j.first, j.second}}; }
inline Jet jet_of(const Dual2& x) { return {x.v.v, x.v.d, x.d.d}; }

}  // namespace rotlab
