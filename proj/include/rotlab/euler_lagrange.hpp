#pragma once

// Euler-Lagrange assembly for an N-dof Lagrangian L(q, qd, t):
//
//   H_ij qdd_j = Z_i,   H = d2L/dqd dqd,
//   Z_i = dL/dq_i - (d2L/dqd_i dq_j) qd_j - d2L/dqd_i dt.
//
// The Lagrangian is any generic callable L(q, qd, t) accepting std::array<T, N>
// for T in {double, Dual1, Dual2}. Forward mode is exact to rounding; the
// finite-difference variants serve as an independent oracle.

#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>

#include <Eigen/Dense>

#include "rotlab/dual.hpp"
#include "rotlab/errors.hpp"

namespace rotlab {

template <std::size_t N> using VecN = Eigen::Matrix<double, static_cast<int>(N), 1>;
template <std::size_t N> using MatN = Eigen::Matrix<double, static_cast<int>(N), static_cast<int>(N)>;

template <std::size_t N>
struct PhasePoint {
    std::array<double, N> q{};
    std::array<double, N> qd{};
    double t = 0.0;
};

template <std::size_t N>
struct ELTerms {
    MatN<N> hessian;
    VecN<N> z;
};

namespace detail {

inline void require_finite(double x, const char* what, std::size_t index) {
    if (!std::isfinite(x))
        throw SingularityError(std::string("Euler-Lagrange: non-finite ") + what + " at coordinate " +
                               std::to_string(index));
}

template <std::size_t N, class T>
std::array<T, N> lift(const std::array<double, N>& a) {
    std::array<T, N> out{};
    for (std::size_t i = 0; i < N; ++i) out[i] = T(a[i]);
    return out;
}

}  // namespace detail

/// Velocity Hessian by nested forward mode.
template <std::size_t N, class Lag>
MatN<N> velocity_hessian(const Lag& L, const PhasePoint<N>& p) {
    const auto q = detail::lift<N, Dual2>(p.q);
    const Dual2 t(p.t);
    MatN<N> H;
    for (std::size_t i = 0; i < N; ++i) {
        for (std::size_t j = i; j < N; ++j) {
            auto qd = detail::lift<N, Dual2>(p.qd);
            qd[i].d.v += 1.0;  // outer seed
            qd[j].v.d += 1.0;  // inner seed
            const double hij = L(q, qd, t).d.d;
            detail::require_finite(hij, "velocity Hessian", i);
            H(i, j) = hij;
            H(j, i) = hij;
        }
    }
    return H;
}

/// Hessian and acceleration-free right-hand side Z by nested forward mode.
template <std::size_t N, class Lag>
ELTerms<N> el_terms(const Lag& L, const PhasePoint<N>& p) {
    ELTerms<N> out;
    out.hessian = velocity_hessian<N>(L, p);
    for (std::size_t i = 0; i < N; ++i) {
        // dL/dq_i
        auto q1 = detail::lift<N, Dual1>(p.q);
        q1[i].d = 1.0;
        const double dLdq = L(q1, detail::lift<N, Dual1>(p.qd), Dual1(p.t)).d;

        // d/dqd_i of the total derivative operator D = qd.d/dq + d/dt applied to L
        auto q2 = detail::lift<N, Dual2>(p.q);
        for (std::size_t j = 0; j < N; ++j) q2[j].v.d = p.qd[j];
        auto qd2 = detail::lift<N, Dual2>(p.qd);
        qd2[i].d.v = 1.0;
        const Dual2 t2{Dual1{p.t, 1.0}, Dual1{0.0, 0.0}};
        const double mixed = L(q2, qd2, t2).d.d;

        out.z[i] = dLdq - mixed;
        detail::require_finite(out.z[i], "Euler-Lagrange right-hand side", i);
    }
    return out;
}

/// Central-difference step for second derivatives: eps^(1/4) scaled by the
/// coordinate magnitude.
inline double fd_step(double x) {
    static const double base = std::pow(std::numeric_limits<double>::epsilon(), 0.25);
    return base * std::max(1.0, std::abs(x));
}

/// Velocity Hessian by central second differences, symmetrized. A stencil
/// point that fails to evaluate shrinks the step (up to 8 halvings) before
/// giving up. A positive `step` replaces the scaled default for every
/// coordinate; for Lagrangians quadratic in the velocities a large step is
/// exact and keeps rounding out of the result.
template <std::size_t N, class Lag>
MatN<N> hessian_fd(const Lag& L, const PhasePoint<N>& p, double step = 0.0) {
    auto eval = [&](const std::array<double, N>& qd) {
        const double v = L(p.q, qd, p.t);
        if (!std::isfinite(v)) throw SingularityError("hessian_fd: non-finite Lagrangian at stencil point");
        return v;
    };
    MatN<N> H;
    for (std::size_t i = 0; i < N; ++i) {
        for (std::size_t j = i; j < N; ++j) {
            double hi = step > 0.0 ? step : fd_step(p.qd[i]);
            double hj = step > 0.0 ? step : fd_step(p.qd[j]);
            for (int attempt = 0;; ++attempt) {
                try {
                    double val;
                    if (i == j) {
                        auto a = p.qd, b = p.qd;
                        a[i] += hi;
                        b[i] -= hi;
                        val = (eval(a) - 2.0 * eval(p.qd) + eval(b)) / (hi * hi);
                    } else {
                        auto pp = p.qd, pm = p.qd, mp = p.qd, mm = p.qd;
                        pp[i] += hi; pp[j] += hj;
                        pm[i] += hi; pm[j] -= hj;
                        mp[i] -= hi; mp[j] += hj;
                        mm[i] -= hi; mm[j] -= hj;
                        val = (eval(pp) - eval(pm) - eval(mp) + eval(mm)) / (4.0 * hi * hj);
                    }
                    H(i, j) = val;
                    H(j, i) = val;
                    break;
                } catch (const PhysicsError&) {
                    if (attempt >= 8) throw;
                    hi *= 0.5;
                    hj *= 0.5;
                }
            }
        }
    }
    return H;
}

/// Velocity Hessian by Ridders' extrapolation of the central second
/// differences. Each entry starts from the steps h0 (one per coordinate; they
/// should stay below the distance to any non-smooth point of L) and shrinks
/// them by 1.4 per level until the extrapolation error stops improving. A
/// failing stencil at the first level restarts with quartered steps.
template <std::size_t N, class Lag>
MatN<N> hessian_fd_extrapolated(const Lag& L, const PhasePoint<N>& p, const std::array<double, N>& h0) {
    constexpr int levels = 10;
    constexpr double con = 1.4;
    constexpr double con2 = con * con;
    auto eval = [&](const std::array<double, N>& qd) {
        const double v = L(p.q, qd, p.t);
        if (!std::isfinite(v)) throw SingularityError("hessian_fd: non-finite Lagrangian at stencil point");
        return v;
    };
    auto second = [&](std::size_t i, std::size_t j, double hi, double hj) {
        if (i == j) {
            auto a = p.qd, b = p.qd;
            a[i] += hi;
            b[i] -= hi;
            return (eval(a) - 2.0 * eval(p.qd) + eval(b)) / (hi * hi);
        }
        auto pp = p.qd, pm = p.qd, mp = p.qd, mm = p.qd;
        pp[i] += hi; pp[j] += hj;
        pm[i] += hi; pm[j] -= hj;
        mp[i] -= hi; mp[j] += hj;
        mm[i] -= hi; mm[j] -= hj;
        return (eval(pp) - eval(pm) - eval(mp) + eval(mm)) / (4.0 * hi * hj);
    };
    MatN<N> H;
    for (std::size_t i = 0; i < N; ++i) {
        for (std::size_t j = i; j < N; ++j) {
            double hi = h0[i], hj = h0[j];
            double a[levels][levels];
            for (int attempt = 0;; ++attempt) {
                try {
                    a[0][0] = second(i, j, hi, hj);
                    break;
                } catch (const PhysicsError&) {
                    if (attempt >= 8) throw;
                    hi *= 0.25;
                    hj *= 0.25;
                }
            }
            double best = a[0][0];
            double err = std::numeric_limits<double>::infinity();
            for (int k = 1; k < levels; ++k) {
                hi /= con;
                hj /= con;
                try {
                    a[0][k] = second(i, j, hi, hj);
                } catch (const PhysicsError&) {
                    break;
                }
                double fac = con2;
                for (int m = 1; m <= k; ++m) {
                    a[m][k] = (a[m - 1][k] * fac - a[m - 1][k - 1]) / (fac - 1.0);
                    fac *= con2;
                    const double e = std::max(std::abs(a[m][k] - a[m - 1][k]), std::abs(a[m][k] - a[m - 1][k - 1]));
                    if (e <= err) {
                        err = e;
                        best = a[m][k];
                    }
                }
                // a chance agreement on the first levels must not end the search
                if (k >= 4 && std::abs(a[k][k] - a[k - 1][k - 1]) >= 2.0 * err) break;
            }
            H(i, j) = best;
            H(j, i) = best;
        }
    }
    return H;
}

/// Finite-difference oracle for the full Euler-Lagrange terms.
/// With h0 the Hessian part uses hessian_fd_extrapolated.
template <std::size_t N, class Lag>
ELTerms<N> el_terms_fd(const Lag& L, const PhasePoint<N>& p, const std::array<double, N>* h0 = nullptr) {
    ELTerms<N> out;
    out.hessian = h0 ? hessian_fd_extrapolated<N>(L, p, *h0) : hessian_fd<N>(L, p);
    auto value = [&](const std::array<double, N>& q, const std::array<double, N>& qd, double t) {
        return static_cast<double>(L(q, qd, t));
    };
    // dL/dqd_i by central differences at an arbitrary phase point
    auto grad_qd = [&](const std::array<double, N>& q, double t, std::size_t i) {
        const double h = std::cbrt(std::numeric_limits<double>::epsilon()) * std::max(1.0, std::abs(p.qd[i]));
        auto a = p.qd, b = p.qd;
        a[i] += h;
        b[i] -= h;
        return (value(q, a, t) - value(q, b, t)) / (2.0 * h);
    };
    double qscale = 1.0;
    for (std::size_t j = 0; j < N; ++j) qscale = std::max(qscale, std::abs(p.qd[j]));
    const double hs = fd_step(1.0) / qscale;
    for (std::size_t i = 0; i < N; ++i) {
        const double hq = std::cbrt(std::numeric_limits<double>::epsilon()) * std::max(1.0, std::abs(p.q[i]));
        auto a = p.q, b = p.q;
        a[i] += hq;
        b[i] -= hq;
        const double dLdq = (value(a, p.qd, p.t) - value(b, p.qd, p.t)) / (2.0 * hq);

        auto qp = p.q, qm = p.q;
        for (std::size_t j = 0; j < N; ++j) {
            qp[j] += hs * p.qd[j];
            qm[j] -= hs * p.qd[j];
        }
        const double mixed = (grad_qd(qp, p.t + hs, i) - grad_qd(qm, p.t - hs, i)) / (2.0 * hs);
        out.z[i] = dLdq - mixed;
        detail::require_finite(out.z[i], "finite-difference right-hand side", i);
    }
    return out;
}

}  // namespace rotlab
