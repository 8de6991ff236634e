#pragma once

// Uniform static electromagnetic fields and the minimal-coupling term
// L_I = e v.A - e Phi.

#include <array>

#include "rotlab/chart.hpp"
#include "rotlab/minkowski.hpp"

namespace rotlab {

enum class Gauge {
    symmetric,   // Phi = -E.x, A = 1/2 H x x
    shifted_xy,  // symmetric plus grad(x1 x2); physics must not notice
};

struct UniformField {
    Vec3 E = Vec3::Zero();
    Vec3 H = Vec3::Zero();  // magnetic field
    Gauge gauge = Gauge::symmetric;

    bool is_zero() const { return E.isZero(0.0) && H.isZero(0.0); }

    /// F_{mu nu}: F_{0i} = E_i, F_{ij} = -eps_{ijk} H_k.
    AntisymmetricTensor2 tensor() const {
        return AntisymmetricTensor2::field({E[0], E[1], E[2]}, {H[0], H[1], H[2]});
    }

    UniformField rotated(const Mat3& R) const { return {R * E, R * H, gauge}; }

    /// Scalar and vector potential at a point, any scalar type.
    template <class T>
    T scalar_potential(const std::array<T, 5>& q) const {
        return -(E[0] * q[0] + E[1] * q[1] + E[2] * q[2]);
    }

    template <class T>
    std::array<T, 3> vector_potential(const std::array<T, 5>& q) const {
        std::array<T, 3> A{0.5 * (H[1] * q[2] - H[2] * q[1]), 0.5 * (H[2] * q[0] - H[0] * q[2]),
                           0.5 * (H[0] * q[1] - H[1] * q[0])};
        if (gauge == Gauge::shifted_xy) {
            A[0] = A[0] + q[1];
            A[1] = A[1] + q[0];
        }
        return A;
    }

    /// e v.A - e Phi with q, qd in chart order.
    template <class T>
    T interaction(double e, const std::array<T, 5>& q, const std::array<T, 5>& qd) const {
        const auto A = vector_potential(q);
        return e * (qd[0] * A[0] + qd[1] * A[1] + qd[2] * A[2]) - e * scalar_potential(q);
    }
};

}  // namespace rotlab
