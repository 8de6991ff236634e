#pragma once

// Closed-form velocity Hessian of the rotator family, its determinant and the
// f-dependent factor controlling it, numeric null spaces, the closed-form
// kernel vector of the degenerate family and the Hessian-constraint value.

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "rotlab/chart.hpp"
#include "rotlab/el_system.hpp"
#include "rotlab/rotator_model.hpp"

namespace rotlab {

/// Blocks of the Hessian of f(Q) sqrt(1 - V.V) in the dimensionless chart
/// (velocities per u = t/l), ordered W = l (dtheta, dphi sin theta) first,
/// then V = v.
struct HessianBlocks {
    Eigen::Matrix2d A;
    Eigen::Matrix<double, 2, 3> B;
    Mat3 C;
    Mat5 assembled;  // [[A, B], [B^T, C]]
    Mat5 lab;        // d2 L_N / dqd dqd in chart order (x1, x2, x3, theta, phi)
};

/// Throws SingularityError for rotationless states (W = 0).
HessianBlocks hessian_blocks(const RotatorModel& model, const ChartState& s);

/// 1 + 2Q (f'/f + f''/f')
double universal_factor(const ShapeFunction& f, double Q);

/// Closed-form det of the dimensionless block matrix:
/// -4 f^3 f'^2 factor / ((1 - n.v)^4 (1 - v.v)^(3/2)).
double determinant_dimensionless(const ShapeFunction& f, const ChartState& s, double length);
/// Same for the lab-chart Hessian: -m^5 l^4 sin^2(theta) times the above.
double determinant_lab(const RotatorModel& model, const ChartState& s);

/// Orthonormal basis of the right singular vectors with sigma <= tol sigma_max.
/// Each vector's largest-magnitude component (first on ties) is made positive.
std::vector<Eigen::VectorXd> kernel(const Eigen::MatrixXd& H, double tol = 1e-8);

/// Singular values in descending order.
Eigen::VectorXd singular_values(const Eigen::MatrixXd& H);
int numeric_rank(const Eigen::VectorXd& sv, double tol = 1e-8);

/// The null vector of the degenerate family sqrt(1 + c sqrt Q) in three
/// normalizations.
struct KernelVector {
    Vec5 unit;           // lab chart, unit Euclidean norm, sign as in kernel()
    Vec5 scaled;         // (l/2)|ndot| (n - v) for x, rho (dtheta, dphi) for the angles
    Vec5 dimensionless;  // alpha W (+) (n - v), W-block first
    double rho;
    double alpha;
};

/// Throws DomainError for shapes outside the degenerate family and
/// SingularityError when Q = 0.
KernelVector analytic_kernel(const RotatorModel& model, const ChartState& s);

/// w.(d/dt dL/dqd - dL/dq)|_{qdd = 0} = -w.Z with w the scaled kernel vector:
/// the velocity-level remainder of the Euler-Lagrange expressions along the
/// null direction. Empty when the shape has a regular Hessian.
std::optional<double> constraint_functional(const ELSystem& sys, const ChartState& s);

struct HessianReport {
    Mat5 H;
    double det = 0.0;
    double det_closed_form = 0.0;
    double universal_factor = 0.0;
    Eigen::VectorXd singular_values;
    int rank = 0;
    std::vector<Eigen::VectorXd> kernel;
    std::optional<KernelVector> analytic;
    std::optional<double> constraint_residual;
    double Q = 0.0;
};

/// H from the system's derivative engine, everything else as above.
HessianReport hessian_report(const ELSystem& sys, const ChartState& s, double tol = 1e-8);

}  // namespace rotlab
