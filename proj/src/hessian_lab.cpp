#include "rotlab/hessian_lab.hpp"

#include <cmath>

#include "rotlab/errors.hpp"

namespace rotlab {

namespace {

struct Reduced {
    Eigen::Vector2d W;
    Vec3 V, N;
    double WW, NV, VV, Q;
};

Reduced reduce(const ChartState& s, double length) {
    check_admissible(s);
    Reduced r;
    r.W = length * Eigen::Vector2d(s.dtheta, s.dphi * std::sin(s.theta));
    r.V = s.v;
    r.N = s.n();
    r.WW = r.W.squaredNorm();
    r.NV = r.N.dot(r.V);
    r.VV = r.V.squaredNorm();
    r.Q = r.WW / ((1.0 - r.NV) * (1.0 - r.NV));
    return r;
}

Eigen::Matrix<double, 5, 5> chart_permutation() {
    // (theta, phi, v1, v2, v3) -> (v1, v2, v3, theta, phi)
    Eigen::Matrix<double, 5, 5> P = Eigen::Matrix<double, 5, 5>::Zero();
    const int perm[5] = {2, 3, 4, 0, 1};
    for (int i = 0; i < 5; ++i) P(i, perm[i]) = 1.0;
    return P;
}

void fix_sign(Eigen::VectorXd& v) {
    Eigen::Index best = 0;
    for (Eigen::Index i = 1; i < v.size(); ++i)
        if (std::abs(v[i]) > std::abs(v[best]) * (1.0 + 1e-12)) best = i;
    if (v[best] < 0.0) v = -v;
}

}  // namespace

HessianBlocks hessian_blocks(const RotatorModel& model, const ChartState& s) {
    const Reduced r = reduce(s, model.length);
    if (!(r.WW > 0.0)) throw SingularityError("Hessian blocks: rotationless state (W = 0)");
    const ShapeValues fv = model.shape.eval(r.Q);
    const double F = fv.f, F1 = fv.df, F2 = fv.d2f, Q = r.Q;
    const double sq = std::sqrt(1.0 - r.VV);
    const double pre = 2.0 * Q * F1 * sq / r.WW;

    HessianBlocks b;
    b.A = pre * (Eigen::Matrix2d::Identity() + 2.0 * Q * F2 / F1 * r.W * r.W.transpose() / r.WW);
    b.B = pre * (2.0 * (1.0 + Q * F2 / F1) * r.W * r.N.transpose() / (1.0 - r.NV) -
                 r.W * r.V.transpose() / (1.0 - r.VV));
    const Mat3 NN = r.N * r.N.transpose();
    const Mat3 sym = r.N * r.V.transpose() + r.V * r.N.transpose();
    b.C = -F / sq *
          (Mat3::Identity() + r.V * r.V.transpose() / (1.0 - r.VV) +
           2.0 * Q * F1 / F *
               (sym / (1.0 - r.NV) - (3.0 + 2.0 * Q * F2 / F1) * (1.0 - r.VV) / ((1.0 - r.NV) * (1.0 - r.NV)) * NN));

    b.assembled.topLeftCorner<2, 2>() = b.A;
    b.assembled.topRightCorner<2, 3>() = b.B;
    b.assembled.bottomLeftCorner<3, 2>() = b.B.transpose();
    b.assembled.bottomRightCorner<3, 3>() = b.C;

    Eigen::Matrix<double, 5, 1> d;
    d << model.length, model.length * std::sin(s.theta), 1.0, 1.0, 1.0;
    const Mat5 scaled = -model.mass * d.asDiagonal() * b.assembled * d.asDiagonal();
    const Mat5 P = chart_permutation();
    b.lab = P * scaled * P.transpose();
    return b;
}

double universal_factor(const ShapeFunction& f, double Q) {
    const ShapeValues v = f.eval(Q);
    if (v.df == 0.0) throw DomainError("universal factor: f'(Q) = 0");
    return 1.0 + 2.0 * Q * (v.df / v.f + v.d2f / v.df);
}

double determinant_dimensionless(const ShapeFunction& f, const ChartState& s, double length) {
    const Reduced r = reduce(s, length);
    const ShapeValues v = f.eval(r.Q);
    const double a = 1.0 - r.NV;
    return -4.0 * v.f * v.f * v.f * v.df * v.df * universal_factor(f, r.Q) /
           (a * a * a * a * std::pow(1.0 - r.VV, 1.5));
}

double determinant_lab(const RotatorModel& model, const ChartState& s) {
    const double m = model.mass, l = model.length, st = std::sin(s.theta);
    return -std::pow(m, 5) * std::pow(l, 4) * st * st * determinant_dimensionless(model.shape, s, l);
}

Eigen::VectorXd singular_values(const Eigen::MatrixXd& H) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(H);
    return svd.singularValues();
}

int numeric_rank(const Eigen::VectorXd& sv, double tol) {
    if (sv.size() == 0) return 0;
    const double cut = tol * sv[0];
    int rank = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i)
        if (sv[i] > cut) ++rank;
    return rank;
}

std::vector<Eigen::VectorXd> kernel(const Eigen::MatrixXd& H, double tol) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(H, Eigen::ComputeFullV);
    const Eigen::VectorXd& sv = svd.singularValues();
    const int rank = numeric_rank(sv, tol);
    std::vector<Eigen::VectorXd> out;
    for (Eigen::Index i = rank; i < sv.size(); ++i) {
        Eigen::VectorXd v = svd.matrixV().col(i);
        v.normalize();
        fix_sign(v);
        out.push_back(v);
    }
    return out;
}

KernelVector analytic_kernel(const RotatorModel& model, const ChartState& s) {
    if (!model.shape.degenerate_family())
        throw DomainError("analytic kernel: shape " + model.shape.tag() + " has a regular Hessian");
    const Reduced r = reduce(s, model.length);
    if (!(r.WW > 0.0)) throw SingularityError("analytic kernel: |ndot| = 0, kernel undefined");
    const double c = model.shape.sqrt_coefficient();
    const double sc = c * std::sqrt(r.Q);
    const double alpha = 2.0 * (1.0 + sc) * (1.0 - r.NV) / (sc * (1.0 - r.VV)) - 1.0;
    const double half = 0.5 * model.length * s.n_dot_norm();

    KernelVector k;
    k.alpha = alpha;
    k.rho = alpha * half;
    k.dimensionless << alpha * r.W, r.N - r.V;
    k.scaled << half * (r.N - r.V), k.rho * s.dtheta, k.rho * s.dphi;
    Eigen::VectorXd u = k.scaled.normalized();
    fix_sign(u);
    k.unit = u;
    return k;
}

std::optional<double> constraint_functional(const ELSystem& sys, const ChartState& s) {
    if (!sys.model().shape.degenerate_family()) return std::nullopt;
    const KernelVector w = analytic_kernel(sys.model(), s);
    const ELTerms<5> t = sys.terms(s);
    return -w.scaled.dot(t.z);
}

HessianReport hessian_report(const ELSystem& sys, const ChartState& s, double tol) {
    HessianReport r;
    const RotatorModel& model = sys.model();
    r.Q = q_invariant(s, model.length);
    r.H = sys.hessian(s);
    r.det = r.H.determinant();
    r.universal_factor = universal_factor(model.shape, r.Q);
    r.det_closed_form = determinant_lab(model, s);
    r.singular_values = singular_values(r.H);
    r.rank = numeric_rank(r.singular_values, tol);
    r.kernel = kernel(r.H, tol);
    if (model.shape.degenerate_family()) {
        r.analytic = analytic_kernel(model, s);
        r.constraint_residual = constraint_functional(sys, s);
    }
    return r;
}

}  // namespace rotlab
