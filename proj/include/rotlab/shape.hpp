#pragma once

// Shape functions f(Q) selecting a member of the rotator family.

#include <string>
#include <vector>

#include "rotlab/dual.hpp"
#include "rotlab/errors.hpp"

namespace rotlab {

enum class ShapeKind {
    fundamental_plus,   // sqrt(1 + sqrt(Q))
    fundamental_minus,  // sqrt(1 - sqrt(Q)), sqrt(Q) < 1
    sqrt_poly,          // sqrt(1 + a^2 sqrt(Q))
    rational_sqrt,      // 1 + sqrt(Q)
    smooth,             // sqrt(1 + Q)
    custom,             // sqrt(p(sqrt(Q))), p given by coefficients c0 + c1 y + ...
};

struct ShapeValues {
    double f;
    double df;
    double d2f;
};

class ShapeFunction {
public:
    static ShapeFunction fundamental_plus();
    static ShapeFunction fundamental_minus();
    static ShapeFunction sqrt_poly(double a);
    static ShapeFunction rational_sqrt();
    static ShapeFunction smooth();
    /// f = sqrt(p(sqrt Q)) on the declared interval [q_min, q_max].
    static ShapeFunction custom(std::vector<double> coefficients, double q_min, double q_max);

    /// Parses "fundamental+", "fundamental-", "sqrt_poly:a=<r>", "rational_sqrt",
    /// "smooth" and "custom:c0,c1,...[;qmax=<r>]".
    static ShapeFunction parse(const std::string& tag);

    ShapeKind kind() const { return kind_; }
    std::string tag() const;
    double a() const { return a_; }
    const std::vector<double>& coefficients() const { return coeffs_; }

    /// True for the family sqrt(1 + c sqrt Q) whose velocity Hessian is
    /// identically singular (both fundamental branches and every sqrt_poly).
    bool degenerate_family() const;
    /// c in sqrt(1 + c sqrt Q) for the degenerate family.
    double sqrt_coefficient() const;
    /// The shape is a smooth function of Q at Q = 0 (no odd powers of sqrt Q).
    bool smooth_at_zero() const;

    /// Throws DomainError when Q is outside the shape's domain.
    void check_domain(double Q) const;

    /// f(Q) for any scalar type (double or nested duals).
    template <class T>
    T value(const T& Q) const;

    /// Closed-form f, f', f''. Q = 0 is rejected for shapes containing sqrt Q.
    ShapeValues eval(double Q) const;

private:
    ShapeFunction(ShapeKind kind, double a) : kind_(kind), a_(a) {}

    ShapeKind kind_;
    double a_ = 1.0;
    std::vector<double> coeffs_;
    double q_min_ = 0.0;
    double q_max_ = 0.0;
};

template <class T>
T ShapeFunction::value(const T& Q) const {
    using std::sqrt;
    switch (kind_) {
        case ShapeKind::fundamental_plus:
            return sqrt(1.0 + sqrt(Q));
        case ShapeKind::fundamental_minus:
            return sqrt(1.0 - sqrt(Q));
        case ShapeKind::sqrt_poly:
            return sqrt(1.0 + (a_ * a_) * sqrt(Q));
        case ShapeKind::rational_sqrt:
            return 1.0 + sqrt(Q);
        case ShapeKind::smooth:
            return sqrt(1.0 + Q);
        case ShapeKind::custom: {
            if (smooth_at_zero()) {
                // only even powers of sqrt Q: Horner in Q itself
                std::size_t top = (coeffs_.size() - 1) & ~std::size_t{1};
                T p = T(coeffs_[top]);
                for (std::size_t k = top; k >= 2; k -= 2) p = p * Q + coeffs_[k - 2];
                return sqrt(p);
            }
            const T y = sqrt(Q);
            T p = T(coeffs_.back());
            for (std::size_t k = coeffs_.size() - 1; k-- > 0;) p = p * y + coeffs_[k];
            return sqrt(p);
        }
    }
    throw DomainError("unknown shape kind");
}

}  // namespace rotlab
