#include "rotlab/shape.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace rotlab {

ShapeFunction ShapeFunction::fundamental_plus() { return {ShapeKind::fundamental_plus, 1.0}; }
ShapeFunction ShapeFunction::fundamental_minus() { return {ShapeKind::fundamental_minus, 1.0}; }
ShapeFunction ShapeFunction::rational_sqrt() { return {ShapeKind::rational_sqrt, 1.0}; }
ShapeFunction ShapeFunction::smooth() { return {ShapeKind::smooth, 1.0}; }

ShapeFunction ShapeFunction::sqrt_poly(double a) {
    if (!(a > 0.0)) throw DomainError("sqrt_poly: a must be > 0");
    return {ShapeKind::sqrt_poly, a};
}

ShapeFunction ShapeFunction::custom(std::vector<double> coefficients, double q_min, double q_max) {
    if (coefficients.empty()) throw DomainError("custom shape: empty coefficient list");
    if (!(q_min >= 0.0) || !(q_max > q_min)) throw DomainError("custom shape: need 0 <= q_min < q_max");
    ShapeFunction s{ShapeKind::custom, 1.0};
    s.coeffs_ = std::move(coefficients);
    s.q_min_ = q_min;
    s.q_max_ = q_max;
    return s;
}

ShapeFunction ShapeFunction::parse(const std::string& tag) {
    if (tag == "fundamental+") return fundamental_plus();
    if (tag == "fundamental-") return fundamental_minus();
    if (tag == "rational_sqrt") return rational_sqrt();
    if (tag == "smooth") return smooth();
    const std::string poly = "sqrt_poly:a=";
    if (tag.rfind(poly, 0) == 0) {
        std::size_t used = 0;
        const std::string rest = tag.substr(poly.size());
        double a = 0.0;
        try {
            a = std::stod(rest, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || used != rest.size()) throw ScenarioError("bad shape tag '" + tag + "'");
        return sqrt_poly(a);
    }
    const std::string cust = "custom:";
    if (tag.rfind(cust, 0) == 0) {
        std::string body = tag.substr(cust.size());
        double q_max = std::numeric_limits<double>::infinity();
        if (const auto semi = body.find(';'); semi != std::string::npos) {
            const std::string opt = body.substr(semi + 1);
            body = body.substr(0, semi);
            if (opt.rfind("qmax=", 0) != 0) throw ScenarioError("bad shape tag '" + tag + "'");
            q_max = std::stod(opt.substr(5));
        }
        std::vector<double> c;
        std::stringstream ss(body);
        std::string item;
        while (std::getline(ss, item, ',')) {
            try {
                c.push_back(std::stod(item));
            } catch (const std::exception&) {
                throw ScenarioError("bad shape tag '" + tag + "'");
            }
        }
        return custom(std::move(c), 0.0, q_max);
    }
    throw ScenarioError("unknown shape tag '" + tag + "'");
}

std::string ShapeFunction::tag() const {
    switch (kind_) {
        case ShapeKind::fundamental_plus: return "fundamental+";
        case ShapeKind::fundamental_minus: return "fundamental-";
        case ShapeKind::rational_sqrt: return "rational_sqrt";
        case ShapeKind::smooth: return "smooth";
        case ShapeKind::sqrt_poly: {
            std::ostringstream os;
            os.precision(17);
            os << "sqrt_poly:a=" << a_;
            return os.str();
        }
        case ShapeKind::custom: {
            std::ostringstream os;
            os.precision(17);
            os << "custom:";
            for (std::size_t i = 0; i < coeffs_.size(); ++i) os << (i ? "," : "") << coeffs_[i];
            if (std::isfinite(q_max_)) os << ";qmax=" << q_max_;
            return os.str();
        }
    }
    return "?";
}

bool ShapeFunction::degenerate_family() const {
    return kind_ == ShapeKind::fundamental_plus || kind_ == ShapeKind::fundamental_minus ||
           kind_ == ShapeKind::sqrt_poly;
}

double ShapeFunction::sqrt_coefficient() const {
    switch (kind_) {
        case ShapeKind::fundamental_plus: return 1.0;
        case ShapeKind::fundamental_minus: return -1.0;
        case ShapeKind::sqrt_poly: return a_ * a_;
        default: throw DomainError("shape is not of the form sqrt(1 + c sqrt(Q))");
    }
}

bool ShapeFunction::smooth_at_zero() const {
    if (kind_ == ShapeKind::smooth) return true;
    if (kind_ != ShapeKind::custom) return false;
    for (std::size_t k = 1; k < coeffs_.size(); k += 2)
        if (coeffs_[k] != 0.0) return false;
    return true;
}

void ShapeFunction::check_domain(double Q) const {
    if (!(Q >= 0.0)) throw DomainError("shape: Q must be >= 0");
    if (kind_ == ShapeKind::fundamental_minus && !(std::sqrt(Q) < 1.0))
        throw DomainError("fundamental-: sqrt(Q) must be < 1");
    if (kind_ == ShapeKind::custom && (Q < q_min_ || Q > q_max_))
        throw DomainError("custom shape: Q outside the declared domain");
}

ShapeValues ShapeFunction::eval(double Q) const {
    check_domain(Q);
    if (Q == 0.0 && !smooth_at_zero())
        throw SingularityError("shape " + tag() + ": Q = 0 is a non-smooth point (sqrt Q)");

    // f = sqrt(g): f' = g'/(2f), f'' = g''/(2f) - g'^2/(4 f^3)
    auto from_g = [](double g, double g1, double g2) {
        if (!(g > 0.0)) throw DomainError("shape: f(Q) must be > 0");
        const double f = std::sqrt(g);
        return ShapeValues{f, g1 / (2.0 * f), g2 / (2.0 * f) - g1 * g1 / (4.0 * f * f * f)};
    };

    ShapeValues out{};
    switch (kind_) {
        case ShapeKind::fundamental_plus:
        case ShapeKind::fundamental_minus:
        case ShapeKind::sqrt_poly: {
            const double c = sqrt_coefficient();
            const double y = std::sqrt(Q);
            out = from_g(1.0 + c * y, c / (2.0 * y), -c / (4.0 * Q * y));
            break;
        }
        case ShapeKind::rational_sqrt: {
            const double y = std::sqrt(Q);
            out = {1.0 + y, 1.0 / (2.0 * y), -1.0 / (4.0 * Q * y)};
            break;
        }
        case ShapeKind::smooth:
            out = from_g(1.0 + Q, 1.0, 0.0);
            break;
        case ShapeKind::custom: {
            if (smooth_at_zero()) {
                double P = 0.0, P1 = 0.0, P2 = 0.0;  // p as a polynomial in Q
                for (std::size_t k = coeffs_.size(); k-- > 0;) {
                    if (k % 2) continue;
                    P2 = P2 * Q + 2.0 * P1;
                    P1 = P1 * Q + P;
                    P = P * Q + coeffs_[k];
                }
                out = from_g(P, P1, P2);
            } else {
                const double y = std::sqrt(Q);
                double p = 0.0, p1 = 0.0, p2 = 0.0;
                for (std::size_t k = coeffs_.size(); k-- > 0;) {
                    p2 = p2 * y + 2.0 * p1;
                    p1 = p1 * y + p;
                    p = p * y + coeffs_[k];
                }
                out = from_g(p, p1 / (2.0 * y), (p2 * y - p1) / (4.0 * y * y * y));
            }
            break;
        }
    }
    if (out.df == 0.0) throw DomainError("shape " + tag() + ": f'(Q) = 0");
    return out;
}

}  // namespace rotlab
