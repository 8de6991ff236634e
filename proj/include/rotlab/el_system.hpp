#pragma once

// The rotator Lagrangian plus an optional uniform-field coupling, packaged for
// the Euler-Lagrange machinery.

#include <array>
#include <optional>

#include "rotlab/chart.hpp"
#include "rotlab/euler_lagrange.hpp"
#include "rotlab/field.hpp"
#include "rotlab/rotator_model.hpp"

namespace rotlab {

enum class DerivativeEngine { forward, finite_difference };

class ELSystem {
public:
    explicit ELSystem(RotatorModel model, std::optional<UniformField> field = std::nullopt, double charge = 0.0,
                      DerivativeEngine engine = DerivativeEngine::forward)
        : model_(std::move(model)), field_(std::move(field)), charge_(charge), engine_(engine) {}

    const RotatorModel& model() const { return model_; }
    const std::optional<UniformField>& field() const { return field_; }
    double charge() const { return charge_; }
    DerivativeEngine engine() const { return engine_; }
    void set_engine(DerivativeEngine e) { engine_ = e; }

    bool coupled() const { return field_.has_value() && charge_ != 0.0; }

    /// Same system seen from a rotated spatial frame (fields rotate with it).
    ELSystem rotated(const Rotation& r) const;

    /// Total Lagrangian L_N + L_I.
    template <class T>
    T operator()(const std::array<T, 5>& q, const std::array<T, 5>& qd, const T& /*t*/) const {
        T L = reduced_lagrangian(model_, q, qd);
        if (coupled()) L = L + field_->interaction(charge_, q, qd);
        return L;
    }

    /// Hessian and Z at a state using the selected derivative engine. The
    /// state is used in its own chart; no pole handling here.
    ELTerms<5> terms(const ChartState& s) const;
    /// Velocity Hessian only.
    Mat5 hessian(const ChartState& s) const;

private:
    RotatorModel model_;
    std::optional<UniformField> field_;
    double charge_;
    DerivativeEngine engine_;
};

inline PhasePoint<5> phase_point(const ChartState& s) { return {s.q(), s.qd(), s.t}; }

}  // namespace rotlab
