#pragma once

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>

namespace chemo {

template <typename Scalar>
using Vector2 = Eigen::Matrix<Scalar, 2, 1>;

using Vector2d = Vector2<double>;

enum class Species { Alpha, Beta };

inline const char* to_string(Species s) { return s == Species::Alpha ? "alpha" : "beta"; }

/// Raised when a realisation becomes numerically invalid (non-finite state,
/// runaway reflection, failed solve). Carries the step index when known.
class SimulationError : public std::runtime_error {
public:
    explicit SimulationError(const std::string& what, long step = -1)
        : std::runtime_error(step >= 0 ? what + " (step " + std::to_string(step) + ")" : what),
          step_(step) {}

    long step() const { return step_; }

private:
    long step_;
};

/// Axis-aligned square with per-axis periodic or reflecting behaviour.
/// Periodic axes are half-open [min, max); reflecting axes are closed.
template <typename Scalar>
struct Domain {
    Vector2<Scalar> min = Vector2<Scalar>::Constant(Scalar(-0.5));
    Vector2<Scalar> max = Vector2<Scalar>::Constant(Scalar(0.5));
    std::array<bool, 2> periodic{false, false};

    static Domain centered_square(Scalar side, bool is_periodic) {
        Domain d;
        d.min.setConstant(-side / 2);
        d.max.setConstant(side / 2);
        d.periodic = {is_periodic, is_periodic};
        return d;
    }

    Vector2<Scalar> extent() const { return max - min; }

    bool contains(const Vector2<Scalar>& p) const {
        for (int a = 0; a < 2; ++a) {
            if (!(p[a] >= min[a])) return false;
            if (periodic[a] ? !(p[a] < max[a]) : !(p[a] <= max[a])) return false;
        }
        return true;
    }
};

/// Shortest image of a raw displacement. Components on periodic axes are
/// shifted by one period at most, which is enough for points inside (or one
/// step outside) the domain.
template <typename Scalar>
Vector2<Scalar> minimum_image(Vector2<Scalar> d, const Domain<Scalar>& domain) {
    const Vector2<Scalar> len = domain.extent();
    for (int a = 0; a < 2; ++a) {
        if (!domain.periodic[a]) continue;
        if (d[a] > len[a] / 2) {
            d[a] -= len[a];
        } else if (d[a] < -len[a] / 2) {
            d[a] += len[a];
        }
    }
    return d;
}

/// Emits a warning once per distinct message (stderr by default).
void warn_once(const std::string& message);

/// Replaces the warning sink; returns the previous one. Used by tests.
using WarningSink = void (*)(const std::string&);
WarningSink set_warning_sink(WarningSink sink);

}  // namespace chemo
