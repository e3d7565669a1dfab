#pragma once

#include "eblab/core.hpp"

namespace eblab {

/// Coordinatewise simple part
///   g(x) = sum_i w_i |x_i| + indicator{lower_i <= x_i <= upper_i}.
/// Covers l1, box indicators and their weighted sums.
struct SeparableSimple {
    Vector l1_weights;
    Vector lower;
    Vector upper;

    static SeparableSimple zero(Index n);
    static SeparableSimple l1(Index n, double weight);
    static SeparableSimple box(const Vector& lower, const Vector& upper);

    Index size() const { return l1_weights.size(); }
    bool is_zero() const;

    double value(const Vector& x) const;
    Vector prox(const Vector& x, double t) const;

    /// Least-norm element of shift + dg(x), computed by projecting -shift_i
    /// onto the coordinate subdifferential interval. nullopt outside the box.
    std::optional<Vector> least_norm(const Vector& x, const Vector& shift) const;

    /// Restriction to coordinates [offset, offset + length).
    SeparableSimple segment(Index offset, Index length) const;
};

inline double soft_threshold(double v, double kappa) {
    if (v > kappa) return v - kappa;
    if (v < -kappa) return v + kappa;
    return 0.0;
}

/// Installs g into the model's simple-part oracles.
void attach_simple(ObjectiveModel& model, const SeparableSimple& g);

}  // namespace eblab
