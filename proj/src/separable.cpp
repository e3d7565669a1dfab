#include "eblab/separable.hpp"

#include <algorithm>
#include <cmath>

namespace eblab {

SeparableSimple SeparableSimple::zero(Index n) {
    return {Vector::Zero(n), Vector::Constant(n, -kInf), Vector::Constant(n, kInf)};
}

SeparableSimple SeparableSimple::l1(Index n, double weight) {
    if (!(weight >= 0.0)) throw InvalidArgument("l1 weight must be nonnegative");
    return {Vector::Constant(n, weight), Vector::Constant(n, -kInf), Vector::Constant(n, kInf)};
}

SeparableSimple SeparableSimple::box(const Vector& lower, const Vector& upper) {
    if (lower.size() != upper.size()) throw InvalidArgument("box bounds differ in size");
    for (Index i = 0; i < lower.size(); ++i) {
        if (!(lower[i] <= upper[i])) throw InvalidArgument("box lower bound exceeds upper bound");
    }
    return {Vector::Zero(lower.size()), lower, upper};
}

bool SeparableSimple::is_zero() const {
    for (Index i = 0; i < size(); ++i) {
        if (l1_weights[i] != 0.0 || std::isfinite(lower[i]) || std::isfinite(upper[i])) return false;
    }
    return true;
}

double SeparableSimple::value(const Vector& x) const {
    double v = 0.0;
    for (Index i = 0; i < size(); ++i) {
        if (x[i] < lower[i] || x[i] > upper[i]) return kInf;
        v += l1_weights[i] * std::abs(x[i]);
    }
    return v;
}

// In one dimension the prox of a convex h plus an interval indicator is the
// clamp of prox_h.
Vector SeparableSimple::prox(const Vector& x, double t) const {
    Vector out(x.size());
    for (Index i = 0; i < x.size(); ++i) {
        out[i] = std::clamp(soft_threshold(x[i], t * l1_weights[i]), lower[i], upper[i]);
    }
    return out;
}

std::optional<Vector> SeparableSimple::least_norm(const Vector& x, const Vector& shift) const {
    Vector out(x.size());
    for (Index i = 0; i < x.size(); ++i) {
        if (x[i] < lower[i] || x[i] > upper[i]) return std::nullopt;
        const double w = l1_weights[i];
        double lo = 0.0;
        double hi = 0.0;
        if (x[i] > 0.0) {
            lo = hi = w;
        } else if (x[i] < 0.0) {
            lo = hi = -w;
        } else {
            lo = -w;
            hi = w;
        }
        // normal cone of the box
        if (x[i] == lower[i]) lo = -kInf;
        if (x[i] == upper[i]) hi = kInf;
        out[i] = shift[i] + std::clamp(-shift[i], lo, hi);
    }
    return out;
}

SeparableSimple SeparableSimple::segment(Index offset, Index length) const {
    return {l1_weights.segment(offset, length), lower.segment(offset, length),
            upper.segment(offset, length)};
}

void attach_simple(ObjectiveModel& model, const SeparableSimple& g) {
    if (g.size() != model.dim) throw InvalidArgument("simple part dimension mismatch");
    model.simple_is_zero = g.is_zero();
    model.simple_value = [g](const Vector& x) { return g.value(x); };
    model.simple_prox = [g](const Vector& x, double t) { return g.prox(x, t); };
    model.simple_least_norm_subgradient = [g](const Vector& x, const Vector& shift) {
        return g.least_norm(x, shift);
    };
}

}  // namespace eblab
