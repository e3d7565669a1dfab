#include "eblab/core.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace eblab {

AffineSet::AffineSet(Matrix M_, Vector c_) : M(std::move(M_)), c(std::move(c_)) {
    if (M.rows() != c.size()) throw InvalidArgument("affine set: M and c disagree in rows");
    pinv = Eigen::CompleteOrthogonalDecomposition<Matrix>(M).pseudoInverse();
    const Vector x = pinv * c;
    const double inconsistency = (M * x - c).norm();
    if (inconsistency > 1e-8 * std::max(1.0, c.norm())) {
        throw InvalidArgument("affine set: M x = c has no solution");
    }
}

namespace {

Index shape_dim(const CriticalSet& cs) {
    return std::visit(
        [](const auto& s) -> Index {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, AffineSet>) {
                return s.M.cols();
            } else if constexpr (std::is_same_v<T, SinglePoint>) {
                return s.x_star.size();
            } else if constexpr (std::is_same_v<T, FiniteSet>) {
                return s.points.empty() ? -1 : s.points.front().size();
            } else {
                return s.x_ref ? s.x_ref->size() : -1;
            }
        },
        cs.shape);
}

bool lex_less(const Vector& a, const Vector& b) {
    return std::lexicographical_compare(a.data(), a.data() + a.size(), b.data(), b.data() + b.size());
}

}  // namespace

void ObjectiveModel::validate() const {
    if (dim < 1) throw InvalidArgument("model dimension must be >= 1");
    if (!smooth_value || !smooth_gradient) throw InvalidArgument("smooth oracles missing");
    if (!simple_value || !simple_prox) throw InvalidArgument("simple oracles missing");
    if (!(smooth_lipschitz > 0.0) || !std::isfinite(smooth_lipschitz)) {
        throw InvalidArgument("smooth Lipschitz modulus must be positive and finite");
    }
    if (!blocks.empty()) {
        Index next = 0;
        for (const auto& b : blocks) {
            if (b.offset != next || b.length < 1) throw InvalidArgument("blocks do not partition [0, n)");
            if (!(b.lipschitz > 0.0)) throw InvalidArgument("block Lipschitz constants must be positive");
            next += b.length;
        }
        if (next != dim) throw InvalidArgument("blocks do not partition [0, n)");
    }
    const Index cdim = shape_dim(critical_set);
    if (cdim != -1 && cdim != dim) throw InvalidArgument("critical set dimension mismatch");
    if (const auto* fs = std::get_if<FiniteSet>(&critical_set.shape); fs && fs->points.empty()) {
        throw InvalidArgument("finite critical set is empty");
    }
    if (strong_convexity && !(*strong_convexity > 0.0)) {
        throw InvalidArgument("strong convexity modulus must be positive");
    }
}

std::string to_string(const ResidualKind& kind) {
    std::ostringstream os;
    os.precision(17);
    std::visit(
        [&os](const auto& k) {
            using T = std::decay_t<decltype(k)>;
            if constexpr (std::is_same_v<T, residual_kind::Gradient>) {
                os << "gradient";
            } else if constexpr (std::is_same_v<T, residual_kind::LeastNormSubgradient>) {
                os << "least-norm-subgradient";
            } else if constexpr (std::is_same_v<T, residual_kind::ProxGradientResidual>) {
                os << "prox-gradient(t=" << k.t << ")";
            } else if constexpr (std::is_same_v<T, residual_kind::MoreauGradient>) {
                os << "moreau-gradient(lambda=" << k.lambda << ")";
            } else {
                os << "composite-G(L=" << k.L << ")";
            }
        },
        kind);
    return os.str();
}

bool Region::contains(const ObjectiveModel& model, const Vector& x) const {
    if (domain_restriction && !domain_restriction(x)) return false;
    const double v = evaluate(model, x);
    if (!std::isfinite(v)) return false;
    if (!std::isfinite(level_offset)) return true;
    return v <= model.critical_set.min_value + level_offset;
}

double evaluate(const ObjectiveModel& model, const Vector& x) {
    const double f = model.smooth_value(x);
    if (!std::isfinite(f)) throw ModelError("smooth part returned a non-finite value");
    const double g = model.simple_value(x);
    return f + g;
}

std::vector<Vector> nearest_critical_points(const ObjectiveModel& model, const Vector& x) {
    return std::visit(
        [&x](const auto& s) -> std::vector<Vector> {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, AffineSet>) {
                return {x - s.pinv * (s.M * x - s.c)};
            } else if constexpr (std::is_same_v<T, SinglePoint>) {
                return {s.x_star};
            } else if constexpr (std::is_same_v<T, FiniteSet>) {
                double best = kInf;
                for (const auto& p : s.points) best = std::min(best, (x - p).norm());
                const double tie = 1e-12 * std::max(1.0, best);
                std::vector<Vector> out;
                for (const auto& p : s.points) {
                    if ((x - p).norm() <= best + tie) out.push_back(p);
                }
                std::sort(out.begin(), out.end(), lex_less);
                return out;
            } else {
                if (!s.x_ref) throw UnsolvedReference("numeric critical set has no reference solution");
                return {*s.x_ref};
            }
        },
        model.critical_set.shape);
}

Vector project_to_critical(const ObjectiveModel& model, const Vector& x) {
    return nearest_critical_points(model, x).front();
}

double distance_to_critical(const ObjectiveModel& model, const Vector& x) {
    return (x - project_to_critical(model, x)).norm();
}

Vector objective_prox(const ObjectiveModel& model, const Vector& x, double t) {
    if (!(t > 0.0)) throw InvalidArgument("prox parameter must be positive");
    if (model.objective_prox) return model.objective_prox(x, t);
    if (model.smooth_is_zero) return model.simple_prox(x, t);
    throw InvalidArgument("model '" + model.name + "' has no prox oracle for the full objective");
}

double moreau_envelope(const ObjectiveModel& model, double lambda, const Vector& x) {
    const Vector p = objective_prox(model, x, lambda);
    return evaluate(model, p) + (x - p).squaredNorm() / (2.0 * lambda);
}

Vector prox_linearized(const ObjectiveModel& model, double L, const Vector& y) {
    if (model.composite.outer_dim != 1 || !model.composite.outer_linear) {
        throw UnsupportedComposite("composite subproblem is only solved for m = 1 with f(t) = t");
    }
    if (!(L > 0.0)) throw InvalidArgument("L must be positive");
    return model.simple_prox(y - model.smooth_gradient(y) / L, 1.0 / L);
}

Vector residual(const ObjectiveModel& model, const ResidualKind& kind, const Vector& x) {
    return std::visit(
        [&](const auto& k) -> Vector {
            using T = std::decay_t<decltype(k)>;
            if constexpr (std::is_same_v<T, residual_kind::Gradient>) {
                return model.smooth_gradient(x);
            } else if constexpr (std::is_same_v<T, residual_kind::LeastNormSubgradient>) {
                if (!model.simple_least_norm_subgradient) {
                    throw InvalidArgument("least-norm subgradient needs a separable simple part");
                }
                auto v = model.simple_least_norm_subgradient(x, model.smooth_gradient(x));
                if (!v) throw OutsideDomain("point lies outside dom of the subdifferential");
                return *v;
            } else if constexpr (std::is_same_v<T, residual_kind::ProxGradientResidual>) {
                if (!(k.t > 0.0) || k.t > (1.0 + 1e-12) / model.smooth_lipschitz) {
                    throw InvalidArgument("prox-gradient residual needs t in (0, 1/L]");
                }
                const Vector p = model.simple_prox(x - k.t * model.smooth_gradient(x), k.t);
                return (x - p) / k.t;
            } else if constexpr (std::is_same_v<T, residual_kind::MoreauGradient>) {
                if (!(k.lambda > 0.0)) throw InvalidArgument("Moreau parameter must be positive");
                return (x - objective_prox(model, x, k.lambda)) / k.lambda;
            } else {
                return k.L * (x - prox_linearized(model, k.L, x));
            }
        },
        kind);
}

void solve_numeric_oracle(ObjectiveModel& model, double tol, long max_iter) {
    auto* oracle = std::get_if<NumericOracle>(&model.critical_set.shape);
    if (!oracle) throw InvalidArgument("critical set is not a numeric oracle");
    const double t = 1.0 / model.smooth_lipschitz;
    Vector x = oracle->x_ref.value_or(Vector::Zero(model.dim));
    for (long k = 0; k < max_iter; ++k) {
        const Vector p = model.simple_prox(x - t * model.smooth_gradient(x), t);
        const double r = (x - p).norm() / t;
        x = p;
        if (r <= tol) break;
    }
    oracle->x_ref = x;
    oracle->solve_tolerance = tol;
    model.critical_set.min_value = evaluate(model, x);
}

std::optional<Vector> unique_minimizer(const ObjectiveModel& model) {
    return std::visit(
        [](const auto& s) -> std::optional<Vector> {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, AffineSet>) {
                Eigen::CompleteOrthogonalDecomposition<Matrix> cod(s.M);
                if (cod.rank() != s.M.cols()) return std::nullopt;
                return Vector(s.pinv * s.c);
            } else if constexpr (std::is_same_v<T, SinglePoint>) {
                return s.x_star;
            } else if constexpr (std::is_same_v<T, FiniteSet>) {
                if (s.points.size() != 1) return std::nullopt;
                return s.points.front();
            } else {
                return s.x_ref;
            }
        },
        model.critical_set.shape);
}

CompositeSpec composite_from_model(ObjectiveModel model) {
    if (model.composite.outer_dim != 1 || !model.composite.outer_linear) {
        throw UnsupportedComposite("composite subproblem is only solved for m = 1 with f(t) = t");
    }
    CompositeSpec spec;
    spec.model = std::move(model);
    spec.prox_linearized = [m = spec.model](const Vector& y, double L) { return prox_linearized(m, L, y); };
    return spec;
}

}  // namespace eblab
