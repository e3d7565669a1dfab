#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace eblab {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Absolute tolerance under which a residual counts as zero.
inline constexpr double kResidualZeroTol = 1e-9;

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A documented precondition was violated by the caller.
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// The model returned something it never should (non-finite smooth value, ...).
class ModelError : public Error {
public:
    using Error::Error;
};

/// Point lies outside dom of the subdifferential; encodes the convention
/// that the least-norm subgradient has infinite norm there.
class OutsideDomain : public Error {
public:
    using Error::Error;
};

class UnsupportedComposite : public Error {
public:
    using Error::Error;
};

class UnsolvedReference : public Error {
public:
    using Error::Error;
};

/// Solver divergence guard tripped.
class DivergenceError : public Error {
public:
    using Error::Error;
};

// ---------------------------------------------------------------------------
// Critical-set geometry
// ---------------------------------------------------------------------------

/// {x : M x = c}. The pseudo-inverse is cached at construction.
struct AffineSet {
    Matrix M;
    Vector c;
    Matrix pinv;

    AffineSet() = default;
    AffineSet(Matrix M_, Vector c_);
};

struct SinglePoint {
    Vector x_star;
};

struct FiniteSet {
    std::vector<Vector> points;
};

/// Reference minimizer from a high-accuracy solve. Distances are measured to
/// x_ref only, so this is meaningful when the minimizer is unique.
struct NumericOracle {
    std::optional<Vector> x_ref;
    double solve_tolerance = 1e-12;
};

struct CriticalSet {
    std::variant<AffineSet, SinglePoint, FiniteSet, NumericOracle> shape;
    double min_value = 0.0;
};

struct BlockInfo {
    Index offset = 0;
    Index length = 0;
    double lipschitz = 0.0;
};

/// Shape of the outer function in phi = f(e(x)) + g(x). The only family the
/// composite machinery solves in closed form is outer_dim == 1 with f(t) = t.
struct CompositeStructure {
    int outer_dim = 1;
    bool outer_linear = true;
};

struct ExpectedConstant {
    std::string condition;  // "res-eb", "cor-eb", ...
    std::string op;         // residual operator the constant refers to
    double value = 0.0;
    std::string note;
};

/// phi = f + g with oracles for both parts.
///
/// Fields are plain data; treat a constructed model as immutable. All
/// callables must be pure so that models can be evaluated concurrently.
struct ObjectiveModel {
    std::string name;
    Index dim = 0;

    std::function<double(const Vector&)> smooth_value;
    std::function<Vector(const Vector&)> smooth_gradient;
    double smooth_lipschitz = 0.0;
    bool smooth_is_zero = false;

    std::function<double(const Vector&)> simple_value;
    std::function<Vector(const Vector&, double)> simple_prox;
    /// Least-norm element of shift + dg(x); nullopt when dg(x) is empty.
    /// With shift = 0 this is the least-norm subgradient of g itself.
    std::function<std::optional<Vector>(const Vector&, const Vector&)> simple_least_norm_subgradient;
    bool simple_is_zero = true;

    /// prox of the whole objective, prox_{t phi}. Optional; needed by the
    /// Moreau-gradient operator unless one of the parts vanishes.
    std::function<Vector(const Vector&, double)> objective_prox;

    std::vector<BlockInfo> blocks;
    CriticalSet critical_set;
    std::optional<double> strong_convexity;
    CompositeStructure composite;
    std::vector<ExpectedConstant> expected;

    /// Throws InvalidArgument when an invariant is broken.
    void validate() const;
};

// ---------------------------------------------------------------------------
// Residual operators
// ---------------------------------------------------------------------------

namespace residual_kind {
struct Gradient {};
struct LeastNormSubgradient {};
struct ProxGradientResidual {
    double t;
};
struct MoreauGradient {
    double lambda;
};
struct CompositeG {
    double L;
};
}  // namespace residual_kind

using ResidualKind = std::variant<residual_kind::Gradient, residual_kind::LeastNormSubgradient,
                                  residual_kind::ProxGradientResidual, residual_kind::MoreauGradient,
                                  residual_kind::CompositeG>;

std::string to_string(const ResidualKind& kind);

/// Sublevel region {x : phi(x) <= min phi + r} intersected with an optional
/// domain predicate. r = +inf means no level restriction.
struct Region {
    double level_offset = kInf;
    std::function<bool(const Vector&)> domain_restriction;

    bool contains(const struct ObjectiveModel& model, const Vector& x) const;
};

// ---------------------------------------------------------------------------
// Operations
// ---------------------------------------------------------------------------

double evaluate(const ObjectiveModel& model, const Vector& x);

double distance_to_critical(const ObjectiveModel& model, const Vector& x);

/// Nearest critical point; lexicographically smallest among ties.
Vector project_to_critical(const ObjectiveModel& model, const Vector& x);

/// Every nearest critical point (more than one only for FiniteSet ties).
std::vector<Vector> nearest_critical_points(const ObjectiveModel& model, const Vector& x);

Vector residual(const ObjectiveModel& model, const ResidualKind& kind, const Vector& x);

/// Minimizer of g(x) + <grad e(y), x - y> + L/2 |x - y|^2 for the f(t) = t,
/// m = 1 composite family, i.e. prox_{g/L}(y - grad e(y) / L).
Vector prox_linearized(const ObjectiveModel& model, double L, const Vector& y);

/// prox_{t phi}(x).
Vector objective_prox(const ObjectiveModel& model, const Vector& x, double t);

/// Moreau envelope phi_lambda(x) = phi(p) + |x - p|^2 / (2 lambda), p = prox.
double moreau_envelope(const ObjectiveModel& model, double lambda, const Vector& x);

/// Runs forward-backward splitting with t = 1/L until |R_t| <= tol or
/// max_iter, and stores the result as the model's NumericOracle reference.
void solve_numeric_oracle(ObjectiveModel& model, double tol = 1e-12, long max_iter = 1'000'000);

/// Single critical point when the descriptor represents a unique minimizer.
std::optional<Vector> unique_minimizer(const ObjectiveModel& model);

// ---------------------------------------------------------------------------
// Composite problems phi = f(e(x)) + g(x)
// ---------------------------------------------------------------------------

/// A composite objective together with its linearized-prox map p(y).
/// `model` carries phi, its critical set and min value.
struct CompositeSpec {
    ObjectiveModel model;
    std::function<Vector(const Vector& y, double L)> prox_linearized;
};

/// Wraps an m = 1, f(t) = t model; rejects anything else.
CompositeSpec composite_from_model(ObjectiveModel model);

inline Vector composite_p(const CompositeSpec& spec, double L, const Vector& y) {
    return spec.prox_linearized(y, L);
}

/// G(y) = L (y - p(y)).
inline Vector composite_G(const CompositeSpec& spec, double L, const Vector& y) {
    return L * (y - spec.prox_linearized(y, L));
}

}  // namespace eblab
