#pragma once

#include "eblab/core.hpp"
#include "eblab/eb.hpp"

#include <json.hpp>

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace eblab::dual {

/// A c-strongly convex primal g on R^m together with its conjugate.
struct ConjugatePair {
    std::string name;
    double c = 1.0;
    Index m = 0;
    std::function<double(const Vector&)> g_value;
    std::function<double(const Vector&)> g_conjugate_value;
    std::function<Vector(const Vector&)> g_conjugate_gradient;
    /// Some element of dg(y), for Fenchel-Young equality checks.
    std::function<Vector(const Vector&)> g_subgradient;
    /// Maps y_bar to the affine description of {z : grad g*(z) = y_bar},
    /// i.e. the right-hand side r with z = r. nullopt when that set is not a point.
    std::function<std::optional<Vector>(const Vector&)> conjugate_gradient_preimage;
    std::optional<Vector> y_bar;
};

/// g(y) = c/2 |y - y0|^2.
ConjugatePair quadratic_pair(double c, const Vector& y0);

/// g(y) = c/2 |y|^2 + |y|_1.
ConjugatePair elastic_net_pair(double c, Index m);

struct DualModel {
    ObjectiveModel model;
    ConjugatePair pair;
    Matrix A;
    Vector b;
};

/// f(x) = g*(A'x) - <b, x> for the primal min g(y) s.t. Ay = b, A in R^{n x m}.
DualModel build_dual(ConjugatePair pair, const Matrix& A, const Vector& b);

struct PairCheck {
    double fenchel_young_min_gap = kInf;      // min of g(y) + g*(z) - <y, z>
    double fenchel_young_max_equality = 0.0;  // max of the same at z in dg(y)
    double lipschitz_max_ratio = 0.0;         // max |grad g*(z) - grad g*(w)| / |z - w|
    int pairs = 0;
    bool pass = false;
};

PairCheck check_conjugate_pair(const ConjugatePair& pair, int count, std::uint64_t seed, double scale = 3.0);

struct RadiusRow {
    double r = 0.0;
    double rho = 1.0;
    double nu_hat = 0.0;
    double ratio = 0.0;  // nu_hat * 8 / (alpha_hat * rho^2)
    int samples = 0;
};

struct DualEBReport {
    double r0 = 0.0;
    double r1 = 0.0;
    double alpha_hat = 0.0;
    int alpha_samples = 0;
    std::vector<RadiusRow> rows;
    bool alpha_positive = false;
    bool nu_positive = false;
    bool nu_nonincreasing = false;
    bool ratios_ok = false;
};

/// Ratios below this fraction of the predicted scaling count as failures.
inline constexpr double kDualRatioFloor = 0.9;

/// obj-EB on X_{r0}, then cor-EB on each X_r. Samples for smaller radii are
/// pooled into larger ones (X_r grows with r), so nu_hat_r is the infimum over
/// one nested family.
DualEBReport verify_dual_eb(const DualModel& dual, double r0, const std::vector<double>& r_grid,
                            const eb::SamplePlan& plan);

nlohmann::json to_json(const DualEBReport& r);

}  // namespace eblab::dual
