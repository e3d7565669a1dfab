#pragma once

#include "eblab/core.hpp"

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace eblab::eb {

enum class Condition { ResEB, CorEB, ObjEB, ResObjEB, CorResEB, CorObjEB };

std::string to_string(Condition c);
Condition parse_condition(const std::string& name);

/// Absolute slack allowed on each inequality.
inline constexpr double kSlackTol = 1e-8;
/// Samples closer than this to the critical set are left out of ratio estimates.
inline constexpr double kCriticalFilter = 1e-8;

enum class Strategy { GaussianRejection, RayFromCritical, Grid };

std::string to_string(Strategy s);
Strategy parse_strategy(const std::string& name);

struct SamplePlan {
    Region region;
    int count = 1000;
    std::uint64_t seed = 0;
    Strategy strategy = Strategy::GaussianRejection;
    /// Sampling scale. Defaults to a sublevel-radius estimate of the region.
    std::optional<double> sigma;
    /// Sampling center. Defaults to the critical point nearest the origin.
    std::optional<Vector> center;
    int threads = 1;
};

struct SampleSet {
    std::vector<Vector> points;
    int rejected = 0;
};

/// Draws points from the plan. Deterministic in (model, plan) and
/// independent of plan.threads.
SampleSet draw_samples(const ObjectiveModel& model, const SamplePlan& plan);

/// Everything the six conditions need at one point.
struct PointEval {
    Vector x;
    double dist = 0.0;
    double gap = 0.0;
    double resid_norm = 0.0;
    /// min over nearest critical points x_p of <G(x), x - x_p>
    double corr = 0.0;
};

struct EvalSet {
    std::vector<PointEval> evals;
    int skipped = 0;  // points outside dom of the subdifferential
};

EvalSet evaluate_points(const ObjectiveModel& model, const ResidualKind& op, const std::vector<Vector>& points,
                        int threads = 1);

/// lhs - constant * rhs for one point; the condition holds when >= -kSlackTol.
double slack(Condition c, double constant, const PointEval& e);

/// Defining ratio lhs / rhs, or nullopt when the point is excluded
/// (too close to the critical set or zero denominator).
std::optional<double> ratio(Condition c, const PointEval& e);

struct EBCheckReport {
    std::string kind;
    std::string op;
    double claimed_constant = 0.0;
    bool pass = false;
    double worst_ratio = kInf;
    Vector witness;
    int samples_used = 0;
    int samples_skipped = 0;
    double worst_slack = kInf;
    std::optional<Vector> witness_y;
};

nlohmann::json to_json(const EBCheckReport& r);

/// Verdict over an already evaluated sample set.
EBCheckReport check_evals(Condition c, const std::string& op, double constant, const EvalSet& set);

EBCheckReport check_condition(const ObjectiveModel& model, const ResidualKind& op, Condition c, double constant,
                              const SamplePlan& plan);

/// Infimum of the defining ratio over the evaluated samples.
double estimate_from_evals(Condition c, const EvalSet& set);

double estimate_constant(const ObjectiveModel& model, const ResidualKind& op, Condition c, const SamplePlan& plan);

struct ImplicationConstants {
    std::optional<double> nu;
    std::optional<double> kappa;
    std::optional<double> eta;
    std::optional<double> alpha_reverse;
};

/// nu = alpha omega / 2, kappa = nu, eta = sqrt(kappa omega), alpha' = eta^2 / 2.
ImplicationConstants implication_constants(std::optional<double> alpha, double omega,
                                           std::optional<double> kappa = std::nullopt,
                                           std::optional<double> eta = std::nullopt);

struct LegReport {
    std::string name;
    double constant = 0.0;  // constant concluded by the leg
    int premises = 0;       // samples satisfying the leg's hypotheses
    int violations = 0;
    bool pass = false;
};

struct ChainReport {
    std::string op;
    double alpha_hat = 0.0;
    double omega = 0.0;
    bool omega_from_subgradient_inequality = false;
    double nu = 0.0;
    double kappa = 0.0;
    double eta = 0.0;
    std::vector<LegReport> legs;
    double eta_hat = 0.0;
    double alpha_reverse = 0.0;
    EBCheckReport reverse;
    int samples_used = 0;
    int samples_skipped = 0;
    bool pointwise_pass = false;
};

/// Relative allowance on the reverse-leg constant. The empirical eta_hat
/// and alpha_hat both approach the same limit from above on quadratics, so
/// the reverse check compares two sampling errors.
inline constexpr double kReverseLegAllowance = 0.05;

ChainReport verify_implication_chain(const ObjectiveModel& model, const ResidualKind& op, const SamplePlan& plan);

nlohmann::json to_json(const ChainReport& r);

struct Assum2Report {
    EBCheckReport check;
    double epsilon = 0.0;
    double t = 0.0;
    double implied_omega = 0.0;
};

/// |R_t(x)|^2 >= epsilon (phi(x) - phi(x+)) on samples, x+ the FBS step.
Assum2Report check_assum2(const ObjectiveModel& model, double t, double epsilon, const SamplePlan& plan);

/// Cartesian product of test points for the composite inequality.
struct PairGrid {
    std::vector<Vector> xs;
    std::vector<Vector> ys;

    /// 1-D grid helper: xs over [x_lo, x_hi] and ys over [y_lo, y_hi] at `step`.
    static PairGrid scalar(double x_lo, double x_hi, double y_lo, double y_hi, double step);
};

/// Composite EB inequality on every (x, y) pair. worst_ratio holds the largest
/// mu the grid supports (the implied constant); witness / witness_y the worst pair.
EBCheckReport check_composite_eb(const CompositeSpec& spec, double mu, double L, const PairGrid& grid,
                                 int threads = 1);

struct Rel1Case {
    double mu = 0.0;
    bool violated = false;
    int violations = 0;
    int pairs = 0;
    Vector witness_x;
    Vector witness_y;
};

struct Rel1Report {
    Vector a;
    Vector h;
    std::vector<Rel1Case> cases;
    bool all_violated = false;
};

/// e(x) = 1/2 (a'x)^2 with L = |a|^2 against the smooth relaxation of strong
/// convexity, along y - x = s h, h orthogonal to a. Pairs with x = y are skipped.
Rel1Report check_rel1_failure_quadratic(const Vector& a, const std::vector<double>& mus,
                                        const std::vector<Vector>& base_points, const std::vector<double>& steps);

}  // namespace eblab::eb
