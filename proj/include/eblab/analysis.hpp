#pragma once

#include "eblab/core.hpp"
#include "eblab/eb.hpp"
#include "eblab/solvers.hpp"

#include <json.hpp>

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace eblab::analysis {

enum class Metric { Dist2, Gap, TailSum, Phi, Lyapunov };

std::string to_string(Metric m);
Metric parse_metric(const std::string& name);

std::vector<double> metric_values(const solvers::SolverTrace& trace, Metric m);

enum class RateStatus { Ok, AlreadyConverged };

struct RateReport {
    Metric metric = Metric::Dist2;
    std::vector<double> ratios;
    double tau_hat_max = 0.0;
    double tau_hat_geo = 0.0;
    std::optional<double> predicted_tau;
    int burn_in = 0;
    RateStatus status = RateStatus::Ok;
};

nlohmann::json to_json(const RateReport& r);

/// Ratios m_{k+1} / m_k for k >= burn_in wherever m_k > floor.
RateReport measure_rate(const solvers::SolverTrace& trace, Metric m, int burn_in = 5, double floor = 1e-14);

/// Same, on a plain sequence.
RateReport measure_rate(const std::vector<double>& values, Metric m, int burn_in = 5, double floor = 1e-14);

/// Identifiers: S3-smooth-strongly-convex, S3-RSC, S3-regularity, T51-abstract,
/// C52-gd-gap, C52-gd-dist, C54-ppa, C56-fbs, T61-palm, qlin1-nesterov,
/// T72-nesterov. Constants by name (mu, L, nu, alpha, beta, lambda, eta,
/// L_min, L_max, p, theta).
double predicted_rate(const std::string& id, const std::map<std::string, double>& constants);

std::vector<std::string> predicted_rate_ids();

struct StepWindow {
    double lo = 0.0;
    double hi = 0.0;
    double tau_bound = 1.0;
    double tau = 1.0;
    bool feasible = false;
};

/// Step sizes h with (1 - tau) / (2 theta nu) <= h <= 2 (1 - theta) beta.
/// tau defaults to the smallest admissible value 1 - 4 theta (1 - theta) beta nu.
StepWindow stepsize_window(double theta, double nu, double beta, std::optional<double> tau = std::nullopt);

struct NecessityParams {
    std::optional<double> h;
    std::optional<double> L;
    std::optional<double> beta;
    std::optional<double> lambda;
    std::optional<double> t;
    std::optional<ResidualKind> op;
    /// Evaluation points for the basic condition (the GD iterates).
    std::vector<Vector> points;
};

struct NecessityResult {
    bool applicable = false;
    std::string method;
    double observed_tau = 1.0;
    std::string constant_name;
    double implied_constant = 0.0;
    std::optional<eb::EBCheckReport> check;
    std::string message;
};

nlohmann::json to_json(const NecessityResult& r);

/// Methods: P31-gd-basic, T51-abstract, C52-gd, C54-ppa, C56-fbs.
NecessityResult necessity_check(const ObjectiveModel& model, const std::string& method, double observed_tau,
                                const NecessityParams& params, const eb::SamplePlan& plan);

/// <grad f(x), x - u> >= (1 - tau)/(2h) d^2 + (h/2) |grad f(x)|^2 at each point,
/// u ranging over the nearest critical points.
eb::EBCheckReport check_basic_condition(const ObjectiveModel& model, const std::vector<Vector>& points, double tau,
                                        double h);

}  // namespace eblab::analysis
