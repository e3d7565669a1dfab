#pragma once

#include "eblab/core.hpp"

#include <json.hpp>

#include <optional>
#include <string>
#include <vector>

namespace eblab::solvers {

struct SolverConfig {
    Vector x0;
    long max_iter = 100000;
    /// Stop once the method's residual norm drops to this value.
    double stop_tol = 1e-12;
    /// Abort when gap_k exceeds this multiple of gap_0.
    double divergence_factor = 1e3;
};

struct TraceRow {
    long k = 0;
    Vector x;
    double gap = 0.0;
    double dist = 0.0;
    double resid = 0.0;
    // accelerated method only
    std::optional<Vector> y;
    std::optional<Vector> z;
    std::optional<double> phi;
    std::optional<double> lyapunov;
};

struct SolverTrace {
    std::string method;
    std::vector<TraceRow> rows;
    bool converged = false;
    /// tau used for Phi_k (accelerated method only).
    std::optional<double> tau;

    /// S_k = sum_{i >= k} resid_i^2 over the recorded rows.
    std::vector<double> tail_sums() const;
};

nlohmann::json to_json(const SolverTrace& t);

enum class GdPreset { InverseL, Optimal };

/// 1/L, or 2/(mu + L) when the model carries a strong convexity modulus.
double gd_step(const ObjectiveModel& model, GdPreset preset);

/// x+ = x - h grad f(x). Needs g = 0.
SolverTrace gradient_descent(const ObjectiveModel& model, double h, const SolverConfig& config);

/// x+ = x - h G(x).
SolverTrace abstract_gradient(const ObjectiveModel& model, const ResidualKind& op, double h,
                              const SolverConfig& config);

/// x+ = prox_{lambda phi}(x), evaluated as x - lambda * grad phi_lambda(x).
SolverTrace ppa(const ObjectiveModel& model, double lambda, const SolverConfig& config);

/// x+ = prox_{tg}(x - t grad f(x)), evaluated as x - t R_t(x).
SolverTrace fbs(const ObjectiveModel& model, double t, const SolverConfig& config);

/// Cyclic block prox-gradient sweeps with t_j = 1/L_j; one row per sweep.
/// Requires a coordinatewise separable simple part.
SolverTrace palm(const ObjectiveModel& model, const SolverConfig& config);

struct NesterovCoefficients {
    double alpha;
    double beta;
    double gamma;
};

NesterovCoefficients nesterov_coefficients(double mu, double L);

/// tau for Phi_k given theta: theta beta / (2 rho gamma), rho = max(alpha, theta).
double nesterov_tau(double mu, double L, double theta);

/// Default tau = 2 L mu / (sqrt L + sqrt mu)^2.
double nesterov_default_tau(double mu, double L);

/// Accelerated forward-backward method with x_{-1} = x_0. Records y_k, z_k,
/// Phi_k(x*; tau) and the baseline Lyapunov value with w_k.
SolverTrace nesterov_afb(const CompositeSpec& spec, double mu, double L, const SolverConfig& config,
                         std::optional<double> tau = std::nullopt);

/// Phi_k recomputed from a trace for a given tau.
std::vector<double> phi_sequence(const SolverTrace& trace, const ObjectiveModel& model, double tau);

struct ThetaSearch {
    double theta0 = 1.0;
    double rho = 1.0;
    double tau = 0.0;
    bool found = false;
};

/// Smallest theta in (0, 1) (by bisection) for which every recorded ratio
/// Phi_{k+1} / Phi_k with Phi_k > floor stays <= max(alpha, theta) + slack.
ThetaSearch estimate_theta0(const SolverTrace& trace, const ObjectiveModel& model, double mu, double L,
                            double floor = 1e-14, double slack = 0.0);

/// Upper bound on the residual mass beyond the last row when S_k contracts
/// by 1 - nu / (2L): (2L / nu - 1) |R_K|^2.
double fbs_truncation_slack(const SolverTrace& trace, double nu, double L);

}  // namespace eblab::solvers
