#include "eblab/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace eblab::solvers {

namespace {

void check_start(const ObjectiveModel& model, const SolverConfig& config) {
    if (config.x0.size() != model.dim) throw InvalidArgument("x0 has wrong dimension");
    if (!config.x0.allFinite()) throw InvalidArgument("x0 must be finite");
    if (config.max_iter < 0) throw InvalidArgument("max_iter must be nonnegative");
    if (!(config.stop_tol >= 0.0)) throw InvalidArgument("stop_tol must be nonnegative");
}

TraceRow make_row(const ObjectiveModel& model, long k, const Vector& x, double resid) {
    TraceRow row;
    row.k = k;
    row.x = x;
    row.gap = evaluate(model, x) - model.critical_set.min_value;
    row.dist = distance_to_critical(model, x);
    row.resid = resid;
    return row;
}

void guard(const SolverTrace& trace, const SolverConfig& config) {
    const double g0 = trace.rows.front().gap;
    const double gk = trace.rows.back().gap;
    if (!std::isfinite(gk) || (gk > 1e-12 && gk > config.divergence_factor * g0)) {
        std::ostringstream os;
        os << trace.method << " diverged at k=" << trace.rows.back().k << " (gap " << gk << ", initial " << g0
           << ")";
        throw DivergenceError(os.str());
    }
}

template <class ResidFn, class StepFn>
SolverTrace run(const ObjectiveModel& model, std::string method, const SolverConfig& config, ResidFn&& resid,
                StepFn&& step) {
    check_start(model, config);
    SolverTrace trace;
    trace.method = std::move(method);
    Vector x = config.x0;
    for (long k = 0;; ++k) {
        const Vector G = resid(x);
        trace.rows.push_back(make_row(model, k, x, G.norm()));
        guard(trace, config);
        if (trace.rows.back().resid <= config.stop_tol) {
            trace.converged = true;
            break;
        }
        if (k == config.max_iter) break;
        x = step(x, G);
    }
    return trace;
}

}  // namespace

std::vector<double> SolverTrace::tail_sums() const {
    std::vector<double> s(rows.size());
    double acc = 0.0;
    for (std::size_t i = rows.size(); i-- > 0;) {
        acc += rows[i].resid * rows[i].resid;
        s[i] = acc;
    }
    return s;
}

nlohmann::json to_json(const SolverTrace& t) {
    auto vec = [](const Vector& v) { return std::vector<double>(v.data(), v.data() + v.size()); };
    nlohmann::json j;
    j["method"] = t.method;
    j["converged"] = t.converged;
    if (t.tau) j["tau"] = *t.tau;
    const auto S = t.tail_sums();
    j["rows"] = nlohmann::json::array();
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
        const auto& r = t.rows[i];
        nlohmann::json row{{"k", r.k}, {"x", vec(r.x)}, {"gap", r.gap}, {"dist", r.dist}, {"resid", r.resid},
                           {"S", S[i]}};
        if (r.y) row["y"] = vec(*r.y);
        if (r.z) row["z"] = vec(*r.z);
        if (r.phi) row["phi"] = *r.phi;
        if (r.lyapunov) row["lyapunov"] = *r.lyapunov;
        j["rows"].push_back(std::move(row));
    }
    return j;
}

double gd_step(const ObjectiveModel& model, GdPreset preset) {
    const double L = model.smooth_lipschitz;
    if (preset == GdPreset::InverseL) return 1.0 / L;
    if (!model.strong_convexity) throw InvalidArgument("2/(mu+L) needs a strong convexity modulus");
    return 2.0 / (*model.strong_convexity + L);
}

SolverTrace gradient_descent(const ObjectiveModel& model, double h, const SolverConfig& config) {
    if (!(h > 0.0)) throw InvalidArgument("step size must be positive");
    if (!model.simple_is_zero) throw InvalidArgument("gradient descent needs g = 0");
    return run(
        model, "gd", config, [&](const Vector& x) { return model.smooth_gradient(x); },
        [&](const Vector& x, const Vector& G) -> Vector { return x - h * G; });
}

SolverTrace abstract_gradient(const ObjectiveModel& model, const ResidualKind& op, double h,
                              const SolverConfig& config) {
    if (!(h > 0.0)) throw InvalidArgument("step size must be positive");
    return run(
        model, "abstract-gradient[" + to_string(op) + "]", config,
        [&](const Vector& x) { return residual(model, op, x); },
        [&](const Vector& x, const Vector& G) -> Vector { return x - h * G; });
}

SolverTrace ppa(const ObjectiveModel& model, double lambda, const SolverConfig& config) {
    if (!(lambda > 0.0)) throw InvalidArgument("lambda must be positive");
    const ResidualKind op = residual_kind::MoreauGradient{lambda};
    return run(
        model, "ppa", config, [&](const Vector& x) { return residual(model, op, x); },
        [&](const Vector& x, const Vector& G) -> Vector { return x - lambda * G; });
}

SolverTrace fbs(const ObjectiveModel& model, double t, const SolverConfig& config) {
    if (!(t > 0.0) || t > (1.0 + 1e-12) / model.smooth_lipschitz) throw InvalidArgument("FBS needs t in (0, 1/L]");
    const ResidualKind op = residual_kind::ProxGradientResidual{t};
    return run(
        model, "fbs", config, [&](const Vector& x) { return residual(model, op, x); },
        [&](const Vector& x, const Vector& G) -> Vector { return x - t * G; });
}

SolverTrace palm(const ObjectiveModel& model, const SolverConfig& config) {
    if (model.blocks.empty()) throw InvalidArgument("PALM needs a block partition");
    const ResidualKind op = residual_kind::ProxGradientResidual{1.0 / model.smooth_lipschitz};
    return run(
        model, "palm", config, [&](const Vector& x) { return residual(model, op, x); },
        [&](const Vector& x0, const Vector&) -> Vector {
            Vector x = x0;
            for (const auto& b : model.blocks) {
                const double t = 1.0 / b.lipschitz;
                const Vector grad = model.smooth_gradient(x);
                Vector v = x;
                v.segment(b.offset, b.length) = x.segment(b.offset, b.length) - t * grad.segment(b.offset, b.length);
                const Vector p = model.simple_prox(v, t);
                const Vector R = (x.segment(b.offset, b.length) - p.segment(b.offset, b.length)) / t;
                x.segment(b.offset, b.length) = x.segment(b.offset, b.length) - t * R;
            }
            return x;
        });
}

NesterovCoefficients nesterov_coefficients(double mu, double L) {
    if (!(mu > 0.0) || !(mu < L)) throw InvalidArgument("accelerated method needs 0 < mu < L");
    const double sl = std::sqrt(L), sm = std::sqrt(mu);
    return {(sl - sm) / (sl + sm), 2.0 * sm / (sl + sm), (1.0 + std::sqrt(L / mu)) / (2.0 * L)};
}

double nesterov_tau(double mu, double L, double theta) {
    if (!(theta > 0.0) || !(theta < 1.0)) throw InvalidArgument("theta must lie in (0, 1)");
    const auto c = nesterov_coefficients(mu, L);
    const double rho = std::max(c.alpha, theta);
    return theta * c.beta / (2.0 * rho * c.gamma);
}

double nesterov_default_tau(double mu, double L) {
    nesterov_coefficients(mu, L);
    const double s = std::sqrt(L) + std::sqrt(mu);
    return 2.0 * L * mu / (s * s);
}

SolverTrace nesterov_afb(const CompositeSpec& spec, double mu, double L, const SolverConfig& config,
                         std::optional<double> tau) {
    const auto& model = spec.model;
    const auto c = nesterov_coefficients(mu, L);
    const auto x_star = unique_minimizer(model);
    if (!x_star) throw InvalidArgument("accelerated method needs a unique minimizer");
    check_start(model, config);
    const double t = tau.value_or(nesterov_default_tau(mu, L));
    const double s = std::sqrt(L / mu);

    SolverTrace trace;
    trace.method = "nesterov-afb";
    trace.tau = t;
    Vector x_prev = config.x0;
    Vector x = config.x0;
    for (long k = 0;; ++k) {
        const Vector y = x + c.alpha * (x - x_prev);
        const Vector z = 0.5 * (1.0 + s) * y + 0.5 * (1.0 - s) * x;
        const Vector w = (1.0 + s) * y - s * x;
        TraceRow row = make_row(model, k, x, composite_G(spec, L, x).norm());
        row.y = y;
        row.z = z;
        row.phi = row.gap + t * (z - *x_star).squaredNorm();
        row.lyapunov = row.gap + 0.5 * mu * (w - *x_star).squaredNorm();
        trace.rows.push_back(std::move(row));
        guard(trace, config);
        if (trace.rows.back().resid <= config.stop_tol) {
            trace.converged = true;
            break;
        }
        if (k == config.max_iter) break;
        x_prev = x;
        x = y - composite_G(spec, L, y) / L;
    }
    return trace;
}

std::vector<double> phi_sequence(const SolverTrace& trace, const ObjectiveModel& model, double tau) {
    const auto x_star = unique_minimizer(model);
    if (!x_star) throw InvalidArgument("Phi needs a unique minimizer");
    std::vector<double> out;
    for (const auto& r : trace.rows) {
        if (!r.z) throw InvalidArgument("trace has no z_k sequence");
        out.push_back(r.gap + tau * (*r.z - *x_star).squaredNorm());
    }
    return out;
}

ThetaSearch estimate_theta0(const SolverTrace& trace, const ObjectiveModel& model, double mu, double L,
                            double floor, double slack) {
    const auto c = nesterov_coefficients(mu, L);
    auto holds = [&](double theta) {
        const double rho = std::max(c.alpha, theta);
        const auto phi = phi_sequence(trace, model, nesterov_tau(mu, L, theta));
        for (std::size_t k = 0; k + 1 < phi.size(); ++k) {
            if (phi[k] > floor && phi[k + 1] > rho * phi[k] + slack * phi[k]) return false;
        }
        return true;
    };
    ThetaSearch out;
    double lo = 0.0;
    double hi = 1.0 - 1e-9;
    if (!holds(hi)) return out;
    for (int it = 0; it < 60; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (holds(mid)) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    out.found = true;
    out.theta0 = hi;
    out.rho = std::max(c.alpha, hi);
    out.tau = nesterov_tau(mu, L, hi);
    return out;
}

double fbs_truncation_slack(const SolverTrace& trace, double nu, double L) {
    if (trace.rows.empty()) return 0.0;
    if (!(nu > 0.0) || nu > 2.0 * L) throw InvalidArgument("need 0 < nu <= 2L");
    const double r = trace.rows.back().resid;
    return (2.0 * L / nu - 1.0) * r * r;
}

}  // namespace eblab::solvers
