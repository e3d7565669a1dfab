#include "eblab/analysis.hpp"

#include <algorithm>
#include <cmath>

namespace eblab::analysis {

std::string to_string(Metric m) {
    switch (m) {
        case Metric::Dist2: return "dist2";
        case Metric::Gap: return "gap";
        case Metric::TailSum: return "S";
        case Metric::Phi: return "phi";
        case Metric::Lyapunov: return "lyapunov";
    }
    return "?";
}

Metric parse_metric(const std::string& name) {
    for (auto m : {Metric::Dist2, Metric::Gap, Metric::TailSum, Metric::Phi, Metric::Lyapunov}) {
        if (to_string(m) == name) return m;
    }
    throw InvalidArgument("unknown metric '" + name + "'");
}

std::vector<double> metric_values(const solvers::SolverTrace& trace, Metric m) {
    std::vector<double> v;
    if (m == Metric::TailSum) return trace.tail_sums();
    for (const auto& r : trace.rows) {
        switch (m) {
            case Metric::Dist2: v.push_back(r.dist * r.dist); break;
            case Metric::Gap: v.push_back(r.gap); break;
            case Metric::Phi:
                if (!r.phi) throw InvalidArgument("trace has no Phi_k sequence");
                v.push_back(*r.phi);
                break;
            case Metric::Lyapunov:
                if (!r.lyapunov) throw InvalidArgument("trace has no Lyapunov sequence");
                v.push_back(*r.lyapunov);
                break;
            default: break;
        }
    }
    return v;
}

nlohmann::json to_json(const RateReport& r) {
    nlohmann::json j;
    j["metric"] = to_string(r.metric);
    j["status"] = r.status == RateStatus::Ok ? "ok" : "already-converged";
    j["burn_in"] = r.burn_in;
    j["tau_hat_max"] = r.tau_hat_max;
    j["tau_hat_geo"] = r.tau_hat_geo;
    if (r.predicted_tau) j["predicted_tau"] = *r.predicted_tau;
    j["ratios"] = r.ratios;
    return j;
}

RateReport measure_rate(const std::vector<double>& m, Metric metric, int burn_in, double floor) {
    if (burn_in < 0) throw InvalidArgument("burn_in must be nonnegative");
    RateReport r;
    r.metric = metric;
    r.burn_in = burn_in;
    const std::size_t b = static_cast<std::size_t>(burn_in);
    if (m.size() <= b || !(m[b] > floor)) {
        if (m.size() > b || (!m.empty() && !(m.back() > floor))) {
            r.status = RateStatus::AlreadyConverged;
            return r;
        }
        throw InvalidArgument("trace too short for the requested burn-in");
    }
    if (m.size() < b + 2) throw InvalidArgument("trace too short for the requested burn-in");
    std::size_t K = b;
    for (std::size_t k = b; k + 1 < m.size() && m[k] > floor; ++k) {
        r.ratios.push_back(m[k + 1] / m[k]);
        K = k + 1;
    }
    r.tau_hat_max = *std::max_element(r.ratios.begin(), r.ratios.end());
    const double total = m[K] / m[b];
    r.tau_hat_geo = total > 0.0 ? std::pow(total, 1.0 / static_cast<double>(K - b)) : 0.0;
    return r;
}

RateReport measure_rate(const solvers::SolverTrace& trace, Metric m, int burn_in, double floor) {
    return measure_rate(metric_values(trace, m), m, burn_in, floor);
}

namespace {

double need(const std::map<std::string, double>& c, const std::string& key) {
    auto it = c.find(key);
    if (it == c.end()) throw InvalidArgument("missing constant '" + key + "'");
    if (!std::isfinite(it->second)) throw InvalidArgument("constant '" + key + "' is not finite");
    return it->second;
}

void positive(double v, const std::string& key) {
    if (!(v > 0.0)) throw InvalidArgument("constant '" + key + "' must be positive");
}

}  // namespace

std::vector<std::string> predicted_rate_ids() {
    return {"S3-smooth-strongly-convex", "S3-RSC", "S3-regularity", "T51-abstract", "C52-gd-gap", "C52-gd-dist",
            "C54-ppa", "C56-fbs", "T61-palm", "qlin1-nesterov", "T72-nesterov"};
}

double predicted_rate(const std::string& id, const std::map<std::string, double>& c) {
    if (id == "S3-smooth-strongly-convex") {
        const double mu = need(c, "mu"), L = need(c, "L");
        positive(mu, "mu");
        if (mu > L) throw InvalidArgument("need mu <= L");
        const double q = (L - mu) / (L + mu);
        return q * q;
    }
    if (id == "S3-RSC" || id == "C52-gd-dist" || id == "C52-gd-gap") {
        const double nu = need(c, "nu"), L = need(c, "L");
        positive(nu, "nu");
        if (nu > L) throw InvalidArgument("need nu <= L");
        const double q = nu / L;
        return id == "C52-gd-gap" ? 1.0 - q * q : 1.0 - q;
    }
    if (id == "S3-regularity") {
        const double alpha = need(c, "alpha"), beta = need(c, "beta");
        positive(alpha, "alpha");
        positive(beta, "beta");
        if (!(alpha * beta > 4.0)) throw InvalidArgument("regularity rate needs alpha * beta > 4");
        return 1.0 - 4.0 / (alpha * beta);
    }
    if (id == "T51-abstract") {
        const double beta = need(c, "beta"), nu = need(c, "nu");
        positive(beta, "beta");
        positive(nu, "nu");
        if (beta * nu > 1.0) throw InvalidArgument("need beta * nu <= 1");
        return 1.0 - beta * nu;
    }
    if (id == "C54-ppa") {
        const double alpha = need(c, "alpha"), lambda = need(c, "lambda");
        positive(alpha, "alpha");
        positive(lambda, "lambda");
        return 1.0 - std::min(alpha * lambda / 4.0, 0.25);
    }
    if (id == "C56-fbs") {
        const double nu = need(c, "nu"), L = need(c, "L");
        positive(nu, "nu");
        if (nu > 2.0 * L) throw InvalidArgument("need nu <= 2L");
        return 1.0 - nu / (2.0 * L);
    }
    if (id == "T61-palm") {
        const double eta = need(c, "eta"), lmin = need(c, "L_min"), lmax = need(c, "L_max"), L = need(c, "L"),
                     p = need(c, "p");
        positive(eta, "eta");
        positive(lmin, "L_min");
        positive(L, "L");
        positive(p, "p");
        if (lmax < lmin) throw InvalidArgument("need L_min <= L_max");
        return 1.0 / (eta * eta * lmin / (4.0 * p * L * L + 4.0 * lmax * lmax) + 1.0);
    }
    if (id == "qlin1-nesterov") {
        const double mu = need(c, "mu"), L = need(c, "L");
        positive(mu, "mu");
        if (mu > L) throw InvalidArgument("need mu <= L");
        return 1.0 - std::sqrt(mu / L);
    }
    if (id == "T72-nesterov") {
        const double theta = need(c, "theta");
        const auto k = solvers::nesterov_coefficients(need(c, "mu"), need(c, "L"));
        if (!(theta > 0.0) || !(theta < 1.0)) throw InvalidArgument("theta must lie in (0, 1)");
        return std::max(k.alpha, theta);
    }
    throw InvalidArgument("unknown rate identifier '" + id + "'");
}

StepWindow stepsize_window(double theta, double nu, double beta, std::optional<double> tau) {
    if (!(theta > 0.0) || !(theta < 1.0)) throw InvalidArgument("theta must lie in (0, 1)");
    positive(nu, "nu");
    positive(beta, "beta");
    if (!(nu * beta < 1.0)) throw InvalidArgument("step-size window needs nu < 1/beta");
    StepWindow w;
    w.tau_bound = 1.0 - 4.0 * theta * (1.0 - theta) * beta * nu;
    w.tau = tau.value_or(w.tau_bound);
    if (w.tau >= 1.0 || w.tau < 0.0) throw InvalidArgument("tau must lie in [0, 1)");
    w.lo = (1.0 - w.tau) / (2.0 * theta * nu);
    w.hi = 2.0 * (1.0 - theta) * beta;
    // below tau_bound the window is empty; near theta = 1 it shrinks to a point at 0
    w.feasible = w.tau >= w.tau_bound - 1e-15 && w.lo <= w.hi * (1.0 + 1e-12) && w.hi > 1e-9 * beta;
    return w;
}

nlohmann::json to_json(const NecessityResult& r) {
    nlohmann::json j;
    j["method"] = r.method;
    j["applicable"] = r.applicable;
    j["observed_tau"] = r.observed_tau;
    if (!r.constant_name.empty()) {
        j["constant_name"] = r.constant_name;
        j["implied_constant"] = r.implied_constant;
    }
    if (r.check) j["check"] = eb::to_json(*r.check);
    if (!r.message.empty()) j["message"] = r.message;
    return j;
}

eb::EBCheckReport check_basic_condition(const ObjectiveModel& model, const std::vector<Vector>& points, double tau,
                                        double h) {
    if (points.empty()) throw Error("empty effective sample set");
    if (!(h > 0.0)) throw InvalidArgument("h must be positive");
    eb::EBCheckReport r;
    r.kind = "basic";
    r.op = "gradient";
    r.claimed_constant = (1.0 - tau) / (2.0 * h);
    r.samples_used = static_cast<int>(points.size());
    std::size_t arg = 0;
    bool have_ratio = false;
    for (std::size_t i = 0; i < points.size(); ++i) {
        const Vector& x = points[i];
        const Vector g = model.smooth_gradient(x);
        const auto nearest = nearest_critical_points(model, x);
        double corr = kInf;
        for (const auto& u : nearest) corr = std::min(corr, g.dot(x - u));
        const double d2 = (x - nearest.front()).squaredNorm();
        const double grad_term = 0.5 * h * g.squaredNorm();
        const double s = corr - r.claimed_constant * d2 - grad_term;
        r.worst_slack = std::min(r.worst_slack, s);
        if (d2 > eb::kCriticalFilter * eb::kCriticalFilter) {
            const double q = (corr - grad_term) / d2;
            if (q < r.worst_ratio) {
                r.worst_ratio = q;
                arg = i;
                have_ratio = true;
            }
        }
    }
    if (!have_ratio) arg = 0;
    r.witness = points[arg];
    r.pass = r.worst_slack >= -eb::kSlackTol;
    return r;
}

NecessityResult necessity_check(const ObjectiveModel& model, const std::string& method, double observed_tau,
                                const NecessityParams& params, const eb::SamplePlan& plan) {
    NecessityResult out;
    out.method = method;
    out.observed_tau = observed_tau;
    if (!(observed_tau < 1.0)) {
        out.message = "necessity not applicable: no linear convergence observed";
        return out;
    }
    if (observed_tau < 0.0) throw InvalidArgument("observed rate must be nonnegative");
    auto req = [&](const std::optional<double>& v, const char* name) {
        if (!v || !(*v > 0.0)) throw InvalidArgument(std::string("necessity check needs positive ") + name);
        return *v;
    };
    const double gap = 1.0 - std::sqrt(observed_tau);
    out.applicable = true;

    if (method == "P31-gd-basic") {
        const double h = req(params.h, "h");
        const double L = req(params.L, "L");
        if (h > gap / L * (1.0 + 1e-12)) throw InvalidArgument("basic condition needs h <= (1 - sqrt(tau)) / L");
        if (params.points.empty()) throw InvalidArgument("basic condition is checked on the GD iterates");
        out.constant_name = "(1-tau)/(2h)";
        out.implied_constant = (1.0 - observed_tau) / (2.0 * h);
        out.check = check_basic_condition(model, params.points, observed_tau, h);
        return out;
    }

    eb::Condition cond = eb::Condition::CorEB;
    ResidualKind op = residual_kind::Gradient{};
    if (method == "T51-abstract") {
        const double beta = req(params.beta, "beta");
        const double h = req(params.h, "h");
        out.constant_name = "nu";
        out.implied_constant = beta * gap * gap / (h * h);
        op = params.op.value_or(ResidualKind{residual_kind::Gradient{}});
    } else if (method == "C52-gd") {
        const double L = req(params.L, "L");
        out.constant_name = "nu";
        out.implied_constant = L * gap * gap;
    } else if (method == "C54-ppa") {
        const double lambda = req(params.lambda, "lambda");
        out.constant_name = "alpha";
        out.implied_constant = gap * gap / (2.0 * lambda);
        cond = eb::Condition::ObjEB;
        op = residual_kind::MoreauGradient{lambda};
    } else if (method == "C56-fbs") {
        const double L = req(params.L, "L");
        out.constant_name = "nu";
        out.implied_constant = 0.5 * L * gap * gap;
        op = residual_kind::ProxGradientResidual{params.t.value_or(1.0 / L)};
    } else {
        throw InvalidArgument("unknown necessity method '" + method + "'");
    }
    if (!(out.implied_constant > 0.0)) throw InvalidArgument("implied constant is not positive");
    out.check = eb::check_condition(model, op, cond, out.implied_constant, plan);
    return out;
}

}  // namespace eblab::analysis
