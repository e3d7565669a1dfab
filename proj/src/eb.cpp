#include "eblab/eb.hpp"

#include "eblab/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace eblab::eb {

std::string to_string(Condition c) {
    switch (c) {
        case Condition::ResEB: return "res-eb";
        case Condition::CorEB: return "cor-eb";
        case Condition::ObjEB: return "obj-eb";
        case Condition::ResObjEB: return "res-obj-eb";
        case Condition::CorResEB: return "cor-res-eb";
        case Condition::CorObjEB: return "cor-obj-eb";
    }
    return "?";
}

Condition parse_condition(const std::string& name) {
    for (auto c : {Condition::ResEB, Condition::CorEB, Condition::ObjEB, Condition::ResObjEB, Condition::CorResEB,
                   Condition::CorObjEB}) {
        if (to_string(c) == name) return c;
    }
    throw InvalidArgument("unknown condition '" + name + "'");
}

std::string to_string(Strategy s) {
    switch (s) {
        case Strategy::GaussianRejection: return "gaussian";
        case Strategy::RayFromCritical: return "ray";
        case Strategy::Grid: return "grid";
    }
    return "?";
}

Strategy parse_strategy(const std::string& name) {
    for (auto s : {Strategy::GaussianRejection, Strategy::RayFromCritical, Strategy::Grid}) {
        if (to_string(s) == name) return s;
    }
    throw InvalidArgument("unknown sampling strategy '" + name + "'");
}

// ---------------------------------------------------------------------------
// Sampling
// ---------------------------------------------------------------------------

namespace {

constexpr double kRadiusCap = 1e3;

bool unrestricted(const Region& r) { return !std::isfinite(r.level_offset) && !r.domain_restriction; }

bool inside(const ObjectiveModel& model, const Region& region, const Vector& x) {
    try {
        return region.contains(model, x);
    } catch (const ModelError&) {
        return false;
    }
}

// Largest s with center + s u in the region, assuming star shape around center.
double radius_along(const ObjectiveModel& model, const Region& region, const Vector& center, const Vector& u) {
    double lo = 0.0;
    double hi = 1.0;
    if (inside(model, region, center + hi * u)) {
        while (hi < kRadiusCap) {
            lo = hi;
            hi *= 2.0;
            if (!inside(model, region, center + hi * u)) break;
        }
        if (hi >= kRadiusCap && inside(model, region, center + kRadiusCap * u)) return kRadiusCap;
    }
    for (int it = 0; it < 60; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (inside(model, region, center + mid * u)) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return lo;
}

Vector random_unit(std::mt19937_64& rng, Index n) {
    std::normal_distribution<double> normal(0.0, 1.0);
    Vector u(n);
    do {
        for (Index i = 0; i < n; ++i) u[i] = normal(rng);
    } while (u.norm() == 0.0);
    return u / u.norm();
}

std::vector<Vector> probe_directions(std::mt19937_64& rng, Index n) {
    std::vector<Vector> dirs;
    if (n == 1) {
        dirs.push_back(Vector::Constant(1, 1.0));
        dirs.push_back(Vector::Constant(1, -1.0));
        return dirs;
    }
    for (int i = 0; i < 16; ++i) dirs.push_back(random_unit(rng, n));
    return dirs;
}

}  // namespace

SampleSet draw_samples(const ObjectiveModel& model, const SamplePlan& plan) {
    if (plan.count < 1) throw InvalidArgument("sample count must be positive");
    const Index n = model.dim;
    const Vector center = plan.center ? *plan.center : project_to_critical(model, Vector::Zero(n));
    if (center.size() != n) throw InvalidArgument("sample center has wrong dimension");
    std::mt19937_64 rng(plan.seed);

    std::vector<double> probe_radii;
    if (!unrestricted(plan.region)) {
        for (const auto& u : probe_directions(rng, n)) probe_radii.push_back(radius_along(model, plan.region, center, u));
    }
    auto median_radius = [&] {
        if (probe_radii.empty()) return 1.0;
        std::vector<double> r = probe_radii;
        std::nth_element(r.begin(), r.begin() + r.size() / 2, r.end());
        return r[r.size() / 2];
    };
    const double sigma = plan.sigma ? *plan.sigma : median_radius();
    if (!(sigma > 0.0)) throw InvalidArgument("sampling scale must be positive (region may be degenerate)");

    SampleSet out;
    switch (plan.strategy) {
        case Strategy::GaussianRejection: {
            std::normal_distribution<double> normal(0.0, 1.0);
            const long max_attempts = 100L * plan.count;
            for (long a = 0; a < max_attempts && static_cast<int>(out.points.size()) < plan.count; ++a) {
                Vector x(n);
                for (Index i = 0; i < n; ++i) x[i] = center[i] + sigma * normal(rng);
                if (inside(model, plan.region, x)) {
                    out.points.push_back(std::move(x));
                } else {
                    ++out.rejected;
                }
            }
            break;
        }
        case Strategy::RayFromCritical: {
            for (int i = 0; i < plan.count; ++i) {
                const Vector u = random_unit(rng, n);
                double R = sigma;
                if (!unrestricted(plan.region) && !plan.sigma) R = radius_along(model, plan.region, center, u);
                const double frac = plan.count == 1 ? 1.0 : static_cast<double>(i) / (plan.count - 1);
                const double s = R * std::pow(10.0, -3.0 + 3.0 * frac);
                Vector x = center + s * u;
                if (inside(model, plan.region, x)) {
                    out.points.push_back(std::move(x));
                } else {
                    ++out.rejected;
                }
            }
            break;
        }
        case Strategy::Grid: {
            if (n > 2) throw InvalidArgument("grid sampling supports n <= 2 only");
            double hw = sigma;
            if (!plan.sigma && !probe_radii.empty()) hw = *std::max_element(probe_radii.begin(), probe_radii.end());
            if (n == 1) {
                const int m = std::max(plan.count, 2);
                for (int i = 0; i < m; ++i) {
                    Vector x = center;
                    x[0] += -hw + 2.0 * hw * i / (m - 1);
                    if (inside(model, plan.region, x)) {
                        out.points.push_back(std::move(x));
                    } else {
                        ++out.rejected;
                    }
                }
            } else {
                const int m = std::max(2, static_cast<int>(std::ceil(std::sqrt(static_cast<double>(plan.count)))));
                for (int i = 0; i < m; ++i) {
                    for (int j = 0; j < m; ++j) {
                        Vector x = center;
                        x[0] += -hw + 2.0 * hw * i / (m - 1);
                        x[1] += -hw + 2.0 * hw * j / (m - 1);
                        if (inside(model, plan.region, x)) {
                            out.points.push_back(std::move(x));
                        } else {
                            ++out.rejected;
                        }
                    }
                }
            }
            break;
        }
    }
    return out;
}

EvalSet evaluate_points(const ObjectiveModel& model, const ResidualKind& op, const std::vector<Vector>& points,
                        int threads) {
    std::vector<std::optional<PointEval>> slots(points.size());
    parallel_for(points.size(), threads, [&](std::size_t i) {
        const Vector& x = points[i];
        Vector G;
        try {
            G = residual(model, op, x);
        } catch (const OutsideDomain&) {
            return;
        }
        PointEval e;
        e.x = x;
        e.gap = evaluate(model, x) - model.critical_set.min_value;
        e.resid_norm = G.norm();
        const auto nearest = nearest_critical_points(model, x);
        e.dist = (x - nearest.front()).norm();
        e.corr = kInf;
        for (const auto& xp : nearest) e.corr = std::min(e.corr, G.dot(x - xp));
        slots[i] = std::move(e);
    });
    EvalSet set;
    for (auto& s : slots) {
        if (s) {
            set.evals.push_back(std::move(*s));
        } else {
            ++set.skipped;
        }
    }
    return set;
}

double slack(Condition c, double k, const PointEval& e) {
    switch (c) {
        case Condition::ResEB: return e.resid_norm - k * e.dist;
        case Condition::CorEB: return e.corr - k * e.dist * e.dist;
        case Condition::ObjEB: return e.gap - 0.5 * k * e.dist * e.dist;
        case Condition::ResObjEB: return e.resid_norm - k * std::sqrt(std::max(e.gap, 0.0));
        case Condition::CorResEB: return e.corr - k * e.resid_norm * e.resid_norm;
        case Condition::CorObjEB: return e.corr - k * e.gap;
    }
    return 0.0;
}

std::optional<double> ratio(Condition c, const PointEval& e) {
    if (!(e.dist > kCriticalFilter)) return std::nullopt;
    const double d2 = e.dist * e.dist;
    switch (c) {
        case Condition::ResEB: return e.resid_norm / e.dist;
        case Condition::CorEB: return e.corr / d2;
        case Condition::ObjEB: return 2.0 * e.gap / d2;
        case Condition::ResObjEB:
            if (!(e.gap > 0.0)) return std::nullopt;
            return e.resid_norm / std::sqrt(e.gap);
        case Condition::CorResEB:
            if (!(e.resid_norm > 0.0)) return std::nullopt;
            return e.corr / (e.resid_norm * e.resid_norm);
        case Condition::CorObjEB:
            if (!(e.gap > 0.0)) return std::nullopt;
            return e.corr / e.gap;
    }
    return std::nullopt;
}

nlohmann::json to_json(const EBCheckReport& r) {
    auto vec = [](const Vector& v) { return std::vector<double>(v.data(), v.data() + v.size()); };
    nlohmann::json j;
    j["kind"] = r.kind;
    j["operator"] = r.op;
    j["claimed_constant"] = r.claimed_constant;
    j["verdict"] = r.pass ? "pass" : "fail";
    j["worst_ratio"] = r.worst_ratio;
    j["witness"] = vec(r.witness);
    j["samples_used"] = r.samples_used;
    j["samples_skipped"] = r.samples_skipped;
    j["worst_slack"] = r.worst_slack;
    if (r.witness_y) j["witness_y"] = vec(*r.witness_y);
    return j;
}

EBCheckReport check_evals(Condition c, const std::string& op, double constant, const EvalSet& set) {
    if (set.evals.empty()) throw Error("empty effective sample set");
    EBCheckReport r;
    r.kind = to_string(c);
    r.op = op;
    r.claimed_constant = constant;
    r.samples_used = static_cast<int>(set.evals.size());
    r.samples_skipped = set.skipped;
    std::size_t ratio_arg = set.evals.size();
    std::size_t slack_arg = 0;
    for (std::size_t i = 0; i < set.evals.size(); ++i) {
        const double s = slack(c, constant, set.evals[i]);
        if (s < r.worst_slack) {
            r.worst_slack = s;
            slack_arg = i;
        }
        if (auto q = ratio(c, set.evals[i]); q && *q < r.worst_ratio) {
            r.worst_ratio = *q;
            ratio_arg = i;
        }
    }
    r.pass = r.worst_slack >= -kSlackTol;
    r.witness = set.evals[ratio_arg < set.evals.size() ? ratio_arg : slack_arg].x;
    return r;
}

EBCheckReport check_condition(const ObjectiveModel& model, const ResidualKind& op, Condition c, double constant,
                              const SamplePlan& plan) {
    if (!(constant > 0.0)) throw InvalidArgument("EB constant must be positive");
    const auto samples = draw_samples(model, plan);
    return check_evals(c, eblab::to_string(op), constant, evaluate_points(model, op, samples.points, plan.threads));
}

double estimate_from_evals(Condition c, const EvalSet& set) {
    double best = kInf;
    for (const auto& e : set.evals) {
        if (auto q = ratio(c, e)) best = std::min(best, *q);
    }
    if (!std::isfinite(best)) throw Error("degenerate sample set: no sample away from the critical set");
    return best;
}

double estimate_constant(const ObjectiveModel& model, const ResidualKind& op, Condition c, const SamplePlan& plan) {
    const auto samples = draw_samples(model, plan);
    return estimate_from_evals(c, evaluate_points(model, op, samples.points, plan.threads));
}

// ---------------------------------------------------------------------------
// Implication chain
// ---------------------------------------------------------------------------

ImplicationConstants implication_constants(std::optional<double> alpha, double omega, std::optional<double> kappa,
                                           std::optional<double> eta) {
    if (!(omega > 0.0)) throw InvalidArgument("omega must be positive");
    if (!alpha && !kappa && !eta) throw InvalidArgument("need at least one source constant");
    for (auto v : {alpha, kappa, eta}) {
        if (v && !(*v > 0.0)) throw InvalidArgument("EB constants must be positive");
    }
    ImplicationConstants out;
    if (alpha) {
        out.nu = *alpha * omega / 2.0;
        out.kappa = out.nu;
    }
    if (kappa) out.kappa = kappa;
    if (out.kappa) out.eta = std::sqrt(*out.kappa * omega);
    if (eta) out.eta = eta;
    if (out.eta) out.alpha_reverse = 0.5 * *out.eta * *out.eta;
    return out;
}

namespace {

constexpr double kRound = 1e-12;

LegReport run_leg(const std::string& name, double constant, const EvalSet& set,
                  const std::function<bool(const PointEval&)>& premise,
                  const std::function<bool(const PointEval&)>& conclusion) {
    LegReport leg;
    leg.name = name;
    leg.constant = constant;
    for (const auto& e : set.evals) {
        if (!premise(e)) continue;
        ++leg.premises;
        if (!conclusion(e)) ++leg.violations;
    }
    leg.pass = leg.violations == 0;
    return leg;
}

}  // namespace

ChainReport verify_implication_chain(const ObjectiveModel& model, const ResidualKind& op, const SamplePlan& plan) {
    const auto samples = draw_samples(model, plan);
    const EvalSet set = evaluate_points(model, op, samples.points, plan.threads);
    if (set.evals.empty()) throw Error("empty effective sample set");

    ChainReport r;
    r.op = eblab::to_string(op);
    r.samples_used = static_cast<int>(set.evals.size());
    r.samples_skipped = set.skipped;
    r.alpha_hat = estimate_from_evals(Condition::ObjEB, set);
    if (!(r.alpha_hat > 0.0)) throw Error("obj-eb estimate is not positive on this sample set");

    if (check_evals(Condition::CorObjEB, r.op, 1.0, set).pass) {
        r.omega = 1.0;
        r.omega_from_subgradient_inequality = true;
    } else {
        r.omega = estimate_from_evals(Condition::CorObjEB, set);
        if (!(r.omega > 0.0)) throw Error("cor-obj-eb estimate is not positive on this sample set");
    }
    const auto k = implication_constants(r.alpha_hat, r.omega);
    r.nu = *k.nu;
    r.kappa = *k.kappa;
    r.eta = *k.eta;

    const double tol = kSlackTol;
    const double a = r.alpha_hat, w = r.omega, nu = r.nu, kap = r.kappa;
    auto holds = [&](Condition c, double constant, const PointEval& e) { return slack(c, constant, e) >= -tol; };

    r.legs.push_back(run_leg(
        "obj-eb & cor-obj-eb => cor-eb", nu, set,
        [&](const PointEval& e) { return holds(Condition::ObjEB, a, e) && holds(Condition::CorObjEB, w, e); },
        [&](const PointEval& e) {
            const double round = kRound * (std::abs(e.corr) + nu * e.dist * e.dist + w * std::abs(e.gap));
            return slack(Condition::CorEB, nu, e) >= -tol * (1.0 + w) - round;
        }));
    r.legs.push_back(run_leg(
        "cor-eb => res-eb", kap, set, [&](const PointEval& e) { return holds(Condition::CorEB, nu, e); },
        [&](const PointEval& e) {
            // res-eb multiplied through by d
            const double lhs = e.resid_norm * e.dist;
            const double rhs = kap * e.dist * e.dist;
            return lhs - rhs >= -tol - kRound * (lhs + rhs);
        }));
    r.legs.push_back(run_leg(
        "res-eb & cor-obj-eb => res-obj-eb", r.eta, set,
        [&](const PointEval& e) { return holds(Condition::ResEB, kap, e) && holds(Condition::CorObjEB, w, e); },
        [&](const PointEval& e) {
            // res-obj-eb squared
            const double lhs = e.resid_norm * e.resid_norm;
            const double rhs = kap * w * std::max(e.gap, 0.0);
            return lhs - rhs >= -tol * (kap + e.resid_norm) - kRound * (lhs + rhs);
        }));
    r.pointwise_pass = std::all_of(r.legs.begin(), r.legs.end(), [](const LegReport& l) { return l.pass; });

    r.eta_hat = estimate_from_evals(Condition::ResObjEB, set);
    r.alpha_reverse = *implication_constants(std::nullopt, 1.0, std::nullopt, r.eta_hat).alpha_reverse;
    r.reverse = check_evals(Condition::ObjEB, r.op, r.alpha_reverse * (1.0 - kReverseLegAllowance), set);
    return r;
}

nlohmann::json to_json(const ChainReport& r) {
    nlohmann::json j;
    j["operator"] = r.op;
    j["alpha_hat"] = r.alpha_hat;
    j["omega"] = r.omega;
    j["omega_source"] = r.omega_from_subgradient_inequality ? "subgradient-inequality" : "estimated";
    j["nu"] = r.nu;
    j["kappa"] = r.kappa;
    j["eta"] = r.eta;
    j["legs"] = nlohmann::json::array();
    for (const auto& l : r.legs) {
        j["legs"].push_back({{"name", l.name},
                             {"constant", l.constant},
                             {"premises", l.premises},
                             {"violations", l.violations},
                             {"verdict", l.pass ? "exact-pass" : "fail"}});
    }
    j["pointwise_pass"] = r.pointwise_pass;
    j["eta_hat"] = r.eta_hat;
    j["alpha_reverse"] = r.alpha_reverse;
    j["reverse_leg"] = to_json(r.reverse);
    j["samples_used"] = r.samples_used;
    j["samples_skipped"] = r.samples_skipped;
    return j;
}

// ---------------------------------------------------------------------------
// Assumption check for the prox-gradient residual
// ---------------------------------------------------------------------------

Assum2Report check_assum2(const ObjectiveModel& model, double t, double epsilon, const SamplePlan& plan) {
    const double L = model.smooth_lipschitz;
    if (!(t > 0.0) || t > (1.0 + 1e-12) / L) throw InvalidArgument("t must lie in (0, 1/L]");
    if (!(epsilon > 0.0) || epsilon > (1.0 + 1e-12) * 2.0 / t) throw InvalidArgument("epsilon must lie in (0, 2/t]");
    const auto samples = draw_samples(model, plan);
    const residual_kind::ProxGradientResidual op{t};

    struct Row {
        Vector x;
        double slack;
        std::optional<double> ratio;
    };
    std::vector<Row> rows(samples.points.size());
    parallel_for(rows.size(), plan.threads, [&](std::size_t i) {
        const Vector& x = samples.points[i];
        const Vector R = residual(model, op, x);
        const Vector xp = x - t * R;
        const double dec = evaluate(model, x) - evaluate(model, xp);
        const double r2 = R.squaredNorm();
        rows[i] = {x, r2 - epsilon * dec, dec > 1e-14 ? std::optional<double>(r2 / dec) : std::nullopt};
    });
    if (rows.empty()) throw Error("empty effective sample set");

    Assum2Report out;
    out.t = t;
    out.epsilon = epsilon;
    out.implied_omega = t * epsilon / 2.0;
    auto& r = out.check;
    r.kind = "assum2";
    r.op = eblab::to_string(ResidualKind{op});
    r.claimed_constant = epsilon;
    r.samples_used = static_cast<int>(rows.size());
    std::size_t arg = 0;
    bool have_ratio = false;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        r.worst_slack = std::min(r.worst_slack, rows[i].slack);
        if (rows[i].ratio && *rows[i].ratio < r.worst_ratio) {
            r.worst_ratio = *rows[i].ratio;
            arg = i;
            have_ratio = true;
        }
    }
    if (!have_ratio) {
        arg = static_cast<std::size_t>(std::min_element(rows.begin(), rows.end(), [](const Row& p, const Row& q) {
                                           return p.slack < q.slack;
                                       }) -
                                       rows.begin());
    }
    r.witness = rows[arg].x;
    r.pass = r.worst_slack >= -kSlackTol;
    return out;
}

// ---------------------------------------------------------------------------
// Composite EB
// ---------------------------------------------------------------------------

PairGrid PairGrid::scalar(double x_lo, double x_hi, double y_lo, double y_hi, double step) {
    if (!(step > 0.0) || x_hi < x_lo || y_hi < y_lo) throw InvalidArgument("bad scalar grid");
    auto axis = [step](double lo, double hi) {
        const long n = std::lround((hi - lo) / step);
        std::vector<Vector> pts;
        for (long i = 0; i <= n; ++i) {
            pts.push_back(Vector::Constant(1, n == 0 ? lo : lo + (hi - lo) * static_cast<double>(i) / n));
        }
        return pts;
    };
    return {axis(x_lo, x_hi), axis(y_lo, y_hi)};
}

EBCheckReport check_composite_eb(const CompositeSpec& spec, double mu, double L, const PairGrid& grid, int threads) {
    if (!(mu > 0.0) || !(mu < L)) throw InvalidArgument("composite EB needs 0 < mu < L");
    if (!spec.prox_linearized) throw UnsupportedComposite("composite spec has no subproblem solver");
    if (grid.xs.empty() || grid.ys.empty()) throw InvalidArgument("empty pair grid");

    struct Best {
        double slack = kInf;
        std::size_t xi = 0;
        double mu_hat = kInf;
        std::size_t mu_xi = 0;
    };
    std::vector<Best> per_y(grid.ys.size());
    parallel_for(grid.ys.size(), threads, [&](std::size_t yi) {
        const Vector& y = grid.ys[yi];
        const Vector p = spec.prox_linearized(y, L);
        const Vector G = L * (y - p);
        const double phi_p = evaluate(spec.model, p);
        Best b;
        for (std::size_t xi = 0; xi < grid.xs.size(); ++xi) {
            const Vector& x = grid.xs[xi];
            const double phi_x = evaluate(spec.model, x);
            if (!std::isfinite(phi_x)) continue;  // holds trivially
            const double d2 = (x - y).squaredNorm();
            const double base = G.dot(y - x) - (phi_p - phi_x + G.squaredNorm() / (2.0 * L));
            const double s = base - 0.5 * mu * d2;
            if (s < b.slack) {
                b.slack = s;
                b.xi = xi;
            }
            if (d2 > 0.0 && 2.0 * base / d2 < b.mu_hat) {
                b.mu_hat = 2.0 * base / d2;
                b.mu_xi = xi;
            }
        }
        per_y[yi] = b;
    });

    EBCheckReport r;
    r.kind = "composite-eb";
    r.op = eblab::to_string(ResidualKind{residual_kind::CompositeG{L}});
    r.claimed_constant = mu;
    std::size_t arg_y = 0;
    for (std::size_t yi = 0; yi < per_y.size(); ++yi) {
        if (per_y[yi].slack < r.worst_slack) {
            r.worst_slack = per_y[yi].slack;
            arg_y = yi;
        }
        r.worst_ratio = std::min(r.worst_ratio, per_y[yi].mu_hat);
    }
    r.samples_used = static_cast<int>(grid.xs.size() * grid.ys.size());
    r.witness = grid.xs[per_y[arg_y].xi];
    r.witness_y = grid.ys[arg_y];
    r.pass = r.worst_slack >= -kSlackTol;
    return r;
}

Rel1Report check_rel1_failure_quadratic(const Vector& a, const std::vector<double>& mus,
                                        const std::vector<Vector>& base_points, const std::vector<double>& steps) {
    const Index n = a.size();
    if (n < 2) throw InvalidArgument("need n >= 2 for a direction orthogonal to a");
    const double L = a.squaredNorm();
    if (!(L > 0.0)) throw InvalidArgument("a must be nonzero");

    Index k = 0;
    a.cwiseAbs().minCoeff(&k);
    Vector h = Vector::Unit(n, k) - (a[k] / L) * a;
    h /= h.norm();

    auto e = [&a](const Vector& x) {
        const double s = a.dot(x);
        return 0.5 * s * s;
    };
    auto grad = [&a](const Vector& x) -> Vector { return a.dot(x) * a; };

    Rel1Report out;
    out.a = a;
    out.h = h;
    out.all_violated = true;
    for (double mu : mus) {
        if (!(mu > 0.0)) throw InvalidArgument("mu must be positive");
        Rel1Case c;
        c.mu = mu;
        double worst = kInf;
        for (const auto& x : base_points) {
            if (x.size() != n) throw InvalidArgument("base point dimension mismatch");
            for (double s : steps) {
                const Vector y = x + s * h;
                const double d2 = (x - y).squaredNorm();
                if (d2 == 0.0) continue;
                ++c.pairs;
                const Vector gy = grad(y);
                const double rhs = e(y - gy / L) + gy.squaredNorm() / (2.0 * L) + gy.dot(x - y) + 0.5 * mu * d2;
                const double sl = e(x) - rhs;
                if (sl < -kSlackTol) ++c.violations;
                if (sl < worst) {
                    worst = sl;
                    c.witness_x = x;
                    c.witness_y = y;
                }
            }
        }
        c.violated = c.violations > 0;
        out.all_violated = out.all_violated && c.violated;
        out.cases.push_back(std::move(c));
    }
    return out;
}

}  // namespace eblab::eb
