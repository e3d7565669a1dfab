#include "eblab/cli.hpp"

#include "eblab/analysis.hpp"
#include "eblab/dual.hpp"
#include "eblab/eb.hpp"
#include "eblab/parallel.hpp"
#include "eblab/problem_json.hpp"
#include "eblab/solvers.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

namespace eblab::cli {

std::uint64_t fnv1a64(const std::string& bytes) {
    std::uint64_t h = 14695981039346656037ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

namespace {

using nlohmann::json;

struct Common {
    std::string problem;
    std::uint64_t seed = 0;
    int threads = 0;
    std::string out;
    std::string json_out;
};

std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string comment_header(const Common& c, const LoadedProblem& p) {
    return std::string("# eblab ") + kVersion + " seed=" + std::to_string(c.seed) +
           " problem=" + hex64(fnv1a64(p.document.dump())) + "\n";
}

void write_text(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InvalidArgument("cannot write '" + path + "'");
    out << text;
}

void emit_json(const Common& c, const LoadedProblem* p, json body, const std::string& path) {
    body["tool"] = std::string("eblab ") + kVersion;
    body["seed"] = c.seed;
    if (p) {
        body["problem"] = p->name;
        body["problem_hash"] = hex64(fnv1a64(p->document.dump()));
    }
    write_text(path, body.dump(2) + "\n");
}

Vector start_point(const std::vector<double>& x0, Index n) {
    if (x0.empty()) return Vector::Ones(n);
    if (static_cast<Index>(x0.size()) != n) throw InvalidArgument("--x0 has wrong dimension");
    return Eigen::Map<const Vector>(x0.data(), n);
}

struct OperatorArgs {
    std::string name = "gradient";
    std::optional<double> t;
    std::optional<double> lambda;
    std::optional<double> L;
};

ResidualKind make_operator(const OperatorArgs& a, const ObjectiveModel& m) {
    if (a.name == "gradient") return residual_kind::Gradient{};
    if (a.name == "least-norm") return residual_kind::LeastNormSubgradient{};
    if (a.name == "prox-grad") return residual_kind::ProxGradientResidual{a.t.value_or(1.0 / m.smooth_lipschitz)};
    if (a.name == "moreau") {
        if (!m.objective_prox && !m.smooth_is_zero) {
            throw InvalidArgument("moreau operator needs a prox of the whole objective");
        }
        return residual_kind::MoreauGradient{a.lambda.value_or(1.0)};
    }
    if (a.name == "composite") {
        if (m.composite.outer_dim != 1 || !m.composite.outer_linear) {
            throw InvalidArgument("composite operator needs the m = 1, f(t) = t family");
        }
        return residual_kind::CompositeG{a.L.value_or(m.smooth_lipschitz)};
    }
    throw InvalidArgument("unknown operator '" + a.name + "'");
}

eb::SamplePlan make_plan(const Common& c, int samples, std::optional<double> region_r, const std::string& strategy) {
    eb::SamplePlan plan;
    plan.count = samples;
    plan.seed = c.seed;
    plan.threads = c.threads;
    plan.strategy = eb::parse_strategy(strategy);
    if (region_r) {
        if (!(*region_r > 0.0)) throw InvalidArgument("--region-r must be positive");
        plan.region.level_offset = *region_r;
    }
    return plan;
}

std::string trace_csv(const Common& c, const LoadedProblem& p, const solvers::SolverTrace& t) {
    std::ostringstream os;
    os << comment_header(c, p);
    const bool acc = !t.rows.empty() && t.rows.front().phi.has_value();
    const bool tail = t.method == "fbs";
    os << "k,gap,dist,resid";
    if (tail) os << ",S";
    if (acc) os << ",phi,lyapunov";
    os << "\n";
    const auto S = t.tail_sums();
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
        const auto& r = t.rows[i];
        os << r.k << ',' << num(r.gap) << ',' << num(r.dist) << ',' << num(r.resid);
        if (tail) os << ',' << num(S[i]);
        if (acc) os << ',' << num(*r.phi) << ',' << num(*r.lyapunov);
        os << "\n";
    }
    return os.str();
}

struct SolveArgs {
    std::string method = "gd";
    std::optional<double> h, t, lambda, mu, L, theta;
    OperatorArgs op;
    std::vector<double> x0;
    long max_iter = 100000;
    double stop_tol = 1e-12;
    std::string metric;
    int burn_in = 5;
};

solvers::SolverTrace run_solver(const LoadedProblem& p, const SolveArgs& a) {
    const auto& m = p.model;
    solvers::SolverConfig cfg;
    cfg.x0 = start_point(a.x0, m.dim);
    cfg.max_iter = a.max_iter;
    cfg.stop_tol = a.stop_tol;
    if (a.method == "gd") return solvers::gradient_descent(m, a.h.value_or(1.0 / m.smooth_lipschitz), cfg);
    if (a.method == "abstract") {
        return solvers::abstract_gradient(m, make_operator(a.op, m), a.h.value_or(1.0 / m.smooth_lipschitz), cfg);
    }
    if (a.method == "ppa") return solvers::ppa(m, a.lambda.value_or(1.0), cfg);
    if (a.method == "fbs") return solvers::fbs(m, a.t.value_or(1.0 / m.smooth_lipschitz), cfg);
    if (a.method == "palm") return solvers::palm(m, cfg);
    if (a.method == "nesterov") {
        if (!p.composite) throw InvalidArgument("nesterov needs the m = 1, f(t) = t composite family");
        const double L = a.L.value_or(m.smooth_lipschitz);
        const double mu = a.mu ? *a.mu : m.strong_convexity.value_or(0.0);
        std::optional<double> tau;
        if (a.theta) tau = solvers::nesterov_tau(mu, L, *a.theta);
        return solvers::nesterov_afb(*p.composite, mu, L, cfg, tau);
    }
    throw InvalidArgument("unknown method '" + a.method + "'");
}

int cmd_solve(const Common& c, const SolveArgs& a) {
    const auto p = load_problem_file(c.problem);
    const auto trace = run_solver(p, a);
    write_text(c.out, trace_csv(c, p, trace));
    std::string metric = a.metric;
    if (metric.empty()) metric = a.method == "nesterov" ? "phi" : "dist2";
    const auto rate = analysis::measure_rate(trace, analysis::parse_metric(metric), a.burn_in);
    json body;
    body["command"] = "solve";
    body["method"] = trace.method;
    body["iterations"] = trace.rows.empty() ? 0 : trace.rows.back().k;
    body["converged"] = trace.converged;
    body["rate"] = analysis::to_json(rate);
    if (!c.json_out.empty() || !c.out.empty()) emit_json(c, &p, body, c.json_out);
    return kOk;
}

struct EbArgs {
    std::string condition = "cor-eb";
    OperatorArgs op;
    int samples = 1000;
    std::optional<double> region_r;
    std::string strategy = "gaussian";
    bool chain = false;
    std::optional<double> constant;
};

int cmd_estimate_eb(const Common& c, const EbArgs& a) {
    const auto p = load_problem_file(c.problem);
    const auto op = make_operator(a.op, p.model);
    const auto plan = make_plan(c, a.samples, a.region_r, a.strategy);
    json body;
    if (a.chain) {
        body = eb::to_json(eb::verify_implication_chain(p.model, op, plan));
        body["command"] = "chain";
    } else {
        const auto cond = eb::parse_condition(a.condition);
        const auto samples = eb::draw_samples(p.model, plan);
        const auto evals = eb::evaluate_points(p.model, op, samples.points, plan.threads);
        const double k = a.constant ? *a.constant : eb::estimate_from_evals(cond, evals);
        if (!(k > 0.0)) throw InvalidArgument("EB constant must be positive");
        body = eb::to_json(eb::check_evals(cond, to_string(op), k, evals));
        body["command"] = "estimate-eb";
        body["constant"] = k;
        body["samples_rejected"] = samples.rejected;
    }
    emit_json(c, &p, body, c.out);
    return kOk;
}

struct NecessityArgs {
    SolveArgs solve;
    int samples = 1000;
    std::string strategy = "gaussian";
    double sublinear_threshold = 1.0 - 1e-4;
};

int cmd_necessity(const Common& c, NecessityArgs a) {
    const auto p = load_problem_file(c.problem);
    const auto& m = p.model;
    a.solve.burn_in = 0;
    const bool basic = a.solve.method == "basic";
    if (basic) a.solve.method = "gd";
    const auto trace = run_solver(p, a.solve);
    const auto rate = analysis::measure_rate(trace, analysis::Metric::Dist2, a.solve.burn_in);
    const double tau = rate.status == analysis::RateStatus::AlreadyConverged ? 0.0 : rate.tau_hat_max;

    analysis::NecessityParams params;
    std::string method;
    if (basic) {
        method = "P31-gd-basic";
        params.L = m.smooth_lipschitz;
        params.h = a.solve.h.value_or(1.0 / m.smooth_lipschitz);
        for (const auto& row : trace.rows) params.points.push_back(row.x);
    } else if (a.solve.method == "gd") {
        method = "C52-gd";
        params.L = m.smooth_lipschitz;
    } else if (a.solve.method == "abstract") {
        method = "T51-abstract";
        params.op = make_operator(a.solve.op, m);
        params.h = a.solve.h.value_or(1.0 / m.smooth_lipschitz);
        params.beta = params.h;
    } else if (a.solve.method == "ppa") {
        method = "C54-ppa";
        params.lambda = a.solve.lambda.value_or(1.0);
    } else if (a.solve.method == "fbs") {
        method = "C56-fbs";
        params.L = m.smooth_lipschitz;
        params.t = a.solve.t.value_or(1.0 / m.smooth_lipschitz);
    } else {
        throw InvalidArgument("necessity supports gd, basic, abstract, ppa, fbs");
    }

    eb::SamplePlan plan = make_plan(c, a.samples, std::nullopt, a.strategy);
    const double r = trace.rows.front().gap;
    if (r > 0.0) plan.region.level_offset = r;

    json body;
    body["command"] = "necessity";
    body["rate"] = analysis::to_json(rate);
    if (tau > a.sublinear_threshold) {
        analysis::NecessityResult none;
        none.method = method;
        none.observed_tau = tau;
        none.message = "necessity not applicable: no linear convergence observed";
        body["necessity"] = analysis::to_json(none);
        emit_json(c, &p, body, c.out);
        return kNotApplicable;
    }
    const auto result = analysis::necessity_check(m, method, tau, params, plan);
    body["necessity"] = analysis::to_json(result);
    emit_json(c, &p, body, c.out);
    return result.applicable ? kOk : kNotApplicable;
}

int cmd_rates(const Common& c, const std::string& id, const std::vector<std::string>& consts) {
    std::map<std::string, double> values;
    for (const auto& kv : consts) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) throw InvalidArgument("constants are given as name=value");
        try {
            values[kv.substr(0, eq)] = std::stod(kv.substr(eq + 1));
        } catch (const std::exception&) {
            throw InvalidArgument("cannot parse constant '" + kv + "'");
        }
    }
    json body;
    body["command"] = "rates";
    if (id.empty()) {
        body["ids"] = analysis::predicted_rate_ids();
    } else {
        body["id"] = id;
        body["constants"] = values;
        body["predicted_tau"] = analysis::predicted_rate(id, values);
    }
    emit_json(c, nullptr, body, c.out);
    return kOk;
}

int cmd_dual(const Common& c, double r0, const std::vector<double>& r_grid, int samples) {
    const auto p = load_problem_file(c.problem);
    if (p.constructor != "dual") throw InvalidArgument("dual command needs a problem with constructor 'dual'");
    dual::DualModel d;
    d.model = p.model;
    const auto plan = make_plan(c, samples, std::nullopt, "gaussian");
    json body = dual::to_json(dual::verify_dual_eb(d, r0, r_grid, plan));
    body["command"] = "dual";
    emit_json(c, &p, body, c.out);
    return kOk;
}

int cmd_report(const Common& c) {
    const auto p = load_problem_file(c.problem);
    const auto& m = p.model;
    json body;
    body["command"] = "report";
    body["constructor"] = p.constructor;
    body["dim"] = m.dim;
    body["smooth_lipschitz"] = m.smooth_lipschitz;
    if (m.strong_convexity) body["strong_convexity"] = *m.strong_convexity;
    body["min_value"] = m.critical_set.min_value;
    body["critical_set"] = std::visit(
        [](const auto& s) -> std::string {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, AffineSet>) return "affine";
            if constexpr (std::is_same_v<T, SinglePoint>) return "single-point";
            if constexpr (std::is_same_v<T, FiniteSet>) return "finite";
            return "numeric-oracle";
        },
        m.critical_set.shape);
    const Vector xp = project_to_critical(m, Vector::Zero(m.dim));
    body["critical_point"] = std::vector<double>(xp.data(), xp.data() + xp.size());
    body["blocks"] = json::array();
    for (const auto& b : m.blocks) {
        body["blocks"].push_back({{"offset", b.offset}, {"length", b.length}, {"lipschitz", b.lipschitz}});
    }
    body["expected"] = json::array();
    for (const auto& e : m.expected) {
        body["expected"].push_back({{"condition", e.condition}, {"operator", e.op}, {"value", e.value}, {"note", e.note}});
    }
    emit_json(c, &p, body, c.out);
    return kOk;
}

void add_common(CLI::App* sub, Common& c, bool needs_problem = true) {
    auto* opt = sub->add_option("--problem", c.problem, "problem JSON file");
    if (needs_problem) opt->required();
    sub->add_option("--seed", c.seed, "random seed");
    sub->add_option("--threads", c.threads, "worker threads (0 = all available)");
    sub->add_option("--out", c.out, "output path (stdout when omitted)");
}

void add_operator(CLI::App* sub, OperatorArgs& op) {
    sub->add_option("--operator", op.name, "gradient | least-norm | prox-grad | moreau | composite");
    sub->add_option("--op-t", op.t, "t for prox-grad (default 1/L)");
    sub->add_option("--op-lambda", op.lambda, "lambda for moreau (default 1)");
    sub->add_option("--op-L", op.L, "L for composite (default model L)");
}

void add_solver(CLI::App* sub, SolveArgs& s) {
    sub->add_option("--method", s.method, "gd | abstract | ppa | fbs | palm | nesterov");
    sub->add_option("--h", s.h, "step size");
    sub->add_option("--t", s.t, "FBS step");
    sub->add_option("--lambda", s.lambda, "PPA parameter");
    sub->add_option("--mu", s.mu, "accelerated method: mu");
    sub->add_option("--L", s.L, "accelerated method: L");
    sub->add_option("--theta", s.theta, "accelerated method: theta for Phi_k");
    sub->add_option("--x0", s.x0, "start point, comma separated")->delimiter(',');
    sub->add_option("--max-iter", s.max_iter, "iteration cap");
    sub->add_option("--stop-tol", s.stop_tol, "residual stopping tolerance");
    add_operator(sub, s.op);
}

}  // namespace

int run(int argc, const char* const* argv) {
    CLI::App app{"Error-bound laboratory: EB checks, solvers and rate analysis"};
    app.set_help_flag("--help", "print help");
    app.set_version_flag("--version", std::string(kVersion));
    app.require_subcommand(1);

    Common common;

    SolveArgs solve;
    auto* s_solve = app.add_subcommand("solve", "run a solver and write its trace");
    add_common(s_solve, common);
    add_solver(s_solve, solve);
    s_solve->add_option("--json", common.json_out, "rate report JSON path");
    s_solve->add_option("--metric", solve.metric, "dist2 | gap | S | phi | lyapunov");
    s_solve->add_option("--burn-in", solve.burn_in, "iterations skipped before measuring ratios");

    EbArgs eba;
    auto setup_eb = [&](CLI::App* sub) {
        add_common(sub, common);
        add_operator(sub, eba.op);
        sub->add_option("--condition", eba.condition, "res-eb | cor-eb | obj-eb | res-obj-eb | cor-res-eb | cor-obj-eb");
        sub->add_option("--samples", eba.samples, "number of samples");
        sub->add_option("--region-r", eba.region_r, "sublevel offset r of the sample region");
        sub->add_option("--strategy", eba.strategy, "gaussian | ray | grid");
        sub->add_option("--constant", eba.constant, "check this constant instead of estimating");
    };
    auto* s_eb = app.add_subcommand("estimate-eb", "estimate or check an EB constant");
    setup_eb(s_eb);
    s_eb->add_flag("--chain", eba.chain, "verify the implication chain instead");
    auto* s_chain = app.add_subcommand("chain", "verify the implication chain between EB conditions");
    setup_eb(s_chain);

    NecessityArgs nec;
    auto* s_nec = app.add_subcommand("necessity", "observed rate -> implied EB constant -> re-check");
    add_common(s_nec, common);
    add_solver(s_nec, nec.solve);
    s_nec->add_option("--samples", nec.samples, "number of samples");
    s_nec->add_option("--strategy", nec.strategy, "gaussian | ray | grid");

    std::string rate_id;
    std::vector<std::string> rate_consts;
    auto* s_rates = app.add_subcommand("rates", "predicted rate for a result identifier");
    add_common(s_rates, common, false);
    s_rates->add_option("--id", rate_id, "result identifier (omit to list)");
    s_rates->add_option("--const", rate_consts, "constant as name=value (repeatable)");

    double r0 = 1.0;
    std::vector<double> r_grid{0.1, 1.0, 10.0};
    int dual_samples = 1000;
    auto* s_dual = app.add_subcommand("dual", "EB conclusions for a dual problem");
    add_common(s_dual, common);
    s_dual->add_option("--r0", r0, "obj-EB sublevel offset");
    s_dual->add_option("--r-grid", r_grid, "cor-EB sublevel offsets, comma separated")->delimiter(',');
    s_dual->add_option("--samples", dual_samples, "samples per radius");

    auto* s_report = app.add_subcommand("report", "summarize a problem");
    add_common(s_report, common);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kBadInput;
    }

    try {
        if (s_solve->parsed()) return cmd_solve(common, solve);
        if (s_eb->parsed()) return cmd_estimate_eb(common, eba);
        if (s_chain->parsed()) {
            eba.chain = true;
            return cmd_estimate_eb(common, eba);
        }
        if (s_nec->parsed()) return cmd_necessity(common, nec);
        if (s_rates->parsed()) return cmd_rates(common, rate_id, rate_consts);
        if (s_dual->parsed()) return cmd_dual(common, r0, r_grid, dual_samples);
        if (s_report->parsed()) return cmd_report(common);
    } catch (const DivergenceError& e) {
        std::cerr << "eblab: " << e.what() << "\n";
        return kDiverged;
    } catch (const std::exception& e) {
        std::cerr << "eblab: " << e.what() << "\n";
        return kBadInput;
    }
    return kBadInput;
}

int run(const std::vector<std::string>& args) {
    std::vector<const char*> argv;
    argv.push_back("eblab");
    for (const auto& a : args) argv.push_back(a.c_str());
    return run(static_cast<int>(argv.size()), argv.data());
}

}  // namespace eblab::cli
