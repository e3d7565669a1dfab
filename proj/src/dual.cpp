#include "eblab/dual.hpp"

#include "eblab/separable.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace eblab::dual {

ConjugatePair quadratic_pair(double c, const Vector& y0) {
    if (!(c > 0.0)) throw InvalidArgument("strong convexity modulus must be positive");
    ConjugatePair p;
    p.name = "quadratic";
    p.c = c;
    p.m = y0.size();
    p.g_value = [c, y0](const Vector& y) { return 0.5 * c * (y - y0).squaredNorm(); };
    p.g_conjugate_value = [c, y0](const Vector& z) { return z.dot(y0) + z.squaredNorm() / (2.0 * c); };
    p.g_conjugate_gradient = [c, y0](const Vector& z) -> Vector { return y0 + z / c; };
    p.g_subgradient = [c, y0](const Vector& y) -> Vector { return c * (y - y0); };
    p.conjugate_gradient_preimage = [c, y0](const Vector& yb) -> std::optional<Vector> {
        return Vector(c * (yb - y0));
    };
    return p;
}

ConjugatePair elastic_net_pair(double c, Index m) {
    if (!(c > 0.0)) throw InvalidArgument("strong convexity modulus must be positive");
    if (m < 1) throw InvalidArgument("dimension must be positive");
    ConjugatePair p;
    p.name = "elastic-net";
    p.c = c;
    p.m = m;
    p.g_value = [c](const Vector& y) { return 0.5 * c * y.squaredNorm() + y.lpNorm<1>(); };
    p.g_conjugate_value = [c](const Vector& z) {
        double s = 0.0;
        for (Index i = 0; i < z.size(); ++i) {
            const double e = std::max(std::abs(z[i]) - 1.0, 0.0);
            s += e * e;
        }
        return s / (2.0 * c);
    };
    p.g_conjugate_gradient = [c](const Vector& z) -> Vector {
        Vector out(z.size());
        for (Index i = 0; i < z.size(); ++i) out[i] = soft_threshold(z[i], 1.0) / c;
        return out;
    };
    p.g_subgradient = [c](const Vector& y) -> Vector {
        Vector out(y.size());
        for (Index i = 0; i < y.size(); ++i) out[i] = c * y[i] + (y[i] > 0.0 ? 1.0 : y[i] < 0.0 ? -1.0 : 0.0);
        return out;
    };
    p.conjugate_gradient_preimage = [c](const Vector& yb) -> std::optional<Vector> {
        Vector z(yb.size());
        for (Index i = 0; i < yb.size(); ++i) {
            if (yb[i] == 0.0) return std::nullopt;  // |z_i| <= 1 is an interval
            z[i] = c * yb[i] + (yb[i] > 0.0 ? 1.0 : -1.0);
        }
        return z;
    };
    return p;
}

DualModel build_dual(ConjugatePair pair, const Matrix& A, const Vector& b) {
    const Index n = A.rows();
    const Index m = A.cols();
    if (b.size() != n) throw InvalidArgument("dual: b must have one entry per row of A");
    if (m != pair.m) throw InvalidArgument("dual: A has wrong number of columns for the primal");
    if (m > n) throw InvalidArgument("dual: need m <= n");
    Eigen::CompleteOrthogonalDecomposition<Matrix> cod(A);
    const Vector y_ls = cod.solve(b);
    if ((A * y_ls - b).norm() > 1e-10 * std::max(1.0, b.norm())) {
        throw InvalidArgument("dual: b is not in range(A)");
    }
    const double normA = Eigen::JacobiSVD<Matrix>(A).singularValues()(0);
    if (!(normA > 0.0)) throw InvalidArgument("dual: A is zero");

    DualModel d;
    d.A = A;
    d.b = b;
    auto& f = d.model;
    f.name = "dual-" + pair.name;
    f.dim = n;
    const auto conj = pair.g_conjugate_value;
    const auto conj_grad = pair.g_conjugate_gradient;
    f.smooth_value = [A, b, conj](const Vector& x) { return conj(A.transpose() * x) - b.dot(x); };
    f.smooth_gradient = [A, b, conj_grad](const Vector& x) -> Vector {
        return A * conj_grad(A.transpose() * x) - b;
    };
    f.smooth_lipschitz = normA * normA / pair.c;
    attach_simple(f, SeparableSimple::zero(n));

    if (!pair.y_bar) {
        if (cod.rank() == m) {
            pair.y_bar = y_ls;
        } else {
            // recover y_bar from a converged dual solve
            f.critical_set.shape = NumericOracle{};
            solve_numeric_oracle(f);
            const Vector& x = *std::get<NumericOracle>(f.critical_set.shape).x_ref;
            pair.y_bar = conj_grad(A.transpose() * x);
        }
    }
    const auto z = pair.conjugate_gradient_preimage(*pair.y_bar);
    if (z) {
        AffineSet crit(A.transpose(), *z);
        const Vector xp = crit.pinv * crit.c;
        f.critical_set.shape = std::move(crit);
        f.critical_set.min_value = f.smooth_value(xp);
    } else if (!std::holds_alternative<NumericOracle>(f.critical_set.shape) ||
               !std::get<NumericOracle>(f.critical_set.shape).x_ref) {
        f.critical_set.shape = NumericOracle{};
        solve_numeric_oracle(f);
    }
    f.validate();
    d.pair = std::move(pair);
    return d;
}

PairCheck check_conjugate_pair(const ConjugatePair& pair, int count, std::uint64_t seed, double scale) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, scale);
    auto draw = [&] {
        Vector v(pair.m);
        for (Index i = 0; i < pair.m; ++i) v[i] = normal(rng);
        return v;
    };
    PairCheck out;
    for (int i = 0; i < count; ++i) {
        const Vector y = draw();
        const Vector z = draw();
        const Vector w = draw();
        out.fenchel_young_min_gap =
            std::min(out.fenchel_young_min_gap, pair.g_value(y) + pair.g_conjugate_value(z) - y.dot(z));
        const Vector s = pair.g_subgradient(y);
        out.fenchel_young_max_equality = std::max(
            out.fenchel_young_max_equality, std::abs(pair.g_value(y) + pair.g_conjugate_value(s) - y.dot(s)));
        const double dz = (z - w).norm();
        if (dz > 0.0) {
            out.lipschitz_max_ratio =
                std::max(out.lipschitz_max_ratio,
                         (pair.g_conjugate_gradient(z) - pair.g_conjugate_gradient(w)).norm() / dz);
        }
        ++out.pairs;
    }
    out.pass = out.fenchel_young_min_gap >= -1e-8 && out.fenchel_young_max_equality <= 1e-8 &&
               out.lipschitz_max_ratio <= 1.0 / pair.c + 1e-9;
    return out;
}

DualEBReport verify_dual_eb(const DualModel& dual, double r0, const std::vector<double>& r_grid,
                            const eb::SamplePlan& plan) {
    if (!(r0 > 0.0)) throw InvalidArgument("r0 must be positive");
    if (r_grid.empty()) throw InvalidArgument("radius grid is empty");
    for (double r : r_grid) {
        if (!(r > 0.0)) throw InvalidArgument("radii must be positive");
    }
    const auto& f = dual.model;
    const ResidualKind op = residual_kind::Gradient{};

    DualEBReport out;
    out.r0 = r0;
    out.r1 = r0 / 2.0;

    eb::SamplePlan p0 = plan;
    p0.region.level_offset = r0;
    const auto s0 = eb::evaluate_points(f, op, eb::draw_samples(f, p0).points, plan.threads);
    out.alpha_samples = static_cast<int>(s0.evals.size());
    out.alpha_hat = eb::estimate_from_evals(eb::Condition::ObjEB, s0);
    out.alpha_positive = out.alpha_hat > 0.0;

    std::vector<double> radii = r_grid;
    std::sort(radii.begin(), radii.end());
    std::vector<eb::PointEval> pool;
    for (std::size_t i = 0; i < radii.size(); ++i) {
        eb::SamplePlan pr = plan;
        pr.region.level_offset = radii[i];
        pr.seed = plan.seed + 1 + i;
        auto set = eb::evaluate_points(f, op, eb::draw_samples(f, pr).points, plan.threads);
        pool.insert(pool.end(), set.evals.begin(), set.evals.end());
        RadiusRow row;
        row.r = radii[i];
        row.rho = std::min(1.0, std::sqrt(out.r1 / radii[i]));
        row.samples = static_cast<int>(pool.size());
        row.nu_hat = eb::estimate_from_evals(eb::Condition::CorEB, eb::EvalSet{pool, 0});
        row.ratio = row.nu_hat * 8.0 / (out.alpha_hat * row.rho * row.rho);
        out.rows.push_back(row);
    }
    out.nu_positive = std::all_of(out.rows.begin(), out.rows.end(), [](const RadiusRow& r) { return r.nu_hat > 0.0; });
    out.nu_nonincreasing = true;
    for (std::size_t i = 1; i < out.rows.size(); ++i) {
        if (out.rows[i].nu_hat > out.rows[i - 1].nu_hat) out.nu_nonincreasing = false;
    }
    out.ratios_ok = std::all_of(out.rows.begin(), out.rows.end(),
                                [](const RadiusRow& r) { return r.ratio >= kDualRatioFloor; });
    return out;
}

nlohmann::json to_json(const DualEBReport& r) {
    nlohmann::json j;
    j["r0"] = r.r0;
    j["r1"] = r.r1;
    j["alpha_hat"] = r.alpha_hat;
    j["alpha_samples"] = r.alpha_samples;
    j["rows"] = nlohmann::json::array();
    for (const auto& row : r.rows) {
        j["rows"].push_back({{"r", row.r},
                             {"rho", row.rho},
                             {"nu_hat", row.nu_hat},
                             {"ratio", row.ratio},
                             {"samples", row.samples}});
    }
    j["alpha_positive"] = r.alpha_positive;
    j["nu_positive"] = r.nu_positive;
    j["nu_nonincreasing"] = r.nu_nonincreasing;
    j["ratios_ok"] = r.ratios_ok;
    return j;
}

}  // namespace eblab::dual
