#include "eblab/analysis.hpp"
#include "eblab/eb.hpp"
#include "eblab/problems.hpp"
#include "eblab/solvers.hpp"
#include "helpers.hpp"

#include <doctest.h>

#include <cmath>

using namespace eblab;
using testing::vec;
namespace an = eblab::analysis;
namespace sv = eblab::solvers;

namespace {

Matrix diag14() {
    Matrix Q = Matrix::Zero(2, 2);
    Q(0, 0) = 1.0;
    Q(1, 1) = 4.0;
    return Q;
}

sv::SolverConfig cfg(const Vector& x0, long max_iter = 100000) {
    sv::SolverConfig c;
    c.x0 = x0;
    c.max_iter = max_iter;
    return c;
}

eb::SamplePlan plan(double r, int count, std::uint64_t seed) {
    eb::SamplePlan p;
    p.region.level_offset = r;
    p.count = count;
    p.seed = seed;
    return p;
}

}  // namespace

TEST_CASE("rates of a geometric sequence") {
    std::vector<double> v;
    for (int k = 0; k < 20; ++k) v.push_back(std::pow(0.3, k));
    const auto r = an::measure_rate(v, an::Metric::Gap, 2);
    CHECK(r.ratios.size() == 17);
    CHECK(r.tau_hat_max == doctest::Approx(0.3));
    CHECK(r.tau_hat_geo == doctest::Approx(0.3));
    CHECK(r.tau_hat_geo <= r.tau_hat_max * (1.0 + 1e-12));
    CHECK(r.status == an::RateStatus::Ok);
}

TEST_CASE("already converged sequences are a status, not an error") {
    const auto m = problems::make_strongly_convex_quadratic(Matrix::Identity(2, 2), Vector::Zero(2));
    const auto t = sv::gradient_descent(m, 1.0, cfg(vec({1, 2})));
    const auto r = an::measure_rate(t, an::Metric::Dist2, 1);
    CHECK(r.status == an::RateStatus::AlreadyConverged);
    CHECK_THROWS_AS(an::measure_rate(std::vector<double>{1.0, 0.5}, an::Metric::Gap, 5), InvalidArgument);
}

TEST_CASE("predicted rates by substitution") {
    CHECK(an::predicted_rate("S3-smooth-strongly-convex", {{"mu", 1}, {"L", 4}}) == doctest::Approx(0.36));
    CHECK(an::predicted_rate("S3-RSC", {{"nu", 1}, {"L", 4}}) == doctest::Approx(0.75));
    CHECK(an::predicted_rate("S3-regularity", {{"alpha", 8}, {"beta", 1}}) == doctest::Approx(0.5));
    CHECK(an::predicted_rate("T51-abstract", {{"beta", 0.25}, {"nu", 4}}) == doctest::Approx(0.0));
    CHECK(an::predicted_rate("C52-gd-gap", {{"nu", 2}, {"L", 4}}) == doctest::Approx(0.75));
    CHECK(an::predicted_rate("C52-gd-dist", {{"nu", 2}, {"L", 4}}) == doctest::Approx(0.5));
    CHECK(an::predicted_rate("C54-ppa", {{"alpha", 1}, {"lambda", 1}}) == doctest::Approx(0.75));
    CHECK(an::predicted_rate("C54-ppa", {{"alpha", 10}, {"lambda", 1}}) == doctest::Approx(0.75));
    CHECK(an::predicted_rate("C56-fbs", {{"nu", 1}, {"L", 2}}) == doctest::Approx(0.75));
    CHECK(an::predicted_rate("T61-palm", {{"eta", 2}, {"L_min", 1}, {"L_max", 1}, {"L", 2}, {"p", 2}}) ==
          doctest::Approx(0.9));
    CHECK(an::predicted_rate("qlin1-nesterov", {{"mu", 1}, {"L", 4}}) == doctest::Approx(0.5));
    CHECK(an::predicted_rate("T72-nesterov", {{"mu", 1}, {"L", 4}, {"theta", 0.2}}) == doctest::Approx(1.0 / 3.0));
    CHECK(an::predicted_rate_ids().size() == 11);
}

TEST_CASE("out-of-range constants are rejected") {
    CHECK_THROWS_AS(an::predicted_rate("S3-regularity", {{"alpha", 2}, {"beta", 2}}), InvalidArgument);
    CHECK_THROWS_AS(an::predicted_rate("C56-fbs", {{"nu", 5}, {"L", 2}}), InvalidArgument);
    CHECK_THROWS_AS(an::predicted_rate("T51-abstract", {{"beta", 1}}), InvalidArgument);
    CHECK_THROWS_AS(an::predicted_rate("nope", {}), InvalidArgument);
}

TEST_CASE("step-size window") {
    const auto w = an::stepsize_window(0.5, 1.0, 0.25);
    CHECK(w.tau_bound == doctest::Approx(0.75));
    CHECK(w.lo == doctest::Approx(0.25));
    CHECK(w.hi == doctest::Approx(0.25));
    CHECK(w.feasible);
    const auto wide = an::stepsize_window(0.5, 1.0, 0.25, 0.9);
    CHECK(wide.lo < wide.hi);
    CHECK(wide.feasible);
    CHECK_FALSE(an::stepsize_window(1.0 - 1e-12, 1.0, 0.25).feasible);
    CHECK_FALSE(an::stepsize_window(0.5, 1.0, 0.25, 0.5).feasible);
    CHECK_THROWS_AS(an::stepsize_window(0.5, 4.0, 0.25), InvalidArgument);
}

TEST_CASE("measured rate stays inside the window bound") {
    // GD is the abstract method with G = grad f; on diag(1,4) beta = 1/4 and nu = 1
    const auto m = problems::make_strongly_convex_quadratic(diag14(), Vector::Zero(2));
    for (double theta : {0.3, 0.5, 0.7}) {
        const auto w = an::stepsize_window(theta, 1.0, 0.25, 0.9);
        REQUIRE(w.feasible);
        for (double h : {w.lo, 0.5 * (w.lo + w.hi), w.hi}) {
            const auto t = sv::gradient_descent(m, h, cfg(vec({1, 1})));
            const auto r = an::measure_rate(t, an::Metric::Dist2, 0);
            CHECK(r.tau_hat_max <= 0.9 + 0.02);
        }
    }
}

TEST_CASE("sufficiency matrix: measured rates respect the predicted rates") {
    const auto q = problems::make_strongly_convex_quadratic(diag14(), Vector::Zero(2));
    {
        const auto t = sv::gradient_descent(q, 0.25, cfg(vec({1, 1})));
        CHECK(an::measure_rate(t, an::Metric::Dist2).tau_hat_max <=
              an::predicted_rate("S3-RSC", {{"nu", 1}, {"L", 4}}) + 0.02);
        CHECK(an::measure_rate(t, an::Metric::Gap, 0).tau_hat_max <=
              an::predicted_rate("C52-gd-gap", {{"nu", 1}, {"L", 4}}) + 0.02);
    }
    {
        const auto t = sv::ppa(q, 2.0, cfg(vec({1, 1})));
        CHECK(an::measure_rate(t, an::Metric::Dist2, 0).tau_hat_max <=
              an::predicted_rate("C54-ppa", {{"alpha", 1}, {"lambda", 2}}) + 0.02);
    }
    {
        const auto m = problems::make_random_lasso(8, 4, 0.2, 3);
        const double L = m.smooth_lipschitz;
        const double nu = eb::estimate_constant(m, residual_kind::ProxGradientResidual{1.0 / L},
                                                eb::Condition::CorEB, plan(evaluate(m, Vector::Zero(4)) -
                                                                              m.critical_set.min_value, 1500, 3));
        const auto t = sv::fbs(m, 1.0 / L, cfg(Vector::Zero(4)));
        CHECK(an::measure_rate(t, an::Metric::Gap, 0).tau_hat_max <=
              an::predicted_rate("C56-fbs", {{"nu", nu}, {"L", L}}) + 0.02);
    }
}

TEST_CASE("necessity: GD on diag(1,4) with h = 1/4") {
    const auto m = problems::make_strongly_convex_quadratic(diag14(), Vector::Zero(2));
    const auto t = sv::gradient_descent(m, 0.25, cfg(vec({1, 1})));
    const double tau = an::measure_rate(t, an::Metric::Dist2, 0).tau_hat_max;
    an::NecessityParams p;
    p.L = 4.0;
    const auto r = an::necessity_check(m, "C52-gd", tau, p, plan(2.5, 800, 1));
    CHECK(r.applicable);
    CHECK(r.implied_constant == doctest::Approx(4.0 * std::pow(1.0 - std::sqrt(tau), 2)));
    REQUIRE(r.check);
    CHECK(r.check->pass);
    // the implied constant sits below the estimated one
    CHECK(r.implied_constant <= 1.05 * eb::estimate_constant(m, residual_kind::Gradient{}, eb::Condition::CorEB,
                                                              plan(2.5, 800, 1)));
}

TEST_CASE("necessity formulas for the abstract method, FBS and PPA") {
    const auto m = problems::make_strongly_convex_quadratic(Matrix::Identity(1, 1), Vector::Zero(1));
    an::NecessityParams p;
    p.h = 0.5;
    p.beta = 1.0;
    p.op = residual_kind::Gradient{};
    auto r = an::necessity_check(m, "T51-abstract", 0.25, p, plan(1.0, 300, 2));
    CHECK(r.implied_constant == doctest::Approx(1.0 * 0.25 / 0.25));
    CHECK(r.check->pass);
    an::NecessityParams f;
    f.L = 1.0;
    r = an::necessity_check(m, "C56-fbs", 0.25, f, plan(1.0, 300, 2));
    CHECK(r.implied_constant == doctest::Approx(0.125));
    an::NecessityParams ppa;
    ppa.lambda = 1.0;
    r = an::necessity_check(m, "C54-ppa", 0.25, ppa, plan(1.0, 300, 2));
    CHECK(r.implied_constant == doctest::Approx(0.125));
    CHECK(r.check->kind == "obj-eb");
}

TEST_CASE("necessity does not apply without linear convergence") {
    const auto m = problems::make_strongly_convex_quadratic(Matrix::Identity(1, 1), Vector::Zero(1));
    an::NecessityParams p;
    p.lambda = 1.0;
    const auto r = an::necessity_check(m, "C54-ppa", 1.0, p, plan(1.0, 100, 1));
    CHECK_FALSE(r.applicable);
    CHECK_FALSE(r.check);
}

TEST_CASE("basic condition holds on GD iterates") {
    // on 2I with h = 0.1 the rate is 0.64 and h sits exactly at (1 - sqrt(tau)) / L
    const auto m = problems::make_strongly_convex_quadratic(2.0 * Matrix::Identity(2, 2), Vector::Zero(2));
    const double h = 0.1;
    const auto t = sv::gradient_descent(m, h, cfg(vec({1, -3})));
    const double tau = an::measure_rate(t, an::Metric::Dist2, 0).tau_hat_max;
    CHECK(tau == doctest::Approx(0.64));
    std::vector<Vector> pts;
    for (const auto& r : t.rows) pts.push_back(r.x);
    an::NecessityParams p;
    p.h = h;
    p.L = 2.0;
    p.points = pts;
    const auto r = an::necessity_check(m, "P31-gd-basic", tau, p, plan(1.0, 100, 1));
    REQUIRE(r.check);
    CHECK(r.check->pass);
    CHECK(r.implied_constant == doctest::Approx((1.0 - tau) / (2.0 * h)));
    // by hand at x0: <2x, x> >= (1 - tau)/(2h) |x|^2 + h/2 |2x|^2 holds with equality
    const Vector x = vec({1, -3});
    CHECK(2.0 * x.squaredNorm() == doctest::Approx((1.0 - tau) / (2 * h) * x.squaredNorm() + 2.0 * h * x.squaredNorm()));
}

TEST_CASE("basic condition rejects steps beyond (1 - sqrt(tau)) / L") {
    Matrix Q = Matrix::Zero(2, 2);
    Q(0, 0) = 1.0;
    Q(1, 1) = 4.0;
    const auto m = problems::make_strongly_convex_quadratic(Q, Vector::Zero(2));
    const auto t = sv::gradient_descent(m, 0.25, cfg(vec({1, 1})));
    const double tau = an::measure_rate(t, an::Metric::Dist2, 0).tau_hat_max;
    an::NecessityParams p;
    p.h = 0.25;
    p.L = 4.0;
    p.points = {vec({1, 1})};
    CHECK_THROWS_AS(an::necessity_check(m, "P31-gd-basic", tau, p, plan(1.0, 10, 1)), InvalidArgument);
}
