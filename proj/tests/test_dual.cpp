#include "eblab/dual.hpp"
#include "helpers.hpp"

#include <doctest.h>

#include <cmath>

using namespace eblab;
using testing::vec;

namespace {

eb::SamplePlan plan(int count, std::uint64_t seed) {
    eb::SamplePlan p;
    p.count = count;
    p.seed = seed;
    return p;
}

// sup_y zy - g(y) on a grid, one dimension
double brute_conjugate(const std::function<double(double)>& g, double z) {
    double best = -kInf;
    for (double y = -20.0; y <= 20.0; y += 1e-3) best = std::max(best, z * y - g(y));
    return best;
}

}  // namespace

TEST_CASE("conjugates against a brute-force supremum") {
    const auto q = dual::quadratic_pair(2.0, vec({0.5}));
    const auto e = dual::elastic_net_pair(2.0, 1);
    for (double z = -4.0; z <= 4.0; z += 0.35) {
        CHECK(q.g_conjugate_value(vec({z})) ==
              doctest::Approx(brute_conjugate([](double y) { return (y - 0.5) * (y - 0.5); }, z)).epsilon(1e-5));
        CHECK(e.g_conjugate_value(vec({z})) ==
              doctest::Approx(brute_conjugate([](double y) { return y * y + std::abs(y); }, z)).epsilon(1e-5));
        const Vector fd = testing::central_difference(e.g_conjugate_value, vec({z}), 1e-6);
        CHECK(e.g_conjugate_gradient(vec({z}))[0] == doctest::Approx(fd[0]).epsilon(1e-5));
    }
}

TEST_CASE("pair self-checks pass") {
    CHECK(dual::check_conjugate_pair(dual::quadratic_pair(1.5, vec({1, -1})), 500, 1).pass);
    const auto r = dual::check_conjugate_pair(dual::elastic_net_pair(0.5, 3), 500, 2);
    CHECK(r.pass);
    CHECK(r.fenchel_young_min_gap >= -1e-8);
    CHECK(r.lipschitz_max_ratio <= 1.0 / 0.5 + 1e-9);
}

TEST_CASE("quadratic-primal dual: minimum equals minus the primal optimum") {
    Matrix A(2, 1);
    A << 1, 1;
    const auto d = dual::build_dual(dual::quadratic_pair(1.0, Vector::Zero(1)), A, vec({1, 1}));
    // primal: min 1/2 y^2 s.t. y = 1, value 1/2
    CHECK(d.model.critical_set.min_value == doctest::Approx(-0.5));
    CHECK(d.model.smooth_lipschitz == doctest::Approx(2.0));
    const Vector xs = project_to_critical(d.model, vec({3, -1}));
    CHECK(d.model.smooth_gradient(xs).norm() < 1e-12);
    CHECK(xs.sum() == doctest::Approx(1.0));
}

TEST_CASE("elastic-net dual: affine critical set and strong duality") {
    Matrix A(3, 2);
    A << 1, 0, 0, 1, 1, 1;
    const Vector ybar = vec({1, -2});
    const auto d = dual::build_dual(dual::elastic_net_pair(1.0, 2), A, A * ybar);
    REQUIRE(std::holds_alternative<AffineSet>(d.model.critical_set.shape));
    // g(ybar) = 1/2 (1 + 4) + 3
    CHECK(d.model.critical_set.min_value == doctest::Approx(-5.5));
    std::mt19937_64 rng(3);
    for (int i = 0; i < 10; ++i) {
        const Vector xs = project_to_critical(d.model, testing::gaussian(3, rng, 2.0));
        CHECK(d.model.smooth_gradient(xs).norm() < 1e-10);
        CHECK(d.model.smooth_value(xs) == doctest::Approx(-5.5));
    }
}

TEST_CASE("elastic-net dual with a zero in ybar falls back to a reference solve") {
    Matrix A(2, 2);
    A << 1, 0, 0, 1;
    const auto d = dual::build_dual(dual::elastic_net_pair(1.0, 2), A, vec({2, 0}));
    CHECK(std::holds_alternative<NumericOracle>(d.model.critical_set.shape));
    // g(2, 0) = 2 + 2
    CHECK(d.model.critical_set.min_value == doctest::Approx(-4.0).epsilon(1e-9));
}

TEST_CASE("dual construction rejects bad data") {
    Matrix A(2, 1);
    A << 1, 1;
    CHECK_THROWS_AS(dual::build_dual(dual::quadratic_pair(1.0, Vector::Zero(1)), A, vec({1, 0})), InvalidArgument);
    CHECK_THROWS_AS(dual::build_dual(dual::quadratic_pair(1.0, Vector::Zero(2)), A, vec({1, 1})), InvalidArgument);
    CHECK_THROWS_AS(dual::build_dual(dual::quadratic_pair(1.0, Vector::Zero(2)), A.transpose(), vec({1})),
                    InvalidArgument);
    CHECK_THROWS_AS(dual::quadratic_pair(0.0, Vector::Zero(1)), InvalidArgument);
}

TEST_CASE("dual EB conclusions on the shipped instances") {
    Matrix A1(2, 1);
    A1 << 1, 1;
    const auto dq = dual::build_dual(dual::quadratic_pair(1.0, Vector::Zero(1)), A1, vec({1, 1}));
    const auto rq = dual::verify_dual_eb(dq, 1.0, {0.1, 1.0, 10.0}, plan(600, 1));
    CHECK(rq.alpha_hat >= 1.8);
    CHECK(rq.alpha_hat <= 2.2);
    Matrix A(3, 2);
    A << 1, 0, 0, 1, 1, 1;
    const auto de = dual::build_dual(dual::elastic_net_pair(1.0, 2), A, A * vec({1, -2}));
    const auto re = dual::verify_dual_eb(de, 1.0, {0.1, 1.0, 10.0}, plan(600, 1));
    REQUIRE(re.rows.size() == 3);
    CHECK(re.nu_positive);
    CHECK(re.nu_nonincreasing);
    for (std::size_t i = 1; i < re.rows.size(); ++i) CHECK(re.rows[i].nu_hat <= re.rows[i - 1].nu_hat);
    CHECK(re.r1 == doctest::Approx(0.5));
    const auto j = dual::to_json(re);
    CHECK(j["rows"].size() == 3);
}
