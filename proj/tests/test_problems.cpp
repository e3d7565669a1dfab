#include "eblab/core.hpp"
#include "eblab/problems.hpp"
#include "helpers.hpp"

#include <doctest.h>

#include <cmath>

using namespace eblab;
using testing::vec;

namespace {

void check_gradient(const ObjectiveModel& m, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    for (int s = 0; s < 25; ++s) {
        const Vector x = testing::gaussian(m.dim, rng, 1.5);
        const Vector g = m.smooth_gradient(x);
        const Vector fd = testing::central_difference(m.smooth_value, x, 1e-5);
        CHECK((g - fd).norm() <= 1e-5 * std::max(1.0, g.norm()));
    }
}

}  // namespace

TEST_CASE("gradients agree with central differences") {
    Matrix A(3, 2);
    A << 1, 2, 0, 1, -1, 1;
    Matrix Q(2, 2);
    Q << 2, -1, -1, 3;
    check_gradient(problems::make_strongly_convex_quadratic(Q, vec({1, 1})), 1);
    check_gradient(problems::make_rank_deficient_least_squares(A, A * vec({1, 2})), 2);
    check_gradient(problems::make_lasso(A, A * vec({1, 0}), 0.3), 3);
    check_gradient(problems::make_random_lasso(6, 4, 0.2, 9), 4);
    check_gradient(problems::make_box_l1_scalar(2.0), 5);
    check_gradient(problems::make_invex_1d(), 6);
    check_gradient(problems::make_quartic_1d(), 7);
    check_gradient(problems::make_composite_counterexample().model, 8);
    check_gradient(problems::make_palm_problem(A, A * vec({1, 1}), {1, 1},
                                               {problems::block_kind::L1{0.1}, problems::block_kind::Box{-1, 1}}),
                   9);
}

TEST_CASE("quadratic builder") {
    Matrix Q(2, 2);
    Q << 1, 0, 0, 4;
    const auto m = problems::make_strongly_convex_quadratic(Q, vec({1, 4}));
    CHECK(m.smooth_lipschitz == doctest::Approx(4.0));
    REQUIRE(m.strong_convexity);
    CHECK(*m.strong_convexity == doctest::Approx(1.0));
    REQUIRE(unique_minimizer(m));
    CHECK((*unique_minimizer(m) - vec({1, 1})).norm() < 1e-14);
    CHECK(m.critical_set.min_value == doctest::Approx(-2.5));
    CHECK_FALSE(m.expected.empty());

    Matrix bad(2, 2);
    bad << 1, 0, 0, -1;
    CHECK_THROWS_AS(problems::make_strongly_convex_quadratic(bad, vec({0, 0})), InvalidArgument);
    Matrix asym(2, 2);
    asym << 1, 1, 0, 1;
    CHECK_THROWS_AS(problems::make_strongly_convex_quadratic(asym, vec({0, 0})), InvalidArgument);
}

TEST_CASE("rank-deficient least squares") {
    Matrix A(1, 2);
    A << 1, 1;
    const auto m = problems::make_rank_deficient_least_squares(A, vec({1}));
    CHECK(m.smooth_lipschitz == doctest::Approx(2.0));
    CHECK_FALSE(unique_minimizer(m));
    CHECK(distance_to_critical(m, vec({0, 0})) == doctest::Approx(1.0 / std::sqrt(2.0)));
    CHECK(distance_to_critical(m, vec({3, -2})) == doctest::Approx(0.0).epsilon(1e-14));

    Matrix B(2, 1);
    B << 1, 1;
    CHECK_THROWS_AS(problems::make_rank_deficient_least_squares(B, vec({1, 0})), InvalidArgument);
}

TEST_CASE("lasso with zero weight reduces to least squares") {
    Matrix A(1, 2);
    A << 1, 1;
    const auto m = problems::make_lasso(A, vec({1}), 0.0);
    CHECK(m.simple_is_zero);
    CHECK(distance_to_critical(m, vec({0, 0})) == doctest::Approx(1.0 / std::sqrt(2.0)));
    CHECK_THROWS_AS(problems::make_lasso(A, vec({1}), -1.0), InvalidArgument);
}

TEST_CASE("random lasso is seeded and its reference point is stationary") {
    const auto a = problems::make_random_lasso(5, 3, 0.5, 42);
    const auto b = problems::make_random_lasso(5, 3, 0.5, 42);
    const Vector x = vec({0.1, 0.2, 0.3});
    CHECK(evaluate(a, x) == evaluate(b, x));
    const Vector xs = project_to_critical(a, x);
    const Vector R = residual(a, residual_kind::ProxGradientResidual{1.0 / a.smooth_lipschitz}, xs);
    CHECK(R.norm() < 1e-9);
    CHECK(evaluate(a, xs) == doctest::Approx(a.critical_set.min_value));
    const auto c = problems::make_random_lasso(5, 3, 0.5, 43);
    CHECK(evaluate(c, x) != evaluate(a, x));
}

TEST_CASE("invex problem: every critical point is the global minimizer") {
    const auto m = problems::make_invex_1d();
    // sign changes of f' on a fine grid
    int roots = 0;
    double prev = m.smooth_gradient(vec({-20.0}))[0];
    for (double x = -20.0 + 1e-3; x <= 20.0; x += 1e-3) {
        const double g = m.smooth_gradient(vec({x}))[0];
        if ((prev < 0.0) != (g < 0.0)) {
            ++roots;
            CHECK(std::abs(x) < 2e-3);
        }
        prev = g;
    }
    CHECK(roots == 1);
    CHECK(m.critical_set.min_value == 0.0);
    CHECK(m.smooth_lipschitz == doctest::Approx(8.0));
}

TEST_CASE("composite counterexample prox against brute force") {
    const auto spec = problems::make_composite_counterexample();
    for (double L : {1.0, 2.0, 5.0}) {
        for (double y1 : {-1.0, 0.0, 0.7}) {
            const Vector y = vec({y1, 0.4});
            const Vector p = composite_p(spec, L, y);
            const double q = testing::grid_argmin([&](double u) { return u * u + 0.5 * L * (u - y1) * (u - y1); },
                                                  -2.0, 2.0);
            CHECK(std::abs(p[0] - q) < 2e-4);
            CHECK(p[1] == doctest::Approx(0.4));
        }
    }
    CHECK(evaluate(spec.model, vec({3, 7})) == doctest::Approx(9.0));
}

TEST_CASE("palm block structure") {
    Matrix A(2, 3);
    A << 1, 2, 0, 0, 1, 3;
    const auto m = problems::make_palm_problem(A, A * vec({1, 1, 1}), {1, 2},
                                               {problems::block_kind::Zero{}, problems::block_kind::L1{0.5}});
    REQUIRE(m.blocks.size() == 2);
    CHECK(m.blocks[0].offset == 0);
    CHECK(m.blocks[1].offset == 1);
    CHECK(m.blocks[1].length == 2);
    CHECK(m.blocks[0].lipschitz == doctest::Approx(problems::lambda_max(A.leftCols(1).transpose() * A.leftCols(1))));
    CHECK(m.blocks[1].lipschitz == doctest::Approx(problems::lambda_max(A.rightCols(2).transpose() * A.rightCols(2))));
    CHECK(m.simple_value(vec({5, -1, 2})) == doctest::Approx(1.5));
    CHECK_THROWS_AS(problems::make_palm_problem(A, vec({0, 0}), {1, 1}, {problems::block_kind::Zero{}}),
                    InvalidArgument);
    CHECK_THROWS_AS(problems::make_palm_problem(A, vec({0, 0}), {1, 1},
                                                {problems::block_kind::Zero{}, problems::block_kind::Zero{}}),
                    InvalidArgument);
}

TEST_CASE("lambda_max against the eigen decomposition") {
    std::mt19937_64 rng(3);
    Matrix B(4, 4);
    for (Index i = 0; i < 16; ++i) B(i % 4, i / 4) = std::normal_distribution<double>()(rng);
    const Matrix S = B.transpose() * B;
    Eigen::SelfAdjointEigenSolver<Matrix> es(S);
    CHECK(problems::lambda_max(S) == doctest::Approx(es.eigenvalues().maxCoeff()));
}
