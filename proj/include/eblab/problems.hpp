#pragma once

#include "eblab/core.hpp"
#include "eblab/separable.hpp"

#include <cstdint>
#include <variant>

namespace eblab::problems {

/// f(x) = 1/2 x'Qx - b'x, g = 0. Rejects non-SPD Q.
ObjectiveModel make_strongly_convex_quadratic(const Matrix& Q, const Vector& b);

/// f(x) = 1/2 |Ax - b|^2, g = 0, crit = {x : A'Ax = A'b}. Requires b in range(A).
ObjectiveModel make_rank_deficient_least_squares(const Matrix& A, const Vector& b);

/// f(x) = 1/2 |Ax - b|^2, g = w |x|_1. w = 0 falls back to least squares.
ObjectiveModel make_lasso(const Matrix& A, const Vector& b, double w);

/// Lasso with a seeded Gaussian A (m x n) and b = A x_true, so b is in range(A).
ObjectiveModel make_random_lasso(Index m, Index n, double w, std::uint64_t seed);

/// n = 1, g(x) = |x| + indicator[-2, 2], f(x) = curvature/2 x^2 (f = 0 by default).
ObjectiveModel make_box_l1_scalar(double smooth_curvature = 0.0);

/// Closed-form Moreau envelope of |x| + indicator[-2, 2] at lambda = 1.
double box_l1_envelope(double x);

/// The five-branch affine minorant g_1(y) + g_1'(y)(x - y) of the envelope above.
double box_l1_envelope_linearization(double x, double y);

/// e(x) = (x1, x1), f = 1/2 |.|^2, g = 0, so phi(x) = x1^2 and
/// p(y) = (L y1 / (L + 2), y2).
CompositeSpec make_composite_counterexample();

namespace block_kind {
struct Zero {};
struct L1 {
    double weight;
};
struct Box {
    double lower;
    double upper;
};
}  // namespace block_kind

using BlockSimpleKind = std::variant<block_kind::Zero, block_kind::L1, block_kind::Box>;

/// f(x) = 1/2 |Ax - b|^2 with a block partition and one simple term per block.
ObjectiveModel make_palm_problem(const Matrix& A, const Vector& b, const std::vector<Index>& block_sizes,
                                 const std::vector<BlockSimpleKind>& g_kinds);

/// f(x) = x^2 + 3 sin^2(x): nonconvex, every critical point is a global minimizer.
ObjectiveModel make_invex_1d();

/// phi(x) = |x| as a pure simple part (f = 0).
ObjectiveModel make_abs_1d();

/// f(x) = x^4, a sublinear-rate toy. L is the curvature bound used for step sizes.
ObjectiveModel make_quartic_1d(double L = 12.0);

/// Largest eigenvalue of a symmetric PSD matrix.
double lambda_max(const Matrix& S);

}  // namespace eblab::problems
