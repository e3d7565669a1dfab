#include "eblab/problems.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace eblab::problems {

double lambda_max(const Matrix& S) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(S, Eigen::EigenvaluesOnly);
    return es.eigenvalues().maxCoeff();
}

namespace {

// Smooth quadratic f(x) = 1/2 x'Hx - q'x + offset with its prox.
void attach_quadratic(ObjectiveModel& m, const Matrix& H, const Vector& q, double offset) {
    m.smooth_value = [H, q, offset](const Vector& x) { return 0.5 * x.dot(H * x) - q.dot(x) + offset; };
    m.smooth_gradient = [H, q](const Vector& x) -> Vector { return H * x - q; };
    m.objective_prox = [H, q](const Vector& x, double t) -> Vector {
        const Matrix K = Matrix::Identity(H.rows(), H.cols()) + t * H;
        return K.ldlt().solve(x + t * q);
    };
}

void attach_least_squares(ObjectiveModel& m, const Matrix& A, const Vector& b) {
    m.smooth_value = [A, b](const Vector& x) { return 0.5 * (A * x - b).squaredNorm(); };
    m.smooth_gradient = [A, b](const Vector& x) -> Vector { return A.transpose() * (A * x - b); };
}

double smallest_positive_eigenvalue(const Matrix& S) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(S, Eigen::EigenvaluesOnly);
    const auto& ev = es.eigenvalues();
    const double cut = 1e-10 * std::max(1.0, ev.maxCoeff());
    double best = kInf;
    for (Index i = 0; i < ev.size(); ++i) {
        if (ev[i] > cut) best = std::min(best, ev[i]);
    }
    return best;
}

void add_quadratic_growth_constants(ObjectiveModel& m, double mu, double L, const std::string& note) {
    m.expected = {
        {"res-eb", "gradient", mu, note},
        {"cor-eb", "gradient", mu, note},
        {"obj-eb", "gradient", mu, note},
        {"res-obj-eb", "gradient", std::sqrt(2.0 * mu), note},
        {"cor-res-eb", "gradient", 1.0 / L, note},
        {"cor-obj-eb", "gradient", 2.0, note},
    };
}

}  // namespace

ObjectiveModel make_strongly_convex_quadratic(const Matrix& Q, const Vector& b) {
    if (Q.rows() != Q.cols() || Q.rows() != b.size()) throw InvalidArgument("quadratic: shape mismatch");
    if ((Q - Q.transpose()).norm() > 1e-12 * std::max(1.0, Q.norm())) {
        throw InvalidArgument("quadratic: Q is not symmetric");
    }
    Eigen::SelfAdjointEigenSolver<Matrix> es(Q, Eigen::EigenvaluesOnly);
    const double mu = es.eigenvalues().minCoeff();
    const double L = es.eigenvalues().maxCoeff();
    if (!(mu > 0.0)) throw InvalidArgument("quadratic: Q is not positive definite");

    ObjectiveModel m;
    m.name = "strongly_convex_quadratic";
    m.dim = Q.rows();
    attach_quadratic(m, Q, b, 0.0);
    m.smooth_lipschitz = L;
    attach_simple(m, SeparableSimple::zero(m.dim));
    m.strong_convexity = mu;
    const Vector x_star = Q.ldlt().solve(b);
    m.critical_set.shape = SinglePoint{x_star};
    m.critical_set.min_value = m.smooth_value(x_star);
    add_quadratic_growth_constants(m, mu, L, "eigenvalues of Q");
    m.validate();
    return m;
}

ObjectiveModel make_rank_deficient_least_squares(const Matrix& A, const Vector& b) {
    if (A.rows() != b.size()) throw InvalidArgument("least squares: shape mismatch");
    const Matrix pinv = Eigen::CompleteOrthogonalDecomposition<Matrix>(A).pseudoInverse();
    if ((A * (pinv * b) - b).norm() > 1e-10 * std::max(1.0, b.norm())) {
        throw InvalidArgument("least squares: b is not in range(A)");
    }
    const Matrix H = A.transpose() * A;
    const Vector q = A.transpose() * b;
    const double L = lambda_max(H);
    if (!(L > 0.0)) throw InvalidArgument("least squares: A is zero");

    ObjectiveModel m;
    m.name = "rank_deficient_least_squares";
    m.dim = A.cols();
    attach_least_squares(m, A, b);
    m.objective_prox = [H, q](const Vector& x, double t) -> Vector {
        const Matrix K = Matrix::Identity(H.rows(), H.cols()) + t * H;
        return K.ldlt().solve(x + t * q);
    };
    m.smooth_lipschitz = L;
    attach_simple(m, SeparableSimple::zero(m.dim));
    m.critical_set.shape = AffineSet(H, q);
    m.critical_set.min_value = 0.0;
    const double mu_plus = smallest_positive_eigenvalue(H);
    if (Eigen::CompleteOrthogonalDecomposition<Matrix>(A).rank() == A.cols()) m.strong_convexity = mu_plus;
    add_quadratic_growth_constants(m, mu_plus, L, "smallest positive eigenvalue of A'A");
    m.validate();
    return m;
}

ObjectiveModel make_lasso(const Matrix& A, const Vector& b, double w) {
    if (w < 0.0) throw InvalidArgument("lasso: weight must be nonnegative");
    if (w == 0.0) {
        auto m = make_rank_deficient_least_squares(A, b);
        m.name = "lasso";
        return m;
    }
    if (A.rows() != b.size()) throw InvalidArgument("lasso: shape mismatch");
    const double L = lambda_max(A.transpose() * A);
    if (!(L > 0.0)) throw InvalidArgument("lasso: A is zero");

    ObjectiveModel m;
    m.name = "lasso";
    m.dim = A.cols();
    attach_least_squares(m, A, b);
    m.smooth_lipschitz = L;
    attach_simple(m, SeparableSimple::l1(m.dim, w));
    m.critical_set.shape = NumericOracle{};
    solve_numeric_oracle(m);
    m.validate();
    return m;
}

ObjectiveModel make_random_lasso(Index m_rows, Index n, double w, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    Matrix A(m_rows, n);
    for (Index i = 0; i < m_rows; ++i) {
        for (Index j = 0; j < n; ++j) A(i, j) = normal(rng);
    }
    Vector x_true(n);
    for (Index j = 0; j < n; ++j) x_true[j] = normal(rng);
    auto model = make_lasso(A, A * x_true, w);
    model.name = "random_lasso";
    return model;
}

ObjectiveModel make_box_l1_scalar(double smooth_curvature) {
    if (smooth_curvature < 0.0) throw InvalidArgument("box_l1_scalar: curvature must be >= 0");
    const double c = smooth_curvature;
    ObjectiveModel m;
    m.name = "box_l1_scalar";
    m.dim = 1;
    m.smooth_value = [c](const Vector& x) { return 0.5 * c * x[0] * x[0]; };
    m.smooth_gradient = [c](const Vector& x) -> Vector { return c * x; };
    m.smooth_is_zero = (c == 0.0);
    // any positive modulus is valid for the zero function
    m.smooth_lipschitz = c > 0.0 ? c : 1.0;
    attach_simple(m, SeparableSimple{Vector::Constant(1, 1.0), Vector::Constant(1, -2.0), Vector::Constant(1, 2.0)});
    m.objective_prox = [c](const Vector& x, double t) -> Vector {
        return Vector::Constant(1, std::clamp(soft_threshold(x[0], t) / (1.0 + t * c), -2.0, 2.0));
    };
    if (c > 0.0) m.strong_convexity = c;
    m.critical_set.shape = SinglePoint{Vector::Zero(1)};
    m.critical_set.min_value = 0.0;
    m.validate();
    return m;
}

double box_l1_envelope(double x) {
    const double p = std::clamp(soft_threshold(x, 1.0), -2.0, 2.0);
    return std::abs(p) + 0.5 * (x - p) * (x - p);
}

double box_l1_envelope_linearization(double x, double y) {
    if (y <= -3.0) return (y + 2.0) * x - 0.5 * y * y + 4.0;
    if (y <= -1.0) return -x - 0.5;
    if (y <= 1.0) return y * x - 0.5 * y * y;
    if (y <= 3.0) return x - 0.5;
    return (y - 2.0) * x - 0.5 * y * y + 4.0;
}

CompositeSpec make_composite_counterexample() {
    ObjectiveModel m;
    m.name = "composite_counterexample";
    m.dim = 2;
    m.smooth_value = [](const Vector& x) { return x[0] * x[0]; };
    m.smooth_gradient = [](const Vector& x) -> Vector {
        Vector g(2);
        g << 2.0 * x[0], 0.0;
        return g;
    };
    m.smooth_lipschitz = 2.0;
    attach_simple(m, SeparableSimple::zero(2));
    Matrix M(1, 2);
    M << 1.0, 0.0;
    m.critical_set.shape = AffineSet(M, Vector::Zero(1));
    m.critical_set.min_value = 0.0;
    m.composite = {2, false};
    m.validate();

    CompositeSpec spec;
    spec.model = std::move(m);
    spec.prox_linearized = [](const Vector& y, double L) -> Vector {
        Vector p(2);
        p << L * y[0] / (L + 2.0), y[1];
        return p;
    };
    return spec;
}

ObjectiveModel make_palm_problem(const Matrix& A, const Vector& b, const std::vector<Index>& block_sizes,
                                 const std::vector<BlockSimpleKind>& g_kinds) {
    if (A.rows() != b.size()) throw InvalidArgument("palm: shape mismatch");
    if (block_sizes.empty() || block_sizes.size() != g_kinds.size()) {
        throw InvalidArgument("palm: need one simple term per block");
    }
    Index total = 0;
    for (Index s : block_sizes) {
        if (s < 1) throw InvalidArgument("palm: block sizes must be positive");
        total += s;
    }
    if (total != A.cols()) throw InvalidArgument("palm: block sizes do not sum to n");

    const Index n = A.cols();
    SeparableSimple g = SeparableSimple::zero(n);
    ObjectiveModel m;
    m.name = "palm";
    m.dim = n;
    attach_least_squares(m, A, b);
    m.smooth_lipschitz = lambda_max(A.transpose() * A);
    bool all_zero = true;
    Index offset = 0;
    for (std::size_t j = 0; j < block_sizes.size(); ++j) {
        const Index len = block_sizes[j];
        const Matrix Aj = A.middleCols(offset, len);
        const double Lj = lambda_max(Aj.transpose() * Aj);
        if (!(Lj > 0.0)) throw InvalidArgument("palm: block has zero curvature");
        m.blocks.push_back({offset, len, Lj});
        std::visit(
            [&](const auto& k) {
                using T = std::decay_t<decltype(k)>;
                if constexpr (std::is_same_v<T, block_kind::L1>) {
                    if (k.weight < 0.0) throw InvalidArgument("palm: l1 weight must be >= 0");
                    g.l1_weights.segment(offset, len).setConstant(k.weight);
                    if (k.weight > 0.0) all_zero = false;
                } else if constexpr (std::is_same_v<T, block_kind::Box>) {
                    if (!(k.lower <= k.upper)) throw InvalidArgument("palm: empty box");
                    g.lower.segment(offset, len).setConstant(k.lower);
                    g.upper.segment(offset, len).setConstant(k.upper);
                    all_zero = false;
                }
            },
            g_kinds[j]);
        offset += len;
    }
    attach_simple(m, g);
    if (all_zero) {
        const Matrix H = A.transpose() * A;
        const Vector q = A.transpose() * b;
        AffineSet crit(H, q);
        const Vector xp = crit.pinv * q;
        m.critical_set.shape = std::move(crit);
        m.critical_set.min_value = m.smooth_value(xp);
    } else {
        m.critical_set.shape = NumericOracle{};
        solve_numeric_oracle(m);
    }
    m.validate();
    return m;
}

ObjectiveModel make_invex_1d() {
    ObjectiveModel m;
    m.name = "invex_1d";
    m.dim = 1;
    m.smooth_value = [](const Vector& x) {
        const double s = std::sin(x[0]);
        return x[0] * x[0] + 3.0 * s * s;
    };
    m.smooth_gradient = [](const Vector& x) -> Vector {
        return Vector::Constant(1, 2.0 * x[0] + 3.0 * std::sin(2.0 * x[0]));
    };
    // f'' = 2 + 6 cos(2x) lies in [-4, 8]
    m.smooth_lipschitz = 8.0;
    attach_simple(m, SeparableSimple::zero(1));
    m.critical_set.shape = SinglePoint{Vector::Zero(1)};
    m.critical_set.min_value = 0.0;
    m.validate();
    return m;
}

ObjectiveModel make_abs_1d() {
    ObjectiveModel m;
    m.name = "abs_1d";
    m.dim = 1;
    m.smooth_value = [](const Vector&) { return 0.0; };
    m.smooth_gradient = [](const Vector& x) -> Vector { return Vector::Zero(x.size()); };
    m.smooth_is_zero = true;
    m.smooth_lipschitz = 1.0;
    attach_simple(m, SeparableSimple::l1(1, 1.0));
    m.critical_set.shape = SinglePoint{Vector::Zero(1)};
    m.critical_set.min_value = 0.0;
    m.validate();
    return m;
}

ObjectiveModel make_quartic_1d(double L) {
    if (!(L > 0.0)) throw InvalidArgument("quartic: L must be positive");
    ObjectiveModel m;
    m.name = "quartic_1d";
    m.dim = 1;
    m.smooth_value = [](const Vector& x) { return std::pow(x[0], 4); };
    m.smooth_gradient = [](const Vector& x) -> Vector { return Vector::Constant(1, 4.0 * std::pow(x[0], 3)); };
    m.smooth_lipschitz = L;
    attach_simple(m, SeparableSimple::zero(1));
    m.critical_set.shape = SinglePoint{Vector::Zero(1)};
    m.critical_set.min_value = 0.0;
    m.validate();
    return m;
}

}  // namespace eblab::problems
