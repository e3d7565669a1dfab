#pragma once

#include "eblab/core.hpp"

#include <functional>
#include <initializer_list>
#include <random>

namespace testing {

inline eblab::Vector vec(std::initializer_list<double> v) {
    eblab::Vector x(static_cast<eblab::Index>(v.size()));
    eblab::Index i = 0;
    for (double d : v) x[i++] = d;
    return x;
}

inline eblab::Vector gaussian(eblab::Index n, std::mt19937_64& rng, double scale = 1.0) {
    std::normal_distribution<double> d(0.0, scale);
    eblab::Vector x(n);
    for (eblab::Index i = 0; i < n; ++i) x[i] = d(rng);
    return x;
}

inline eblab::Vector central_difference(const std::function<double(const eblab::Vector&)>& f, const eblab::Vector& x,
                                        double h = 1e-6) {
    eblab::Vector g(x.size());
    for (eblab::Index i = 0; i < x.size(); ++i) {
        eblab::Vector p = x, m = x;
        p[i] += h;
        m[i] -= h;
        g[i] = (f(p) - f(m)) / (2.0 * h);
    }
    return g;
}

// Minimizer of a 1-D function on a uniform grid over [lo, hi].
inline double grid_argmin(const std::function<double(double)>& f, double lo, double hi, double step = 1e-4) {
    double best = lo, best_v = f(lo);
    const long n = static_cast<long>((hi - lo) / step);
    for (long i = 1; i <= n; ++i) {
        const double u = lo + static_cast<double>(i) * step;
        const double v = f(u);
        if (v < best_v) {
            best_v = v;
            best = u;
        }
    }
    return best;
}

}  // namespace testing
