#pragma once

// Shared helpers for the test suites: seeded RNG draws and random
// points/forms on the model spaces.

#include <random>

#include "hlab/geometry.hpp"
#include "hlab/linalg.hpp"

namespace tutil {

using namespace hlab;

inline std::mt19937_64 rng(uint64_t seed) { return std::mt19937_64(seed); }

inline double unif(std::mt19937_64& g, double a, double b) {
    return std::uniform_real_distribution<double>(a, b)(g);
}
inline double gauss(std::mt19937_64& g, double s = 1.0) {
    return std::normal_distribution<double>(0.0, s)(g);
}

/// Random point within chart radius r of the origin.
inline Point random_point(std::mt19937_64& g, const ModelManifold& M, double r) {
    Frame f = frame_at(M, M.origin());
    Amb v(M.ambient());
    while (true) {
        VecN c(M.dim);
        double s2 = 0;
        for (int i = 0; i < M.dim; ++i) {
            c[i] = unif(g, -r, r);
            s2 += c[i] * c[i];
        }
        if (s2 > r * r) continue;
        for (int i = 0; i < M.dim; ++i) v = v + c[i] * f.e[size_t(i)];
        return exp_map(M, M.origin(), v);
    }
}

inline TangentVector random_tangent(std::mt19937_64& g, const ModelManifold& M, const Point& base,
                                    double scale = 1.0) {
    TangentVector t;
    t.base = base;
    t.components = VecN(M.dim);
    for (int i = 0; i < M.dim; ++i) t.components[i] = gauss(g, scale);
    return t;
}

/// GOE-style symmetric matrix, optionally with a near-degenerate spectrum.
inline SymN random_sym(std::mt19937_64& g, int n, bool near_degenerate = false) {
    SymN s(n);
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) {
            double v = gauss(g);
            s(i, j) = s(j, i) = v;
        }
    if (near_degenerate && n >= 2) {
        // conjugate a nearly-tied diagonal by a random rotation built from
        // a Gram-Schmidt of gaussian columns
        SymN d(n);
        double base = gauss(g);
        for (int i = 0; i < n; ++i) d(i, i) = base + 1e-10 * i * unif(g, 0.5, 1.5);
        MatN q(n);
        for (int a = 0; a < n; ++a) {
            VecN c(n);
            for (int i = 0; i < n; ++i) c[i] = gauss(g);
            for (int b = 0; b < a; ++b) {
                VecN prev(n);
                for (int i = 0; i < n; ++i) prev[i] = q(i, b);
                c = c - dot(c, prev) * prev;
            }
            double nn = norm(c);
            for (int i = 0; i < n; ++i) q(i, a) = c[i] / nn;
        }
        return conjugate(q, d);
    }
    return s;
}

inline SymForm random_form(std::mt19937_64& g, const ModelManifold& M, const Point& base) {
    SymForm f;
    f.base = base;
    f.matrix = random_sym(g, M.dim);
    return f;
}

}  // namespace tutil
