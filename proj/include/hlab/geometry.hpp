#pragma once

// Closed-form Riemannian kernels for the two model spaces: Euclidean R^n
// (kappa = 0) and hyperbolic H^n(-kappa) in the hyperboloid model
// (kappa > 0).  Both are Cartan-Hadamard, so every point pair is joined by
// a unique minimizing geodesic and there is no cut locus.
//
// Hyperboloid model: points x in R^{n+1} with  -x0^2 + sum xi^2 = -1/kappa,
// x0 > 0, under the Minkowski form  <x,y> = -x0 y0 + sum xi yi.  Distances
// and transports are hyperbolic-trig expressions in Minkowski products,
// stable for d <= 20.

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "hlab/linalg.hpp"

namespace hlab {

/// tau * coth(tau), extended by 1 at tau = 0.
inline double hcoth(double tau) {
    if (std::abs(tau) < 1e-8) {
        double t2 = tau * tau;
        return 1.0 + t2 / 3.0 - t2 * t2 / 45.0;
    }
    return tau / std::tanh(tau);
}

/// sinh(tau) / tau, extended by 1 at tau = 0.
inline double sinhc(double tau) {
    if (std::abs(tau) < 1e-8) {
        double t2 = tau * tau;
        return 1.0 + t2 / 6.0 + t2 * t2 / 120.0;
    }
    return std::sinh(tau) / tau;
}

inline constexpr int kMaxAmb = kMaxDim + 1;

/// Ambient coordinate vector (n for Euclidean, n+1 for hyperboloid).
struct Amb {
    int k = 0;
    std::array<double, kMaxAmb> a{};

    Amb() = default;
    explicit Amb(int k_) : k(k_) { a.fill(0.0); }
    double& operator[](int i) { return a[size_t(i)]; }
    double operator[](int i) const { return a[size_t(i)]; }
};

inline Amb operator+(Amb x, const Amb& y) {
    for (int i = 0; i < x.k; ++i) x[i] += y[i];
    return x;
}
inline Amb operator-(Amb x, const Amb& y) {
    for (int i = 0; i < x.k; ++i) x[i] -= y[i];
    return x;
}
inline Amb operator*(double c, Amb x) {
    for (int i = 0; i < x.k; ++i) x[i] *= c;
    return x;
}

struct Point {
    Amb coords;
};

/// Constant-curvature model space; Sec == -kappa everywhere.
struct ModelManifold {
    int dim = 2;
    double kappa = 0.0;

    ModelManifold() = default;
    ModelManifold(int n, double k) : dim(n), kappa(k) {
        if (n < 1 || n > kMaxDim) throw std::invalid_argument("dim must be in [1,4]");
        if (!(k >= 0.0)) throw std::invalid_argument("kappa must be >= 0");
    }

    bool hyperbolic() const { return kappa > 0.0; }
    int ambient() const { return hyperbolic() ? dim + 1 : dim; }

    /// Minkowski product for kappa > 0, Euclidean dot otherwise.
    double pairing(const Amb& x, const Amb& y) const {
        double s = 0;
        int i0 = 0;
        if (hyperbolic()) {
            s -= x[0] * y[0];
            i0 = 1;
        }
        for (int i = i0; i < ambient(); ++i) s += x[i] * y[i];
        return s;
    }

    Point origin() const {
        Point p;
        p.coords = Amb(ambient());
        if (hyperbolic()) p.coords[0] = 1.0 / std::sqrt(kappa);
        return p;
    }

    /// Hyperboloid constraint residual (0 for Euclidean points).
    double constraint_residual(const Point& p) const {
        if (!hyperbolic()) return 0.0;
        return std::abs(pairing(p.coords, p.coords) + 1.0 / kappa);
    }

    void validate(const Point& p, double tol = 1e-9) const {
        if (p.coords.k != ambient()) throw std::invalid_argument("point has wrong ambient dim");
        for (int i = 0; i < p.coords.k; ++i)
            if (!std::isfinite(p.coords[i])) throw std::invalid_argument("non-finite point");
        if (constraint_residual(p) > tol * (1.0 + std::abs(1.0 / std::max(kappa, 1e-300))))
            throw std::invalid_argument("point violates hyperboloid constraint");
        if (hyperbolic() && p.coords[0] <= 0.0)
            throw std::invalid_argument("point on wrong hyperboloid sheet");
    }

    /// Re-projects onto the hyperboloid; cheap guard against drift in long
    /// kernel chains.
    Point renormalize(Point p) const {
        if (!hyperbolic()) return p;
        double q = -pairing(p.coords, p.coords);  // should be 1/kappa
        double s = 1.0 / std::sqrt(q * kappa);
        p.coords = s * p.coords;
        return p;
    }
};

/// Tangent vector stored as ambient components; for the hyperboloid it is
/// Minkowski-orthogonal to its base point.
struct TangentAmb {
    Point base;
    Amb v;
};

inline double tangent_norm(const ModelManifold& M, const TangentAmb& t) {
    return std::sqrt(std::max(0.0, M.pairing(t.v, t.v)));
}

inline double distance(const ModelManifold& M, const Point& x, const Point& y) {
    if (!M.hyperbolic()) {
        Amb d = x.coords - y.coords;
        return std::sqrt(M.pairing(d, d));
    }
    bool same = true;
    for (int i = 0; i < M.ambient() && same; ++i) same = x.coords[i] == y.coords[i];
    if (same) return 0.0;
    double c = -M.kappa * M.pairing(x.coords, y.coords);  // cosh(sqrt(k) d)
    if (c < 1.0) c = 1.0;                                 // roundoff clamp
    return std::acosh(c) / std::sqrt(M.kappa);
}

inline Point exp_map(const ModelManifold& M, const Point& x, const Amb& v) {
    if (!M.hyperbolic()) {
        Point p;
        p.coords = x.coords + v;
        return p;
    }
    double nv = std::sqrt(std::max(0.0, M.pairing(v, v)));
    if (nv < 1e-300) return x;
    double sk = std::sqrt(M.kappa);
    Point p;
    p.coords = std::cosh(sk * nv) * x.coords + (std::sinh(sk * nv) / (sk * nv)) * v;
    return M.renormalize(p);
}

/// Inverse of exp_map; unique because the models have empty cut locus.
inline Amb log_map(const ModelManifold& M, const Point& x, const Point& y) {
    if (!M.hyperbolic()) return y.coords - x.coords;
    double d = distance(M, x, y);
    if (d < 1e-14) return Amb(M.ambient());
    // component of y Minkowski-orthogonal to x
    Amb w = y.coords + (M.kappa * M.pairing(x.coords, y.coords)) * x.coords;
    // second projection pass: the residual <x,w> component is pure
    // cancellation noise but gets amplified by sinh*cosh downstream
    w = w + (M.kappa * M.pairing(x.coords, w)) * x.coords;
    double nw2 = M.pairing(w, w);
    double scale2 = 0;  // Euclidean coordinate scale of the inputs
    for (int i = 0; i < M.ambient(); ++i)
        scale2 += x.coords[i] * x.coords[i] + y.coords[i] * y.coords[i];
    // below the cancellation floor the direction is pure noise; the points
    // coincide to machine precision
    if (nw2 <= 1e-28 * scale2) return Amb(M.ambient());
    return (d / std::sqrt(nw2)) * w;
}

/// Parallel transport of ambient tangent v along the geodesic x -> y.
/// Rational form L(v) = v + kappa <y,v> / (1 + c) * (x + y) with
/// c = -kappa <x,y> = cosh(sqrt(kappa) d); an exact isometry identity,
/// far better conditioned than the sinh/cosh decomposition.
inline Amb parallel_transport_amb(const ModelManifold& M, const Point& x, const Point& y,
                                  const Amb& v) {
    if (!M.hyperbolic()) return v;
    double c = std::max(1.0, -M.kappa * M.pairing(x.coords, y.coords));
    double f = M.kappa * M.pairing(y.coords, v) / (1.0 + c);
    return v + f * (x.coords + y.coords);
}

/// Orthonormal frame at p built by Gram-Schmidt from the ambient basis;
/// deterministic, never exposed (all outputs are frame-covariant).
struct Frame {
    Point base;
    int n = 0;
    std::array<Amb, kMaxDim> e{};
};

inline Frame frame_at(const ModelManifold& M, const Point& p) {
    Frame f;
    f.base = p;
    f.n = M.dim;
    if (!M.hyperbolic()) {
        for (int i = 0; i < M.dim; ++i) {
            f.e[size_t(i)] = Amb(M.dim);
            f.e[size_t(i)][i] = 1.0;
        }
        return f;
    }
    int found = 0;
    for (int i = 0; i < M.ambient() && found < M.dim; ++i) {
        Amb c(M.ambient());
        c[i] = 1.0;
        // project out the base direction (Minkowski): c + kappa <c,p> p
        Amb w = c + (M.kappa * M.pairing(c, p.coords)) * p.coords;
        for (int j = 0; j < found; ++j) w = w - M.pairing(w, f.e[size_t(j)]) * f.e[size_t(j)];
        double nw = M.pairing(w, w);
        if (nw < 1e-20) continue;
        f.e[size_t(found)] = (1.0 / std::sqrt(nw)) * w;
        ++found;
    }
    if (found != M.dim) throw std::runtime_error("frame construction failed");
    return f;
}

/// Tangent vector in frame components (the spec's TangentVector).
struct TangentVector {
    Point base;
    VecN components;
};

/// Symmetric bilinear form in frame components (the spec's SymForm).
struct SymForm {
    Point base;
    SymN matrix;
};

inline Amb to_ambient(const ModelManifold& M, const TangentVector& t) {
    Frame f = frame_at(M, t.base);
    Amb v(M.ambient());
    for (int i = 0; i < M.dim; ++i) v = v + t.components[i] * f.e[size_t(i)];
    return v;
}

inline TangentVector from_ambient(const ModelManifold& M, const Point& base, const Amb& v) {
    Frame f = frame_at(M, base);
    TangentVector t;
    t.base = base;
    t.components = VecN(M.dim);
    for (int i = 0; i < M.dim; ++i) t.components[i] = M.pairing(v, f.e[size_t(i)]);
    return t;
}

inline Point exp_map(const ModelManifold& M, const Point& x, const TangentVector& v) {
    return exp_map(M, x, to_ambient(M, v));
}

inline TangentVector log_map_tv(const ModelManifold& M, const Point& x, const Point& y) {
    return from_ambient(M, x, log_map(M, x, y));
}

inline TangentVector parallel_transport(const ModelManifold& M, const Point& x, const Point& y,
                                        const TangentVector& v) {
    Amb va = to_ambient(M, v);
    return from_ambient(M, y, parallel_transport_amb(M, x, y, va));
}

/// Transports a symmetric form along x -> y; eigenvalues are preserved
/// exactly (the transported frame map is orthogonal).
inline SymForm transport_form(const ModelManifold& M, const Point& x, const Point& y,
                              const SymForm& s) {
    if (distance(M, x, y) < 1e-14) return s;
    const int n = M.dim;
    Frame fx = frame_at(M, x);
    Frame fy = frame_at(M, y);
    MatN r(n);  // r(b,a) = <L e_a^x, e_b^y>
    for (int a = 0; a < n; ++a) {
        Amb le = parallel_transport_amb(M, x, y, fx.e[size_t(a)]);
        for (int b = 0; b < n; ++b) r(b, a) = M.pairing(le, fy.e[size_t(b)]);
    }
    SymForm out;
    out.base = y;
    out.matrix = conjugate(r, s.matrix);
    return out;
}

/// Hessian of d_y^2/2 at x: eigenvalue 1 radially, H(sqrt(kappa) d) on the
/// orthogonal complement; identity at x = y and for kappa = 0.
inline SymForm hess_half_dist_sq(const ModelManifold& M, const Point& y, const Point& x) {
    SymForm s;
    s.base = x;
    double d = distance(M, x, y);
    if (!M.hyperbolic() || d < 1e-14) {
        s.matrix = SymN::identity(M.dim);
        return s;
    }
    double H = hcoth(std::sqrt(M.kappa) * d);
    TangentVector lg = log_map_tv(M, x, y);
    VecN rad = (-1.0 / d) * lg.components;  // unit radial direction (toward grad d_y)
    s.matrix = H * SymN::identity(M.dim) + (1.0 - H) * SymN::outer(rad);
    return s;
}

/// Area of the unit sphere S^{n-1}.
inline double unit_sphere_area(int n) {
    switch (n) {
        case 1: return 2.0;                      // S^0: two points
        case 2: return 2.0 * M_PI;               // S^1
        case 3: return 4.0 * M_PI;               // S^2
        case 4: return 2.0 * M_PI * M_PI;        // S^3
        default: throw std::invalid_argument("dim out of range");
    }
}

/// Exact geodesic-ball volume; center-independent on model spaces.
inline double ball_volume(const ModelManifold& M, double r) {
    if (r < 0) throw std::invalid_argument("ball_volume: r < 0");
    const int n = M.dim;
    if (!M.hyperbolic()) return unit_sphere_area(n) * std::pow(r, n) / n;
    double sk = std::sqrt(M.kappa);
    switch (n) {
        case 1:
            return 2.0 * r;
        case 2:
            return 2.0 * M_PI * (std::cosh(sk * r) - 1.0) / M.kappa;
        case 3:
            return M_PI * (std::sinh(2.0 * sk * r) / sk - 2.0 * r) / M.kappa;
        case 4: {
            // int_0^r sinh^3(a s) ds = (cosh(3ar) - 9 cosh(ar) + 8) / (12 a)
            double a = sk;
            double I = (std::cosh(3.0 * a * r) - 9.0 * std::cosh(a * r) + 8.0) / (12.0 * a);
            return unit_sphere_area(4) * I / (M.kappa * sk);
        }
        default:
            throw std::invalid_argument("dim out of range");
    }
}

/// Doubling margin 2^n cosh^{n-1}(2 sqrt(kappa) R) - Vol(B_2r)/Vol(B_r);
/// nonnegative on model spaces, identically zero when kappa = 0.
inline double doubling_check(const ModelManifold& M, double r, double R) {
    if (!(0 < r && r < R)) throw std::invalid_argument("doubling_check needs 0 < r < R");
    double bound = std::pow(2.0, M.dim) *
                   std::pow(std::cosh(2.0 * std::sqrt(M.kappa) * R), M.dim - 1);
    double ratio = ball_volume(M, 2.0 * r) / ball_volume(M, r);
    return bound - ratio;
}

/// Volume density of the normal-coordinate chart at radius rho:
/// dV = sinhc(sqrt(kappa) rho)^{n-1} d xi.
inline double chart_volume_density(const ModelManifold& M, double rho) {
    if (!M.hyperbolic()) return 1.0;
    return std::pow(sinhc(std::sqrt(M.kappa) * rho), M.dim - 1);
}

}  // namespace hlab
