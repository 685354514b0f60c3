#pragma once

// Small fixed-capacity vectors/matrices (spatial dimension <= 4) and a
// cyclic Jacobi eigensolver for symmetric matrices.  Dimensions this small
// favor robustness over asymptotics.

#include <algorithm>
#include <array>
#include <cassert>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace hlab {

inline constexpr int kMaxDim = 4;

/// Dense vector with runtime size n <= kMaxDim.
struct VecN {
    int n = 0;
    std::array<double, kMaxDim> a{};

    VecN() = default;
    explicit VecN(int n_) : n(n_) { a.fill(0.0); }
    double& operator[](int i) { return a[size_t(i)]; }
    double operator[](int i) const { return a[size_t(i)]; }
};

inline VecN operator+(VecN x, const VecN& y) {
    for (int i = 0; i < x.n; ++i) x[i] += y[i];
    return x;
}
inline VecN operator-(VecN x, const VecN& y) {
    for (int i = 0; i < x.n; ++i) x[i] -= y[i];
    return x;
}
inline VecN operator*(double c, VecN x) {
    for (int i = 0; i < x.n; ++i) x[i] *= c;
    return x;
}
inline double dot(const VecN& x, const VecN& y) {
    double s = 0;
    for (int i = 0; i < x.n; ++i) s += x[i] * y[i];
    return s;
}
inline double norm(const VecN& x) { return std::sqrt(dot(x, x)); }

/// Symmetric n x n matrix, dense row-major storage.
struct SymN {
    int n = 0;
    std::array<double, kMaxDim * kMaxDim> m{};

    SymN() = default;
    explicit SymN(int n_) : n(n_) { m.fill(0.0); }
    double& operator()(int i, int j) { return m[size_t(i * n + j)]; }
    double operator()(int i, int j) const { return m[size_t(i * n + j)]; }

    static SymN identity(int n_) {
        SymN s(n_);
        for (int i = 0; i < n_; ++i) s(i, i) = 1.0;
        return s;
    }
    static SymN outer(const VecN& v) {
        SymN s(v.n);
        for (int i = 0; i < v.n; ++i)
            for (int j = 0; j < v.n; ++j) s(i, j) = v[i] * v[j];
        return s;
    }
    double max_abs() const {
        double r = 0;
        for (int i = 0; i < n * n; ++i) r = std::max(r, std::abs(m[size_t(i)]));
        return r;
    }
    double asymmetry() const {
        double r = 0;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) r = std::max(r, std::abs((*this)(i, j) - (*this)(j, i)));
        return r;
    }
};

inline SymN operator+(SymN x, const SymN& y) {
    for (int i = 0; i < x.n * x.n; ++i) x.m[size_t(i)] += y.m[size_t(i)];
    return x;
}
inline SymN operator-(SymN x, const SymN& y) {
    for (int i = 0; i < x.n * x.n; ++i) x.m[size_t(i)] -= y.m[size_t(i)];
    return x;
}
inline SymN operator*(double c, SymN x) {
    for (int i = 0; i < x.n * x.n; ++i) x.m[size_t(i)] *= c;
    return x;
}
inline VecN operator*(const SymN& s, const VecN& v) {
    VecN r(v.n);
    for (int i = 0; i < s.n; ++i) {
        double acc = 0;
        for (int j = 0; j < s.n; ++j) acc += s(i, j) * v[j];
        r[i] = acc;
    }
    return r;
}
inline double quad_form(const SymN& s, const VecN& v) { return dot(v, s * v); }
inline double trace(const SymN& s) {
    double t = 0;
    for (int i = 0; i < s.n; ++i) t += s(i, i);
    return t;
}

/// General (not necessarily symmetric) small matrix, used for frames and
/// map differentials.
struct MatN {
    int n = 0;
    std::array<double, kMaxDim * kMaxDim> m{};

    MatN() = default;
    explicit MatN(int n_) : n(n_) { m.fill(0.0); }
    double& operator()(int i, int j) { return m[size_t(i * n + j)]; }
    double operator()(int i, int j) const { return m[size_t(i * n + j)]; }

    static MatN identity(int n_) {
        MatN s(n_);
        for (int i = 0; i < n_; ++i) s(i, i) = 1.0;
        return s;
    }
};

inline VecN operator*(const MatN& s, const VecN& v) {
    VecN r(v.n);
    for (int i = 0; i < s.n; ++i) {
        double acc = 0;
        for (int j = 0; j < s.n; ++j) acc += s(i, j) * v[j];
        r[i] = acc;
    }
    return r;
}

/// R * S * R^T for orthogonal R; pushes a symmetric form through a frame map.
inline SymN conjugate(const MatN& r, const SymN& s) {
    const int n = s.n;
    SymN out(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            double acc = 0;
            for (int k = 0; k < n; ++k)
                for (int l = 0; l < n; ++l) acc += r(i, k) * s(k, l) * r(j, l);
            out(i, j) = acc;
        }
    // symmetrize away roundoff
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            double v = 0.5 * (out(i, j) + out(j, i));
            out(i, j) = out(j, i) = v;
        }
    return out;
}

/// Determinant by partial-pivot LU, n <= 4.
inline double det(const MatN& a) {
    const int n = a.n;
    std::array<std::array<double, kMaxDim>, kMaxDim> lu{};
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) lu[size_t(i)][size_t(j)] = a(i, j);
    double d = 1.0;
    for (int k = 0; k < n; ++k) {
        int p = k;
        for (int i = k + 1; i < n; ++i)
            if (std::abs(lu[size_t(i)][size_t(k)]) > std::abs(lu[size_t(p)][size_t(k)])) p = i;
        if (p != k) {
            std::swap(lu[size_t(p)], lu[size_t(k)]);
            d = -d;
        }
        double piv = lu[size_t(k)][size_t(k)];
        if (piv == 0.0) return 0.0;
        d *= piv;
        for (int i = k + 1; i < n; ++i) {
            double f = lu[size_t(i)][size_t(k)] / piv;
            for (int j = k; j < n; ++j) lu[size_t(i)][size_t(j)] -= f * lu[size_t(k)][size_t(j)];
        }
    }
    return d;
}

struct EigenSym {
    VecN values;   // ascending
    MatN vectors;  // column k is the eigenvector of values[k]
};

/// Cyclic Jacobi rotations; residual target ~1e-13 * ||S||.
inline EigenSym eigen_sym(const SymN& s_in) {
    const int n = s_in.n;
    SymN s = s_in;
    MatN v = MatN::identity(n);
    const double scale = std::max(s.max_abs(), 1e-300);
    for (int sweep = 0; sweep < 64; ++sweep) {
        double off = 0;
        for (int p = 0; p < n; ++p)
            for (int q = p + 1; q < n; ++q) off = std::max(off, std::abs(s(p, q)));
        if (off <= 1e-15 * scale) break;
        for (int p = 0; p < n; ++p)
            for (int q = p + 1; q < n; ++q) {
                double apq = s(p, q);
                if (std::abs(apq) <= 1e-18 * scale) continue;
                double theta = (s(q, q) - s(p, p)) / (2.0 * apq);
                double t = (theta >= 0 ? 1.0 : -1.0) /
                           (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                double c = 1.0 / std::sqrt(t * t + 1.0);
                double sn = t * c;
                for (int k = 0; k < n; ++k) {
                    double skp = s(k, p), skq = s(k, q);
                    s(k, p) = c * skp - sn * skq;
                    s(k, q) = sn * skp + c * skq;
                }
                for (int k = 0; k < n; ++k) {
                    double spk = s(p, k), sqk = s(q, k);
                    s(p, k) = c * spk - sn * sqk;
                    s(q, k) = sn * spk + c * sqk;
                }
                for (int k = 0; k < n; ++k) {
                    double vkp = v(k, p), vkq = v(k, q);
                    v(k, p) = c * vkp - sn * vkq;
                    v(k, q) = sn * vkp + c * vkq;
                }
            }
    }
    EigenSym out;
    out.values = VecN(n);
    out.vectors = MatN(n);
    std::array<int, kMaxDim> idx{};
    for (int i = 0; i < n; ++i) idx[size_t(i)] = i;
    std::sort(idx.begin(), idx.begin() + n, [&](int a, int b) { return s(a, a) < s(b, b); });
    for (int k = 0; k < n; ++k) {
        out.values[k] = s(idx[size_t(k)], idx[size_t(k)]);
        for (int i = 0; i < n; ++i) out.vectors(i, k) = v(i, idx[size_t(k)]);
    }
    return out;
}

inline VecN eigenvalues(const SymN& s) { return eigen_sym(s).values; }

}  // namespace hlab
