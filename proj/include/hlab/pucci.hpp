#pragma once

// Extremal operators M+/M- over symmetric forms, uniform-ellipticity
// sandwich checks, and the intrinsic-continuity probe.  All operators here
// depend only on eigenvalues, so transporting the argument never changes
// the value.

#include <stdexcept>

#include "hlab/geometry.hpp"
#include "hlab/linalg.hpp"

namespace hlab {

struct Ellipticity {
    double lambda = 1.0;
    double Lambda = 1.0;

    Ellipticity() = default;
    Ellipticity(double lam, double Lam) : lambda(lam), Lambda(Lam) {
        if (!(0 < lam && lam <= 1.0 && 1.0 <= Lam))
            throw std::invalid_argument("need 0 < lambda <= 1 <= Lambda");
    }
};

enum class OperatorKind { pucci_plus, pucci_minus, laplacian };

struct OperatorSpec {
    OperatorKind kind = OperatorKind::laplacian;
    Ellipticity ell;

    OperatorSpec() = default;
    OperatorSpec(OperatorKind k, Ellipticity e) : kind(k), ell(e) {
        if (k == OperatorKind::laplacian && (e.lambda != 1.0 || e.Lambda != 1.0))
            throw std::invalid_argument("laplacian requires lambda = Lambda = 1");
    }
};

inline const char* operator_kind_name(OperatorKind k) {
    switch (k) {
        case OperatorKind::pucci_plus: return "pucci_plus";
        case OperatorKind::pucci_minus: return "pucci_minus";
        default: return "laplacian";
    }
}

inline OperatorKind operator_kind_from(const std::string& s) {
    if (s == "pucci_plus") return OperatorKind::pucci_plus;
    if (s == "pucci_minus") return OperatorKind::pucci_minus;
    if (s == "laplacian") return OperatorKind::laplacian;
    throw std::invalid_argument("unknown operator kind: " + s);
}

/// lambda * (sum of negative eigenvalues) + Lambda * (sum of positive ones).
/// Zero eigenvalues contribute to neither sum.
inline double pucci_plus(const Ellipticity& ell, const SymN& s) {
    VecN ev = eigenvalues(s);
    double r = 0;
    for (int i = 0; i < ev.n; ++i) r += (ev[i] < 0 ? ell.lambda : ell.Lambda) * ev[i];
    return r;
}

inline double pucci_minus(const Ellipticity& ell, const SymN& s) {
    VecN ev = eigenvalues(s);
    double r = 0;
    for (int i = 0; i < ev.n; ++i) r += (ev[i] < 0 ? ell.Lambda : ell.lambda) * ev[i];
    return r;
}

inline double pucci_plus(const Ellipticity& ell, const SymForm& s) { return pucci_plus(ell, s.matrix); }
inline double pucci_minus(const Ellipticity& ell, const SymForm& s) { return pucci_minus(ell, s.matrix); }

inline double apply_operator(const OperatorSpec& op, const SymN& s) {
    switch (op.kind) {
        case OperatorKind::pucci_plus: return pucci_plus(op.ell, s);
        case OperatorKind::pucci_minus: return pucci_minus(op.ell, s);
        default: return trace(s);
    }
}

/// Returns (M-(P), M+(P)); callers assert F(S+P)-F(S) lies inside.
inline std::pair<double, double> ellipticity_sandwich(const Ellipticity& ell, const SymN& P) {
    return {pucci_minus(ell, P), pucci_plus(ell, P)};
}

/// Margins of the sandwich for one operator kind:
/// {F(S+P)-F(S) - M-(P),  M+(P) - (F(S+P)-F(S))}.  Both >= 0 up to roundoff.
inline std::pair<double, double> sandwich_margins(const OperatorSpec& op, const SymN& S,
                                                  const SymN& P) {
    double diff = apply_operator(op, S + P) - apply_operator(op, S);
    auto [lo, hi] = ellipticity_sandwich(op.ell, P);
    return {diff - lo, hi - diff};
}

/// The three chained margins of
/// M-(S+P) <= M-(S)+M+(P) <= M+(S+P) <= M+(S)+M+(P).
struct SubadditivityMargins {
    double first = 0, second = 0, third = 0;
    double min() const { return std::min(first, std::min(second, third)); }
};

inline SubadditivityMargins subadditivity_check(const Ellipticity& ell, const SymN& S,
                                                const SymN& P) {
    double mp_s = pucci_plus(ell, S), mp_p = pucci_plus(ell, P), mp_sp = pucci_plus(ell, S + P);
    double mm_s = pucci_minus(ell, S), mm_sp = pucci_minus(ell, S + P);
    SubadditivityMargins m;
    m.first = (mm_s + mp_p) - mm_sp;
    m.second = mp_sp - (mm_s + mp_p);
    m.third = (mp_s + mp_p) - mp_sp;
    return m;
}

/// F(S) - F(transport of S to y); identically 0 (to roundoff) for the
/// eigenvalue-only operators implemented here.
inline double intrinsic_continuity_check(const ModelManifold& M, const OperatorSpec& op,
                                         const Point& x, const Point& y, const SymForm& S) {
    SymForm Sy = transport_form(M, x, y, S);
    return apply_operator(op, S.matrix) - apply_operator(op, Sy.matrix);
}

}  // namespace hlab
