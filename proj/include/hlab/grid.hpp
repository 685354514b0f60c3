#pragma once

// Sampled space-time functions on parabolic cylinders.  Spatial nodes form
// a Cartesian lattice in geodesic normal coordinates at the cylinder
// center; on the model spaces the chart metric, volume density and
// Christoffel symbols are closed-form, so discrete gradients/Hessians are
// assembled from plain centered differences plus exact corrections:
//
//   g_ij(xi)      = A Q_ij + P_ij,            A = sinhc(sqrt(k) rho)^2
//   Gamma^l_ij    = c1 (n_i Q_jl + n_j Q_il) + c2 Q_ij n_l,
//   c1 = (H(tau) - 1)/rho,   c2 = (1 - sinhc(2 tau))/rho,   tau = sqrt(k) rho
//
// with P = n n^T the radial projector, Q = I - P.  The resulting discrete
// Hessian is exact (to roundoff) for functions quadratic in the chart.

#include <cstdio>
#include <fstream>
#include <map>
#include <memory>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "hlab/geometry.hpp"
#include "hlab/linalg.hpp"

namespace hlab {

/// Parabolic cylinder K_{r,rho}(z0,t1) = B_r(z0) x (t1-rho, t1].
struct Cylinder {
    Point center;
    double radius = 0;
    double depth = 0;
    double t_end = 0;

    bool contains(const ModelManifold& M, const Point& x, double t, double tol = 1e-9) const {
        if (distance(M, x, center) >= radius - tol) return false;
        return t > t_end - depth + tol && t <= t_end + tol;
    }
};

struct LatticeNode {
    VecN chart;   // normal coordinates at the lattice center
    Point point;  // embedded
    double rho = 0;
    double cellvol = 0;   // h^n * chart volume density
    double density = 1;   // chart volume density at the node
    double c1 = 0, c2 = 0;
    VecN radial;             // chart unit radial direction (zero at center)
    MatN frame_coord;        // column a: chart components of adapted frame vector a
    std::array<Amb, kMaxDim> frame_amb{};  // ambient adapted frame
    std::array<int, 2 * kMaxDim> nbr{};    // +e_0, -e_0, +e_1, -e_1, ...
    bool interior = false;  // full axis + diagonal stencil available
};

/// Spatial lattice: integer cube {-K..K}^n scaled by h, restricted to the
/// chart ball of the given radius.  Node order is lexicographic over the
/// cube, so construction is deterministic.
class Lattice {
  public:
    Lattice(const ModelManifold& M, const Point& center, double radius, double h)
        : M_(M), center_(center), radius_(radius), h_(h) {
        if (!(h > 0) || !(radius > 0)) throw std::invalid_argument("lattice needs h, radius > 0");
        M.validate(center);
        K_ = int(std::floor(radius / h + 1e-9));
        side_ = 2 * K_ + 1;
        int cube = 1;
        for (int i = 0; i < M.dim; ++i) cube *= side_;
        cube_index_.assign(size_t(cube), -1);

        Frame cf = frame_at(M, center);
        std::array<int, kMaxDim> k{};
        k.fill(-K_);
        while (true) {
            VecN chart(M.dim);
            double r2 = 0;
            for (int i = 0; i < M.dim; ++i) {
                chart[i] = h * k[size_t(i)];
                r2 += chart[i] * chart[i];
            }
            double rho = std::sqrt(r2);
            if (rho <= radius + 1e-12) {
                cube_index_[size_t(flat(k))] = int(nodes_.size());
                nodes_.push_back(make_node(cf, chart, rho));
            }
            int i = M.dim - 1;
            while (i >= 0 && k[size_t(i)] == K_) {
                k[size_t(i)] = -K_;
                --i;
            }
            if (i < 0) break;
            ++k[size_t(i)];
        }
        link_neighbors();
    }

    const ModelManifold& manifold() const { return M_; }
    const Point& center() const { return center_; }
    double radius() const { return radius_; }
    double h() const { return h_; }
    int num_nodes() const { return int(nodes_.size()); }
    const LatticeNode& node(int i) const { return nodes_[size_t(i)]; }
    const std::vector<int>& interior_nodes() const { return interior_; }

    int axis_neighbor(int id, int dim, int dir) const {  // dir in {+1,-1}
        return nodes_[size_t(id)].nbr[size_t(2 * dim + (dir > 0 ? 0 : 1))];
    }
    int diag_neighbor(int id, int d1, int s1, int d2, int s2) const {
        std::array<int, kMaxDim> k = tuple_of(id);
        k[size_t(d1)] += s1;
        k[size_t(d2)] += s2;
        return lookup(k);
    }

    /// True when every node of the centered 3^n chart box exists.
    bool deep_interior(int id) const { return nodes_[size_t(id)].interior; }

    // ---- discrete calculus on a value span (one time slice) ----------

    /// Chart gradient by centered differences.
    VecN chart_gradient(const double* v, int id) const {
        const int n = M_.dim;
        VecN g(n);
        for (int i = 0; i < n; ++i) {
            int p = axis_neighbor(id, i, +1), m = axis_neighbor(id, i, -1);
            g[i] = (v[p] - v[m]) / (2.0 * h_);
        }
        return g;
    }

    /// Riemannian Hessian in the adapted orthonormal frame.
    SymN hessian_adapted(const double* v, int id) const {
        const int n = M_.dim;
        const LatticeNode& nd = nodes_[size_t(id)];
        SymN hc(n);  // chart coordinate Hessian
        double c = v[id];
        for (int i = 0; i < n; ++i) {
            int p = axis_neighbor(id, i, +1), m = axis_neighbor(id, i, -1);
            hc(i, i) = (v[p] + v[m] - 2.0 * c) / (h_ * h_);
        }
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) {
                int pp = diag_neighbor(id, i, +1, j, +1), mm = diag_neighbor(id, i, -1, j, -1);
                int pm = diag_neighbor(id, i, +1, j, -1), mp = diag_neighbor(id, i, -1, j, +1);
                double x = (v[pp] + v[mm] - v[pm] - v[mp]) / (4.0 * h_ * h_);
                hc(i, j) = hc(j, i) = x;
            }
        VecN du = chart_gradient(v, id);
        // subtract Gamma^l_ij du_l
        if (nd.rho > 1e-14 && M_.hyperbolic()) {
            const VecN& nr = nd.radial;
            double ndu = dot(nr, du);
            VecN qdu = du - ndu * nr;  // Q du
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) {
                    double qij = (i == j ? 1.0 : 0.0) - nr[i] * nr[j];
                    double gam = nd.c1 * (nr[i] * qdu[j] + nr[j] * qdu[i]) + nd.c2 * qij * ndu;
                    hc(i, j) -= gam;
                }
        }
        // express in the adapted orthonormal frame: E^T hc E
        SymN out(n);
        for (int a = 0; a < n; ++a)
            for (int b = a; b < n; ++b) {
                double acc = 0;
                for (int i = 0; i < n; ++i)
                    for (int j = 0; j < n; ++j)
                        acc += nd.frame_coord(i, a) * hc(i, j) * nd.frame_coord(j, b);
                out(a, b) = out(b, a) = acc;
            }
        return out;
    }

    /// Gradient components in the adapted orthonormal frame.
    VecN gradient_adapted(const double* v, int id) const {
        const int n = M_.dim;
        const LatticeNode& nd = nodes_[size_t(id)];
        VecN du = chart_gradient(v, id);
        VecN g(n);
        for (int a = 0; a < n; ++a) {
            double acc = 0;
            for (int i = 0; i < n; ++i) acc += nd.frame_coord(i, a) * du[i];
            g[a] = acc;
        }
        return g;
    }

    /// Gradient as an ambient tangent vector at the node.
    Amb gradient_ambient(const double* v, int id) const {
        const LatticeNode& nd = nodes_[size_t(id)];
        VecN g = gradient_adapted(v, id);
        Amb out(M_.ambient());
        for (int a = 0; a < M_.dim; ++a) out = out + g[a] * nd.frame_amb[size_t(a)];
        return out;
    }

  private:
    ModelManifold M_;
    Point center_;
    double radius_, h_;
    int K_ = 0, side_ = 0;
    std::vector<LatticeNode> nodes_;
    std::vector<int> interior_;
    std::vector<int> cube_index_;

    int flat(const std::array<int, kMaxDim>& k) const {
        int f = 0;
        for (int i = 0; i < M_.dim; ++i) f = f * side_ + (k[size_t(i)] + K_);
        return f;
    }
    std::array<int, kMaxDim> tuple_of(int id) const {
        std::array<int, kMaxDim> k{};
        const VecN& c = nodes_[size_t(id)].chart;
        for (int i = 0; i < M_.dim; ++i) k[size_t(i)] = int(std::lround(c[i] / h_));
        return k;
    }
    int lookup(const std::array<int, kMaxDim>& k) const {
        for (int i = 0; i < M_.dim; ++i)
            if (k[size_t(i)] < -K_ || k[size_t(i)] > K_) return -1;
        return cube_index_[size_t(flat(k))];
    }

    LatticeNode make_node(const Frame& cf, const VecN& chart, double rho) const {
        const int n = M_.dim;
        LatticeNode nd;
        nd.chart = chart;
        nd.rho = rho;
        nd.density = chart_volume_density(M_, rho);
        nd.cellvol = std::pow(h_, n) * nd.density;

        Amb v(M_.ambient());
        for (int i = 0; i < n; ++i) v = v + chart[i] * cf.e[size_t(i)];
        nd.point = exp_map(M_, center_, v);

        nd.radial = VecN(n);
        if (rho > 1e-14) {
            for (int i = 0; i < n; ++i) nd.radial[i] = chart[i] / rho;
            double tau = std::sqrt(M_.kappa) * rho;
            nd.c1 = (hcoth(tau) - 1.0) / rho;
            nd.c2 = (1.0 - sinhc(2.0 * tau)) / rho;
        }

        // adapted orthonormal frame: radial chart direction plus tangential
        // directions scaled by 1/sinhc; ambient forms are parallel
        // transports of the corresponding center-frame directions.
        nd.frame_coord = MatN(n);
        double S = sinhc(std::sqrt(M_.kappa) * rho);
        if (rho > 1e-14 && M_.hyperbolic()) {
            // first column: radial; remaining: complete by Gram-Schmidt
            std::array<VecN, kMaxDim> cols{};
            cols[0] = nd.radial;
            int found = 1;
            for (int i = 0; i < n && found < n; ++i) {
                VecN e(n);
                e[i] = 1.0;
                for (int j = 0; j < found; ++j) e = e - dot(e, cols[size_t(j)]) * cols[size_t(j)];
                double nn = norm(e);
                if (nn < 1e-10) continue;
                cols[size_t(found)] = (1.0 / nn) * e;
                ++found;
            }
            for (int a = 0; a < n; ++a)
                for (int i = 0; i < n; ++i)
                    nd.frame_coord(i, a) = (a == 0 ? cols[0][i] : cols[size_t(a)][i] / S);
            for (int a = 0; a < n; ++a) {
                Amb w(M_.ambient());
                for (int i = 0; i < n; ++i) w = w + cols[size_t(a)][i] * cf.e[size_t(i)];
                nd.frame_amb[size_t(a)] = parallel_transport_amb(M_, center_, nd.point, w);
            }
        } else {
            nd.frame_coord = MatN::identity(n);
            for (int a = 0; a < n; ++a) {
                Amb w(M_.ambient());
                for (int i = 0; i < n; ++i) w = w + (a == i ? 1.0 : 0.0) * cf.e[size_t(i)];
                nd.frame_amb[size_t(a)] = w;  // center frame (Euclidean, or rho ~ 0)
            }
        }
        return nd;
    }

    void link_neighbors() {
        const int n = M_.dim;
        for (int id = 0; id < int(nodes_.size()); ++id) {
            auto k = tuple_of(id);
            bool inter = true;
            for (int i = 0; i < n; ++i) {
                auto kp = k, km = k;
                ++kp[size_t(i)];
                --km[size_t(i)];
                int p = lookup(kp), m = lookup(km);
                nodes_[size_t(id)].nbr[size_t(2 * i)] = p;
                nodes_[size_t(id)].nbr[size_t(2 * i + 1)] = m;
                if (p < 0 || m < 0) inter = false;
            }
            if (inter)
                for (int i = 0; i < n && inter; ++i)
                    for (int j = i + 1; j < n && inter; ++j)
                        for (int si = -1; si <= 1 && inter; si += 2)
                            for (int sj = -1; sj <= 1 && inter; sj += 2) {
                                auto kk = k;
                                kk[size_t(i)] += si;
                                kk[size_t(j)] += sj;
                                if (lookup(kk) < 0) inter = false;
                            }
            nodes_[size_t(id)].interior = inter;
            if (inter) interior_.push_back(id);
        }
    }
};

using LatticePtr = std::shared_ptr<const Lattice>;

inline LatticePtr make_lattice(const ModelManifold& M, const Point& center, double radius,
                               double h) {
    return std::make_shared<const Lattice>(M, center, radius, h);
}

/// Sampled function on lattice x uniform time grid covering (t_end-depth, t_end].
struct GridFunction {
    LatticePtr lat;
    std::vector<double> times;  // ascending, uniform spacing dt
    double dt = 0;
    std::vector<double> vals;  // [step * num_nodes + node]

    GridFunction() = default;
    GridFunction(LatticePtr l, double t_end, double depth, double dt_) : lat(std::move(l)), dt(dt_) {
        if (!(dt > 0) || !(depth > 0)) throw std::invalid_argument("grid needs dt, depth > 0");
        int steps = std::max(1, int(std::lround(depth / dt)));
        times.resize(size_t(steps));
        for (int j = 0; j < steps; ++j) times[size_t(j)] = t_end - (steps - 1 - j) * dt;
        vals.assign(size_t(steps) * size_t(lat->num_nodes()), 0.0);
    }

    int num_nodes() const { return lat->num_nodes(); }
    int num_steps() const { return int(times.size()); }
    double t_end() const { return times.back(); }
    double depth() const { return times.back() - times.front() + dt; }

    double& at(int step, int node) { return vals[size_t(step) * size_t(num_nodes()) + size_t(node)]; }
    double at(int step, int node) const {
        return vals[size_t(step) * size_t(num_nodes()) + size_t(node)];
    }
    const double* slice(int step) const { return &vals[size_t(step) * size_t(num_nodes())]; }
    double* slice(int step) { return &vals[size_t(step) * size_t(num_nodes())]; }

    Cylinder cylinder() const {
        return Cylinder{lat->center(), lat->radius(), depth(), t_end()};
    }

    double max_abs() const {
        double m = 0;
        for (double v : vals) m = std::max(m, std::abs(v));
        return m;
    }
    bool finite() const {
        for (double v : vals)
            if (!std::isfinite(v)) return false;
        return true;
    }

    /// Geodesic diameter of the sampling ball.
    double diam() const { return 2.0 * lat->radius(); }

    template <class F>
    void fill(F&& f) {  // f(Point, t) -> double
        for (int j = 0; j < num_steps(); ++j)
            for (int i = 0; i < num_nodes(); ++i) at(j, i) = f(lat->node(i).point, times[size_t(j)]);
    }
};

// ---- cylinder reductions -------------------------------------------------

struct Extrema {
    double min = 0, max = 0;
    int count = 0;
};

template <class F>
inline Extrema cyl_extrema(const GridFunction& u, const Cylinder& K, F&& value) {
    const ModelManifold& M = u.lat->manifold();
    Extrema e;
    e.min = std::numeric_limits<double>::infinity();
    e.max = -e.min;
    for (int j = 0; j < u.num_steps(); ++j) {
        double t = u.times[size_t(j)];
        if (!(t > K.t_end - K.depth + 1e-12 && t <= K.t_end + 1e-12)) continue;
        for (int i = 0; i < u.num_nodes(); ++i) {
            if (distance(M, u.lat->node(i).point, K.center) >= K.radius - 1e-12) continue;
            double v = value(j, i);
            e.min = std::min(e.min, v);
            e.max = std::max(e.max, v);
            ++e.count;
        }
    }
    if (e.count == 0) throw std::runtime_error("cylinder contains no grid nodes");
    return e;
}

inline Extrema cyl_extrema(const GridFunction& u, const Cylinder& K) {
    return cyl_extrema(u, K, [&](int j, int i) { return u.at(j, i); });
}

/// Cell-weighted integral of value(j,i) over the cylinder; weight =
/// cellvol * dt.  Also returns the discrete cylinder volume.
template <class F>
inline std::pair<double, double> cyl_integral(const GridFunction& u, const Cylinder& K, F&& value) {
    const ModelManifold& M = u.lat->manifold();
    double acc = 0, vol = 0;
    for (int j = 0; j < u.num_steps(); ++j) {
        double t = u.times[size_t(j)];
        if (!(t > K.t_end - K.depth + 1e-12 && t <= K.t_end + 1e-12)) continue;
        for (int i = 0; i < u.num_nodes(); ++i) {
            const LatticeNode& nd = u.lat->node(i);
            if (distance(M, nd.point, K.center) >= K.radius - 1e-12) continue;
            double w = nd.cellvol * u.dt;
            acc += w * value(j, i);
            vol += w;
        }
    }
    if (vol == 0) throw std::runtime_error("cylinder contains no grid nodes");
    return {acc, vol};
}

/// (average of |value|^p over K)^(1/p), cell-weighted.
template <class F>
inline double cyl_p_average(const GridFunction& u, const Cylinder& K, double p, F&& value) {
    auto [acc, vol] =
        cyl_integral(u, K, [&](int j, int i) { return std::pow(std::abs(value(j, i)), p); });
    return std::pow(acc / vol, 1.0 / p);
}

// ---- serialization -------------------------------------------------------

/// CSV rows: node,t,value with ambient coordinates; JSON sidecar carries
/// the mesh metadata required to rebuild the lattice.
inline void save_grid_csv(const GridFunction& u, const std::string& csv_path,
                          const std::string& sidecar_path) {
    std::ofstream csv(csv_path);
    if (!csv) throw std::runtime_error("cannot open " + csv_path);
    const int amb = u.lat->manifold().ambient();
    csv << "node";
    for (int i = 0; i < amb; ++i) csv << ",x" << i;
    csv << ",t,value\n";
    char buf[64];
    for (int j = 0; j < u.num_steps(); ++j)
        for (int i = 0; i < u.num_nodes(); ++i) {
            csv << i;
            for (int c = 0; c < amb; ++c) {
                std::snprintf(buf, sizeof buf, "%.17g", u.lat->node(i).point.coords[c]);
                csv << ',' << buf;
            }
            std::snprintf(buf, sizeof buf, "%.17g", u.times[size_t(j)]);
            csv << ',' << buf;
            std::snprintf(buf, sizeof buf, "%.17g", u.at(j, i));
            csv << ',' << buf << '\n';
        }

    nlohmann::ordered_json meta;
    meta["schema"] = 1;
    meta["manifold"] = {{"dim", u.lat->manifold().dim}, {"kappa", u.lat->manifold().kappa}};
    std::vector<double> cc(u.lat->center().coords.a.begin(),
                           u.lat->center().coords.a.begin() + amb);
    meta["center"] = cc;
    meta["radius"] = u.lat->radius();
    meta["h"] = u.lat->h();
    meta["t_end"] = u.t_end();
    meta["dt"] = u.dt;
    meta["steps"] = u.num_steps();
    meta["num_nodes"] = u.num_nodes();
    std::ofstream side(sidecar_path);
    side << meta.dump(2) << "\n";
}

inline GridFunction load_grid_csv(const std::string& csv_path, const std::string& sidecar_path) {
    std::ifstream side(sidecar_path);
    if (!side) throw std::runtime_error("cannot open " + sidecar_path);
    nlohmann::json meta = nlohmann::json::parse(side);
    ModelManifold M(meta["manifold"]["dim"].get<int>(), meta["manifold"]["kappa"].get<double>());
    Point center;
    center.coords = Amb(M.ambient());
    auto cc = meta["center"].get<std::vector<double>>();
    for (int i = 0; i < M.ambient(); ++i) center.coords[i] = cc[size_t(i)];
    auto lat = make_lattice(M, center, meta["radius"].get<double>(), meta["h"].get<double>());
    double dt = meta["dt"].get<double>();
    int steps = meta["steps"].get<int>();
    GridFunction u(lat, meta["t_end"].get<double>(), steps * dt, dt);
    if (u.num_steps() != steps || u.num_nodes() != meta["num_nodes"].get<int>())
        throw std::runtime_error("sidecar does not match rebuilt lattice");

    std::ifstream csv(csv_path);
    if (!csv) throw std::runtime_error("cannot open " + csv_path);
    std::string line;
    std::getline(csv, line);  // header
    int row = 0;
    const double t0 = u.times.front();
    while (std::getline(csv, line)) {
        if (line.empty()) continue;
        std::istringstream ss(line);
        std::string tok;
        std::getline(ss, tok, ',');
        int node = std::stoi(tok);
        for (int c = 0; c < M.ambient(); ++c) std::getline(ss, tok, ',');
        std::getline(ss, tok, ',');
        double t = std::stod(tok);
        std::getline(ss, tok, ',');
        int step = int(std::lround((t - t0) / dt));
        if (node < 0 || node >= u.num_nodes() || step < 0 || step >= steps)
            throw std::runtime_error("csv row out of range");
        u.at(step, node) = std::stod(tok);
        ++row;
    }
    if (row != steps * u.num_nodes()) throw std::runtime_error("csv row count mismatch");
    return u;
}

}  // namespace hlab
