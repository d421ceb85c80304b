#pragma once

// Mixed finite elements for the 2D elliptic data-completion problem on an
// annulus: piecewise-linear nodal elements for the potential u and
// lowest-order Raviart-Thomas elements for the flux p (one dof per mesh
// edge, equal to the constant normal-trace density p.nu_e across that
// edge, with the edge normal oriented by the low-to-high node index
// convention).
//
// assemble_elliptic produces the fidelity form
//   S(u,p; v,q) = int_Omega (sigma grad u - p).(sigma grad v - q)
//               + (div p)(div q) dx + int_Gamma u v + (p.nu)(q.nu) ds
// and the penalty form
//   B(u,p; v,q) = int_Omega grad u . grad v + p.q dx,
// while assemble_elliptic_load turns (f, g_D, g_N) into the load vector and
// the data energy c.  solve_direct_robin synthesizes Cauchy data from a
// known Robin coefficient, and recover_robin reads the coefficient back
// from a completed solution as the ratio -(p.nu)/u on the inner boundary.

#include <iqr/engine.hpp>
#include <iqr/errors.hpp>
#include <iqr/mesh.hpp>
#include <iqr/text.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace iqr {

/// Constant symmetric positive-definite diffusion tensor.
struct DiffusionTensor {
    double a11 = 1.0;
    double a12 = 0.0;
    double a22 = 1.0;
};

inline void validate_diffusion(const DiffusionTensor& s) {
    if (!(s.a11 > 0.0) || !(s.a11 * s.a22 - s.a12 * s.a12 > 0.0))
        throw InvalidArgument("diffusion tensor must be symmetric positive definite");
}

/// Degree-of-freedom layout for the mixed (u, p) pair: one u-dof per node
/// followed by one p-dof per mesh edge.  Edges are enumerated as sorted
/// (low, high) node pairs in lexicographic order, which makes the layout a
/// pure function of the mesh.
class EllipticDofMap {
  public:
    struct BoundaryRecord {
        std::size_t edge = 0;      // global edge id
        std::size_t lo = 0;        // edge endpoints, lo < hi
        std::size_t hi = 0;
        std::size_t tri = 0;       // unique adjacent triangle
        double sign = 1.0;         // +1 if the triangle's ccw cycle runs lo->hi
        double length = 0.0;
        double theta = 0.0;        // midpoint angle in [0, 2*pi)
        BoundaryTag tag = BoundaryTag::Gamma;
    };

    explicit EllipticDofMap(TriMesh mesh) : mesh_(std::move(mesh)) {
        validate_mesh(mesh_);
        build_edges();
        build_boundary();
    }

    const TriMesh& mesh() const { return mesh_; }
    const std::vector<std::pair<std::size_t, std::size_t>>& edges() const {
        return edges_;
    }
    const std::vector<BoundaryRecord>& boundary() const { return boundary_; }

    std::size_t n_u() const { return mesh_.nodes.size(); }
    std::size_t n_p() const { return edges_.size(); }
    std::size_t n_dofs() const { return n_u() + n_p(); }
    std::size_t iu(std::size_t node) const { return node; }
    std::size_t ip(std::size_t edge) const { return n_u() + edge; }

    /// Global edge id of local edge k (opposite local vertex k) of triangle t.
    std::size_t tri_edge(std::size_t t, std::size_t k) const { return tri_edge_[t][k]; }
    /// +1 when the ccw cycle of triangle t traverses that edge low->high.
    double tri_sign(std::size_t t, std::size_t k) const { return tri_sign_[t][k]; }

  private:
    void build_edges() {
        edges_.reserve(mesh_.triangles.size() * 3 / 2);
        for (const auto& tri : mesh_.triangles)
            for (std::size_t k = 0; k < 3; ++k) {
                std::size_t a = tri[(k + 1) % 3], b = tri[(k + 2) % 3];
                if (a > b) std::swap(a, b);
                edges_.emplace_back(a, b);
            }
        std::sort(edges_.begin(), edges_.end());
        edges_.erase(std::unique(edges_.begin(), edges_.end()), edges_.end());

        tri_edge_.resize(mesh_.triangles.size());
        tri_sign_.resize(mesh_.triangles.size());
        for (std::size_t t = 0; t < mesh_.triangles.size(); ++t) {
            const auto& tri = mesh_.triangles[t];
            for (std::size_t k = 0; k < 3; ++k) {
                const std::size_t from = tri[(k + 1) % 3], to = tri[(k + 2) % 3];
                tri_edge_[t][k] = edge_id(std::min(from, to), std::max(from, to));
                tri_sign_[t][k] = from < to ? 1.0 : -1.0;
            }
        }
    }

    void build_boundary() {
        std::map<std::pair<std::size_t, std::size_t>, std::pair<std::size_t, std::size_t>>
            owner;  // (lo,hi) -> (triangle, local k)
        for (std::size_t t = 0; t < mesh_.triangles.size(); ++t)
            for (std::size_t k = 0; k < 3; ++k) {
                const auto& tri = mesh_.triangles[t];
                std::size_t a = tri[(k + 1) % 3], b = tri[(k + 2) % 3];
                if (a > b) std::swap(a, b);
                owner[{a, b}] = {t, k};
            }
        const double two_pi = 8.0 * std::atan(1.0);
        boundary_.reserve(mesh_.boundary_edges.size());
        for (const BoundaryEdge& be : mesh_.boundary_edges) {
            BoundaryRecord rec;
            rec.lo = std::min(be.i, be.j);
            rec.hi = std::max(be.i, be.j);
            rec.tag = be.tag;
            rec.edge = edge_id(rec.lo, rec.hi);
            const auto [t, k] = owner.at({rec.lo, rec.hi});
            rec.tri = t;
            rec.sign = tri_sign_[t][k];
            rec.length = edge_length(mesh_, rec.lo, rec.hi);
            const Node2& a = mesh_.nodes[rec.lo];
            const Node2& b = mesh_.nodes[rec.hi];
            double th = std::atan2(0.5 * (a.y + b.y), 0.5 * (a.x + b.x));
            if (th < 0.0) th += two_pi;
            rec.theta = th;
            boundary_.push_back(rec);
        }
    }

    std::size_t edge_id(std::size_t lo, std::size_t hi) const {
        const auto it = std::lower_bound(edges_.begin(), edges_.end(),
                                         std::make_pair(lo, hi));
        return static_cast<std::size_t>(it - edges_.begin());
    }

    TriMesh mesh_;
    std::vector<std::pair<std::size_t, std::size_t>> edges_;
    std::vector<std::array<std::size_t, 3>> tri_edge_;
    std::vector<std::array<double, 3>> tri_sign_;
    std::vector<BoundaryRecord> boundary_;
};

namespace detail {

struct TriGeometry {
    std::array<Node2, 3> p;       // vertices
    double area = 0.0;
    std::array<double, 3> gx{};   // P1 basis gradients
    std::array<double, 3> gy{};
    std::array<double, 3> elen{}; // edge lengths, local k opposite vertex k
};

inline TriGeometry tri_geometry(const TriMesh& mesh, std::size_t t) {
    const auto& tri = mesh.triangles[t];
    TriGeometry g;
    for (std::size_t k = 0; k < 3; ++k) g.p[k] = mesh.nodes[tri[k]];
    g.area = triangle_area(mesh, t);
    const double inv = 1.0 / (2.0 * g.area);
    for (std::size_t k = 0; k < 3; ++k) {
        const Node2& b = g.p[(k + 1) % 3];
        const Node2& c = g.p[(k + 2) % 3];
        g.gx[k] = (b.y - c.y) * inv;
        g.gy[k] = (c.x - b.x) * inv;
        g.elen[k] = std::hypot(c.x - b.x, c.y - b.y);
    }
    return g;
}

/// Raviart-Thomas basis for local edge k at a point, including the global
/// orientation sign: psi = sign * |e_k| / (2A) * (x - P_k).
inline void rt0_basis(const TriGeometry& g, double sign, std::size_t k, double x,
                      double y, double& vx, double& vy) {
    const double c = sign * g.elen[k] / (2.0 * g.area);
    vx = c * (x - g.p[k].x);
    vy = c * (y - g.p[k].y);
}

inline double rt0_div(const TriGeometry& g, double sign, std::size_t k) {
    return sign * g.elen[k] / g.area;
}

}  // namespace detail

/// Value of the RT0 field with coefficients `p` (length n_p) at a point of
/// triangle t.
inline Node2 rt0_value(const EllipticDofMap& dm, std::size_t t,
                       const std::vector<double>& p, double x, double y) {
    if (p.size() != dm.n_p()) throw DimensionMismatch("rt0_value: coefficient size");
    const detail::TriGeometry g = detail::tri_geometry(dm.mesh(), t);
    Node2 v{0.0, 0.0};
    for (std::size_t k = 0; k < 3; ++k) {
        double bx = 0.0, by = 0.0;
        detail::rt0_basis(g, dm.tri_sign(t, k), k, x, y, bx, by);
        v.x += p[dm.tri_edge(t, k)] * bx;
        v.y += p[dm.tri_edge(t, k)] * by;
    }
    return v;
}

/// Elementwise-constant divergence of the RT0 field on triangle t.
inline double rt0_divergence(const EllipticDofMap& dm, std::size_t t,
                             const std::vector<double>& p) {
    if (p.size() != dm.n_p())
        throw DimensionMismatch("rt0_divergence: coefficient size");
    const detail::TriGeometry g = detail::tri_geometry(dm.mesh(), t);
    double d = 0.0;
    for (std::size_t k = 0; k < 3; ++k)
        d += p[dm.tri_edge(t, k)] * detail::rt0_div(g, dm.tri_sign(t, k), k);
    return d;
}

/// Edge-midpoint interpolation of a vector field into RT0 (exact for fields
/// that are affine on each edge).
template <typename F>
std::vector<double> rt0_interpolate(const EllipticDofMap& dm, F&& field) {
    std::vector<double> p(dm.n_p());
    for (std::size_t e = 0; e < dm.n_p(); ++e) {
        const auto [lo, hi] = dm.edges()[e];
        const Node2& a = dm.mesh().nodes[lo];
        const Node2& b = dm.mesh().nodes[hi];
        const double len = std::hypot(b.x - a.x, b.y - a.y);
        const double nx = (b.y - a.y) / len;   // normal = cw rotation of lo->hi
        const double ny = -(b.x - a.x) / len;
        const Node2 v = field(0.5 * (a.x + b.x), 0.5 * (a.y + b.y));
        p[e] = v.x * nx + v.y * ny;
    }
    return p;
}

/// Assembles the fidelity form S and penalty form B for the mixed pair.
/// Volume integrals use the 3-point edge-midpoint rule (exact here, all
/// integrands are at most quadratic); the boundary terms act on the outer
/// boundary Gamma only.
inline AssembledForms assemble_elliptic(const EllipticDofMap& dm,
                                        const DiffusionTensor& sigma = {}) {
    validate_diffusion(sigma);
    const TriMesh& mesh = dm.mesh();
    const std::size_t n = dm.n_dofs();
    TripletList ts(n), tb(n);

    for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
        const detail::TriGeometry g = detail::tri_geometry(mesh, t);
        const auto& tri = mesh.triangles[t];

        // Quadrature points: edge midpoints, weight area/3 each.
        std::array<Node2, 3> qp;
        for (std::size_t k = 0; k < 3; ++k)
            qp[k] = {0.5 * (g.p[(k + 1) % 3].x + g.p[(k + 2) % 3].x),
                     0.5 * (g.p[(k + 1) % 3].y + g.p[(k + 2) % 3].y)};
        const double w = g.area / 3.0;

        // Local dof order: three u (nodes), three p (edges).
        std::array<std::size_t, 6> gdof{};
        for (std::size_t k = 0; k < 3; ++k) {
            gdof[k] = dm.iu(tri[k]);
            gdof[3 + k] = dm.ip(dm.tri_edge(t, k));
        }

        // V_a(q) = sigma*grad(phi_a) for u dofs, -psi_a(q) for p dofs.
        std::array<std::array<double, 3>, 6> vqx{}, vqy{};
        std::array<double, 6> dv{};  // divergence, p dofs only
        for (std::size_t a = 0; a < 3; ++a) {
            const double sx = sigma.a11 * g.gx[a] + sigma.a12 * g.gy[a];
            const double sy = sigma.a12 * g.gx[a] + sigma.a22 * g.gy[a];
            for (std::size_t q = 0; q < 3; ++q) {
                vqx[a][q] = sx;
                vqy[a][q] = sy;
            }
        }
        for (std::size_t k = 0; k < 3; ++k) {
            const double sg = dm.tri_sign(t, k);
            for (std::size_t q = 0; q < 3; ++q) {
                double bx = 0.0, by = 0.0;
                detail::rt0_basis(g, sg, k, qp[q].x, qp[q].y, bx, by);
                vqx[3 + k][q] = -bx;
                vqy[3 + k][q] = -by;
            }
            dv[3 + k] = detail::rt0_div(g, sg, k);
        }

        for (std::size_t a = 0; a < 6; ++a)
            for (std::size_t b = a; b < 6; ++b) {
                double s_ab = 0.0;
                for (std::size_t q = 0; q < 3; ++q)
                    s_ab += w * (vqx[a][q] * vqx[b][q] + vqy[a][q] * vqy[b][q]);
                if (a >= 3 && b >= 3) s_ab += g.area * dv[a] * dv[b];
                if (s_ab != 0.0) ts.add(gdof[a], gdof[b], s_ab);

                double b_ab = 0.0;
                if (a < 3 && b < 3)
                    b_ab = g.area * (g.gx[a] * g.gx[b] + g.gy[a] * g.gy[b]);
                else if (a >= 3 && b >= 3)
                    for (std::size_t q = 0; q < 3; ++q)
                        b_ab += w * (vqx[a][q] * vqx[b][q] + vqy[a][q] * vqy[b][q]);
                if (b_ab != 0.0) tb.add(gdof[a], gdof[b], b_ab);
            }
    }

    for (const auto& rec : dm.boundary()) {
        if (rec.tag != BoundaryTag::Gamma) continue;
        const double le = rec.length;
        ts.add(dm.iu(rec.lo), dm.iu(rec.lo), le / 3.0);
        ts.add(dm.iu(rec.hi), dm.iu(rec.hi), le / 3.0);
        ts.add(dm.iu(rec.lo), dm.iu(rec.hi), le / 6.0);
        ts.add(dm.ip(rec.edge), dm.ip(rec.edge), le);
    }

    return {triplets_to_sym(ts), triplets_to_sym(tb)};
}

/// Problem data for the elliptic load: a piecewise-constant source (empty
/// means zero), Dirichlet values per mesh node (read on Gamma nodes only),
/// and Neumann values aligned with mesh.boundary_edges (read on Gamma
/// entries only).
struct EllipticData {
    std::vector<double> f;   // per triangle, or empty
    std::vector<double> gd;  // per node
    std::vector<double> gn;  // per boundary edge (aligned with mesh order)
};

inline LoadData assemble_elliptic_load(const EllipticDofMap& dm,
                                       const EllipticData& data) {
    const TriMesh& mesh = dm.mesh();
    if (!data.f.empty() && data.f.size() != mesh.triangles.size())
        throw DimensionMismatch("elliptic load: f size");
    if (data.gd.size() != mesh.nodes.size())
        throw DimensionMismatch("elliptic load: gd size");
    if (data.gn.size() != mesh.boundary_edges.size())
        throw DimensionMismatch("elliptic load: gn size");

    LoadData load;
    load.ell.assign(dm.n_dofs(), 0.0);

    if (!data.f.empty())
        for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
            const double f = data.f[t];
            if (f == 0.0) continue;
            const detail::TriGeometry g = detail::tri_geometry(mesh, t);
            for (std::size_t k = 0; k < 3; ++k)
                load.ell[dm.ip(dm.tri_edge(t, k))] -=
                    f * detail::rt0_div(g, dm.tri_sign(t, k), k) * g.area;
            load.c += f * f * g.area;
        }

    for (std::size_t b = 0; b < dm.boundary().size(); ++b) {
        const auto& rec = dm.boundary()[b];
        if (rec.tag != BoundaryTag::Gamma) continue;
        const double le = rec.length;
        const double ga = data.gd[rec.lo], gb = data.gd[rec.hi];
        load.ell[dm.iu(rec.lo)] += le / 6.0 * (2.0 * ga + gb);
        load.ell[dm.iu(rec.hi)] += le / 6.0 * (ga + 2.0 * gb);
        const double gn = data.gn[b];
        load.ell[dm.ip(rec.edge)] += gn * le * rec.sign;
        load.c += le / 3.0 * (ga * ga + ga * gb + gb * gb) + gn * gn * le;
    }
    return load;
}

/// Piecewise-linear Galerkin solution of the well-posed Robin problem
///   -div(grad u) = 0,  du/dnu = g_N on Gamma,  du/dnu + eta u = 0 on Gamma_c,
/// used to synthesize Dirichlet data for the inverse pipeline.  `eta` and
/// `gn` are aligned with mesh.boundary_edges (GammaC / Gamma entries read).
inline std::vector<double> solve_direct_robin(const EllipticDofMap& dm,
                                              const std::vector<double>& eta,
                                              const std::vector<double>& gn) {
    const TriMesh& mesh = dm.mesh();
    if (eta.size() != mesh.boundary_edges.size())
        throw DimensionMismatch("direct Robin: eta size");
    if (gn.size() != mesh.boundary_edges.size())
        throw DimensionMismatch("direct Robin: gn size");

    double eta_max = 0.0;
    for (std::size_t b = 0; b < dm.boundary().size(); ++b) {
        if (dm.boundary()[b].tag != BoundaryTag::GammaC) continue;
        if (eta[b] < 0.0)
            throw InvalidArgument("direct Robin: eta must be nonnegative");
        eta_max = std::max(eta_max, eta[b]);
    }
    if (eta_max == 0.0)
        throw NotPositiveDefinite(0);  // pure-Neumann problem is singular

    const std::size_t n = dm.n_u();
    TripletList ta(n);
    std::vector<double> rhs(n, 0.0);
    for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
        const detail::TriGeometry g = detail::tri_geometry(mesh, t);
        const auto& tri = mesh.triangles[t];
        for (std::size_t a = 0; a < 3; ++a)
            for (std::size_t b = a; b < 3; ++b) {
                const double v = g.area * (g.gx[a] * g.gx[b] + g.gy[a] * g.gy[b]);
                if (v != 0.0) ta.add(tri[a], tri[b], v);
            }
    }
    for (std::size_t b = 0; b < dm.boundary().size(); ++b) {
        const auto& rec = dm.boundary()[b];
        if (rec.tag == BoundaryTag::GammaC) {
            const double cf = eta[b] * rec.length / 6.0;
            if (cf != 0.0) {
                ta.add(rec.lo, rec.lo, 2.0 * cf);
                ta.add(rec.hi, rec.hi, 2.0 * cf);
                ta.add(rec.lo, rec.hi, cf);
            }
        } else {
            rhs[rec.lo] += gn[b] * rec.length / 2.0;
            rhs[rec.hi] += gn[b] * rec.length / 2.0;
        }
    }

    const SymSparse a = triplets_to_sym(ta);
    const LdltFactor factor = factor_spd(a);
    return factor.solve(rhs);
}

/// Reference Robin coefficient of the 2D experiment.
inline double robin_exact(double theta) {
    const double pi = 4.0 * std::atan(1.0);
    return 0.5 + 0.3 * std::sin(2.0 * (theta - 5.0 * pi / 4.0));
}

struct RobinProfile {
    struct Row {
        double theta = 0.0;
        double eta = 0.0;
    };
    std::vector<Row> rows;  // sorted by theta
    std::size_t guarded = 0;
};

/// Reads the Robin coefficient off a completed (u, p) solution as
/// eta = -(p.nu)/u per inner-boundary edge, with nu the outward normal and
/// u averaged over the edge.  Edges whose |u| falls under guard * max|u|
/// are omitted; if all of them do, the recovery is meaningless.
inline RobinProfile recover_robin(const EllipticDofMap& dm,
                                  const std::vector<double>& x, double guard) {
    if (x.size() != dm.n_dofs()) throw DimensionMismatch("recover_robin: state size");
    if (!(guard > 0.0)) throw InvalidArgument("recover_robin: guard must be > 0");

    double umax = 0.0;
    for (const auto& rec : dm.boundary()) {
        if (rec.tag != BoundaryTag::GammaC) continue;
        umax = std::max(umax, std::abs(0.5 * (x[dm.iu(rec.lo)] + x[dm.iu(rec.hi)])));
    }
    if (umax == 0.0)
        throw AllGuarded("inner-boundary trace vanishes identically");

    RobinProfile profile;
    for (const auto& rec : dm.boundary()) {
        if (rec.tag != BoundaryTag::GammaC) continue;
        const double ubar = 0.5 * (x[dm.iu(rec.lo)] + x[dm.iu(rec.hi)]);
        if (std::abs(ubar) < guard * umax) {
            ++profile.guarded;
            continue;
        }
        const double flux = rec.sign * x[dm.ip(rec.edge)];
        profile.rows.push_back({rec.theta, -flux / ubar});
    }
    if (profile.rows.empty())
        throw AllGuarded("every inner-boundary edge fell under the trace guard");
    std::sort(profile.rows.begin(), profile.rows.end(),
              [](const RobinProfile::Row& a, const RobinProfile::Row& b) {
                  return a.theta < b.theta;
              });
    return profile;
}

struct TraceTables {
    struct Row {
        double theta = 0.0;
        double u = 0.0;
        double flux = 0.0;  // p.nu with nu the outward normal of the domain
    };
    std::vector<Row> gamma, gamma_c;  // each sorted by theta
};

/// Per-edge boundary traces of a solution state, for data-vs-reconstruction
/// comparisons.
inline TraceTables boundary_traces(const EllipticDofMap& dm,
                                   const std::vector<double>& x) {
    if (x.size() != dm.n_dofs())
        throw DimensionMismatch("boundary_traces: state size");
    TraceTables tables;
    for (const auto& rec : dm.boundary()) {
        TraceTables::Row row;
        row.theta = rec.theta;
        row.u = 0.5 * (x[dm.iu(rec.lo)] + x[dm.iu(rec.hi)]);
        row.flux = rec.sign * x[dm.ip(rec.edge)];
        (rec.tag == BoundaryTag::Gamma ? tables.gamma : tables.gamma_c)
            .push_back(row);
    }
    auto by_theta = [](const TraceTables::Row& a, const TraceTables::Row& b) {
        return a.theta < b.theta;
    };
    std::sort(tables.gamma.begin(), tables.gamma.end(), by_theta);
    std::sort(tables.gamma_c.begin(), tables.gamma_c.end(), by_theta);
    return tables;
}

/// Legacy-VTK unstructured-grid writer for a nodal field.
inline void write_vtk(const std::string& path, const TriMesh& mesh,
                      const std::vector<double>& u,
                      const std::string& field_name = "u") {
    if (u.size() != mesh.nodes.size()) throw DimensionMismatch("write_vtk: field size");
    std::ofstream out(path);
    if (!out) throw Error("cannot open " + path + " for writing");
    out << "# vtk DataFile Version 2.0\n"
        << "completed field\n"
        << "ASCII\n"
        << "DATASET UNSTRUCTURED_GRID\n"
        << "POINTS " << mesh.nodes.size() << " double\n";
    for (const Node2& p : mesh.nodes)
        out << fmt_g17(p.x) << " " << fmt_g17(p.y) << " 0\n";
    out << "CELLS " << mesh.triangles.size() << " " << 4 * mesh.triangles.size()
        << "\n";
    for (const auto& tri : mesh.triangles)
        out << "3 " << tri[0] << " " << tri[1] << " " << tri[2] << "\n";
    out << "CELL_TYPES " << mesh.triangles.size() << "\n";
    for (std::size_t t = 0; t < mesh.triangles.size(); ++t) out << "5\n";
    out << "POINT_DATA " << mesh.nodes.size() << "\n"
        << "SCALARS " << field_name << " double 1\n"
        << "LOOKUP_TABLE default\n";
    for (double v : u) out << fmt_g17(v) << "\n";
    if (!out) throw Error("write failure on " + path);
}

/// CSV writer for a nodal field (header x,y,u).
inline void write_elliptic_field_csv(const std::string& path, const TriMesh& mesh,
                                     const std::vector<double>& u) {
    if (u.size() != mesh.nodes.size())
        throw DimensionMismatch("field csv: field size");
    std::ofstream out(path);
    if (!out) throw Error("cannot open " + path + " for writing");
    out << "x,y,u\n";
    for (std::size_t i = 0; i < mesh.nodes.size(); ++i)
        out << fmt_full(mesh.nodes[i].x) << "," << fmt_full(mesh.nodes[i].y) << ","
            << fmt_full(u[i]) << "\n";
    if (!out) throw Error("write failure on " + path);
}

}  // namespace iqr
