#pragma once

// Triangulated annular meshes for the 2D data-completion problem.
//
// A TriMesh stores nodes, counterclockwise triangles, and tagged boundary
// edges.  The boundary splits into two closed curves: the outer one (tag
// Gamma, where Cauchy data lives) and the inner one (tag GammaC, where the
// Robin coefficient is recovered).  Meshes are produced structurally by
// ring_mesh / annulus_mesh or read from the text format documented at
// write_mesh.

#include <iqr/errors.hpp>
#include <iqr/text.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace iqr {

enum class BoundaryTag { Gamma, GammaC };

struct Node2 {
    double x = 0.0;
    double y = 0.0;
};

struct BoundaryEdge {
    std::size_t i = 0;
    std::size_t j = 0;
    BoundaryTag tag = BoundaryTag::Gamma;
};

struct TriMesh {
    std::vector<Node2> nodes;
    std::vector<std::array<std::size_t, 3>> triangles;
    std::vector<BoundaryEdge> boundary_edges;
};

// Signed area of triangle t; positive for counterclockwise orientation.
inline double triangle_area(const TriMesh& mesh, std::size_t t) {
    const auto& tri = mesh.triangles.at(t);
    const Node2& a = mesh.nodes[tri[0]];
    const Node2& b = mesh.nodes[tri[1]];
    const Node2& c = mesh.nodes[tri[2]];
    return 0.5 * ((b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y));
}

inline double edge_length(const TriMesh& mesh, std::size_t i, std::size_t j) {
    const Node2& a = mesh.nodes[i];
    const Node2& b = mesh.nodes[j];
    return std::hypot(b.x - a.x, b.y - a.y);
}

// Checks the structural invariants: indices in range, all triangle areas
// positive, and the tagged boundary edges exactly matching the set of
// triangulation edges that belong to a single triangle.
inline void validate_mesh(const TriMesh& mesh) {
    const std::size_t n = mesh.nodes.size();
    for (const auto& tri : mesh.triangles)
        for (std::size_t v : tri)
            if (v >= n) throw InvariantViolation("triangle node index out of range");
    for (const auto& be : mesh.boundary_edges)
        if (be.i >= n || be.j >= n || be.i == be.j)
            throw InvariantViolation("boundary edge node index invalid");

    for (std::size_t t = 0; t < mesh.triangles.size(); ++t)
        if (!(triangle_area(mesh, t) > 0.0))
            throw DegenerateMesh("triangle " + std::to_string(t) +
                                 " has non-positive area");

    std::map<std::pair<std::size_t, std::size_t>, int> edge_count;
    for (const auto& tri : mesh.triangles)
        for (int k = 0; k < 3; ++k) {
            std::size_t a = tri[static_cast<std::size_t>(k)];
            std::size_t b = tri[static_cast<std::size_t>((k + 1) % 3)];
            if (a > b) std::swap(a, b);
            ++edge_count[{a, b}];
        }
    for (const auto& [edge, count] : edge_count)
        if (count > 2)
            throw InvariantViolation("edge shared by more than two triangles");

    std::map<std::pair<std::size_t, std::size_t>, int> tagged;
    for (const auto& be : mesh.boundary_edges) {
        std::size_t a = be.i, b = be.j;
        if (a > b) std::swap(a, b);
        auto it = edge_count.find({a, b});
        if (it == edge_count.end() || it->second != 1)
            throw InvariantViolation(
                "tagged boundary edge does not bound exactly one triangle");
        if (++tagged[{a, b}] > 1)
            throw InvariantViolation("boundary edge tagged twice");
    }
    for (const auto& [edge, count] : edge_count)
        if (count == 1 && tagged.find(edge) == tagged.end())
            throw InvariantViolation("boundary edge missing a tag");
}

// Outer and inner boundary curves of the reference annular domain, given in
// polar form r(theta).
inline double annulus_outer_radius(double t) {
    return 1.0 + 0.1 * std::cos(2.0 * t) - 0.05 * std::sin(3.0 * t);
}

inline double annulus_inner_radius(double t) {
    return 0.5 - 0.02 * std::cos(t) + 0.1 * std::sin(t);
}

// Structured ring mesh between two star-shaped curves given in polar form.
// Nodes are laid out on nr radial layers of na angular samples each
// (index = layer*na + angle); every quad is split along its shorter
// diagonal.  Inner-rim edges are tagged GammaC, outer-rim edges Gamma.
inline TriMesh ring_mesh(std::size_t nr, std::size_t na,
                         const std::function<double(double)>& inner_radius,
                         const std::function<double(double)>& outer_radius) {
    if (nr < 2) throw InvalidArgument("ring_mesh requires nr >= 2");
    if (na < 8) throw InvalidArgument("ring_mesh requires na >= 8");

    TriMesh mesh;
    mesh.nodes.resize(nr * na);
    const double two_pi = 8.0 * std::atan(1.0);
    for (std::size_t ir = 0; ir < nr; ++ir) {
        const double s = static_cast<double>(ir) / static_cast<double>(nr - 1);
        for (std::size_t ja = 0; ja < na; ++ja) {
            const double t = two_pi * static_cast<double>(ja) / static_cast<double>(na);
            const double rho = (1.0 - s) * inner_radius(t) + s * outer_radius(t);
            mesh.nodes[ir * na + ja] = {rho * std::cos(t), rho * std::sin(t)};
        }
    }

    auto node = [na](std::size_t ir, std::size_t ja) { return ir * na + ja; };
    auto dist2 = [&mesh](std::size_t a, std::size_t b) {
        const double dx = mesh.nodes[a].x - mesh.nodes[b].x;
        const double dy = mesh.nodes[a].y - mesh.nodes[b].y;
        return dx * dx + dy * dy;
    };
    for (std::size_t ir = 0; ir + 1 < nr; ++ir)
        for (std::size_t ja = 0; ja < na; ++ja) {
            const std::size_t jb = (ja + 1) % na;
            const std::size_t n00 = node(ir, ja), n10 = node(ir + 1, ja);
            const std::size_t n01 = node(ir, jb), n11 = node(ir + 1, jb);
            if (dist2(n00, n11) <= dist2(n10, n01)) {
                mesh.triangles.push_back({n00, n10, n11});
                mesh.triangles.push_back({n00, n11, n01});
            } else {
                mesh.triangles.push_back({n00, n10, n01});
                mesh.triangles.push_back({n10, n11, n01});
            }
        }

    for (std::size_t ja = 0; ja < na; ++ja) {
        const std::size_t jb = (ja + 1) % na;
        mesh.boundary_edges.push_back({node(0, ja), node(0, jb), BoundaryTag::GammaC});
        mesh.boundary_edges.push_back(
            {node(nr - 1, ja), node(nr - 1, jb), BoundaryTag::Gamma});
    }

    validate_mesh(mesh);
    return mesh;
}

// Reference annular domain of the 2D experiments.
inline TriMesh annulus_mesh(std::size_t nr, std::size_t na) {
    return ring_mesh(nr, na, annulus_inner_radius, annulus_outer_radius);
}

// Text format:
//   nodes <N>        followed by N lines "x y"
//   triangles <M>    followed by M lines "i j k"
//   boundary <K>     followed by K lines "i j tag", tag in {gamma, gamma_c}
// All indices 0-based; coordinates round-trip exactly via %.17g.
inline void write_mesh(const TriMesh& mesh, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot open " + path + " for writing");
    out << "nodes " << mesh.nodes.size() << "\n";
    for (const Node2& p : mesh.nodes) out << fmt_g17(p.x) << " " << fmt_g17(p.y) << "\n";
    out << "triangles " << mesh.triangles.size() << "\n";
    for (const auto& tri : mesh.triangles)
        out << tri[0] << " " << tri[1] << " " << tri[2] << "\n";
    out << "boundary " << mesh.boundary_edges.size() << "\n";
    for (const auto& be : mesh.boundary_edges)
        out << be.i << " " << be.j << " "
            << (be.tag == BoundaryTag::Gamma ? "gamma" : "gamma_c") << "\n";
    if (!out) throw Error("write failure on " + path);
}

namespace detail {

inline std::string next_mesh_line(std::istream& in, std::size_t& line_no) {
    std::string line;
    if (!std::getline(in, line)) throw ParseError(line_no + 1, "unexpected end of file");
    ++line_no;
    return line;
}

inline std::size_t parse_count(const std::string& line, const std::string& keyword,
                               std::size_t line_no) {
    std::istringstream ss(line);
    std::string word;
    long long count = -1;
    if (!(ss >> word >> count) || word != keyword || count < 0)
        throw ParseError(line_no, "expected '" + keyword + " <count>'");
    std::string extra;
    if (ss >> extra) throw ParseError(line_no, "trailing tokens after count");
    return static_cast<std::size_t>(count);
}

}  // namespace detail

inline TriMesh read_mesh(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open " + path);
    std::size_t line_no = 0;
    TriMesh mesh;

    const std::size_t n_nodes =
        detail::parse_count(detail::next_mesh_line(in, line_no), "nodes", line_no);
    mesh.nodes.reserve(n_nodes);
    for (std::size_t k = 0; k < n_nodes; ++k) {
        std::istringstream ss(detail::next_mesh_line(in, line_no));
        Node2 p;
        std::string extra;
        if (!(ss >> p.x >> p.y) || (ss >> extra))
            throw ParseError(line_no, "expected 'x y'");
        mesh.nodes.push_back(p);
    }

    const std::size_t n_tri =
        detail::parse_count(detail::next_mesh_line(in, line_no), "triangles", line_no);
    mesh.triangles.reserve(n_tri);
    for (std::size_t k = 0; k < n_tri; ++k) {
        std::istringstream ss(detail::next_mesh_line(in, line_no));
        long long i = -1, j = -1, l = -1;
        std::string extra;
        if (!(ss >> i >> j >> l) || (ss >> extra) || i < 0 || j < 0 || l < 0)
            throw ParseError(line_no, "expected 'i j k'");
        mesh.triangles.push_back({static_cast<std::size_t>(i),
                                  static_cast<std::size_t>(j),
                                  static_cast<std::size_t>(l)});
    }

    const std::size_t n_be =
        detail::parse_count(detail::next_mesh_line(in, line_no), "boundary", line_no);
    mesh.boundary_edges.reserve(n_be);
    for (std::size_t k = 0; k < n_be; ++k) {
        std::istringstream ss(detail::next_mesh_line(in, line_no));
        long long i = -1, j = -1;
        std::string tag, extra;
        if (!(ss >> i >> j >> tag) || (ss >> extra) || i < 0 || j < 0)
            throw ParseError(line_no, "expected 'i j tag'");
        BoundaryEdge be;
        be.i = static_cast<std::size_t>(i);
        be.j = static_cast<std::size_t>(j);
        if (tag == "gamma")
            be.tag = BoundaryTag::Gamma;
        else if (tag == "gamma_c")
            be.tag = BoundaryTag::GammaC;
        else
            throw ParseError(line_no, "unknown boundary tag '" + tag + "'");
        mesh.boundary_edges.push_back(be);
    }

    validate_mesh(mesh);
    return mesh;
}

}  // namespace iqr
