#include "ergomesh/mesh.hpp"

#include <Eigen/Geometry>

#include <algorithm>
#include <cstring>
#include <map>
#include <utility>

namespace ergomesh {

double face_area(const TriangleMesh& mesh, int face) {
    const auto& f = mesh.faces[static_cast<std::size_t>(face)];
    const Eigen::Vector3d& a = mesh.vertices[static_cast<std::size_t>(f[0])];
    const Eigen::Vector3d& b = mesh.vertices[static_cast<std::size_t>(f[1])];
    const Eigen::Vector3d& c = mesh.vertices[static_cast<std::size_t>(f[2])];
    return 0.5 * (b - a).cross(c - a).norm();
}

Eigen::Vector3d face_normal(const TriangleMesh& mesh, int face) {
    const auto& f = mesh.faces[static_cast<std::size_t>(face)];
    const Eigen::Vector3d& a = mesh.vertices[static_cast<std::size_t>(f[0])];
    const Eigen::Vector3d& b = mesh.vertices[static_cast<std::size_t>(f[1])];
    const Eigen::Vector3d& c = mesh.vertices[static_cast<std::size_t>(f[2])];
    Eigen::Vector3d n = (b - a).cross(c - a);
    double len = n.norm();
    if (len == 0.0) return Eigen::Vector3d::Zero();
    return n / len;
}

double total_area(const TriangleMesh& mesh) {
    double area = 0.0;
    for (int f = 0; f < mesh.face_count(); ++f) area += face_area(mesh, f);
    return area;
}

TriangleMesh validate_mesh(TriangleMesh mesh) {
    const int m = mesh.vertex_count();
    if (m < 3) throw ValidationError("mesh has fewer than 3 vertices");
    if (mesh.faces.empty()) throw ValidationError("mesh has no faces");

    for (std::size_t fi = 0; fi < mesh.faces.size(); ++fi) {
        const auto& f = mesh.faces[fi];
        for (int c = 0; c < 3; ++c) {
            if (f[c] < 0 || f[c] >= m) {
                throw ValidationError("face " + std::to_string(fi) + " references vertex " +
                                      std::to_string(f[c]) + " outside [0, " + std::to_string(m) + ")");
            }
        }
        if (f[0] == f[1] || f[1] == f[2] || f[0] == f[2]) {
            throw ValidationError("face " + std::to_string(fi) + " has repeated vertex indices");
        }
        if (face_area(mesh, static_cast<int>(fi)) <= kFaceAreaTolerance) {
            throw ValidationError("face " + std::to_string(fi) + " is degenerate (area <= 1e-12)");
        }
    }

    for (const auto& [name, values] : mesh.channels) {
        if (values.size() != m) {
            throw ValidationError("channel '" + name + "' has " + std::to_string(values.size()) +
                                  " entries for " + std::to_string(m) + " vertices");
        }
    }

    // Prune vertices no face references, preserving relative order.
    std::vector<char> used(static_cast<std::size_t>(m), 0);
    for (const auto& f : mesh.faces) {
        used[static_cast<std::size_t>(f[0])] = 1;
        used[static_cast<std::size_t>(f[1])] = 1;
        used[static_cast<std::size_t>(f[2])] = 1;
    }
    int used_count = 0;
    for (char u : used) used_count += u;
    if (used_count != m) {
        std::vector<int> remap(static_cast<std::size_t>(m), -1);
        std::vector<Eigen::Vector3d> kept;
        kept.reserve(static_cast<std::size_t>(used_count));
        for (int v = 0; v < m; ++v) {
            if (used[static_cast<std::size_t>(v)]) {
                remap[static_cast<std::size_t>(v)] = static_cast<int>(kept.size());
                kept.push_back(mesh.vertices[static_cast<std::size_t>(v)]);
            }
        }
        for (auto& f : mesh.faces) {
            f = {remap[static_cast<std::size_t>(f[0])], remap[static_cast<std::size_t>(f[1])],
                 remap[static_cast<std::size_t>(f[2])]};
        }
        for (auto& [name, values] : mesh.channels) {
            Eigen::VectorXd pruned(used_count);
            int out = 0;
            for (int v = 0; v < m; ++v) {
                if (used[static_cast<std::size_t>(v)]) pruned[out++] = values[v];
            }
            values = std::move(pruned);
        }
        mesh.vertices = std::move(kept);
        mesh.warnings.push_back("pruned " + std::to_string(m - used_count) + " unreferenced vertices");
    }

    // Edge incidence audit. > 2 faces per edge is tolerated (cotan assembly
    // works per-face) but worth surfacing.
    std::map<std::pair<int, int>, int> edge_count;
    for (const auto& f : mesh.faces) {
        for (int c = 0; c < 3; ++c) {
            int a = f[static_cast<std::size_t>(c)];
            int b = f[static_cast<std::size_t>((c + 1) % 3)];
            edge_count[{std::min(a, b), std::max(a, b)}] += 1;
        }
    }
    int nonmanifold = 0;
    for (const auto& [edge, count] : edge_count) {
        if (count > 2) ++nonmanifold;
    }
    if (nonmanifold > 0) {
        mesh.warnings.push_back("mesh is non-manifold: " + std::to_string(nonmanifold) +
                                " edges with more than 2 incident faces");
    }
    return mesh;
}

Eigen::VectorXd vertex_areas(const TriangleMesh& mesh) {
    Eigen::VectorXd areas = Eigen::VectorXd::Zero(mesh.vertex_count());
    for (int fi = 0; fi < mesh.face_count(); ++fi) {
        const double third = face_area(mesh, fi) / 3.0;
        for (int c = 0; c < 3; ++c) areas[mesh.faces[static_cast<std::size_t>(fi)][static_cast<std::size_t>(c)]] += third;
    }
    return areas;
}

double surface_integral(const TriangleMesh& mesh, const Eigen::VectorXd& values) {
    if (values.size() != mesh.vertex_count()) {
        throw ConfigError("surface_integral: " + std::to_string(values.size()) + " values for " +
                          std::to_string(mesh.vertex_count()) + " vertices");
    }
    return vertex_areas(mesh).dot(values);
}

namespace {

TriangleMesh subdivide_once(const TriangleMesh& mesh) {
    TriangleMesh out;
    out.vertices = mesh.vertices;
    out.faces.reserve(mesh.faces.size() * 4);

    std::map<std::pair<int, int>, int> midpoint_of;
    std::vector<std::pair<int, int>> midpoint_parents;
    auto midpoint = [&](int a, int b) {
        auto key = std::make_pair(std::min(a, b), std::max(a, b));
        auto it = midpoint_of.find(key);
        if (it != midpoint_of.end()) return it->second;
        int idx = static_cast<int>(out.vertices.size());
        out.vertices.push_back(0.5 * (mesh.vertices[static_cast<std::size_t>(a)] +
                                      mesh.vertices[static_cast<std::size_t>(b)]));
        midpoint_parents.push_back(key);
        midpoint_of.emplace(key, idx);
        return idx;
    };

    for (const auto& f : mesh.faces) {
        int ab = midpoint(f[0], f[1]);
        int bc = midpoint(f[1], f[2]);
        int ca = midpoint(f[2], f[0]);
        out.faces.push_back({f[0], ab, ca});
        out.faces.push_back({ab, f[1], bc});
        out.faces.push_back({ca, bc, f[2]});
        out.faces.push_back({ab, bc, ca});
    }

    for (const auto& [name, values] : mesh.channels) {
        Eigen::VectorXd extended(out.vertex_count());
        extended.head(values.size()) = values;
        for (std::size_t i = 0; i < midpoint_parents.size(); ++i) {
            const auto& [a, b] = midpoint_parents[i];
            extended[values.size() + static_cast<Eigen::Index>(i)] = 0.5 * (values[a] + values[b]);
        }
        out.channels.emplace(name, std::move(extended));
    }
    return out;
}

}  // namespace

TriangleMesh subdivide_midpoint(const TriangleMesh& mesh, int levels,
                                const std::optional<SphereProjection>& project) {
    if (levels < 1) throw ConfigError("subdivide_midpoint: levels must be >= 1");
    TriangleMesh out = mesh;
    out.warnings.clear();
    for (int l = 0; l < levels; ++l) out = subdivide_once(out);
    if (project) {
        for (auto& v : out.vertices) {
            Eigen::Vector3d d = v - project->center;
            double len = d.norm();
            if (len == 0.0) throw ValidationError("subdivide_midpoint: vertex at projection center");
            v = project->center + project->radius / len * d;
        }
    }
    return out;
}

std::uint64_t mesh_hash(const TriangleMesh& mesh) {
    Fnv1a hash;
    hash.feed_value(mesh.vertex_count());
    hash.feed_value(mesh.face_count());
    for (const auto& v : mesh.vertices) {
        hash.feed(v.data(), 3 * sizeof(double));
    }
    for (const auto& f : mesh.faces) {
        hash.feed(f.data(), 3 * sizeof(int));
    }
    return hash.digest();
}

}  // namespace ergomesh
