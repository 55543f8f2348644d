#pragma once

#include <Eigen/Core>

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ergomesh/common.hpp"

namespace ergomesh {

// Faces with area below this are rejected at validation; cotangent weights
// blow up on slivers.
inline constexpr double kFaceAreaTolerance = 1e-12;

// Triangle surface mesh. Immutable after validate_mesh(); all downstream
// modules assume a validated mesh.
struct TriangleMesh {
    std::vector<Eigen::Vector3d> vertices;
    std::vector<std::array<int, 3>> faces;
    // Optional per-vertex scalar channels (e.g. information densities),
    // keyed by name. Rows track `vertices`.
    std::map<std::string, Eigen::VectorXd> channels;
    // Non-fatal findings from validation (non-manifold edges, pruned
    // vertices). Hard violations throw instead.
    std::vector<std::string> warnings;

    int vertex_count() const { return static_cast<int>(vertices.size()); }
    int face_count() const { return static_cast<int>(faces.size()); }
};

double face_area(const TriangleMesh& mesh, int face);
Eigen::Vector3d face_normal(const TriangleMesh& mesh, int face);
double total_area(const TriangleMesh& mesh);

// Checks index bounds, duplicate indices, degenerate faces; prunes vertices
// referenced by no face (relative order preserved); records a warning for
// non-manifold edges (> 2 incident faces). Throws ValidationError on hard
// violations.
TriangleMesh validate_mesh(TriangleMesh mesh);

// Barycentric lumping: each face donates a third of its area to each corner.
// Entries are strictly positive on a validated mesh and sum to total_area.
Eigen::VectorXd vertex_areas(const TriangleMesh& mesh);

// Lumped quadrature sum_i area_i * values_i.
double surface_integral(const TriangleMesh& mesh, const Eigen::VectorXd& values);

struct SphereProjection {
    Eigen::Vector3d center = Eigen::Vector3d::Zero();
    double radius = 1.0;
};

// 1->4 midpoint subdivision per level. Vertex channels are linearly
// interpolated onto edge midpoints. With a projection, all vertices are
// pushed radially onto the sphere.
TriangleMesh subdivide_midpoint(const TriangleMesh& mesh, int levels,
                                const std::optional<SphereProjection>& project = {});

// Digest of vertex coordinates and face indices; identifies a mesh in the
// basis cache.
std::uint64_t mesh_hash(const TriangleMesh& mesh);

}  // namespace ergomesh
