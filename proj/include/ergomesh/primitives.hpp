#pragma once

#include "ergomesh/mesh.hpp"

namespace ergomesh {

// Regular grid on [0,lx]x[0,ly] at z = 0 with nx*ny vertices, each cell split
// along the same diagonal.
TriangleMesh make_grid(double lx, double ly, int nx, int ny);

TriangleMesh make_icosahedron(double radius = 1.0,
                              const Eigen::Vector3d& center = Eigen::Vector3d::Zero());

// Icosahedron subdivided `level` times with radial projection. level 0 is the
// icosahedron itself.
TriangleMesh make_icosphere(int level, double radius = 1.0,
                            const Eigen::Vector3d& center = Eigen::Vector3d::Zero());

// Latitude/longitude sphere with (n_lat - 1) * n_lon + 2 vertices.
TriangleMesh make_uv_sphere(int n_lat, int n_lon, double radius,
                            const Eigen::Vector3d& center = Eigen::Vector3d::Zero());

TriangleMesh make_torus(double ring_radius, double tube_radius, int n_ring, int n_tube,
                        const Eigen::Vector3d& center = Eigen::Vector3d::Zero());

// Closed axis-aligned box [-sx/2,sx/2]x... with faces subdivided so that no
// edge exceeds max_edge. Watertight.
TriangleMesh make_box(const Eigen::Vector3d& size, double max_edge);

// Wind-turbine stand-in: tower, nacelle, and three rotor blades as disjoint
// closed boxes, scaled to the requested overall bounding box. Watertight
// (every edge has exactly 2 incident faces).
TriangleMesh make_turbine(const Eigen::Vector3d& bbox = {25.6, 122.8, 203.1},
                          double max_edge = 6.0);

}  // namespace ergomesh
