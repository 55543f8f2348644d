#include "ergomesh/primitives.hpp"

#include <Eigen/Geometry>

#include <cmath>
#include <map>
#include <numbers>

namespace ergomesh {

namespace {
constexpr double kPi = std::numbers::pi;
}

TriangleMesh make_grid(double lx, double ly, int nx, int ny) {
    if (nx < 2 || ny < 2) throw ConfigError("make_grid: nx and ny must be >= 2");
    TriangleMesh mesh;
    mesh.vertices.reserve(static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny));
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            mesh.vertices.emplace_back(lx * i / (nx - 1), ly * j / (ny - 1), 0.0);
        }
    }
    auto at = [nx](int i, int j) { return j * nx + i; };
    for (int j = 0; j + 1 < ny; ++j) {
        for (int i = 0; i + 1 < nx; ++i) {
            mesh.faces.push_back({at(i, j), at(i + 1, j), at(i + 1, j + 1)});
            mesh.faces.push_back({at(i, j), at(i + 1, j + 1), at(i, j + 1)});
        }
    }
    return validate_mesh(std::move(mesh));
}

TriangleMesh make_icosahedron(double radius, const Eigen::Vector3d& center) {
    const double phi = (1.0 + std::sqrt(5.0)) / 2.0;
    const double s = radius / std::sqrt(1.0 + phi * phi);
    const double a = s, b = s * phi;
    TriangleMesh mesh;
    mesh.vertices = {
        {-a, b, 0}, {a, b, 0}, {-a, -b, 0}, {a, -b, 0}, {0, -a, b}, {0, a, b},
        {0, -a, -b}, {0, a, -b}, {b, 0, -a}, {b, 0, a}, {-b, 0, -a}, {-b, 0, a},
    };
    for (auto& v : mesh.vertices) v += center;
    mesh.faces = {
        {0, 11, 5}, {0, 5, 1}, {0, 1, 7}, {0, 7, 10}, {0, 10, 11},
        {1, 5, 9}, {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
        {3, 9, 4}, {3, 4, 2}, {3, 2, 6}, {3, 6, 8}, {3, 8, 9},
        {4, 9, 5}, {2, 4, 11}, {6, 2, 10}, {8, 6, 7}, {9, 8, 1},
    };
    return validate_mesh(std::move(mesh));
}

TriangleMesh make_icosphere(int level, double radius, const Eigen::Vector3d& center) {
    TriangleMesh ico = make_icosahedron(radius, center);
    if (level == 0) return ico;
    return validate_mesh(subdivide_midpoint(ico, level, SphereProjection{center, radius}));
}

TriangleMesh make_uv_sphere(int n_lat, int n_lon, double radius, const Eigen::Vector3d& center) {
    if (n_lat < 2 || n_lon < 3) throw ConfigError("make_uv_sphere: need n_lat >= 2, n_lon >= 3");
    TriangleMesh mesh;
    int north = 0;
    mesh.vertices.emplace_back(center + Eigen::Vector3d(0, 0, radius));
    for (int i = 1; i < n_lat; ++i) {
        double theta = kPi * i / n_lat;
        for (int j = 0; j < n_lon; ++j) {
            double phi = 2.0 * kPi * j / n_lon;
            mesh.vertices.emplace_back(center + radius * Eigen::Vector3d(std::sin(theta) * std::cos(phi),
                                                                         std::sin(theta) * std::sin(phi),
                                                                         std::cos(theta)));
        }
    }
    int south = static_cast<int>(mesh.vertices.size());
    mesh.vertices.emplace_back(center + Eigen::Vector3d(0, 0, -radius));

    auto ring = [n_lon](int i, int j) { return 1 + (i - 1) * n_lon + (j % n_lon); };
    for (int j = 0; j < n_lon; ++j) {
        mesh.faces.push_back({north, ring(1, j), ring(1, j + 1)});
        mesh.faces.push_back({south, ring(n_lat - 1, j + 1), ring(n_lat - 1, j)});
    }
    for (int i = 1; i + 1 < n_lat; ++i) {
        for (int j = 0; j < n_lon; ++j) {
            mesh.faces.push_back({ring(i, j), ring(i + 1, j), ring(i + 1, j + 1)});
            mesh.faces.push_back({ring(i, j), ring(i + 1, j + 1), ring(i, j + 1)});
        }
    }
    return validate_mesh(std::move(mesh));
}

TriangleMesh make_torus(double ring_radius, double tube_radius, int n_ring, int n_tube,
                        const Eigen::Vector3d& center) {
    if (n_ring < 3 || n_tube < 3) throw ConfigError("make_torus: need n_ring, n_tube >= 3");
    if (tube_radius >= ring_radius) throw ConfigError("make_torus: tube radius must be < ring radius");
    TriangleMesh mesh;
    for (int i = 0; i < n_ring; ++i) {
        double u = 2.0 * kPi * i / n_ring;
        for (int j = 0; j < n_tube; ++j) {
            double v = 2.0 * kPi * j / n_tube;
            double w = ring_radius + tube_radius * std::cos(v);
            mesh.vertices.emplace_back(center + Eigen::Vector3d(w * std::cos(u), w * std::sin(u),
                                                                tube_radius * std::sin(v)));
        }
    }
    auto at = [n_ring, n_tube](int i, int j) { return (i % n_ring) * n_tube + (j % n_tube); };
    for (int i = 0; i < n_ring; ++i) {
        for (int j = 0; j < n_tube; ++j) {
            mesh.faces.push_back({at(i, j), at(i + 1, j), at(i + 1, j + 1)});
            mesh.faces.push_back({at(i, j), at(i + 1, j + 1), at(i, j + 1)});
        }
    }
    return validate_mesh(std::move(mesh));
}

namespace {

// Appends `other` to `mesh` as an independent component.
void append_mesh(TriangleMesh& mesh, const TriangleMesh& other) {
    int offset = mesh.vertex_count();
    mesh.vertices.insert(mesh.vertices.end(), other.vertices.begin(), other.vertices.end());
    for (const auto& f : other.faces) {
        mesh.faces.push_back({f[0] + offset, f[1] + offset, f[2] + offset});
    }
}

TriangleMesh transformed(TriangleMesh mesh, const Eigen::Matrix3d& rotation,
                         const Eigen::Vector3d& translation) {
    for (auto& v : mesh.vertices) v = rotation * v + translation;
    return mesh;
}

}  // namespace

TriangleMesh make_box(const Eigen::Vector3d& size, double max_edge) {
    if (max_edge <= 0.0) throw ConfigError("make_box: max_edge must be > 0");
    TriangleMesh mesh;
    std::map<std::array<long long, 3>, int> dedup;
    // Vertices indexed on an integer lattice so shared box edges weld exactly.
    Eigen::Vector3i cells;
    for (int a = 0; a < 3; ++a) cells[a] = std::max(1, static_cast<int>(std::ceil(size[a] / max_edge)));

    auto vertex_at = [&](const Eigen::Vector3i& idx) {
        std::array<long long, 3> key = {idx[0], idx[1], idx[2]};
        auto it = dedup.find(key);
        if (it != dedup.end()) return it->second;
        Eigen::Vector3d p;
        for (int a = 0; a < 3; ++a) p[a] = size[a] * (static_cast<double>(idx[a]) / cells[a] - 0.5);
        int id = mesh.vertex_count();
        mesh.vertices.push_back(p);
        dedup.emplace(key, id);
        return id;
    };

    // For each of the 6 sides: grid of cells over the two in-plane axes.
    for (int axis = 0; axis < 3; ++axis) {
        int u = (axis + 1) % 3, v = (axis + 2) % 3;
        for (int side = 0; side < 2; ++side) {
            for (int i = 0; i < cells[u]; ++i) {
                for (int j = 0; j < cells[v]; ++j) {
                    Eigen::Vector3i c00 = Eigen::Vector3i::Zero();
                    c00[axis] = side * cells[axis];
                    c00[u] = i;
                    c00[v] = j;
                    Eigen::Vector3i c10 = c00, c01 = c00, c11 = c00;
                    c10[u] += 1;
                    c01[v] += 1;
                    c11[u] += 1;
                    c11[v] += 1;
                    int a = vertex_at(c00), b = vertex_at(c10), c = vertex_at(c11), d = vertex_at(c01);
                    if (side == 1) {
                        mesh.faces.push_back({a, b, c});
                        mesh.faces.push_back({a, c, d});
                    } else {
                        mesh.faces.push_back({a, c, b});
                        mesh.faces.push_back({a, d, c});
                    }
                }
            }
        }
    }
    return validate_mesh(std::move(mesh));
}

TriangleMesh make_turbine(const Eigen::Vector3d& bbox, double max_edge) {
    // Proportions loosely follow a utility-scale three-blade turbine; the
    // assembly is scaled to the requested bounding box afterwards.
    TriangleMesh assembly;

    TriangleMesh tower = make_box({4.0, 4.0, 138.0}, max_edge);
    append_mesh(assembly, transformed(tower, Eigen::Matrix3d::Identity(), {2.0, 0.0, 69.0}));

    TriangleMesh nacelle = make_box({10.0, 5.0, 5.0}, max_edge);
    append_mesh(assembly, transformed(nacelle, Eigen::Matrix3d::Identity(), {1.0, 0.0, 141.5}));

    // Blades live in the x = -4 rotor plane, one up and two at +-120 deg,
    // with a small standoff from the hub so components stay disjoint.
    TriangleMesh blade = make_box({1.0, 3.5, 54.0}, max_edge);
    for (int k = 0; k < 3; ++k) {
        double angle = 2.0 * kPi * k / 3.0;
        Eigen::Matrix3d rot = Eigen::AngleAxisd(angle, Eigen::Vector3d::UnitX()).toRotationMatrix();
        Eigen::Vector3d tip_dir = rot * Eigen::Vector3d::UnitZ();
        append_mesh(assembly, transformed(blade, rot, Eigen::Vector3d(-4.0, 0.0, 141.5) + 31.0 * tip_dir));
    }

    Eigen::Vector3d lo = assembly.vertices.front(), hi = lo;
    for (const auto& v : assembly.vertices) {
        lo = lo.cwiseMin(v);
        hi = hi.cwiseMax(v);
    }
    for (auto& v : assembly.vertices) {
        for (int a = 0; a < 3; ++a) {
            v[a] = (v[a] - lo[a]) / (hi[a] - lo[a]) * bbox[a];
        }
    }
    return validate_mesh(std::move(assembly));
}

}  // namespace ergomesh
