#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "ergomesh/mesh.hpp"

namespace ergomesh {

enum class MeshFormat { Obj, Ply };

// Format from file extension (.obj / .ply, case-insensitive).
MeshFormat mesh_format_from_path(const std::filesystem::path& path);

// Loads and validates a mesh.
//   OBJ: `v x y z` and `f i j k` records, 1-based indices, `i/t/n` suffixes
//        ignored. Faces with > 3 corners are fan-triangulated.
//   PLY: ascii or binary_little_endian; element vertex with float/double
//        x,y,z (additional scalar properties become named channels);
//        element face with a vertex_indices list of length 3.
TriangleMesh load_mesh(const std::filesystem::path& path,
                       std::optional<MeshFormat> format = {});

// ASCII PLY with x,y,z plus one float property per mesh channel.
void save_ply(const std::filesystem::path& path, const TriangleMesh& mesh);

}  // namespace ergomesh
