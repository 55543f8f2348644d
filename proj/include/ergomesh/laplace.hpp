#pragma once

#include <Eigen/SparseCore>

#include <filesystem>

#include "ergomesh/mesh.hpp"

namespace ergomesh {

// Cotangent weights larger than this mean a sliver face; they are clamped
// and a warning is emitted instead of failing assembly.
inline constexpr double kCotanClamp = 1e8;

using SparseMatrix = Eigen::SparseMatrix<double>;

// Cotangent stiffness matrix, positive semidefinite convention: off-diagonal
// entry for edge (i,j) is -1/2 (cot a + cot b) over the incident faces, the
// diagonal makes rows sum to zero.
SparseMatrix assemble_cotan_laplacian(const TriangleMesh& mesh);

// Lumped mass matrix: diagonal of barycentric vertex areas.
struct MassMatrix {
    Eigen::VectorXd diagonal;

    double trace() const { return diagonal.sum(); }
    Eigen::Index size() const { return diagonal.size(); }
};

MassMatrix assemble_mass_matrix(const TriangleMesh& mesh);

// Coordinate-format Matrix Market export for external verification.
void write_matrix_market(const std::filesystem::path& path, const SparseMatrix& matrix);
void write_matrix_market(const std::filesystem::path& path, const MassMatrix& matrix);

}  // namespace ergomesh
