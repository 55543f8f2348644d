#include "ergomesh/laplace.hpp"

#include <Eigen/Geometry>

#include <cmath>
#include <fstream>
#include <vector>

namespace ergomesh {

SparseMatrix assemble_cotan_laplacian(const TriangleMesh& mesh) {
    const int m = mesh.vertex_count();
    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(static_cast<std::size_t>(mesh.face_count()) * 12);

    int clamped = 0;
    for (const auto& f : mesh.faces) {
        for (int corner = 0; corner < 3; ++corner) {
            int k = f[static_cast<std::size_t>(corner)];
            int i = f[static_cast<std::size_t>((corner + 1) % 3)];
            int j = f[static_cast<std::size_t>((corner + 2) % 3)];
            const Eigen::Vector3d e1 = mesh.vertices[static_cast<std::size_t>(i)] -
                                       mesh.vertices[static_cast<std::size_t>(k)];
            const Eigen::Vector3d e2 = mesh.vertices[static_cast<std::size_t>(j)] -
                                       mesh.vertices[static_cast<std::size_t>(k)];
            double cot = e1.dot(e2) / e1.cross(e2).norm();
            if (std::abs(cot) > kCotanClamp) {
                cot = cot > 0.0 ? kCotanClamp : -kCotanClamp;
                ++clamped;
            }
            const double w = 0.5 * cot;  // edge (i,j), angle at k
            triplets.emplace_back(i, j, -w);
            triplets.emplace_back(j, i, -w);
            triplets.emplace_back(i, i, w);
            triplets.emplace_back(j, j, w);
        }
    }
    if (clamped > 0) {
        log_warning("cotan assembly clamped " + std::to_string(clamped) +
                    " sliver weights at 1e8; consider re-meshing");
    }

    SparseMatrix stiffness(m, m);
    stiffness.setFromTriplets(triplets.begin(), triplets.end());
    stiffness.prune(1.0, 0.0);  // drop exact zeros (right-angle cotangents)
    stiffness.makeCompressed();
    return stiffness;
}

MassMatrix assemble_mass_matrix(const TriangleMesh& mesh) {
    return MassMatrix{vertex_areas(mesh)};
}

void write_matrix_market(const std::filesystem::path& path, const SparseMatrix& matrix) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path.string());
    out << "%%MatrixMarket matrix coordinate real symmetric\n";
    // Lower triangle only, per the symmetric convention.
    std::size_t count = 0;
    for (int col = 0; col < matrix.outerSize(); ++col) {
        for (SparseMatrix::InnerIterator it(matrix, col); it; ++it) {
            if (it.row() >= it.col()) ++count;
        }
    }
    out << matrix.rows() << " " << matrix.cols() << " " << count << "\n";
    out.precision(17);
    for (int col = 0; col < matrix.outerSize(); ++col) {
        for (SparseMatrix::InnerIterator it(matrix, col); it; ++it) {
            if (it.row() >= it.col()) {
                out << it.row() + 1 << " " << it.col() + 1 << " " << it.value() << "\n";
            }
        }
    }
    if (!out) throw IoError("failed while writing " + path.string());
}

void write_matrix_market(const std::filesystem::path& path, const MassMatrix& matrix) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path.string());
    out << "%%MatrixMarket matrix coordinate real symmetric\n";
    out << matrix.size() << " " << matrix.size() << " " << matrix.size() << "\n";
    out.precision(17);
    for (Eigen::Index i = 0; i < matrix.size(); ++i) {
        out << i + 1 << " " << i + 1 << " " << matrix.diagonal[i] << "\n";
    }
    if (!out) throw IoError("failed while writing " + path.string());
}

}  // namespace ergomesh
