#pragma once

#include <Eigen/Core>

#include <filesystem>
#include <optional>

#include "ergomesh/laplace.hpp"

namespace ergomesh {

struct EigenSolveOptions {
    // Residual requirement ||S f - lambda M f|| <= tolerance * ||M f||.
    double tolerance = 1e-8;
    // Hard cap on the Krylov subspace dimension; 0 picks one from the
    // request size.
    int max_subspace = 0;
};

struct EigenPairs {
    Eigen::VectorXd values;   // ascending
    Eigen::MatrixXd vectors;  // m x count, M-orthonormal
};

// Smallest `count` eigenpairs of S f = lambda M f via shift-invert Lanczos
// in the M inner product with full reorthogonalization. Deterministic:
// repeated calls on the same inputs return identical results. Throws
// NumericError (carrying the converged count) if the subspace cap is hit.
EigenPairs smallest_eigenpairs(const SparseMatrix& stiffness, const MassMatrix& mass, int count,
                               const EigenSolveOptions& options = {});

struct SpectralBasis {
    Eigen::VectorXd eigenvalues;   // ascending, >= 0
    Eigen::MatrixXd eigenvectors;  // m x K, F^T M F = I
    Eigen::VectorXd mass;          // lumped mass diagonal
    // Modes asked for before cluster extension; eigenvalues.size() is the
    // count actually carried.
    int requested_modes = 0;

    int mode_count() const { return static_cast<int>(eigenvalues.size()); }
    Eigen::Index vertex_count() const { return eigenvectors.rows(); }
};

// K smallest eigenpairs, sign-fixed (largest-magnitude entry positive) and
// extended to the end of an eigenvalue cluster so truncation never splits a
// degenerate eigenspace (relative gap < 1e-6 joins a cluster).
SpectralBasis compute_eigenbasis(const SparseMatrix& stiffness, const MassMatrix& mass, int K,
                                 double tolerance = 1e-8);

// Coefficients c_k = values^T M f_k.
Eigen::VectorXd project(const SpectralBasis& basis, const Eigen::VectorXd& values);

// Per-vertex field sum_k c_k f_k.
Eigen::VectorXd reconstruct(const SpectralBasis& basis, const Eigen::VectorXd& coefficients);

// Binary cache keyed on (mesh hash, requested K); the eigensolve dominates
// setup cost on large meshes.
void save_basis_cache(const std::filesystem::path& path, const SpectralBasis& basis,
                      std::uint64_t mesh_hash);
std::optional<SpectralBasis> try_load_basis_cache(const std::filesystem::path& path,
                                                  std::uint64_t mesh_hash, int K);

}  // namespace ergomesh
