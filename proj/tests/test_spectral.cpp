#include <doctest.h>

#include <Eigen/Geometry>

#include <cmath>
#include <filesystem>
#include <numbers>
#include <random>
#include <vector>

#include "ergomesh/primitives.hpp"
#include "ergomesh/spectral_basis.hpp"

using namespace ergomesh;

namespace {

SpectralBasis basis_for(const TriangleMesh& mesh, int K, double tol = 1e-8) {
    return compute_eigenbasis(assemble_cotan_laplacian(mesh), assemble_mass_matrix(mesh), K, tol);
}

}  // namespace

TEST_SUITE("spectral_basis") {

TEST_CASE("first mode is the normalized constant") {
    TriangleMesh mesh = make_torus(0.36, 0.14, 20, 10);
    SpectralBasis basis = basis_for(mesh, 1);
    CHECK(basis.eigenvalues[0] == doctest::Approx(0.0).epsilon(0).scale(1e-9));
    const double expected = 1.0 / std::sqrt(total_area(mesh));
    CHECK((basis.eigenvectors.col(0).array() - expected).abs().maxCoeff() < 1e-8);
}

TEST_CASE("sphere spectrum: l(l+1) with multiplicities") {
    TriangleMesh sphere = make_icosphere(3, 1.0);
    SpectralBasis basis = basis_for(sphere, 9);
    const double expected[9] = {0, 2, 2, 2, 6, 6, 6, 6, 6};
    for (int k = 1; k < 9; ++k) {
        CHECK(basis.eigenvalues[k] == doctest::Approx(expected[k]).epsilon(0.03));
    }
}

TEST_CASE("flat square spectrum matches the Neumann rectangle") {
    TriangleMesh grid = make_grid(1, 1, 50, 50);
    SpectralBasis basis = basis_for(grid, 4);
    const double pi2 = std::numbers::pi * std::numbers::pi;
    CHECK(std::abs(basis.eigenvalues[0]) < 1e-6);
    CHECK(basis.eigenvalues[1] == doctest::Approx(pi2).epsilon(0.02));
    CHECK(basis.eigenvalues[2] == doctest::Approx(pi2).epsilon(0.02));
    CHECK(basis.eigenvalues[3] == doctest::Approx(2.0 * pi2).epsilon(0.02));
}

TEST_CASE("M-orthonormality and eigen-residuals") {
    TriangleMesh sphere = make_icosphere(2, 1.0);
    SparseMatrix s = assemble_cotan_laplacian(sphere);
    MassMatrix mass = assemble_mass_matrix(sphere);
    SpectralBasis basis = compute_eigenbasis(s, mass, 20, 1e-8);

    Eigen::MatrixXd gram =
        basis.eigenvectors.transpose() * basis.mass.asDiagonal() * basis.eigenvectors;
    Eigen::MatrixXd identity = Eigen::MatrixXd::Identity(basis.mode_count(), basis.mode_count());
    CHECK((gram - identity).cwiseAbs().maxCoeff() < 1e-8);

    for (int k = 0; k < basis.mode_count(); ++k) {
        Eigen::VectorXd f = basis.eigenvectors.col(k);
        Eigen::VectorXd residual = s * f - basis.eigenvalues[k] * basis.mass.cwiseProduct(f);
        CHECK(residual.norm() <= 1e-6 * basis.mass.cwiseProduct(f).norm());
    }

    // Eigenvalues come out sorted and nonnegative.
    for (int k = 1; k < basis.mode_count(); ++k) {
        CHECK(basis.eigenvalues[k] >= basis.eigenvalues[k - 1]);
    }
    CHECK(basis.eigenvalues[0] >= 0.0);
    CHECK(basis.eigenvalues[0] <= 1e-6 * basis.eigenvalues[basis.mode_count() - 1] + 1e-9);
}

TEST_CASE("projection of an eigenvector is a unit coordinate vector") {
    TriangleMesh grid = make_grid(1, 1, 12, 12);
    SpectralBasis basis = basis_for(grid, 6);
    Eigen::VectorXd c = project(basis, basis.eigenvectors.col(3));
    for (int k = 0; k < basis.mode_count(); ++k) {
        CHECK(c[k] == doctest::Approx(k == 3 ? 1.0 : 0.0).epsilon(0).scale(1e-8));
    }
    CHECK(project(basis, Eigen::VectorXd::Zero(grid.vertex_count())).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("projection matches the dense mass-weighted oracle") {
    TriangleMesh mesh = make_icosphere(1, 0.7);
    SpectralBasis basis = basis_for(mesh, 8);
    std::mt19937 rng(5);
    std::normal_distribution<double> dist;
    Eigen::VectorXd values(mesh.vertex_count());
    for (int i = 0; i < mesh.vertex_count(); ++i) values[i] = dist(rng);

    Eigen::VectorXd areas = vertex_areas(mesh);
    Eigen::VectorXd coeffs = project(basis, values);
    for (int k = 0; k < basis.mode_count(); ++k) {
        double oracle = 0.0;
        for (int i = 0; i < mesh.vertex_count(); ++i) {
            oracle += values[i] * areas[i] * basis.eigenvectors(i, k);
        }
        CHECK(coeffs[k] == doctest::Approx(oracle).epsilon(0).scale(1e-10));
    }
}

TEST_CASE("reconstruct inverts project on the basis span") {
    TriangleMesh grid = make_grid(1, 1, 10, 10);
    SpectralBasis basis = basis_for(grid, 5);

    CHECK((reconstruct(basis, Eigen::VectorXd::Unit(5, 2)) - basis.eigenvectors.col(2))
              .cwiseAbs()
              .maxCoeff() < 1e-12);

    std::mt19937 rng(13);
    std::normal_distribution<double> dist;
    Eigen::VectorXd c(basis.mode_count());
    for (int k = 0; k < basis.mode_count(); ++k) c[k] = dist(rng);
    Eigen::VectorXd back = project(basis, reconstruct(basis, c));
    CHECK((back - c).cwiseAbs().maxCoeff() < 1e-10);

    // The reconstruction residual of an arbitrary field is M-orthogonal to
    // every basis vector.
    Eigen::VectorXd field(grid.vertex_count());
    for (int i = 0; i < grid.vertex_count(); ++i) field[i] = dist(rng);
    Eigen::VectorXd residual = field - reconstruct(basis, project(basis, field));
    CHECK(project(basis, residual).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("degenerate clusters extend K") {
    TriangleMesh sphere = make_icosphere(2, 1.0);
    SpectralBasis basis = basis_for(sphere, 2);
    // Cutting at 2 would split the three-fold l = 1 eigenspace.
    CHECK(basis.requested_modes == 2);
    CHECK(basis.mode_count() == 4);
}

TEST_CASE("eigenvalues are invariant under rigid motion") {
    TriangleMesh torus = make_torus(0.36, 0.14, 20, 10);
    TriangleMesh moved = torus;
    Eigen::Matrix3d rot =
        Eigen::AngleAxisd(0.83, Eigen::Vector3d(1, 2, 3).normalized()).toRotationMatrix();
    for (auto& v : moved.vertices) v = rot * v + Eigen::Vector3d(5, -2, 7);
    Eigen::VectorXd lam_a = basis_for(torus, 10).eigenvalues;
    Eigen::VectorXd lam_b = basis_for(moved, 10).eigenvalues;
    for (int k = 0; k < lam_a.size(); ++k) {
        CHECK(lam_b[k] == doctest::Approx(lam_a[k]).epsilon(1e-6).scale(1.0));
    }
}

TEST_CASE("repeated solves are bit-identical") {
    TriangleMesh mesh = make_icosphere(2, 0.5);
    SpectralBasis a = basis_for(mesh, 12);
    SpectralBasis b = basis_for(mesh, 12);
    CHECK(a.eigenvalues == b.eigenvalues);
    CHECK(a.eigenvectors == b.eigenvectors);
}

TEST_CASE("parameter errors") {
    TriangleMesh grid = make_grid(1, 1, 3, 3);
    SparseMatrix s = assemble_cotan_laplacian(grid);
    MassMatrix mass = assemble_mass_matrix(grid);
    CHECK_THROWS_AS(compute_eigenbasis(s, mass, 9, 1e-8), ConfigError);   // K >= m
    CHECK_THROWS_AS(compute_eigenbasis(s, mass, 0, 1e-8), ConfigError);
}

TEST_CASE("non-convergence carries the converged count") {
    TriangleMesh sphere = make_icosphere(2, 1.0);
    EigenSolveOptions options;
    options.tolerance = 1e-14;
    options.max_subspace = 12;  // far too small for 10 tight pairs
    try {
        smallest_eigenpairs(assemble_cotan_laplacian(sphere), assemble_mass_matrix(sphere), 10,
                            options);
        FAIL("expected NumericError");
    } catch (const NumericError& e) {
        CHECK(std::string(e.what()).find("of 10 pairs") != std::string::npos);
    }
}

TEST_CASE("basis cache round-trips and validates its key") {
    TriangleMesh mesh = make_icosphere(1, 1.0);
    SpectralBasis basis = basis_for(mesh, 6);
    auto dir = std::filesystem::temp_directory_path() / "ergomesh_tests";
    std::filesystem::create_directories(dir);
    auto path = dir / "basis.cache";

    const std::uint64_t hash = mesh_hash(mesh);
    save_basis_cache(path, basis, hash);
    auto loaded = try_load_basis_cache(path, hash, 6);
    REQUIRE(loaded.has_value());
    CHECK(loaded->eigenvalues == basis.eigenvalues);
    CHECK(loaded->eigenvectors == basis.eigenvectors);
    CHECK(loaded->mass == basis.mass);
    CHECK(loaded->requested_modes == 6);

    CHECK_FALSE(try_load_basis_cache(path, hash + 1, 6).has_value());
    CHECK_FALSE(try_load_basis_cache(path, hash, 7).has_value());
    CHECK_FALSE(try_load_basis_cache(dir / "missing.cache", hash, 6).has_value());
}

}  // TEST_SUITE
