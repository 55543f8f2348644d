#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>

#include "ergomesh/laplace.hpp"
#include "ergomesh/primitives.hpp"

using namespace ergomesh;

TEST_SUITE("laplace_operator") {

TEST_CASE("cotangent weights of a right triangle, by hand") {
    // Angles: 90 deg at v0, 45 deg at v1 and v2. Off-diagonals are
    // -1/2 cot(opposite angle): w01 = w02 = -1/2 cot 45 = -0.5, w12 = 0.
    TriangleMesh tri;
    tri.vertices = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}};
    tri.faces = {{0, 1, 2}};
    SparseMatrix s = assemble_cotan_laplacian(validate_mesh(tri));
    Eigen::MatrixXd dense = Eigen::MatrixXd(s);
    CHECK(dense(0, 1) == doctest::Approx(-0.5).epsilon(1e-12));
    CHECK(dense(0, 2) == doctest::Approx(-0.5).epsilon(1e-12));
    CHECK(dense(1, 2) == doctest::Approx(0.0));
    CHECK(dense(0, 0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK((dense - dense.transpose()).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("rows sum to zero: constants live in the kernel") {
    for (const TriangleMesh& mesh :
         {make_grid(1, 1, 15, 15), make_icosphere(2, 1.0), make_turbine({25.6, 122.8, 203.1}, 12.0)}) {
        SparseMatrix s = assemble_cotan_laplacian(mesh);
        Eigen::VectorXd row_sums = s * Eigen::VectorXd::Ones(mesh.vertex_count());
        CHECK(row_sums.cwiseAbs().maxCoeff() < 1e-9);
    }
}

TEST_CASE("stiffness is positive semidefinite on random vectors") {
    std::mt19937 rng(11);
    std::normal_distribution<double> dist;
    for (const TriangleMesh& mesh : {make_icosphere(2, 0.5), make_torus(0.36, 0.14, 20, 10)}) {
        SparseMatrix s = assemble_cotan_laplacian(mesh);
        for (int trial = 0; trial < 20; ++trial) {
            Eigen::VectorXd g(mesh.vertex_count());
            for (int i = 0; i < mesh.vertex_count(); ++i) g[i] = dist(rng);
            CHECK(g.dot(s * g) >= -1e-9 * g.squaredNorm());
        }
    }
}

TEST_CASE("Dirichlet energy of linear fields on the flat square") {
    // Oracle: for f(v) = a . v with the mesh flat in z = 0, the energy
    // integral of |grad f|^2 is |a|^2 times the area, exactly representable
    // by linear finite elements.
    TriangleMesh grid = make_grid(1, 1, 40, 40);
    SparseMatrix s = assemble_cotan_laplacian(grid);
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> dist(-2.0, 2.0);
    for (int trial = 0; trial < 5; ++trial) {
        Eigen::Vector2d a(dist(rng), dist(rng));
        Eigen::VectorXd f(grid.vertex_count());
        for (int v = 0; v < grid.vertex_count(); ++v) {
            f[v] = a.x() * grid.vertices[v].x() + a.y() * grid.vertices[v].y();
        }
        CHECK(f.dot(s * f) == doctest::Approx(a.squaredNorm()).epsilon(1e-9));
    }
}

TEST_CASE("mass matrix of a single triangle") {
    TriangleMesh tri;
    tri.vertices = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}};
    tri.faces = {{0, 1, 2}};
    MassMatrix mass = assemble_mass_matrix(validate_mesh(tri));
    for (int v = 0; v < 3; ++v) CHECK(mass.diagonal[v] == doctest::Approx(1.0 / 6.0).epsilon(1e-12));
}

TEST_CASE("mass trace equals surface area") {
    CHECK(assemble_mass_matrix(make_grid(1, 1, 33, 33)).trace() == doctest::Approx(1.0).epsilon(1e-9));
    const double sphere_area = 4.0 * std::numbers::pi * 0.25;
    CHECK(assemble_mass_matrix(make_icosphere(4, 0.5)).trace() ==
          doctest::Approx(sphere_area).epsilon(5e-3));
}

TEST_CASE("quadratic form converges under refinement") {
    // Cauchy differences of the energy of a fixed smooth function must
    // shrink as the flat mesh refines.
    auto field = [](const Eigen::Vector3d& p) {
        return std::sin(2.0 * std::numbers::pi * p.x()) * std::cos(std::numbers::pi * p.y());
    };
    double previous_energy = 0.0;
    double previous_diff = std::numeric_limits<double>::infinity();
    for (int n : {11, 21, 41, 81}) {
        TriangleMesh grid = make_grid(1, 1, n, n);
        SparseMatrix s = assemble_cotan_laplacian(grid);
        Eigen::VectorXd f(grid.vertex_count());
        for (int v = 0; v < grid.vertex_count(); ++v) f[v] = field(grid.vertices[v]);
        double energy = f.dot(s * f);
        if (n > 11) {
            double diff = std::abs(energy - previous_energy);
            CHECK(diff < previous_diff);
            previous_diff = diff;
        }
        previous_energy = energy;
    }
}

TEST_CASE("sliver faces are clamped, not fatal") {
    TriangleMesh sliver;
    sliver.vertices = {{0, 0, 0}, {1, 0, 0}, {0.5, 1e-11, 0}, {0.5, -1, 0}};
    sliver.faces = {{0, 1, 2}, {1, 0, 3}};
    SparseMatrix s = assemble_cotan_laplacian(validate_mesh(sliver));
    CHECK(Eigen::MatrixXd(s).cwiseAbs().maxCoeff() <= 2.0 * kCotanClamp);
}

TEST_CASE("matrix market export round-trips through text") {
    TriangleMesh tri;
    tri.vertices = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}};
    tri.faces = {{0, 1, 2}};
    TriangleMesh mesh = validate_mesh(tri);
    auto dir = std::filesystem::temp_directory_path() / "ergomesh_tests";
    std::filesystem::create_directories(dir);

    auto spath = dir / "stiffness.mtx";
    write_matrix_market(spath, assemble_cotan_laplacian(mesh));
    std::ifstream in(spath);
    std::string header;
    std::getline(in, header);
    CHECK(header == "%%MatrixMarket matrix coordinate real symmetric");
    int rows = 0, cols = 0, entries = 0;
    in >> rows >> cols >> entries;
    CHECK(rows == 3);
    CHECK(cols == 3);
    CHECK(entries == 5);  // lower triangle: 3 diagonal + w01, w02 (w12 == 0 dropped)

    auto mpath = dir / "mass.mtx";
    write_matrix_market(mpath, assemble_mass_matrix(mesh));
    std::ifstream min(mpath);
    std::getline(min, header);
    min >> rows >> cols >> entries;
    CHECK(entries == 3);
}

}  // TEST_SUITE
