#include "ergomesh/spectral_basis.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <vector>

namespace ergomesh {

namespace {

// Deterministic, platform-independent start vectors.
struct SplitMix64 {
    std::uint64_t state;

    explicit SplitMix64(std::uint64_t seed) : state(seed) {}

    std::uint64_t next() {
        state += 0x9E3779B97F4A7C15ull;
        std::uint64_t z = state;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    double uniform() {  // (-1, 1)
        return 2.0 * (static_cast<double>(next() >> 11) * 0x1.0p-53) - 1.0;
    }
};

Eigen::VectorXd random_vector(Eigen::Index size, std::uint64_t seed) {
    SplitMix64 rng(seed);
    Eigen::VectorXd v(size);
    for (Eigen::Index i = 0; i < size; ++i) v[i] = rng.uniform();
    return v;
}

}  // namespace

EigenPairs smallest_eigenpairs(const SparseMatrix& stiffness, const MassMatrix& mass, int count,
                               const EigenSolveOptions& options) {
    const Eigen::Index m = mass.size();
    if (stiffness.rows() != m || stiffness.cols() != m) {
        throw ConfigError("smallest_eigenpairs: stiffness is " + std::to_string(stiffness.rows()) +
                          "x" + std::to_string(stiffness.cols()) + " but mass has dimension " +
                          std::to_string(m));
    }
    if (count < 1 || count >= m) {
        throw ConfigError("smallest_eigenpairs: requested " + std::to_string(count) +
                          " pairs of a dimension-" + std::to_string(m) + " problem");
    }
    if ((mass.diagonal.array() <= 0.0).any()) {
        throw ConfigError("smallest_eigenpairs: mass matrix is not positive definite");
    }

    // Slightly negative shift keeps S - sigma M positive definite despite the
    // constant-function kernel; scaled so it works at any mesh scale.
    const double scale = stiffness.diagonal().sum() / mass.trace();
    const double sigma = -1e-8 * (scale > 0.0 ? scale : 1.0);

    SparseMatrix shifted = stiffness;
    for (Eigen::Index i = 0; i < m; ++i) shifted.coeffRef(i, i) -= sigma * mass.diagonal[i];
    Eigen::SimplicialLDLT<SparseMatrix> factor(shifted);
    if (factor.info() != Eigen::Success) {
        throw NumericError("smallest_eigenpairs: Cholesky factorization of the shifted operator failed");
    }

    const int max_subspace = static_cast<int>(
        options.max_subspace > 0 ? std::min<Eigen::Index>(options.max_subspace, m)
                                 : std::min<Eigen::Index>(m, std::max(2 * count + 24, 48)));

    const Eigen::VectorXd& w = mass.diagonal;
    Eigen::MatrixXd basis(m, max_subspace);  // M-orthonormal Lanczos vectors
    std::vector<double> alpha, beta;         // tridiagonal entries
    alpha.reserve(static_cast<std::size_t>(max_subspace));
    beta.reserve(static_cast<std::size_t>(max_subspace));

    auto m_orthogonalize = [&](Eigen::VectorXd& v, int against) {
        for (int pass = 0; pass < 2; ++pass) {
            Eigen::VectorXd h = basis.leftCols(against).transpose() * w.cwiseProduct(v);
            v.noalias() -= basis.leftCols(against) * h;
        }
    };

    {
        Eigen::VectorXd v0 = random_vector(m, 0x45524742ull ^ static_cast<std::uint64_t>(m));
        v0 /= std::sqrt(v0.dot(w.cwiseProduct(v0)));
        basis.col(0) = v0;
    }

    Eigen::VectorXd ritz_values;
    Eigen::MatrixXd ritz_vectors;
    int converged = 0;
    int j = 0;
    std::uint64_t restart_seed = 1;

    while (true) {
        // One Lanczos step: expand the Krylov space of (S - sigma M)^-1 M.
        Eigen::VectorXd v = factor.solve(w.cwiseProduct(basis.col(j)));
        if (j > 0) v.noalias() -= beta[static_cast<std::size_t>(j - 1)] * basis.col(j - 1);
        double a = v.dot(w.cwiseProduct(basis.col(j)));
        v.noalias() -= a * basis.col(j);
        m_orthogonalize(v, j + 1);
        alpha.push_back(a);
        double b = std::sqrt(std::max(0.0, v.dot(w.cwiseProduct(v))));
        ++j;

        bool breakdown = b < 1e-14 * std::abs(a) + 1e-300;
        if (j < max_subspace) {
            if (breakdown) {
                // Invariant subspace found; continue from a fresh direction.
                Eigen::VectorXd fresh = random_vector(m, 0xB5AD4ECEDA1CE2A9ull + restart_seed++);
                m_orthogonalize(fresh, j);
                double norm = std::sqrt(fresh.dot(w.cwiseProduct(fresh)));
                if (norm < 1e-12) {
                    throw NumericError("smallest_eigenpairs: cannot extend the Krylov subspace");
                }
                basis.col(j) = fresh / norm;
                beta.push_back(0.0);
            } else {
                basis.col(j) = v / b;
                beta.push_back(b);
            }
        }

        const bool last_chance = j == max_subspace;
        if (j >= count + 2 && (j % 8 == 0 || breakdown || last_chance)) {
            // Ritz extraction from the tridiagonal matrix.
            Eigen::MatrixXd tri = Eigen::MatrixXd::Zero(j, j);
            for (int i = 0; i < j; ++i) {
                tri(i, i) = alpha[static_cast<std::size_t>(i)];
                if (i + 1 < j) {
                    tri(i, i + 1) = beta[static_cast<std::size_t>(i)];
                    tri(i + 1, i) = beta[static_cast<std::size_t>(i)];
                }
            }
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> tri_eigen(tri);
            // Largest theta of the shift-inverted operator <-> smallest lambda.
            Eigen::VectorXd theta = tri_eigen.eigenvalues().tail(count).reverse();
            Eigen::MatrixXd u = tri_eigen.eigenvectors().rightCols(count).rowwise().reverse();

            // Cheap pre-filter on the Lanczos residual estimate before the
            // expensive direct verification.
            const double last_beta = b;
            bool plausible = true;
            for (int k = 0; k < count && plausible; ++k) {
                plausible = last_beta * std::abs(u(j - 1, k)) <=
                            std::sqrt(options.tolerance) * std::abs(theta[k]);
            }
            if (!plausible && !last_chance) continue;

            // Ericsson-Ruhe purification: one extra inverse application
            // strips the subspace-escape component that the stiffness norm
            // would otherwise amplify in the residual.
            ritz_vectors.noalias() = basis.leftCols(j) * u;
            for (int k = 0; k < count; ++k) {
                Eigen::VectorXd purified = factor.solve(w.cwiseProduct(ritz_vectors.col(k)));
                double norm = std::sqrt(purified.dot(w.cwiseProduct(purified)));
                ritz_vectors.col(k) = purified / norm;
            }
            ritz_values.resize(count);
            converged = count;
            for (int k = 0; k < count; ++k) {
                const Eigen::VectorXd& f = ritz_vectors.col(k);
                ritz_values[k] = f.dot(stiffness * f);  // Rayleigh quotient, M-norm is 1
                Eigen::VectorXd residual = stiffness * f - ritz_values[k] * w.cwiseProduct(f);
                double denom = w.cwiseProduct(f).norm();
                if (residual.norm() > options.tolerance * denom) {
                    converged = k;
                    break;
                }
            }
            if (converged == count) break;
            if (last_chance) {
                throw NumericError("smallest_eigenpairs: only " + std::to_string(converged) + " of " +
                                   std::to_string(count) + " pairs converged within a subspace of " +
                                   std::to_string(max_subspace));
            }
        }
    }

    // Rayleigh refinement may swap near-degenerate neighbours; restore order.
    std::vector<int> order(static_cast<std::size_t>(count));
    for (int k = 0; k < count; ++k) order[static_cast<std::size_t>(k)] = k;
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return ritz_values[a] < ritz_values[b]; });

    EigenPairs pairs;
    pairs.values.resize(count);
    pairs.vectors.resize(m, count);
    for (int k = 0; k < count; ++k) {
        pairs.values[k] = ritz_values[order[static_cast<std::size_t>(k)]];
        pairs.vectors.col(k) = ritz_vectors.col(order[static_cast<std::size_t>(k)]);
    }

    // Clean up: exact M-orthonormality and nonnegative eigenvalues (tiny
    // negatives are kernel round-off).
    Eigen::MatrixXd gram = pairs.vectors.transpose() * w.asDiagonal() * pairs.vectors;
    Eigen::LLT<Eigen::MatrixXd> llt(gram);
    if (llt.info() == Eigen::Success) {
        pairs.vectors = llt.matrixU().solve<Eigen::OnTheRight>(pairs.vectors);
    }
    const double floor = -1e-9 * std::max(1.0, std::abs(pairs.values[count - 1]));
    for (int k = 0; k < count; ++k) {
        if (pairs.values[k] < 0.0 && pairs.values[k] > floor) pairs.values[k] = 0.0;
    }
    return pairs;
}

namespace {

// Relative gap below 1e-6 keeps two eigenvalues in one cluster.
bool same_cluster(double lo, double hi) {
    return hi - lo < 1e-6 * (std::abs(hi) + 1e-9);
}

void fix_signs(Eigen::MatrixXd& vectors) {
    for (Eigen::Index k = 0; k < vectors.cols(); ++k) {
        Eigen::Index at = 0;
        vectors.col(k).cwiseAbs().maxCoeff(&at);
        if (vectors(at, k) < 0.0) vectors.col(k) = -vectors.col(k);
    }
}

}  // namespace

SpectralBasis compute_eigenbasis(const SparseMatrix& stiffness, const MassMatrix& mass, int K,
                                 double tolerance) {
    if (K < 1) throw ConfigError("compute_eigenbasis: K must be >= 1");
    if (K >= mass.size()) {
        throw ConfigError("compute_eigenbasis: K = " + std::to_string(K) +
                          " must be below the vertex count " + std::to_string(mass.size()));
    }

    EigenSolveOptions options;
    options.tolerance = tolerance;

    // Compute a cushion beyond K so the cluster test can see past the cut;
    // grow if a cluster straddles everything computed.
    const int max_count = static_cast<int>(mass.size()) - 1;
    int cushion = std::min(8, max_count - K);
    while (true) {
        int nwant = std::min(K + cushion, max_count);
        EigenPairs pairs = smallest_eigenpairs(stiffness, mass, nwant, options);

        int K_used = K;
        while (K_used < nwant && same_cluster(pairs.values[K_used - 1], pairs.values[K_used])) {
            ++K_used;
        }
        const bool cluster_resolved = K_used < nwant || nwant == max_count;
        if (!cluster_resolved) {
            cushion = std::min(cushion + 16, max_count - K);
            continue;
        }
        if (K_used != K) {
            log_warning("basis extended from " + std::to_string(K) + " to " + std::to_string(K_used) +
                        " modes to close a degenerate eigenvalue cluster");
        }

        SpectralBasis basis;
        basis.eigenvalues = pairs.values.head(K_used);
        basis.eigenvectors = pairs.vectors.leftCols(K_used);
        basis.mass = mass.diagonal;
        basis.requested_modes = K;
        fix_signs(basis.eigenvectors);
        return basis;
    }
}

Eigen::VectorXd project(const SpectralBasis& basis, const Eigen::VectorXd& values) {
    if (values.size() != basis.vertex_count()) {
        throw ConfigError("project: " + std::to_string(values.size()) + " values for " +
                          std::to_string(basis.vertex_count()) + " vertices");
    }
    return basis.eigenvectors.transpose() * basis.mass.cwiseProduct(values);
}

Eigen::VectorXd reconstruct(const SpectralBasis& basis, const Eigen::VectorXd& coefficients) {
    if (coefficients.size() != basis.mode_count()) {
        throw ConfigError("reconstruct: " + std::to_string(coefficients.size()) +
                          " coefficients for a basis of " + std::to_string(basis.mode_count()) +
                          " modes");
    }
    return basis.eigenvectors * coefficients;
}

namespace {
constexpr char kCacheMagic[16] = "ERGOMESH-BASIS1";
}

void save_basis_cache(const std::filesystem::path& path, const SpectralBasis& basis,
                      std::uint64_t mesh_hash) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    out.write(kCacheMagic, sizeof(kCacheMagic));
    std::int64_t header[4] = {static_cast<std::int64_t>(mesh_hash), basis.requested_modes,
                              basis.mode_count(), basis.vertex_count()};
    out.write(reinterpret_cast<const char*>(header), sizeof(header));
    out.write(reinterpret_cast<const char*>(basis.eigenvalues.data()),
              static_cast<std::streamsize>(sizeof(double)) * basis.mode_count());
    out.write(reinterpret_cast<const char*>(basis.mass.data()),
              static_cast<std::streamsize>(sizeof(double)) * basis.vertex_count());
    out.write(reinterpret_cast<const char*>(basis.eigenvectors.data()),
              static_cast<std::streamsize>(sizeof(double)) * basis.vertex_count() * basis.mode_count());
    if (!out) throw IoError("failed while writing " + path.string());
}

std::optional<SpectralBasis> try_load_basis_cache(const std::filesystem::path& path,
                                                  std::uint64_t mesh_hash, int K) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return std::nullopt;
    char magic[16];
    in.read(magic, sizeof(magic));
    if (!in || std::memcmp(magic, kCacheMagic, sizeof(magic)) != 0) return std::nullopt;
    std::int64_t header[4];
    in.read(reinterpret_cast<char*>(header), sizeof(header));
    if (!in) return std::nullopt;
    if (static_cast<std::uint64_t>(header[0]) != mesh_hash || header[1] != K) return std::nullopt;

    SpectralBasis basis;
    basis.requested_modes = static_cast<int>(header[1]);
    const auto modes = static_cast<Eigen::Index>(header[2]);
    const auto m = static_cast<Eigen::Index>(header[3]);
    basis.eigenvalues.resize(modes);
    basis.mass.resize(m);
    basis.eigenvectors.resize(m, modes);
    in.read(reinterpret_cast<char*>(basis.eigenvalues.data()),
            static_cast<std::streamsize>(sizeof(double)) * modes);
    in.read(reinterpret_cast<char*>(basis.mass.data()), static_cast<std::streamsize>(sizeof(double)) * m);
    in.read(reinterpret_cast<char*>(basis.eigenvectors.data()),
            static_cast<std::streamsize>(sizeof(double)) * m * modes);
    if (!in) return std::nullopt;
    return basis;
}

}  // namespace ergomesh
