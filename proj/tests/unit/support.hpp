#pragma once

#include <signedgl/harness.hpp>
#include <signedgl/random.hpp>

#include <Eigen/Eigenvalues>

#include <vector>

namespace testing {

using namespace signedgl;

inline SparseMatrix sparse(const Matrix& m) { return m.sparseView(); }

inline Vector dense_spectrum(const Matrix& m) {
    return Eigen::SelfAdjointEigenSolver<Matrix>(m, Eigen::EigenvaluesOnly).eigenvalues();
}

inline Vector dense_spectrum(const SparseMatrix& m) { return dense_spectrum(Matrix(m)); }

// Erdos-Renyi signed graph: each pair is an edge with probability p, negative
// with probability q, weight uniform in [0.5, 1.5).
inline SignedGraph random_signed_graph(Index n, double p, double q, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<WeightedEdge> edges;
    for (Index i = 0; i < n; ++i) {
        for (Index j = i + 1; j < n; ++j) {
            if (uniform01(rng) >= p) continue;
            const double w = 0.5 + uniform01(rng);
            edges.push_back({i, j, uniform01(rng) < q ? -w : w});
        }
    }
    return SignedGraph::from_edges(n, edges);
}

// Disjoint positive cliques of the given sizes.
inline SignedGraph cliques(std::vector<Index> sizes) {
    std::vector<WeightedEdge> edges;
    Index offset = 0;
    for (Index s : sizes) {
        for (Index i = 0; i < s; ++i) {
            for (Index j = i + 1; j < s; ++j) edges.push_back({offset + i, offset + j, 1.0});
        }
        offset += s;
    }
    return SignedGraph::from_edges(offset, edges);
}

// {0,1} positive inside, {2,3} positive inside, negative across.
inline SignedGraph balanced_four() {
    const std::vector<WeightedEdge> edges = {
        {0, 1, 1.0}, {2, 3, 1.0}, {0, 2, -1.0}, {0, 3, -1.0}, {1, 2, -1.0}, {1, 3, -1.0}};
    return SignedGraph::from_edges(4, edges);
}

inline Matrix random_symmetric(Index n, std::uint64_t seed) {
    Rng rng(seed);
    Matrix m(n, n);
    for (Index i = 0; i < n; ++i) {
        for (Index j = 0; j < n; ++j) m(i, j) = 2.0 * uniform01(rng) - 1.0;
    }
    return (m + m.transpose()) / 2.0;
}

inline Matrix random_spd(Index n, std::uint64_t seed) {
    const Matrix a = random_symmetric(n, seed);
    return a * a.transpose() + Matrix::Identity(n, n);
}

inline Vector random_vector(Index n, std::uint64_t seed, double lo = -1.0, double hi = 1.0) {
    Rng rng(seed);
    Vector v(n);
    for (Index i = 0; i < n; ++i) v[i] = lo + (hi - lo) * uniform01(rng);
    return v;
}

}  // namespace testing
