#pragma once

#include <signedgl/laplacians.hpp>

#include <cstdint>
#include <filesystem>

namespace signedgl {

/// The k smallest eigenpairs of an operator, ascending. Columns are
/// orthonormal for a standard operator and B-orthonormal for a generalized
/// pair. Each column's largest-magnitude entry is positive.
struct Eigenbasis {
    Vector values;
    Matrix vectors;
    OperatorSpec source;
    bool generalized = false;

    Index size() const noexcept { return values.size(); }
    Index dimension() const noexcept { return vectors.rows(); }
    /// First k pairs.
    Eigenbasis leading(Index k) const;
};

enum class EigenMethod { automatic, dense, lanczos };

struct EigenOptions {
    EigenMethod method = EigenMethod::automatic;
    Index dense_cap = kDenseCap;
    int max_restarts = 500;
    // Relative Ritz residual required for convergence on the Lanczos path.
    double tolerance = 1e-10;
};

/// Smallest k eigenpairs. Uses a dense solver up to options.dense_cap nodes and
/// shift-inverted thick-restart Lanczos with full reorthogonalization above.
/// Deterministic for a fixed seed. Throws InvalidInput for k outside [1, n]
/// and ConvergenceError (carrying the best residual) when Lanczos stalls.
Eigenbasis smallest_eigs(const OperatorHandle& op, Index k, std::uint64_t seed,
                         const EigenOptions& options = {});

/// All n eigenpairs by dense decomposition; generalized pairs are reduced
/// with a Cholesky factor of B. Throws UnsupportedOperation above kDenseCap.
Eigenbasis full_dense_eigs(const OperatorHandle& op);

/// Flips column signs so that each column's largest-magnitude entry (first
/// one on ties) is positive.
void canonicalize_signs(Matrix& vectors);

/// Largest residual ||S phi - lambda phi|| (or ||A phi - lambda B phi||)
/// relative to ||phi||, over the columns of `basis`.
double max_residual(const OperatorHandle& op, const Eigenbasis& basis);

// Eigenbasis cache. Binary, little-endian:
//   magic "SGLEIGEN" | u32 version | u64 dataset hash | u32 operator kind |
//   u32 generalized | u64 n | u64 k | f64 values[k] | f64 vectors[n*k] (column-major)
struct CacheKey {
    std::uint64_t dataset_hash = 0;
    OperatorKind kind = OperatorKind::L;
    Index k = 0;
};

inline constexpr std::uint32_t kCacheVersion = 1;

void write_eigenbasis(const std::filesystem::path& path, const CacheKey& key,
                      const Eigenbasis& basis);
/// Throws InvalidInput if the file is malformed or its key differs from `key`.
Eigenbasis read_eigenbasis(const std::filesystem::path& path, const CacheKey& key);

/// FNV-1a over the node count and the sorted (row, col, weight) entries of W+
/// and W-. Node ids are not included.
std::uint64_t graph_hash(const SignedGraph& g);

}  // namespace signedgl
