#pragma once

#include <signedgl/types.hpp>

#include <span>
#include <string>
#include <vector>

namespace signedgl {

struct WeightedEdge {
    Index source;
    Index target;
    double weight;
};

/// A signed graph stored as the pair (W+, W-) of symmetric nonnegative sparse
/// matrices over a shared node set.
///
/// Both matrices are symmetric, have an empty diagonal and store only strictly
/// positive weights. A node pair may carry a positive and a negative entry at
/// the same time. Instances are immutable once constructed.
class SignedGraph {
public:
    SignedGraph() = default;

    /// Validates the invariants above; explicit zeros are pruned. Throws
    /// InvalidInput on shape mismatch, asymmetry, diagonal entries or
    /// negative weights. An empty `node_ids` is filled with "0".."n-1".
    SignedGraph(SparseMatrix positive, SparseMatrix negative,
                std::vector<std::string> node_ids = {});

    /// Builds from undirected edges; each edge contributes its weight to both
    /// (s,t) and (t,s). Positive weights accumulate in W+, negative ones (by
    /// magnitude) in W-. Zero weights are ignored; self-loops are rejected.
    static SignedGraph from_edges(Index n, std::span<const WeightedEdge> edges,
                                  std::vector<std::string> node_ids = {});

    Index size() const noexcept { return n_; }
    const SparseMatrix& positive() const noexcept { return positive_; }
    const SparseMatrix& negative() const noexcept { return negative_; }
    const std::vector<std::string>& node_ids() const noexcept { return node_ids_; }

    /// W = W+ - W-.
    SparseMatrix signed_adjacency() const;
    /// W+ + W-.
    SparseMatrix absolute_adjacency() const;

    // Undirected edge counts (stored entries / 2).
    Index positive_edge_count() const noexcept { return positive_.nonZeros() / 2; }
    Index negative_edge_count() const noexcept { return negative_.nonZeros() / 2; }
    Index edge_count() const noexcept { return positive_edge_count() + negative_edge_count(); }

private:
    Index n_ = 0;
    SparseMatrix positive_;
    SparseMatrix negative_;
    std::vector<std::string> node_ids_;
};

struct DegreeVectors {
    Vector positive;  // D+_ii
    Vector negative;  // D-_ii
    Vector absolute;  // D+_ii + D-_ii
};

/// Splits a symmetric signed matrix into its positive and negative parts.
/// Throws InvalidInput naming the first (row, col) pair, in row-major order,
/// where W[i,j] != W[j,i], or the first nonzero diagonal entry.
SignedGraph split_signs(const SparseMatrix& w, std::vector<std::string> node_ids = {});

DegreeVectors degrees(const SignedGraph& g);

enum class Connectivity { positive, negative, signed_union };

inline constexpr Index kNotRetained = -1;

struct Component {
    SignedGraph graph;
    std::vector<Index> old_to_new;  // kNotRetained for dropped nodes
    std::vector<Index> new_to_old;
};

/// Connected component labels (0-based, numbered by smallest contained node).
std::vector<Index> component_labels(const SignedGraph& g, Connectivity mode);

/// Largest connected component under the chosen edge set. Ties go to the
/// component holding the smallest original index. Throws on an empty graph.
Component largest_connected_component(const SignedGraph& g, Connectivity mode);

/// Induced subgraph on `nodes` (in the given order).
SignedGraph induced_subgraph(const SignedGraph& g, std::span<const Index> nodes);

}  // namespace signedgl
