#pragma once

#include <signedgl/gl.hpp>

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace signedgl {

enum class Delimiter { whitespace, comma };

/// Edge-list layout: `src dst weight [ignored...]` per row. Lines starting
/// with a comment prefix and blank lines are skipped; `header` skips the first
/// data line. Weights are signed reals and may carry a leading '+'.
struct EdgeListFormat {
    Delimiter delimiter = Delimiter::whitespace;
    bool header = false;
    std::string comment_prefixes = "#%";
};

struct EdgeListStats {
    std::size_t records = 0;
    std::size_t self_loops_dropped = 0;
    std::size_t zero_weight_dropped = 0;
};

/// Node ids are mapped to dense indices in order of first appearance.
/// Repeated records are summed per sign, so a pair listed with both signs
/// keeps a positive and a negative entry. Throws InvalidInput naming the line
/// of a malformed row, or when no edge survives.
SignedGraph parse_signed_edge_list(std::istream& in, const EdgeListFormat& format,
                                   EdgeListStats* stats = nullptr);
SignedGraph load_signed_edge_list(const std::filesystem::path& path,
                                  const EdgeListFormat& format = {},
                                  EdgeListStats* stats = nullptr);

/// Canonical export: one `src dst weight` line per stored undirected entry
/// with src < dst by node index, sorted by (src, dst), positive entry before
/// negative; weights in shortest round-trip decimal form.
void write_canonical_edge_list(std::ostream& out, const SignedGraph& g);
void write_canonical_edge_list(const std::filesystem::path& path, const SignedGraph& g);

/// Ground-truth classes aligned with a graph's node indices.
struct LabelData {
    std::vector<int> classes;              // -1 where a node has no label
    std::vector<std::string> class_names;  // index = class id, first-appearance order
    std::size_t skipped = 0;               // rows naming nodes absent from the graph

    int num_classes() const noexcept { return static_cast<int>(class_names.size()); }
    Index size() const noexcept { return static_cast<Index>(classes.size()); }
    Index labeled_count() const;

    /// Restricts to a component: result[i] = classes[new_to_old[i]].
    LabelData restricted(std::span<const Index> new_to_old) const;
};

/// Rows `node_id label`. Throws on duplicate node ids, and (when strict) on
/// ids not present in the graph; otherwise those rows are counted in `skipped`.
LabelData parse_labels(std::istream& in, const SignedGraph& graph, bool strict = true,
                       Delimiter delimiter = Delimiter::whitespace);
LabelData load_labels(const std::filesystem::path& path, const SignedGraph& graph,
                      bool strict = true, Delimiter delimiter = Delimiter::whitespace);
void write_labels(std::ostream& out, const SignedGraph& graph, const LabelData& labels);

/// Two-class data as signs: class 0 -> +1, class 1 -> -1. `mask` selects the
/// nodes that keep their label; all others get 0.
BinaryLabels to_binary(const LabelData& labels, const std::vector<bool>& mask);
MulticlassLabels to_multiclass(const LabelData& labels, const std::vector<bool>& mask);

struct SsbmParams {
    Index n = 200;
    int k = 2;
    double p_in = 0.1;
    double p_out = 0.1;
    double eta = 0.0;
    std::uint64_t seed = 0;
};

struct SsbmGraph {
    SignedGraph graph;
    std::vector<int> blocks;
};

/// Signed stochastic block model. Node i belongs to block floor(i k / n).
/// Each same-block pair becomes a positive edge with probability p_in, each
/// cross-block pair a negative edge with probability p_out; every realized
/// edge flips sign with probability eta. Unit weights.
SsbmGraph generate_ssbm(const SsbmParams& params);

LabelData labels_from_blocks(const std::vector<int>& blocks);

/// Uniform sample without replacement of round-half-even(fraction * m) of the
/// m nodes that carry a label, seeded by base_seed + run_index. Throws when the
/// sample would be empty or the fraction is outside (0, 1].
std::vector<bool> sample_labeled_nodes(const LabelData& labels, double fraction,
                                       std::uint64_t run_index, std::uint64_t base_seed);

}  // namespace signedgl
