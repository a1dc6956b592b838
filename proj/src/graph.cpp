#include <signedgl/graph.hpp>

#include <algorithm>
#include <numeric>
#include <sstream>

namespace signedgl {
namespace {

std::vector<std::string> default_ids(Index n) {
    std::vector<std::string> ids;
    ids.reserve(static_cast<std::size_t>(n));
    for (Index i = 0; i < n; ++i) ids.push_back(std::to_string(i));
    return ids;
}

void validate_side(const SparseMatrix& m, Index n, const char* name) {
    if (m.rows() != n || m.cols() != n) {
        std::ostringstream os;
        os << name << " has shape " << m.rows() << "x" << m.cols() << ", expected " << n << "x" << n;
        throw InvalidInput(os.str());
    }
    for (Index j = 0; j < m.outerSize(); ++j) {
        for (SparseMatrix::InnerIterator it(m, j); it; ++it) {
            if (it.row() == it.col()) {
                std::ostringstream os;
                os << name << " has a self-loop at node " << it.row();
                throw InvalidInput(os.str());
            }
            if (!(it.value() > 0.0)) {
                std::ostringstream os;
                os << name << " has non-positive weight " << it.value() << " at (" << it.row()
                   << ", " << it.col() << ")";
                throw InvalidInput(os.str());
            }
        }
    }
    SparseMatrix diff = m - SparseMatrix(m.transpose());
    diff.prune(0.0, 0.0);
    if (diff.nonZeros() != 0) {
        std::ostringstream os;
        os << name << " is not symmetric";
        throw InvalidInput(os.str());
    }
}

}  // namespace

SignedGraph::SignedGraph(SparseMatrix positive, SparseMatrix negative,
                         std::vector<std::string> node_ids)
    : n_(positive.rows()), positive_(std::move(positive)), negative_(std::move(negative)),
      node_ids_(std::move(node_ids)) {
    positive_.prune(0.0, 0.0);
    negative_.prune(0.0, 0.0);
    positive_.makeCompressed();
    negative_.makeCompressed();
    validate_side(positive_, n_, "positive adjacency");
    validate_side(negative_, n_, "negative adjacency");
    if (node_ids_.empty()) {
        node_ids_ = default_ids(n_);
    } else if (static_cast<Index>(node_ids_.size()) != n_) {
        throw InvalidInput("node id count does not match node count");
    }
}

SignedGraph SignedGraph::from_edges(Index n, std::span<const WeightedEdge> edges,
                                    std::vector<std::string> node_ids) {
    std::vector<Eigen::Triplet<double>> pos;
    std::vector<Eigen::Triplet<double>> neg;
    for (const auto& e : edges) {
        if (e.source < 0 || e.source >= n || e.target < 0 || e.target >= n) {
            throw InvalidInput("edge endpoint out of range");
        }
        if (e.source == e.target) throw InvalidInput("self-loop in edge list");
        if (e.weight > 0.0) {
            pos.emplace_back(e.source, e.target, e.weight);
            pos.emplace_back(e.target, e.source, e.weight);
        } else if (e.weight < 0.0) {
            neg.emplace_back(e.source, e.target, -e.weight);
            neg.emplace_back(e.target, e.source, -e.weight);
        }
    }
    SparseMatrix wp(n, n);
    SparseMatrix wn(n, n);
    wp.setFromTriplets(pos.begin(), pos.end());
    wn.setFromTriplets(neg.begin(), neg.end());
    return SignedGraph(std::move(wp), std::move(wn), std::move(node_ids));
}

SparseMatrix SignedGraph::signed_adjacency() const { return positive_ - negative_; }

SparseMatrix SignedGraph::absolute_adjacency() const { return positive_ + negative_; }

SignedGraph split_signs(const SparseMatrix& w, std::vector<std::string> node_ids) {
    if (w.rows() != w.cols()) throw InvalidInput("signed adjacency must be square");
    const Index n = w.rows();

    // Row-major copy so violations are reported in (row, col) order.
    Eigen::SparseMatrix<double, Eigen::RowMajor> rows = w;
    for (Index i = 0; i < n; ++i) {
        for (decltype(rows)::InnerIterator it(rows, i); it; ++it) {
            const Index j = it.col();
            if (i == j && it.value() != 0.0) {
                std::ostringstream os;
                os << "nonzero diagonal entry at (" << i << ", " << i << ")";
                throw InvalidInput(os.str());
            }
            if (it.value() != w.coeff(j, i)) {
                std::ostringstream os;
                os << "matrix is not symmetric at (" << i << ", " << j << ")";
                throw InvalidInput(os.str());
            }
        }
    }

    std::vector<Eigen::Triplet<double>> pos;
    std::vector<Eigen::Triplet<double>> neg;
    for (Index j = 0; j < w.outerSize(); ++j) {
        for (SparseMatrix::InnerIterator it(w, j); it; ++it) {
            if (it.value() > 0.0) pos.emplace_back(it.row(), it.col(), it.value());
            if (it.value() < 0.0) neg.emplace_back(it.row(), it.col(), -it.value());
        }
    }
    SparseMatrix wp(n, n);
    SparseMatrix wn(n, n);
    wp.setFromTriplets(pos.begin(), pos.end());
    wn.setFromTriplets(neg.begin(), neg.end());
    return SignedGraph(std::move(wp), std::move(wn), std::move(node_ids));
}

DegreeVectors degrees(const SignedGraph& g) {
    DegreeVectors d;
    const Vector ones = Vector::Ones(g.size());
    d.positive = g.positive() * ones;
    d.negative = g.negative() * ones;
    d.absolute = d.positive + d.negative;
    return d;
}

std::vector<Index> component_labels(const SignedGraph& g, Connectivity mode) {
    SparseMatrix adj;
    switch (mode) {
        case Connectivity::positive: adj = g.positive(); break;
        case Connectivity::negative: adj = g.negative(); break;
        case Connectivity::signed_union: adj = g.absolute_adjacency(); break;
    }
    const Index n = g.size();
    std::vector<Index> label(static_cast<std::size_t>(n), -1);
    std::vector<Index> stack;
    Index next = 0;
    for (Index s = 0; s < n; ++s) {
        if (label[s] >= 0) continue;
        label[s] = next;
        stack.push_back(s);
        while (!stack.empty()) {
            const Index v = stack.back();
            stack.pop_back();
            for (SparseMatrix::InnerIterator it(adj, v); it; ++it) {
                if (label[it.row()] < 0) {
                    label[it.row()] = next;
                    stack.push_back(it.row());
                }
            }
        }
        ++next;
    }
    return label;
}

SignedGraph induced_subgraph(const SignedGraph& g, std::span<const Index> nodes) {
    std::vector<Index> remap(static_cast<std::size_t>(g.size()), kNotRetained);
    for (std::size_t k = 0; k < nodes.size(); ++k) remap[nodes[k]] = static_cast<Index>(k);

    auto restrict = [&](const SparseMatrix& m) {
        std::vector<Eigen::Triplet<double>> trips;
        for (Index j = 0; j < m.outerSize(); ++j) {
            if (remap[j] == kNotRetained) continue;
            for (SparseMatrix::InnerIterator it(m, j); it; ++it) {
                if (remap[it.row()] != kNotRetained) {
                    trips.emplace_back(remap[it.row()], remap[j], it.value());
                }
            }
        }
        const auto k = static_cast<Index>(nodes.size());
        SparseMatrix out(k, k);
        out.setFromTriplets(trips.begin(), trips.end());
        return out;
    };

    std::vector<std::string> ids;
    ids.reserve(nodes.size());
    for (Index v : nodes) ids.push_back(g.node_ids()[v]);
    return SignedGraph(restrict(g.positive()), restrict(g.negative()), std::move(ids));
}

Component largest_connected_component(const SignedGraph& g, Connectivity mode) {
    if (g.size() == 0) throw InvalidInput("largest connected component of an empty graph");
    const auto labels = component_labels(g, mode);
    const Index count = *std::max_element(labels.begin(), labels.end()) + 1;
    std::vector<Index> sizes(static_cast<std::size_t>(count), 0);
    for (Index l : labels) ++sizes[l];
    // Labels are numbered by smallest member, so the first maximum wins ties.
    const Index best = std::max_element(sizes.begin(), sizes.end()) - sizes.begin();

    Component c;
    c.old_to_new.assign(labels.size(), kNotRetained);
    for (Index v = 0; v < g.size(); ++v) {
        if (labels[v] == best) {
            c.old_to_new[v] = static_cast<Index>(c.new_to_old.size());
            c.new_to_old.push_back(v);
        }
    }
    c.graph = induced_subgraph(g, c.new_to_old);
    return c;
}

}  // namespace signedgl
