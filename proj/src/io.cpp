#include <signedgl/io.hpp>

#include <signedgl/random.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>
#include <tuple>
#include <unordered_map>

namespace signedgl {
namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view line, Delimiter delimiter) {
    std::vector<std::string_view> out;
    if (delimiter == Delimiter::comma) {
        std::size_t start = 0;
        while (true) {
            const auto pos = line.find(',', start);
            out.push_back(trim(line.substr(start, pos - start)));
            if (pos == std::string_view::npos) break;
            start = pos + 1;
        }
        return out;
    }
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
        if (i >= line.size()) break;
        std::size_t j = i;
        while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r') ++j;
        out.push_back(line.substr(i, j - i));
        i = j;
    }
    return out;
}

bool parse_real(std::string_view token, double& value) {
    if (!token.empty() && token.front() == '+') token.remove_prefix(1);
    if (token.empty()) return false;
    const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
    return ec == std::errc() && ptr == token.data() + token.size() && std::isfinite(value);
}

bool is_comment_or_blank(std::string_view line, const std::string& prefixes) {
    const auto t = trim(line);
    return t.empty() || prefixes.find(t.front()) != std::string::npos;
}

[[noreturn]] void malformed(std::size_t line_no, const std::string& why) {
    std::ostringstream os;
    os << "line " << line_no << ": " << why;
    throw InvalidInput(os.str());
}

std::string format_real(double x) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x);
    return std::string(buf, ptr);
}

}  // namespace

SignedGraph parse_signed_edge_list(std::istream& in, const EdgeListFormat& format,
                                   EdgeListStats* stats) {
    EdgeListStats local;
    std::unordered_map<std::string, Index> index_of;
    std::vector<std::string> ids;
    std::vector<WeightedEdge> edges;
    auto intern = [&](std::string_view id) {
        auto [it, inserted] = index_of.try_emplace(std::string(id), static_cast<Index>(ids.size()));
        if (inserted) ids.emplace_back(id);
        return it->second;
    };

    std::string line;
    std::size_t line_no = 0;
    bool header_pending = format.header;
    while (std::getline(in, line)) {
        ++line_no;
        if (is_comment_or_blank(line, format.comment_prefixes)) continue;
        if (header_pending) {
            header_pending = false;
            continue;
        }
        const auto fields = split(line, format.delimiter);
        if (fields.size() < 3) malformed(line_no, "expected `src dst weight`");
        if (fields[0].empty() || fields[1].empty()) malformed(line_no, "empty node id");
        double w = 0.0;
        if (!parse_real(fields[2], w)) {
            malformed(line_no, "cannot parse weight '" + std::string(fields[2]) + "'");
        }
        ++local.records;
        if (fields[0] == fields[1]) {
            ++local.self_loops_dropped;
            continue;
        }
        if (w == 0.0) {
            ++local.zero_weight_dropped;
            continue;
        }
        const Index s = intern(fields[0]);
        const Index t = intern(fields[1]);
        edges.push_back({s, t, w});
    }
    if (stats) *stats = local;
    if (edges.empty()) throw InvalidInput("edge list contains no signed edges");
    const auto n = static_cast<Index>(ids.size());
    return SignedGraph::from_edges(n, edges, std::move(ids));
}

SignedGraph load_signed_edge_list(const std::filesystem::path& path, const EdgeListFormat& format,
                                  EdgeListStats* stats) {
    std::ifstream in(path);
    if (!in) throw InvalidInput("cannot open edge list " + path.string());
    return parse_signed_edge_list(in, format, stats);
}

void write_canonical_edge_list(std::ostream& out, const SignedGraph& g) {
    // (src, dst, sign order, weight)
    std::vector<std::tuple<Index, Index, int, double>> rows;
    auto collect = [&](const SparseMatrix& m, int order, double sign) {
        for (Index j = 0; j < m.outerSize(); ++j) {
            for (SparseMatrix::InnerIterator it(m, j); it; ++it) {
                if (it.row() < j) rows.emplace_back(it.row(), j, order, sign * it.value());
            }
        }
    };
    collect(g.positive(), 0, 1.0);
    collect(g.negative(), 1, -1.0);
    std::sort(rows.begin(), rows.end());
    const auto& ids = g.node_ids();
    for (const auto& [s, t, order, w] : rows) {
        out << ids[s] << ' ' << ids[t] << ' ' << format_real(w) << '\n';
    }
}

void write_canonical_edge_list(const std::filesystem::path& path, const SignedGraph& g) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw Error("cannot open " + path.string() + " for writing");
    write_canonical_edge_list(out, g);
    if (!out) throw Error("failed writing " + path.string());
}

Index LabelData::labeled_count() const {
    return std::count_if(classes.begin(), classes.end(), [](int c) { return c >= 0; });
}

LabelData LabelData::restricted(std::span<const Index> new_to_old) const {
    LabelData out;
    out.class_names = class_names;
    out.skipped = skipped;
    out.classes.reserve(new_to_old.size());
    for (Index old : new_to_old) out.classes.push_back(classes[static_cast<std::size_t>(old)]);
    return out;
}

LabelData parse_labels(std::istream& in, const SignedGraph& graph, bool strict,
                       Delimiter delimiter) {
    std::unordered_map<std::string_view, Index> index_of;
    for (Index i = 0; i < graph.size(); ++i) index_of.emplace(graph.node_ids()[i], i);

    LabelData out;
    out.classes.assign(static_cast<std::size_t>(graph.size()), -1);
    std::map<std::string, int> class_of;
    std::unordered_map<std::string, std::size_t> seen;  // node id -> line

    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (is_comment_or_blank(line, "#%")) continue;
        const auto fields = split(line, delimiter);
        if (fields.size() < 2 || fields[0].empty() || fields[1].empty()) {
            malformed(line_no, "expected `node_id label`");
        }
        const std::string id(fields[0]);
        if (auto [it, inserted] = seen.try_emplace(id, line_no); !inserted) {
            std::ostringstream os;
            os << "node '" << id << "' is labeled twice (lines " << it->second << " and " << line_no
               << ")";
            throw InvalidInput(os.str());
        }
        const auto node = index_of.find(id);
        if (node == index_of.end()) {
            if (strict) malformed(line_no, "node '" + id + "' is not in the graph");
            ++out.skipped;
            continue;
        }
        auto [cls, inserted] = class_of.try_emplace(std::string(fields[1]), out.num_classes());
        if (inserted) out.class_names.emplace_back(fields[1]);
        out.classes[static_cast<std::size_t>(node->second)] = cls->second;
    }
    return out;
}

LabelData load_labels(const std::filesystem::path& path, const SignedGraph& graph, bool strict,
                      Delimiter delimiter) {
    std::ifstream in(path);
    if (!in) throw InvalidInput("cannot open label file " + path.string());
    return parse_labels(in, graph, strict, delimiter);
}

void write_labels(std::ostream& out, const SignedGraph& graph, const LabelData& labels) {
    for (Index i = 0; i < graph.size(); ++i) {
        const int c = labels.classes[static_cast<std::size_t>(i)];
        if (c >= 0) out << graph.node_ids()[i] << ' ' << labels.class_names[c] << '\n';
    }
}

BinaryLabels to_binary(const LabelData& labels, const std::vector<bool>& mask) {
    if (labels.num_classes() != 2) {
        throw InvalidInput("binary labels need exactly two classes, found " +
                           std::to_string(labels.num_classes()));
    }
    if (mask.size() != labels.classes.size()) throw InvalidInput("mask size mismatch");
    Vector f = Vector::Zero(labels.size());
    for (Index i = 0; i < labels.size(); ++i) {
        const int c = labels.classes[static_cast<std::size_t>(i)];
        if (mask[i] && c >= 0) f[i] = c == 0 ? 1.0 : -1.0;
    }
    return BinaryLabels(std::move(f));
}

MulticlassLabels to_multiclass(const LabelData& labels, const std::vector<bool>& mask) {
    if (mask.size() != labels.classes.size()) throw InvalidInput("mask size mismatch");
    std::vector<int> visible(labels.classes.size(), -1);
    for (std::size_t i = 0; i < visible.size(); ++i) {
        if (mask[i]) visible[i] = labels.classes[i];
    }
    return MulticlassLabels(visible, labels.num_classes());
}

SsbmGraph generate_ssbm(const SsbmParams& p) {
    auto probability = [](double x) { return x >= 0.0 && x <= 1.0; };
    if (p.n < 0 || p.k < 1 || !probability(p.p_in) || !probability(p.p_out) || !probability(p.eta)) {
        throw InvalidInput("SSBM parameters out of range");
    }
    SsbmGraph out;
    out.blocks.resize(static_cast<std::size_t>(p.n));
    for (Index i = 0; i < p.n; ++i) {
        out.blocks[static_cast<std::size_t>(i)] = static_cast<int>((i * p.k) / std::max<Index>(p.n, 1));
    }
    Rng rng(p.seed);
    std::vector<WeightedEdge> edges;
    for (Index i = 0; i < p.n; ++i) {
        for (Index j = i + 1; j < p.n; ++j) {
            const bool same = out.blocks[i] == out.blocks[j];
            if (!(uniform01(rng) < (same ? p.p_in : p.p_out))) continue;
            double sign = same ? 1.0 : -1.0;
            if (p.eta > 0.0 && uniform01(rng) < p.eta) sign = -sign;
            edges.push_back({i, j, sign});
        }
    }
    out.graph = SignedGraph::from_edges(p.n, edges);
    return out;
}

LabelData labels_from_blocks(const std::vector<int>& blocks) {
    LabelData out;
    out.classes = blocks;
    const int k = blocks.empty() ? 0 : *std::max_element(blocks.begin(), blocks.end()) + 1;
    for (int c = 0; c < k; ++c) out.class_names.push_back(std::to_string(c));
    return out;
}

std::vector<bool> sample_labeled_nodes(const LabelData& labels, double fraction,
                                       std::uint64_t run_index, std::uint64_t base_seed) {
    if (!(fraction > 0.0 && fraction <= 1.0)) throw InvalidInput("label fraction must lie in (0, 1]");
    std::vector<Index> eligible;
    for (Index i = 0; i < labels.size(); ++i) {
        if (labels.classes[static_cast<std::size_t>(i)] >= 0) eligible.push_back(i);
    }
    // std::nearbyint rounds half to even under the default rounding mode.
    const auto count = static_cast<std::size_t>(
        std::nearbyint(fraction * static_cast<double>(eligible.size())));
    if (count == 0) {
        throw InvalidInput("label fraction " + format_real(fraction) + " selects no nodes out of " +
                           std::to_string(eligible.size()));
    }
    Rng rng(base_seed + run_index);
    for (std::size_t i = 0; i < count; ++i) {
        const auto j = i + uniform_index(rng, eligible.size() - i);
        std::swap(eligible[i], eligible[j]);
    }
    std::vector<bool> mask(labels.classes.size(), false);
    for (std::size_t i = 0; i < count; ++i) mask[eligible[i]] = true;
    return mask;
}

}  // namespace signedgl
