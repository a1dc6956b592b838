#include <signedgl/harness.hpp>

#include <signedgl/random.hpp>

#include <algorithm>
#include <atomic>
#include <bit>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>
#include <tuple>
#include <variant>

namespace signedgl {
namespace {

std::string lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

std::string format_real(double x) {
    if (std::isnan(x)) return "";
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x);
    return std::string(buf, ptr);
}

double parse_real_field(const std::string& s) {
    if (s.empty()) return std::numeric_limits<double>::quiet_NaN();
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) {
        throw InvalidInput("cannot parse number '" + s + "' in CSV");
    }
    return v;
}

long long parse_int_field(const std::string& s) {
    long long v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) {
        throw InvalidInput("cannot parse integer '" + s + "' in CSV");
    }
    return v;
}

std::string quote(const std::string& field) {
    if (field.find_first_of(",\"\r\n") == std::string::npos) return field;
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

// Predicted class ids from a binary sign readout: +1 -> class 0, -1 -> class 1.
std::vector<int> classes_from_signs(const std::vector<int>& signs) {
    std::vector<int> out(signs.size());
    std::transform(signs.begin(), signs.end(), out.begin(), [](int s) { return s > 0 ? 0 : 1; });
    return out;
}

struct ComponentData {
    SignedGraph graph;
    LabelData labels;
};

using CachedBasis = std::variant<Eigenbasis, std::string>;

struct Cell {
    Method method;
    double fraction;
    Index n_eigs;
    double omega0;
    double epsilon;
    int run;
};

auto record_key(const RunRecord& r) {
    return std::tie(r.method, r.fraction, r.n_eigs, r.omega0, r.epsilon, r.run);
}

auto summary_key(const SummaryRecord& r) {
    return std::tie(r.method, r.fraction, r.n_eigs, r.omega0, r.epsilon);
}

}  // namespace

std::filesystem::path eigen_cache_path(const std::filesystem::path& dir, const CacheKey& key) {
    char hash[17];
    std::snprintf(hash, sizeof(hash), "%016llx", static_cast<unsigned long long>(key.dataset_hash));
    std::string kind(to_string(key.kind));
    std::replace(kind.begin(), kind.end(), '+', 'p');
    std::replace(kind.begin(), kind.end(), '-', 'm');
    return dir / (std::string(hash) + "-" + kind + "-" + std::to_string(key.k) + ".eig");
}

namespace {

Eigenbasis cached_eigs(const OperatorHandle& op, const SignedGraph& g, Index k,
                       const ExperimentSpec& spec) {
    if (spec.cache_dir.empty()) return smallest_eigs(op, k, spec.base_seed, spec.eigen_options);
    const CacheKey key{graph_hash(g), op.spec().kind, k};
    const auto path = eigen_cache_path(spec.cache_dir, key);
    if (std::filesystem::exists(path)) return read_eigenbasis(path, key);
    Eigenbasis basis = smallest_eigs(op, k, spec.base_seed, spec.eigen_options);
    std::filesystem::create_directories(spec.cache_dir);
    write_eigenbasis(path, key, basis);
    return basis;
}

}  // namespace

std::string Method::name() const {
    if (gl_operator) return "GL(" + std::string(to_string(*gl_operator)) + ")";
    if (baseline) return *baseline == BaselineMethod::HF ? "HF" : "LGC";
    return "?";
}

Connectivity Method::component() const {
    if (baseline) return Connectivity::positive;
    if (gl_operator == OperatorKind::L_plus_sym) return Connectivity::positive;
    if (gl_operator == OperatorKind::Q_minus_sym) return Connectivity::negative;
    return Connectivity::signed_union;
}

std::optional<Method> parse_method(std::string_view text) {
    const std::string t = lower(text);
    if (t == "hf") return Method{std::nullopt, BaselineMethod::HF};
    if (t == "lgc") return Method{std::nullopt, BaselineMethod::LGC};
    std::string op;
    if (t.starts_with("gl-")) {
        op = t.substr(3);
    } else if (t.starts_with("gl(") && t.ends_with(")")) {
        op = t.substr(3, t.size() - 4);
    } else {
        return std::nullopt;
    }
    if (op == "lplus") op = "lsym+";
    if (op == "qminus") op = "qsym-";
    const auto kind = parse_operator_kind(op);
    if (!kind) return std::nullopt;
    return Method{*kind, std::nullopt};
}

std::vector<Method> default_methods() {
    return {
        Method{OperatorKind::L_plus_sym, std::nullopt}, Method{OperatorKind::Q_minus_sym, std::nullopt},
        Method{OperatorKind::SN, std::nullopt},         Method{OperatorKind::SPONGE, std::nullopt},
        Method{OperatorKind::AM, std::nullopt},         Method{std::nullopt, BaselineMethod::HF},
        Method{std::nullopt, BaselineMethod::LGC},
    };
}

DatasetRef parse_dataset_ref(const std::string& text, const std::filesystem::path& labels) {
    DatasetRef ref;
    if (!text.starts_with("ssbm:") && text != "ssbm") {
        ref.edges = text;
        ref.labels = labels;
        return ref;
    }
    SsbmParams p;
    std::string_view rest = text.size() > 5 ? std::string_view(text).substr(5) : std::string_view{};
    while (!rest.empty()) {
        const auto comma = rest.find(',');
        const std::string_view item = rest.substr(0, comma);
        rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
        const auto eq = item.find('=');
        if (eq == std::string_view::npos) throw InvalidInput("bad SSBM parameter '" + std::string(item) + "'");
        const std::string key = lower(item.substr(0, eq));
        const std::string value(item.substr(eq + 1));
        const double v = parse_real_field(value);
        if (key == "n") p.n = static_cast<Index>(v);
        else if (key == "k") p.k = static_cast<int>(v);
        else if (key == "p_in") p.p_in = v;
        else if (key == "p_out") p.p_out = v;
        else if (key == "p") p.p_in = p.p_out = v;
        else if (key == "eta") p.eta = v;
        else if (key == "seed") p.seed = static_cast<std::uint64_t>(parse_int_field(value));
        else throw InvalidInput("unknown SSBM parameter '" + key + "'");
    }
    ref.ssbm = p;
    return ref;
}

Dataset load_dataset(const DatasetRef& ref) {
    if (ref.ssbm) {
        SsbmGraph s = generate_ssbm(*ref.ssbm);
        LabelData labels = labels_from_blocks(s.blocks);
        return {std::move(s.graph), std::move(labels)};
    }
    SignedGraph g = load_signed_edge_list(ref.edges, ref.format);
    if (ref.labels.empty()) throw InvalidInput("a label file is required for " + ref.edges.string());
    LabelData labels = load_labels(ref.labels, g, ref.strict_labels, ref.format.delimiter);
    return {std::move(g), std::move(labels)};
}

void ExperimentSpec::validate() const {
    if (methods.empty() || fractions.empty() || omega0s.empty() || epsilons.empty()) {
        throw InvalidInput("experiment lists must be nonempty");
    }
    const bool any_gl = std::any_of(methods.begin(), methods.end(),
                                    [](const Method& m) { return m.gl_operator.has_value(); });
    if (any_gl && n_eigs.empty()) throw InvalidInput("GL methods need at least one n_eigs value");
    for (double f : fractions) {
        if (!(f > 0.0 && f <= 1.0)) throw InvalidInput("label fractions must lie in (0, 1]");
    }
    for (Index k : n_eigs) {
        if (k < 1) throw InvalidInput("n_eigs values must be positive");
    }
    if (runs < 1) throw InvalidInput("runs must be positive");
    if (threads < 1) throw InvalidInput("threads must be positive");
}

std::optional<double> ExperimentResult::mean_accuracy(const std::string& method) const {
    double sum = 0.0;
    int count = 0;
    for (const auto& r : runs) {
        if (r.method == method && r.error.empty()) {
            sum += r.accuracy;
            ++count;
        }
    }
    if (count == 0) return std::nullopt;
    return sum / count;
}

double accuracy(std::span<const int> predicted, std::span<const int> truth,
                const std::vector<bool>& eval_mask) {
    if (predicted.size() != truth.size() || truth.size() != eval_mask.size()) {
        throw InvalidInput("accuracy: prediction, truth and mask differ in size");
    }
    std::size_t total = 0;
    std::size_t hits = 0;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        if (!eval_mask[i]) continue;
        ++total;
        if (predicted[i] == truth[i]) ++hits;
    }
    if (total == 0) throw InvalidInput("accuracy: evaluation set is empty");
    return static_cast<double>(hits) / static_cast<double>(total);
}

ExperimentResult run_experiment(const DatasetRef& ref, const ExperimentSpec& spec) {
    return run_experiment(load_dataset(ref), spec);
}

ExperimentResult run_experiment(const Dataset& data, const ExperimentSpec& spec) {
    spec.validate();

    std::map<Connectivity, ComponentData> components;
    for (const auto& m : spec.methods) {
        const Connectivity mode = m.component();
        if (components.contains(mode)) continue;
        Component c = largest_connected_component(data.graph, mode);
        components.emplace(mode, ComponentData{std::move(c.graph), data.labels.restricted(c.new_to_old)});
    }

    // Eigenbases are computed up front and only read afterwards.
    std::map<std::pair<OperatorKind, Index>, CachedBasis> bases;
    for (const auto& m : spec.methods) {
        if (!m.gl_operator) continue;
        const ComponentData& comp = components.at(m.component());
        std::optional<OperatorHandle> op;
        std::string op_error;
        try {
            op = build_operator(comp.graph, OperatorSpec{*m.gl_operator});
        } catch (const std::exception& e) {
            op_error = e.what();
        }
        for (Index k : spec.n_eigs) {
            const auto key = std::make_pair(*m.gl_operator, k);
            if (bases.contains(key)) continue;
            if (!op) {
                bases.emplace(key, op_error);
                continue;
            }
            try {
                bases.emplace(key, cached_eigs(*op, comp.graph, k, spec));
            } catch (const std::exception& e) {
                bases.emplace(key, std::string(e.what()));
            }
        }
    }

    std::vector<Cell> cells;
    for (const auto& m : spec.methods) {
        for (double fraction : spec.fractions) {
            for (int run = 0; run < spec.runs; ++run) {
                if (m.baseline) {
                    cells.push_back({m, fraction, 0, 0.0, 0.0, run});
                    continue;
                }
                for (Index k : spec.n_eigs) {
                    for (double omega0 : spec.omega0s) {
                        for (double eps : spec.epsilons) {
                            cells.push_back({m, fraction, k, omega0, eps, run});
                        }
                    }
                }
            }
        }
    }

    auto execute = [&](const Cell& cell) {
        RunRecord rec;
        rec.method = cell.method.name();
        rec.fraction = cell.fraction;
        rec.n_eigs = cell.n_eigs;
        rec.omega0 = cell.omega0;
        rec.epsilon = cell.epsilon;
        rec.run = cell.run;
        const auto start = std::chrono::steady_clock::now();
        try {
            const ComponentData& comp = components.at(cell.method.component());
            const std::uint64_t mask_seed =
                hash_combine(hash_combine(spec.base_seed, fnv1a(rec.method)),
                             std::bit_cast<std::uint64_t>(cell.fraction));
            const auto mask = sample_labeled_nodes(comp.labels, cell.fraction,
                                                   static_cast<std::uint64_t>(cell.run), mask_seed);
            const bool binary = comp.labels.num_classes() == 2;
            std::vector<int> predicted;

            if (cell.method.baseline) {
                const BaselineSpec bs{*cell.method.baseline, spec.lgc_alpha};
                const SparseMatrix& wp = comp.graph.positive();
                if (binary) {
                    predicted = classes_from_signs(run_baseline(bs, wp, to_binary(comp.labels, mask)).labels);
                } else {
                    predicted = run_baseline(bs, wp, to_multiclass(comp.labels, mask)).labels;
                }
            } else {
                const auto& cached = bases.at({*cell.method.gl_operator, cell.n_eigs});
                if (const auto* err = std::get_if<std::string>(&cached)) throw Error(*err);
                const Eigenbasis& basis = std::get<Eigenbasis>(cached);
                GLParams params;
                params.epsilon = cell.epsilon;
                params.omega0 = cell.omega0;
                params.tau = spec.tau;
                params.max_iter = spec.max_iter;
                params.tol = spec.tol;
                const GLConfig cfg(params);
                if (binary) {
                    const auto res = gl_binary(basis, to_binary(comp.labels, mask), cfg);
                    predicted = classes_from_signs(res.labels);
                    rec.iterations = res.diagnostics.iterations;
                } else {
                    const std::uint64_t init_seed =
                        hash_combine(mask_seed, static_cast<std::uint64_t>(cell.run));
                    const auto res = gl_multiclass(basis, to_multiclass(comp.labels, mask), cfg, init_seed);
                    predicted = res.labels;
                    rec.iterations = res.diagnostics.iterations;
                }
            }

            std::vector<bool> eval(mask.size());
            for (std::size_t i = 0; i < mask.size(); ++i) eval[i] = !mask[i] && comp.labels.classes[i] >= 0;
            rec.accuracy = accuracy(predicted, comp.labels.classes, eval);
        } catch (const std::exception& e) {
            rec.error = e.what();
            rec.accuracy = std::numeric_limits<double>::quiet_NaN();
        }
        rec.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        return rec;
    };

    ExperimentResult result;
    result.runs.resize(cells.size());
    const int workers = std::min<int>(spec.threads, static_cast<int>(cells.size()));
    if (workers <= 1) {
        for (std::size_t i = 0; i < cells.size(); ++i) result.runs[i] = execute(cells[i]);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::jthread> pool;
        for (int w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (std::size_t i = next++; i < cells.size(); i = next++) result.runs[i] = execute(cells[i]);
            });
        }
    }
    std::sort(result.runs.begin(), result.runs.end(),
              [](const RunRecord& a, const RunRecord& b) { return record_key(a) < record_key(b); });

    for (std::size_t i = 0; i < result.runs.size();) {
        std::size_t j = i;
        SummaryRecord s;
        const RunRecord& head = result.runs[i];
        s.method = head.method;
        s.fraction = head.fraction;
        s.n_eigs = head.n_eigs;
        s.omega0 = head.omega0;
        s.epsilon = head.epsilon;
        double sum = 0.0;
        double sum_sq = 0.0;
        double iters = 0.0;
        double wall = 0.0;
        int ok = 0;
        for (; j < result.runs.size() &&
               std::tie(result.runs[j].method, result.runs[j].fraction, result.runs[j].n_eigs,
                        result.runs[j].omega0, result.runs[j].epsilon) == summary_key(s);
             ++j) {
            const RunRecord& r = result.runs[j];
            ++s.runs;
            wall += r.wall_time;
            if (!r.error.empty()) {
                ++s.failed;
                continue;
            }
            ++ok;
            sum += r.accuracy;
            sum_sq += r.accuracy * r.accuracy;
            iters += r.iterations;
        }
        if (ok > 0) {
            s.accuracy = sum / ok;
            s.accuracy_std = std::sqrt(std::max(0.0, sum_sq / ok - s.accuracy * s.accuracy));
            s.iterations = iters / ok;
        } else {
            s.accuracy = s.accuracy_std = s.iterations = std::numeric_limits<double>::quiet_NaN();
        }
        s.wall_time = wall / s.runs;
        result.summary.push_back(std::move(s));
        i = j;
    }
    return result;
}

// ---------------------------------------------------------------------------
// CSV

namespace {

const std::vector<std::string> kColumns = {
    "record", "method", "fraction", "n_eigs", "omega0", "epsilon", "run",
    "accuracy", "accuracy_std", "iterations", "failed", "error"};

}  // namespace

void emit_csv(std::ostream& out, const ExperimentResult& result, bool include_timing) {
    auto write_row = [&](const std::vector<std::string>& fields) {
        for (std::size_t i = 0; i < fields.size(); ++i) {
            if (i) out << ',';
            out << quote(fields[i]);
        }
        out << "\r\n";
    };
    std::vector<std::string> header = kColumns;
    if (include_timing) header.push_back("wall_time");
    write_row(header);

    std::vector<SummaryRecord> summary = result.summary;
    std::sort(summary.begin(), summary.end(),
              [](const SummaryRecord& a, const SummaryRecord& b) { return summary_key(a) < summary_key(b); });
    for (const auto& s : summary) {
        std::vector<std::string> f = {"mean",
                                      s.method,
                                      format_real(s.fraction),
                                      std::to_string(s.n_eigs),
                                      format_real(s.omega0),
                                      format_real(s.epsilon),
                                      "-1",
                                      format_real(s.accuracy),
                                      format_real(s.accuracy_std),
                                      format_real(s.iterations),
                                      std::to_string(s.failed),
                                      ""};
        if (include_timing) f.push_back(format_real(s.wall_time));
        write_row(f);
    }

    std::vector<RunRecord> runs = result.runs;
    std::sort(runs.begin(), runs.end(),
              [](const RunRecord& a, const RunRecord& b) { return record_key(a) < record_key(b); });
    for (const auto& r : runs) {
        std::vector<std::string> f = {"run",
                                      r.method,
                                      format_real(r.fraction),
                                      std::to_string(r.n_eigs),
                                      format_real(r.omega0),
                                      format_real(r.epsilon),
                                      std::to_string(r.run),
                                      format_real(r.accuracy),
                                      "0",
                                      std::to_string(r.iterations),
                                      r.error.empty() ? "0" : "1",
                                      r.error};
        if (include_timing) f.push_back(format_real(r.wall_time));
        write_row(f);
    }
}

void emit_csv(const std::filesystem::path& path, const ExperimentResult& result, bool include_timing) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open " + path.string() + " for writing");
    emit_csv(out, result, include_timing);
    if (!out) throw Error("failed writing " + path.string());
}

std::vector<std::vector<std::string>> parse_csv_records(std::istream& in) {
    std::vector<std::vector<std::string>> records;
    std::vector<std::string> record;
    std::string field;
    bool quoted = false;
    bool field_started = false;
    char c;
    auto end_field = [&] {
        record.push_back(std::move(field));
        field.clear();
        field_started = false;
    };
    auto end_record = [&] {
        end_field();
        records.push_back(std::move(record));
        record.clear();
    };
    while (in.get(c)) {
        if (quoted) {
            if (c == '"') {
                if (in.peek() == '"') {
                    in.get(c);
                    field += '"';
                } else {
                    quoted = false;
                }
            } else {
                field += c;
            }
            continue;
        }
        if (c == '"' && !field_started) {
            quoted = true;
            field_started = true;
        } else if (c == ',') {
            end_field();
        } else if (c == '\r' && in.peek() == '\n') {
            in.get(c);
            end_record();
        } else if (c == '\n') {
            end_record();
        } else {
            field += c;
            field_started = true;
        }
    }
    if (quoted) throw InvalidInput("CSV ends inside a quoted field");
    if (field_started || !record.empty()) end_record();
    return records;
}

ExperimentResult parse_csv(std::istream& in) {
    const auto records = parse_csv_records(in);
    if (records.empty()) throw InvalidInput("CSV has no header");
    const auto& header = records.front();
    if (header.size() < kColumns.size() || !std::equal(kColumns.begin(), kColumns.end(), header.begin())) {
        throw InvalidInput("unexpected CSV header");
    }
    const bool timing = header.size() > kColumns.size() && header[kColumns.size()] == "wall_time";

    ExperimentResult out;
    for (std::size_t r = 1; r < records.size(); ++r) {
        const auto& f = records[r];
        if (f.size() != header.size()) throw InvalidInput("CSV row " + std::to_string(r) + " has wrong arity");
        const double wall = timing ? parse_real_field(f[12]) : 0.0;
        if (f[0] == "mean") {
            SummaryRecord s;
            s.method = f[1];
            s.fraction = parse_real_field(f[2]);
            s.n_eigs = static_cast<Index>(parse_int_field(f[3]));
            s.omega0 = parse_real_field(f[4]);
            s.epsilon = parse_real_field(f[5]);
            s.accuracy = parse_real_field(f[7]);
            s.accuracy_std = parse_real_field(f[8]);
            s.iterations = parse_real_field(f[9]);
            s.failed = static_cast<int>(parse_int_field(f[10]));
            s.wall_time = wall;
            out.summary.push_back(std::move(s));
        } else if (f[0] == "run") {
            RunRecord rr;
            rr.method = f[1];
            rr.fraction = parse_real_field(f[2]);
            rr.n_eigs = static_cast<Index>(parse_int_field(f[3]));
            rr.omega0 = parse_real_field(f[4]);
            rr.epsilon = parse_real_field(f[5]);
            rr.run = static_cast<int>(parse_int_field(f[6]));
            rr.accuracy = parse_real_field(f[7]);
            rr.iterations = static_cast<int>(parse_int_field(f[9]));
            rr.error = f[11];
            rr.wall_time = wall;
            out.runs.push_back(std::move(rr));
        } else {
            throw InvalidInput("unknown CSV record kind '" + f[0] + "'");
        }
    }
    // Run counts per summary cell are implied by the run rows.
    for (auto& s : out.summary) {
        s.runs = static_cast<int>(std::count_if(out.runs.begin(), out.runs.end(), [&](const RunRecord& r) {
            return std::tie(r.method, r.fraction, r.n_eigs, r.omega0, r.epsilon) == summary_key(s);
        }));
    }
    return out;
}

ExperimentResult read_csv(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InvalidInput("cannot open " + path.string());
    return parse_csv(in);
}

}  // namespace signedgl
