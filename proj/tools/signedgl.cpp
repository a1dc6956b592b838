#include <signedgl/harness.hpp>
#include <signedgl/spectral.hpp>

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

namespace {

using namespace signedgl;

struct DatasetOptions {
    std::string dataset;
    std::string labels;
    std::string delimiter = "whitespace";
    bool header = false;
    bool strict_labels = false;

    void add_to(CLI::App* app, bool with_labels) {
        app->add_option("-d,--dataset", dataset,
                        "Edge list path, or ssbm:n=..,k=..,p_in=..,p_out=..,eta=..,seed=..")
            ->required();
        if (with_labels) {
            app->add_option("-l,--labels", labels, "Label file (node_id label per row)");
            app->add_flag("--strict-labels", strict_labels, "Fail on labels for unknown nodes");
        }
        app->add_option("--delimiter", delimiter, "Column delimiter of input files")
            ->check(CLI::IsMember({"whitespace", "comma"}));
        app->add_flag("--header", header, "Skip the first data line of the edge list");
    }

    DatasetRef ref() const {
        DatasetRef r = parse_dataset_ref(dataset, labels);
        r.format.delimiter = delimiter == "comma" ? Delimiter::comma : Delimiter::whitespace;
        r.format.header = header;
        r.strict_labels = strict_labels;
        return r;
    }

    SignedGraph graph() const {
        const DatasetRef r = ref();
        if (r.ssbm) return generate_ssbm(*r.ssbm).graph;
        return load_signed_edge_list(r.edges, r.format);
    }
};

std::vector<Method> parse_methods(const std::vector<std::string>& names) {
    std::vector<Method> out;
    for (const auto& n : names) {
        const auto m = parse_method(n);
        if (!m) throw InvalidInput("unknown method '" + n + "'");
        out.push_back(*m);
    }
    return out;
}

std::string method_list_help() {
    return "Methods: gl-<operator> (operators L, Lsym, Q, Qsym, Lsym+ (lplus), Qsym- (qminus), "
           "SR, SN, BR, BN, SP, AM, GM), hf, lgc";
}

double smallest_eigenvalue(const SignedGraph& g, OperatorKind kind, std::uint64_t seed) {
    const auto op = build_operator(g, OperatorSpec{kind});
    return smallest_eigs(op, 1, seed).values[0];
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Ginzburg-Landau node classification on signed graphs"};
    app.require_subcommand(1);
    app.set_config("--config", "", "Key-value config file with one [section] per subcommand; "
                                   "command-line flags take precedence");

    // run ------------------------------------------------------------------
    auto* run = app.add_subcommand("run", "Run a classification experiment and write a CSV");
    DatasetOptions run_data;
    run_data.add_to(run, true);
    std::vector<std::string> method_names{"gl-lsym+", "gl-qsym-", "gl-sn", "gl-sp", "gl-am", "hf", "lgc"};
    ExperimentSpec spec;
    spec.fractions = {0.05};
    spec.n_eigs = {10};
    std::string out_path = "-";
    bool timings = false;
    std::string cache_dir;
    run->add_option("-m,--methods", method_names, method_list_help())->delimiter(',')->capture_default_str();
    run->add_option("-f,--fractions", spec.fractions, "Label fractions in (0, 1]")->delimiter(',')->capture_default_str();
    run->add_option("--neigs", spec.n_eigs, "Eigenbasis sizes N_e")->delimiter(',')->capture_default_str();
    run->add_option("--omega0", spec.omega0s, "Fidelity weights")->delimiter(',')->capture_default_str();
    run->add_option("--epsilon", spec.epsilons, "Interface parameters")->delimiter(',')->capture_default_str();
    run->add_option("--runs", spec.runs, "Runs per cell")->check(CLI::PositiveNumber)->capture_default_str();
    run->add_option("--seed", spec.base_seed, "Base seed")->capture_default_str();
    run->add_option("--tau", spec.tau, "Time step")->capture_default_str();
    run->add_option("--max-iter", spec.max_iter, "Iteration cap")->capture_default_str();
    run->add_option("--tol", spec.tol, "Relative change stopping tolerance")->capture_default_str();
    run->add_option("--lgc-alpha", spec.lgc_alpha, "LGC propagation parameter")->capture_default_str();
    run->add_option("--threads", spec.threads, "Worker threads")->check(CLI::PositiveNumber)->capture_default_str();
    run->add_option("--cache-dir", cache_dir, "Eigenbasis cache directory");
    run->add_option("-o,--out", out_path, "Output CSV path ('-' for stdout)")->capture_default_str();
    run->add_flag("--timings", timings, "Append a wall_time column");

    // ssbm -----------------------------------------------------------------
    auto* ssbm = app.add_subcommand("ssbm", "Sample a signed stochastic block model");
    SsbmParams sp;
    std::string ssbm_edges;
    std::string ssbm_labels;
    ssbm->add_option("-n,--nodes", sp.n, "Number of nodes")->capture_default_str();
    ssbm->add_option("-k,--blocks", sp.k, "Number of blocks")->capture_default_str();
    ssbm->add_option("--p-in", sp.p_in, "Within-block edge probability")->capture_default_str();
    ssbm->add_option("--p-out", sp.p_out, "Cross-block edge probability")->capture_default_str();
    ssbm->add_option("--eta", sp.eta, "Sign-flip probability")->capture_default_str();
    ssbm->add_option("--seed", sp.seed, "Seed")->capture_default_str();
    ssbm->add_option("--edges", ssbm_edges, "Output edge list")->required();
    ssbm->add_option("--labels", ssbm_labels, "Output label file");

    // eigs -----------------------------------------------------------------
    auto* eigs = app.add_subcommand("eigs", "Precompute eigenbases into a cache directory");
    DatasetOptions eig_data;
    eig_data.add_to(eigs, false);
    std::vector<std::string> eig_ops{"SN"};
    std::vector<Index> eig_k{10};
    std::uint64_t eig_seed = 0;
    std::string eig_cache;
    eigs->add_option("--operators", eig_ops, "Operator names")->delimiter(',')->capture_default_str();
    eigs->add_option("--neigs", eig_k, "Eigenbasis sizes")->delimiter(',')->capture_default_str();
    eigs->add_option("--seed", eig_seed, "Lanczos start seed (match run --seed)")->capture_default_str();
    eigs->add_option("--cache-dir", eig_cache, "Cache directory")->required();

    // balance-check ----------------------------------------------------------
    auto* balance = app.add_subcommand("balance-check", "Report the smallest eigenvalues of L_SR and L_SN");
    DatasetOptions bal_data;
    bal_data.add_to(balance, false);
    double bal_tol = 1e-10;
    bool whole_graph = false;
    balance->add_option("--tol", bal_tol, "Threshold for calling the graph balanced")->capture_default_str();
    balance->add_flag("--whole-graph", whole_graph, "Skip largest-component extraction");

    // stats ------------------------------------------------------------------
    auto* stats = app.add_subcommand("stats", "Print node and edge counts of a dataset and its components");
    DatasetOptions stat_data;
    stat_data.add_to(stats, false);

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run) {
            spec.methods = parse_methods(method_names);
            spec.cache_dir = cache_dir;
            const auto result = run_experiment(run_data.ref(), spec);
            if (out_path == "-") {
                emit_csv(std::cout, result, timings);
            } else {
                emit_csv(std::filesystem::path(out_path), result, timings);
            }
            std::size_t failed = 0;
            for (const auto& r : result.runs) failed += r.error.empty() ? 0 : 1;
            if (failed > 0) std::cerr << failed << " of " << result.runs.size() << " runs failed\n";
        } else if (*ssbm) {
            const SsbmGraph g = generate_ssbm(sp);
            write_canonical_edge_list(std::filesystem::path(ssbm_edges), g.graph);
            if (!ssbm_labels.empty()) {
                std::ofstream out(ssbm_labels, std::ios::trunc);
                if (!out) throw Error("cannot open " + ssbm_labels + " for writing");
                write_labels(out, g.graph, labels_from_blocks(g.blocks));
            }
        } else if (*eigs) {
            const SignedGraph g = eig_data.graph();
            for (const auto& name : eig_ops) {
                const auto m = parse_method("gl-" + name);
                if (!m) throw InvalidInput("unknown operator '" + name + "'");
                const Component c = largest_connected_component(g, m->component());
                const auto op = build_operator(c.graph, OperatorSpec{*m->gl_operator});
                for (Index k : eig_k) {
                    const CacheKey key{graph_hash(c.graph), *m->gl_operator, k};
                    const Eigenbasis basis = smallest_eigs(op, k, eig_seed);
                    std::filesystem::create_directories(eig_cache);
                    const auto path = eigen_cache_path(eig_cache, key);
                    write_eigenbasis(path, key, basis);
                    std::cout << to_string(*m->gl_operator) << " k=" << k << " n=" << c.graph.size()
                              << " lambda=[" << basis.values.minCoeff() << ", " << basis.values.maxCoeff()
                              << "] residual=" << max_residual(op, basis) << " -> " << path.string() << '\n';
                }
            }
        } else if (*balance) {
            SignedGraph g = bal_data.graph();
            if (!whole_graph) g = largest_connected_component(g, Connectivity::signed_union).graph;
            const double sr = smallest_eigenvalue(g, OperatorKind::SR, 0);
            const double sn = smallest_eigenvalue(g, OperatorKind::SN, 0);
            std::printf("nodes %lld\nedges %lld\nlambda_min(L_SR) %.6e\nlambda_min(L_SN) %.6e\nbalanced %s\n",
                        static_cast<long long>(g.size()), static_cast<long long>(g.edge_count()), sr, sn,
                        sr <= bal_tol ? "yes" : "no");
        } else if (*stats) {
            const SignedGraph g = stat_data.graph();
            auto line = [](const char* name, const SignedGraph& h) {
                const auto pos = h.positive_edge_count();
                const auto neg = h.negative_edge_count();
                const double share = pos + neg > 0 ? 100.0 * pos / static_cast<double>(pos + neg) : 0.0;
                std::printf("%-8s nodes %lld edges %lld positive %.1f%%\n", name, static_cast<long long>(h.size()),
                            static_cast<long long>(pos + neg), share);
            };
            line("graph", g);
            line("LCC(G+)", largest_connected_component(g, Connectivity::positive).graph);
            line("LCC(G-)", largest_connected_component(g, Connectivity::negative).graph);
            line("LCC(G+-)", largest_connected_component(g, Connectivity::signed_union).graph);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
