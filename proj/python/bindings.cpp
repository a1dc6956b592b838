#include <signedgl/harness.hpp>

#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

namespace py = pybind11;
using namespace signedgl;

namespace {

OperatorKind kind_from(const std::string& name) {
    if (auto k = parse_operator_kind(name)) return *k;
    throw InvalidInput("unknown operator '" + name + "'");
}

Method method_from(const std::string& name) {
    if (auto m = parse_method(name)) return *m;
    throw InvalidInput("unknown method '" + name + "'");
}

SignedGraph graph_from_edges(Index n, const std::vector<std::tuple<Index, Index, double>>& edges,
                             std::vector<std::string> node_ids) {
    std::vector<WeightedEdge> list;
    list.reserve(edges.size());
    for (const auto& [s, t, w] : edges) list.push_back({s, t, w});
    return SignedGraph::from_edges(n, list, std::move(node_ids));
}

GLParams gl_params(double epsilon, double omega0, std::optional<double> c, double tau, int max_iter,
                   double tol) {
    GLParams p;
    p.epsilon = epsilon;
    p.omega0 = omega0;
    p.c = c;
    p.tau = tau;
    p.max_iter = max_iter;
    p.tol = tol;
    return p;
}

py::dict summary_dict(const SummaryRecord& s) {
    py::dict d;
    d["method"] = s.method;
    d["fraction"] = s.fraction;
    d["n_eigs"] = s.n_eigs;
    d["omega0"] = s.omega0;
    d["epsilon"] = s.epsilon;
    d["runs"] = s.runs;
    d["failed"] = s.failed;
    d["accuracy"] = s.accuracy;
    d["accuracy_std"] = s.accuracy_std;
    d["iterations"] = s.iterations;
    return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Ginzburg-Landau node classification on signed graphs";

    auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
    py::register_exception<InvalidInput>(m, "InvalidInput", base.ptr());
    py::register_exception<UnsupportedOperation>(m, "UnsupportedOperation", base.ptr());
    py::register_exception<NotPsdError>(m, "NotPsdError", base.ptr());
    py::register_exception<ConvergenceError>(m, "ConvergenceError", base.ptr());
    py::register_exception<DivergenceError>(m, "DivergenceError", base.ptr());

    py::class_<SignedGraph>(m, "SignedGraph")
        .def(py::init<SparseMatrix, SparseMatrix, std::vector<std::string>>(), py::arg("positive"),
             py::arg("negative"), py::arg("node_ids") = std::vector<std::string>{})
        .def_static("from_edges", &graph_from_edges, py::arg("n"), py::arg("edges"),
                    py::arg("node_ids") = std::vector<std::string>{},
                    "Build from (source, target, signed weight) triples.")
        .def_property_readonly("size", &SignedGraph::size)
        .def_property_readonly("positive", &SignedGraph::positive)
        .def_property_readonly("negative", &SignedGraph::negative)
        .def_property_readonly("node_ids", &SignedGraph::node_ids)
        .def_property_readonly("edge_count", &SignedGraph::edge_count)
        .def_property_readonly("positive_edge_count", &SignedGraph::positive_edge_count)
        .def_property_readonly("negative_edge_count", &SignedGraph::negative_edge_count)
        .def("signed_adjacency", &SignedGraph::signed_adjacency)
        .def("__len__", &SignedGraph::size);

    m.def(
        "largest_component",
        [](const SignedGraph& g, const std::string& mode) {
            Connectivity c = Connectivity::signed_union;
            if (mode == "positive") c = Connectivity::positive;
            else if (mode == "negative") c = Connectivity::negative;
            else if (mode != "signed") throw InvalidInput("mode must be 'positive', 'negative' or 'signed'");
            Component comp = largest_connected_component(g, c);
            return py::make_tuple(comp.graph, comp.new_to_old);
        },
        py::arg("graph"), py::arg("mode") = "signed",
        "Largest connected component and the original index of each retained node.");

    m.def(
        "operator_matrix",
        [](const SignedGraph& g, const std::string& kind) -> py::object {
            OperatorHandle op = build_operator(g, {kind_from(kind)});
            if (op.is_generalized()) return py::make_tuple(op.matrix(), op.mass());
            return py::cast(op.matrix());
        },
        py::arg("graph"), py::arg("kind"),
        "Sparse operator matrix, or the (A, B) pair for SPONGE.");

    m.def(
        "smallest_eigs",
        [](const SignedGraph& g, const std::string& kind, Index k, std::uint64_t seed) {
            Eigenbasis b = smallest_eigs(build_operator(g, {kind_from(kind)}), k, seed);
            return py::make_tuple(b.values, b.vectors);
        },
        py::arg("graph"), py::arg("kind"), py::arg("k"), py::arg("seed") = 0);

    m.def("simplex_project", &simplex_project, py::arg("v"));

    m.def(
        "classify_binary",
        [](const SignedGraph& g, const std::string& kind, const std::vector<int>& signs, Index n_eigs,
           std::uint64_t seed, double epsilon, double omega0, std::optional<double> c, double tau,
           int max_iter, double tol) {
            const GLConfig cfg(gl_params(epsilon, omega0, c, tau, max_iter, tol));
            const Eigenbasis b = smallest_eigs(build_operator(g, {kind_from(kind)}), n_eigs, seed);
            BinaryResult r = gl_binary(b, BinaryLabels::from_signs(signs), cfg);
            return py::make_tuple(r.labels, r.u, r.diagnostics.iterations);
        },
        py::arg("graph"), py::arg("kind"), py::arg("signs"), py::arg("n_eigs"), py::arg("seed") = 0,
        py::arg("epsilon") = 0.1, py::arg("omega0") = 1e3, py::arg("c") = py::none(), py::arg("tau") = 0.1,
        py::arg("max_iter") = 2000, py::arg("tol") = 1e-6,
        "Binary GL classification. `signs` holds +1/-1 for labeled nodes and 0 elsewhere. "
        "Returns (labels, u, iterations).");

    m.def(
        "classify_multiclass",
        [](const SignedGraph& g, const std::string& kind, const std::vector<int>& classes, int num_classes,
           Index n_eigs, std::uint64_t seed, double epsilon, double omega0, std::optional<double> c,
           double tau, int max_iter, double tol) {
            const GLConfig cfg(gl_params(epsilon, omega0, c, tau, max_iter, tol));
            const Eigenbasis b = smallest_eigs(build_operator(g, {kind_from(kind)}), n_eigs, seed);
            MulticlassResult r = gl_multiclass(b, MulticlassLabels(classes, num_classes), cfg, seed);
            return py::make_tuple(r.labels, r.u, r.diagnostics.iterations);
        },
        py::arg("graph"), py::arg("kind"), py::arg("classes"), py::arg("num_classes"), py::arg("n_eigs"),
        py::arg("seed") = 0, py::arg("epsilon") = 0.1, py::arg("omega0") = 1e3, py::arg("c") = py::none(),
        py::arg("tau") = 0.1, py::arg("max_iter") = 2000, py::arg("tol") = 1e-6,
        "Multiclass GL classification. `classes` holds a class id or -1 for unlabeled nodes. "
        "Returns (labels, U, iterations).");

    m.def(
        "harmonic_functions",
        [](const SignedGraph& g, const std::vector<int>& classes, int num_classes) {
            return harmonic_functions(g.positive(), MulticlassLabels(classes, num_classes)).labels;
        },
        py::arg("graph"), py::arg("classes"), py::arg("num_classes"));

    m.def(
        "local_global",
        [](const SignedGraph& g, const std::vector<int>& classes, int num_classes, double alpha) {
            return local_global(g.positive(), MulticlassLabels(classes, num_classes), alpha).labels;
        },
        py::arg("graph"), py::arg("classes"), py::arg("num_classes"), py::arg("alpha") = 0.99);

    m.def(
        "ssbm",
        [](Index n, int k, double p_in, double p_out, double eta, std::uint64_t seed) {
            SsbmParams p;
            p.n = n;
            p.k = k;
            p.p_in = p_in;
            p.p_out = p_out;
            p.eta = eta;
            p.seed = seed;
            SsbmGraph s = generate_ssbm(p);
            return py::make_tuple(s.graph, s.blocks);
        },
        py::arg("n") = 200, py::arg("k") = 2, py::arg("p_in") = 0.1, py::arg("p_out") = 0.1,
        py::arg("eta") = 0.0, py::arg("seed") = 0, "Returns (graph, blocks).");

    m.def(
        "load_edge_list",
        [](const std::filesystem::path& path) { return load_signed_edge_list(path); }, py::arg("path"));

    m.def(
        "run_experiment",
        [](const std::string& dataset, const std::vector<std::string>& methods, const std::vector<double>& fractions,
           const std::vector<Index>& n_eigs, int runs, std::uint64_t seed, const std::filesystem::path& labels,
           int threads) {
            ExperimentSpec spec;
            for (const auto& name : methods) spec.methods.push_back(method_from(name));
            spec.fractions = fractions;
            spec.n_eigs = n_eigs;
            spec.runs = runs;
            spec.base_seed = seed;
            spec.threads = threads;
            ExperimentResult r;
            {
                py::gil_scoped_release release;
                r = run_experiment(parse_dataset_ref(dataset, labels), spec);
            }
            std::ostringstream csv;
            emit_csv(csv, r);
            py::list summary;
            for (const auto& s : r.summary) summary.append(summary_dict(s));
            return py::make_tuple(summary, csv.str());
        },
        py::arg("dataset"), py::arg("methods"), py::arg("fractions") = std::vector<double>{0.05},
        py::arg("n_eigs") = std::vector<Index>{10}, py::arg("runs") = 10, py::arg("seed") = 0,
        py::arg("labels") = std::filesystem::path{}, py::arg("threads") = 1,
        "Runs an experiment grid. Returns (summary rows as dicts, CSV text).");
}
