#pragma once

#include <signedgl/baselines.hpp>
#include <signedgl/io.hpp>

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace signedgl {

/// A classifier in the comparison roster: GL on some operator, or a baseline.
struct Method {
    std::optional<OperatorKind> gl_operator;
    std::optional<BaselineMethod> baseline;

    /// "GL(SN)", "GL(Lsym+)", "HF", "LGC", ...
    std::string name() const;
    /// Component the method runs on: G+ for GL(Lsym+), HF and LGC, G- for
    /// GL(Qsym-), the signed union otherwise.
    Connectivity component() const;

    friend bool operator==(const Method&, const Method&) = default;
};

/// Accepts "gl-<operator>" with any operator name (e.g. gl-sn, gl-am,
/// gl-lsym+, gl-qsym-, gl-sp), the aliases gl-lplus and gl-qminus, the
/// printed form "GL(<operator>)", and "hf" / "lgc". Case-insensitive.
std::optional<Method> parse_method(std::string_view text);

/// The seven methods compared in the experiments.
std::vector<Method> default_methods();

/// Either an edge list with a label file, or "ssbm:n=..,k=..,p_in=..,
/// p_out=..,eta=..,seed=.." (keys optional, defaults as in SsbmParams).
struct DatasetRef {
    std::filesystem::path edges;
    std::filesystem::path labels;
    EdgeListFormat format;
    bool strict_labels = false;
    std::optional<SsbmParams> ssbm;
};

DatasetRef parse_dataset_ref(const std::string& text, const std::filesystem::path& labels = {});

struct Dataset {
    SignedGraph graph;
    LabelData labels;
};

Dataset load_dataset(const DatasetRef& ref);

struct ExperimentSpec {
    std::vector<Method> methods;
    std::vector<double> fractions;
    std::vector<Index> n_eigs;
    std::vector<double> omega0s{1e3};
    std::vector<double> epsilons{1e-1};
    int runs = 10;
    std::uint64_t base_seed = 0;
    double tau = 0.1;
    int max_iter = 2000;
    double tol = 1e-6;
    double lgc_alpha = 0.99;
    int threads = 1;
    EigenOptions eigen_options;
    /// When set, eigenbases are read from and written to this directory.
    std::filesystem::path cache_dir;

    /// Throws InvalidInput for empty lists, fractions outside (0, 1] or runs < 1.
    void validate() const;
};

/// One classification run. Baselines carry zeros in the GL-only columns.
struct RunRecord {
    std::string method;
    double fraction = 0.0;
    Index n_eigs = 0;
    double omega0 = 0.0;
    double epsilon = 0.0;
    int run = 0;
    double accuracy = 0.0;
    int iterations = 0;
    double wall_time = 0.0;  // seconds
    std::string error;       // empty on success
};

/// Aggregate over the runs of one (method, fraction, n_eigs, omega0, epsilon) cell.
struct SummaryRecord {
    std::string method;
    double fraction = 0.0;
    Index n_eigs = 0;
    double omega0 = 0.0;
    double epsilon = 0.0;
    int runs = 0;          // runs aggregated
    int failed = 0;        // runs that ended in an error
    double accuracy = 0.0; // mean over successful runs
    double accuracy_std = 0.0;
    double iterations = 0.0;
    double wall_time = 0.0;
};

struct ExperimentResult {
    std::vector<RunRecord> runs;
    std::vector<SummaryRecord> summary;

    /// Mean accuracy of the given method over all its cells' successful runs.
    std::optional<double> mean_accuracy(const std::string& method) const;
};

/// Fraction of nodes selected by eval_mask whose prediction equals the truth.
/// Throws InvalidInput when the mask selects nothing or sizes differ.
double accuracy(std::span<const int> predicted, std::span<const int> truth,
                const std::vector<bool>& eval_mask);

/// Runs every method x fraction x n_eigs x omega0 x epsilon x run cell on its
/// own largest component. Failures become rows with an error message.
/// Deterministic under spec.base_seed.
ExperimentResult run_experiment(const Dataset& data, const ExperimentSpec& spec);
ExperimentResult run_experiment(const DatasetRef& ref, const ExperimentSpec& spec);

/// CSV with header
///   record,method,fraction,n_eigs,omega0,epsilon,run,accuracy,accuracy_std,
///   iterations,failed,error[,wall_time]
/// `record` is "run" or "mean"; mean rows use run = -1 and count failures in
/// `failed`. Rows are sorted by the key columns. Wall time is opt-in since it
/// is the only nondeterministic column.
void emit_csv(std::ostream& out, const ExperimentResult& result, bool include_timing = false);
void emit_csv(const std::filesystem::path& path, const ExperimentResult& result,
              bool include_timing = false);

/// File name used for an eigenbasis in a cache directory.
std::filesystem::path eigen_cache_path(const std::filesystem::path& dir, const CacheKey& key);

/// Parses the output of emit_csv.
ExperimentResult parse_csv(std::istream& in);
ExperimentResult read_csv(const std::filesystem::path& path);

/// Splits RFC 4180 records; quoted fields may contain commas, quotes and newlines.
std::vector<std::vector<std::string>> parse_csv_records(std::istream& in);

}  // namespace signedgl
