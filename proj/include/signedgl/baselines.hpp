#pragma once

#include <signedgl/gl.hpp>

namespace signedgl {

enum class BaselineMethod { HF, LGC };

struct BaselineSpec {
    BaselineMethod method = BaselineMethod::HF;
    double alpha = 0.99;  // LGC mixing parameter, 0 < alpha < 1
};

struct BaselineResult {
    Matrix scores;  // n x 1 for binary, n x K for multiclass
    std::vector<int> labels;
};

/// Harmonic extension on the positive graph: L_uu x_u = W_ul y_l, with
/// labeled rows fixed at their targets. Binary readout is sign (0 -> +1),
/// multiclass readout is argmax. Throws InvalidInput when some unlabeled node
/// has no path to a labeled node.
BaselineResult harmonic_functions(const SparseMatrix& w_positive, const BinaryLabels& labels);
BaselineResult harmonic_functions(const SparseMatrix& w_positive, const MulticlassLabels& labels);

/// Local and global consistency: (I - alpha D^-1/2 W D^-1/2) x = y.
BaselineResult local_global(const SparseMatrix& w_positive, const BinaryLabels& labels,
                            double alpha = 0.99);
BaselineResult local_global(const SparseMatrix& w_positive, const MulticlassLabels& labels,
                            double alpha = 0.99);

/// Dispatches on spec.method; validates alpha for LGC.
BaselineResult run_baseline(const BaselineSpec& spec, const SparseMatrix& w_positive,
                            const BinaryLabels& labels);
BaselineResult run_baseline(const BaselineSpec& spec, const SparseMatrix& w_positive,
                            const MulticlassLabels& labels);

}  // namespace signedgl
