#include <signedgl/baselines.hpp>

#include <Eigen/Cholesky>
#include <Eigen/IterativeLinearSolvers>

#include <cmath>
#include <sstream>

namespace signedgl {
namespace {

constexpr double kSolveTolerance = 1e-10;

// Solves the SPD system m x = b column by column: dense Cholesky up to the
// dense cap, conjugate gradients above it.
Matrix solve_spd(const SparseMatrix& m, const Matrix& b) {
    if (m.rows() == 0) return Matrix(0, b.cols());
    if (m.rows() <= kDenseCap) {
        Eigen::LLT<Matrix> llt{Matrix(m)};
        if (llt.info() != Eigen::Success) throw InvalidInput("baseline system is singular");
        return llt.solve(b);
    }
    Eigen::ConjugateGradient<SparseMatrix, Eigen::Lower | Eigen::Upper> cg(m);
    cg.setTolerance(kSolveTolerance);
    cg.setMaxIterations(std::max<Index>(1000, 10 * m.rows()));
    Matrix x(m.rows(), b.cols());
    for (Index c = 0; c < b.cols(); ++c) {
        x.col(c) = cg.solve(b.col(c));
        if (cg.info() != Eigen::Success) throw ConvergenceError("conjugate gradients stalled", cg.error());
    }
    return x;
}

void check_square(const SparseMatrix& w, Index n) {
    if (w.rows() != n || w.cols() != n) throw InvalidInput("adjacency and labels differ in size");
}

// Every unlabeled node must reach a labeled one, otherwise L_uu is singular.
void check_anchored(const SparseMatrix& w, const std::vector<bool>& labeled) {
    const Index n = w.rows();
    std::vector<bool> reached = labeled;
    std::vector<Index> stack;
    for (Index i = 0; i < n; ++i) {
        if (labeled[i]) stack.push_back(i);
    }
    while (!stack.empty()) {
        const Index v = stack.back();
        stack.pop_back();
        for (SparseMatrix::InnerIterator it(w, v); it; ++it) {
            if (!reached[it.row()]) {
                reached[it.row()] = true;
                stack.push_back(it.row());
            }
        }
    }
    for (Index i = 0; i < n; ++i) {
        if (!reached[i]) {
            std::ostringstream os;
            os << "node " << i << " is not connected to any labeled node; harmonic system is singular";
            throw InvalidInput(os.str());
        }
    }
}

Matrix harmonic(const SparseMatrix& w, const Matrix& targets, const std::vector<bool>& labeled) {
    const Index n = w.rows();
    check_anchored(w, labeled);
    std::vector<Index> pos(static_cast<std::size_t>(n), -1);
    Index nu = 0;
    for (Index i = 0; i < n; ++i) {
        if (!labeled[i]) pos[i] = nu++;
    }
    Matrix scores = targets;
    if (nu == 0) return scores;

    const Vector deg = w * Vector::Ones(n);
    std::vector<Eigen::Triplet<double>> trips;
    Matrix rhs = Matrix::Zero(nu, targets.cols());
    for (Index j = 0; j < n; ++j) {
        if (labeled[j]) {
            for (SparseMatrix::InnerIterator it(w, j); it; ++it) {
                if (!labeled[it.row()]) rhs.row(pos[it.row()]) += it.value() * targets.row(j);
            }
            continue;
        }
        trips.emplace_back(pos[j], pos[j], deg[j]);
        for (SparseMatrix::InnerIterator it(w, j); it; ++it) {
            if (!labeled[it.row()]) trips.emplace_back(pos[it.row()], pos[j], -it.value());
        }
    }
    SparseMatrix luu(nu, nu);
    luu.setFromTriplets(trips.begin(), trips.end());
    const Matrix x = solve_spd(luu, rhs);
    for (Index i = 0; i < n; ++i) {
        if (!labeled[i]) scores.row(i) = x.row(pos[i]);
    }
    return scores;
}

Matrix consistency(const SparseMatrix& w, const Matrix& targets, double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidInput("LGC alpha must lie in (0, 1)");
    const Index n = w.rows();
    const Vector deg = w * Vector::Ones(n);
    const Vector s = deg.unaryExpr([](double d) { return d > 0.0 ? 1.0 / std::sqrt(d) : 0.0; });
    SparseMatrix id(n, n);
    id.setIdentity();
    const SparseMatrix m = id - alpha * SparseMatrix(s.asDiagonal() * w * s.asDiagonal());
    return solve_spd(m, targets);
}

std::vector<bool> labeled_mask(const BinaryLabels& labels) {
    std::vector<bool> mask(static_cast<std::size_t>(labels.size()));
    for (Index i = 0; i < labels.size(); ++i) mask[i] = labels.is_labeled(i);
    return mask;
}

std::vector<bool> labeled_mask(const MulticlassLabels& labels) {
    std::vector<bool> mask(static_cast<std::size_t>(labels.size()));
    for (Index i = 0; i < labels.size(); ++i) mask[i] = labels.is_labeled(i);
    return mask;
}

}  // namespace

BaselineResult harmonic_functions(const SparseMatrix& w_positive, const BinaryLabels& labels) {
    check_square(w_positive, labels.size());
    Matrix scores = harmonic(w_positive, labels.values(), labeled_mask(labels));
    return {scores, sign_labels(scores.col(0))};
}

BaselineResult harmonic_functions(const SparseMatrix& w_positive, const MulticlassLabels& labels) {
    check_square(w_positive, labels.size());
    Matrix scores = harmonic(w_positive, labels.targets(), labeled_mask(labels));
    return {scores, argmax_labels(scores)};
}

BaselineResult local_global(const SparseMatrix& w_positive, const BinaryLabels& labels,
                            double alpha) {
    check_square(w_positive, labels.size());
    Matrix scores = consistency(w_positive, labels.values(), alpha);
    return {scores, sign_labels(scores.col(0))};
}

BaselineResult local_global(const SparseMatrix& w_positive, const MulticlassLabels& labels,
                            double alpha) {
    check_square(w_positive, labels.size());
    Matrix scores = consistency(w_positive, labels.targets(), alpha);
    return {scores, argmax_labels(scores)};
}

BaselineResult run_baseline(const BaselineSpec& spec, const SparseMatrix& w_positive,
                            const BinaryLabels& labels) {
    if (spec.method == BaselineMethod::HF) return harmonic_functions(w_positive, labels);
    return local_global(w_positive, labels, spec.alpha);
}

BaselineResult run_baseline(const BaselineSpec& spec, const SparseMatrix& w_positive,
                            const MulticlassLabels& labels) {
    if (spec.method == BaselineMethod::HF) return harmonic_functions(w_positive, labels);
    return local_global(w_positive, labels, spec.alpha);
}

}  // namespace signedgl
