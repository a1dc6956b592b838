#pragma once

#include <signedgl/spectral.hpp>

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace signedgl {

struct GLParams {
    double epsilon = 0.1;
    double omega0 = 1e3;
    std::optional<double> c;  // default 3/epsilon + omega0
    double tau = 0.1;
    int max_iter = 2000;
    double tol = 1e-6;
    Index n_eigs = 0;  // 0 uses every column of the eigenbasis
};

/// Validated Ginzburg-Landau parameters. The convexity constant must satisfy
/// c >= omega0 + 1/epsilon so that both halves of the energy split are convex.
class GLConfig {
public:
    explicit GLConfig(const GLParams& params = {});

    double epsilon() const noexcept { return epsilon_; }
    double omega0() const noexcept { return omega0_; }
    double c() const noexcept { return c_; }
    double tau() const noexcept { return tau_; }
    int max_iter() const noexcept { return max_iter_; }
    double tol() const noexcept { return tol_; }
    Index n_eigs() const noexcept { return n_eigs_; }

private:
    double epsilon_;
    double omega0_;
    double c_;
    double tau_;
    int max_iter_;
    double tol_;
    Index n_eigs_;
};

/// Labels in {-1, 0, +1}; 0 marks an unlabeled node.
class BinaryLabels {
public:
    explicit BinaryLabels(Vector f);
    static BinaryLabels from_signs(std::span<const int> signs);

    const Vector& values() const noexcept { return f_; }
    Index size() const noexcept { return f_.size(); }
    bool is_labeled(Index i) const { return f_[i] != 0.0; }
    Index labeled_count() const;
    /// omega_i = omega0 on labeled nodes, 0 elsewhere.
    Vector fidelity_weights(double omega0) const;

private:
    Vector f_;
};

/// One-hot targets for labeled rows, zero rows for unlabeled ones.
class MulticlassLabels {
public:
    /// `classes[i]` in [0, num_classes) or -1 for unlabeled.
    MulticlassLabels(std::span<const int> classes, int num_classes);

    const Matrix& targets() const noexcept { return targets_; }
    const std::vector<int>& classes() const noexcept { return classes_; }
    int num_classes() const noexcept { return num_classes_; }
    Index size() const noexcept { return targets_.rows(); }
    bool is_labeled(Index i) const { return classes_[static_cast<std::size_t>(i)] >= 0; }
    Vector fidelity_weights(double omega0) const;

private:
    Matrix targets_;
    std::vector<int> classes_;
    int num_classes_;
};

struct GLDiagnostics {
    int iterations = 0;
    double final_change = 0.0;
    double final_energy = 0.0;
    bool converged = false;
};

struct BinaryResult {
    Vector u;
    std::vector<int> labels;  // sign(u), sign(0) = +1
    GLDiagnostics diagnostics;
};

struct MulticlassResult {
    Matrix u;
    std::vector<int> labels;  // row argmax, lowest index on ties
    GLDiagnostics diagnostics;
};

/// Called after every step with the iteration index (1-based) and iterate.
using BinaryObserver = std::function<void(int, const Vector&)>;
using MulticlassObserver = std::function<void(int, const Matrix&)>;

/// E(u) = eps/2 u'Su + 1/(4 eps) sum (u_i^2 - 1)^2 + sum omega_i/2 (f_i - u_i)^2.
/// For a generalized pair the quadratic form uses A. Throws NotPsdError for
/// operators that are not PSD-guaranteed.
double energy(const OperatorHandle& op, const Vector& u, const BinaryLabels& labels,
              const GLConfig& cfg);

/// Same energy with the quadratic form evaluated in the eigenbasis
/// (sum lambda_l a_l^2 for u = Phi a); exact when u lies in span(Phi).
double energy(const Eigenbasis& basis, const Vector& u, const BinaryLabels& labels,
              const GLConfig& cfg);

/// Gradient of the binary energy with respect to u.
Vector energy_gradient(const OperatorHandle& op, const Vector& u, const BinaryLabels& labels,
                       const GLConfig& cfg);

/// Binary convexity-splitting iteration in the span of the eigenbasis,
/// started from the projection of f. Throws DivergenceError when an iterate
/// stops being finite. `init_seed` is accepted for symmetry with the
/// multiclass scheme and is unused.
BinaryResult gl_binary(const Eigenbasis& basis, const BinaryLabels& labels, const GLConfig& cfg,
                       std::uint64_t init_seed = 0, const BinaryObserver& observer = {});

/// Multiclass scheme: uniform (0,1) initialization projected to the simplex,
/// labeled rows set to their targets, then semi-implicit steps each followed
/// by a row-wise simplex projection.
MulticlassResult gl_multiclass(const Eigenbasis& basis, const MulticlassLabels& labels,
                               const GLConfig& cfg, std::uint64_t init_seed,
                               const MulticlassObserver& observer = {});

/// As above with an explicit (n x K) initialization in place of the random draw.
MulticlassResult gl_multiclass(const Eigenbasis& basis, const MulticlassLabels& labels,
                               const GLConfig& cfg, const Matrix& initial,
                               const MulticlassObserver& observer = {});

/// Derivative T(U) of the multiclass potential sum_i prod_l 1/4 ||u_i - e_l||_1^2.
Matrix potential_derivative(const Matrix& u);

/// sum_i prod_l 1/4 ||u_i - e_l||_1^2.
double multiclass_potential(const Matrix& u);

/// Euclidean projection onto {x >= 0, sum x = 1}.
Vector simplex_project(const Vector& v);

/// Projects every row of `u` in place.
void simplex_project_rows(Matrix& u);

std::vector<int> sign_labels(const Vector& u);
std::vector<int> argmax_labels(const Matrix& u);

}  // namespace signedgl
