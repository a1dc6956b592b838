#pragma once

#include <signedgl/graph.hpp>

#include <optional>
#include <string_view>

namespace signedgl {

enum class OperatorKind {
    L,            // D - W on |W|
    Lsym,         // I - D^-1/2 W D^-1/2 on |W|
    Q,            // D + W on |W|
    Qsym,         // I + D^-1/2 W D^-1/2 on |W|
    L_plus_sym,   // normalized Laplacian of W+
    Q_minus_sym,  // normalized signless Laplacian of W-
    SR,           // signed ratio
    SN,           // signed normalized
    BR,           // balance ratio (indefinite in general)
    BN,           // balance normalized (indefinite in general)
    SPONGE,       // generalized pair (L+sym + I, L-sym + I)
    AM,           // L+sym + Q-sym
    GM,           // L+sym # Q-sym, dense only
};

std::string_view to_string(OperatorKind kind);
/// Accepts the names produced by to_string, case-insensitively.
std::optional<OperatorKind> parse_operator_kind(std::string_view name);

bool is_psd_guaranteed(OperatorKind kind);

struct OperatorSpec {
    OperatorKind kind = OperatorKind::L;
    // Diagonal shift d of the geometric mean (A + dI) # (B + dI); 0 selects
    // kDefaultGeometricMeanShift. Ignored by the other kinds.
    double regularization = 0.0;
};

/// A symmetric operator S, or a symmetric-definite pair (A, B) standing for
/// A v = lambda B v.
class OperatorHandle {
public:
    static OperatorHandle standard(SparseMatrix s, OperatorSpec spec);
    static OperatorHandle generalized(SparseMatrix a, SparseMatrix b, OperatorSpec spec);

    bool is_generalized() const noexcept { return mass_.has_value(); }
    Index size() const noexcept { return matrix_.rows(); }
    const OperatorSpec& spec() const noexcept { return spec_; }
    bool psd_guaranteed() const noexcept { return is_psd_guaranteed(spec_.kind); }

    /// S, or A for a generalized pair.
    const SparseMatrix& matrix() const noexcept { return matrix_; }
    /// B; throws for a standard operator.
    const SparseMatrix& mass() const;

    Vector apply(const Vector& x) const { return matrix_ * x; }
    Vector apply_mass(const Vector& x) const { return is_generalized() ? Vector(*mass_ * x) : x; }

private:
    OperatorHandle(SparseMatrix a, std::optional<SparseMatrix> b, OperatorSpec spec);

    SparseMatrix matrix_;
    std::optional<SparseMatrix> mass_;
    OperatorSpec spec_;
};

// Unsigned operators on a symmetric nonnegative W. Zero-degree nodes get
// D^-1/2 = 0, so the normalized forms carry identity rows for them.
OperatorHandle unsigned_laplacian(const SparseMatrix& w, bool normalized);
OperatorHandle signless_laplacian(const SparseMatrix& w, bool normalized);

// Signed operators. When one sign class has no edges at all, its normalized
// Laplacian and signless Laplacian are taken to be the zero matrix.
OperatorHandle signed_ratio(const SignedGraph& g, bool normalized);
OperatorHandle balance_ratio(const SignedGraph& g, bool normalized);
OperatorHandle sponge(const SignedGraph& g);
OperatorHandle arithmetic_mean(const SignedGraph& g);

inline constexpr double kDefaultGeometricMeanShift = 1e-8;

/// Dense geometric mean (L+sym + dI) # (Q-sym + dI). Throws
/// UnsupportedOperation above kDenseCap nodes and InvalidInput when the first
/// operand is not positive definite.
OperatorHandle geometric_mean(const SignedGraph& g,
                              double shift = kDefaultGeometricMeanShift);

/// A # B = A^1/2 (A^-1/2 B A^-1/2)^1/2 A^1/2 for A positive definite, B PSD.
Matrix matrix_geometric_mean(const Matrix& a, const Matrix& b);

/// Dispatches on spec.kind. The unsigned kinds (L, Lsym, Q, Qsym) act on W+ + W-.
OperatorHandle build_operator(const SignedGraph& g, const OperatorSpec& spec);

/// Normalized Laplacian of W+ and normalized signless Laplacian of W- with the
/// absent-sign convention applied.
SparseMatrix positive_normalized_laplacian(const SignedGraph& g);
SparseMatrix negative_normalized_laplacian(const SignedGraph& g);
SparseMatrix negative_normalized_signless(const SignedGraph& g);

}  // namespace signedgl
