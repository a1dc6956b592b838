#include <signedgl/laplacians.hpp>

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <string>

namespace signedgl {
namespace {

struct KindName {
    OperatorKind kind;
    std::string_view name;
};

constexpr std::array<KindName, 13> kKindNames{{
    {OperatorKind::L, "L"},
    {OperatorKind::Lsym, "Lsym"},
    {OperatorKind::Q, "Q"},
    {OperatorKind::Qsym, "Qsym"},
    {OperatorKind::L_plus_sym, "Lsym+"},
    {OperatorKind::Q_minus_sym, "Qsym-"},
    {OperatorKind::SR, "SR"},
    {OperatorKind::SN, "SN"},
    {OperatorKind::BR, "BR"},
    {OperatorKind::BN, "BN"},
    {OperatorKind::SPONGE, "SP"},
    {OperatorKind::AM, "AM"},
    {OperatorKind::GM, "GM"},
}};

bool iequals(std::string_view a, std::string_view b) {
    return a.size() == b.size() &&
           std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) {
               return std::tolower(static_cast<unsigned char>(x)) ==
                      std::tolower(static_cast<unsigned char>(y));
           });
}

SparseMatrix identity(Index n) {
    SparseMatrix id(n, n);
    id.setIdentity();
    return id;
}

SparseMatrix diagonal(const Vector& d) {
    SparseMatrix m(d.size(), d.size());
    m.reserve(Eigen::VectorXi::Constant(d.size(), 1));
    for (Index i = 0; i < d.size(); ++i) m.insert(i, i) = d[i];
    m.makeCompressed();
    return m;
}

Vector row_sums(const SparseMatrix& w) { return w * Vector::Ones(w.cols()); }

Vector inverse_sqrt(const Vector& d) {
    return d.unaryExpr([](double x) { return x > 0.0 ? 1.0 / std::sqrt(x) : 0.0; });
}

SparseMatrix scaled(const SparseMatrix& w, const Vector& s) {
    return SparseMatrix(diagonal(s) * w * diagonal(s));
}

SparseMatrix symmetrized(const SparseMatrix& s) {
    SparseMatrix t = s.transpose();
    SparseMatrix out = 0.5 * (s + t);
    out.prune(0.0, 0.0);
    out.makeCompressed();
    return out;
}

// I -/+ D^-1/2 W D^-1/2 with the zero-degree convention.
SparseMatrix normalized(const SparseMatrix& w, double sign) {
    const Vector s = inverse_sqrt(row_sums(w));
    return identity(w.rows()) + sign * scaled(w, s);
}

bool has_edges(const SparseMatrix& w) { return w.nonZeros() > 0; }

SparseMatrix zeros(Index n) { return SparseMatrix(n, n); }

}  // namespace

std::string_view to_string(OperatorKind kind) {
    for (const auto& kn : kKindNames) {
        if (kn.kind == kind) return kn.name;
    }
    return "?";
}

std::optional<OperatorKind> parse_operator_kind(std::string_view name) {
    for (const auto& kn : kKindNames) {
        if (iequals(kn.name, name)) return kn.kind;
    }
    if (iequals(name, "SPONGE")) return OperatorKind::SPONGE;
    return std::nullopt;
}

bool is_psd_guaranteed(OperatorKind kind) {
    return kind != OperatorKind::BR && kind != OperatorKind::BN;
}

OperatorHandle::OperatorHandle(SparseMatrix a, std::optional<SparseMatrix> b, OperatorSpec spec)
    : matrix_(std::move(a)), mass_(std::move(b)), spec_(spec) {}

OperatorHandle OperatorHandle::standard(SparseMatrix s, OperatorSpec spec) {
    if (s.rows() != s.cols()) throw InvalidInput("operator must be square");
    return OperatorHandle(symmetrized(s), std::nullopt, spec);
}

OperatorHandle OperatorHandle::generalized(SparseMatrix a, SparseMatrix b, OperatorSpec spec) {
    if (a.rows() != a.cols() || b.rows() != b.cols() || a.rows() != b.rows()) {
        throw InvalidInput("generalized pair must be square and of equal size");
    }
    return OperatorHandle(symmetrized(a), symmetrized(b), spec);
}

const SparseMatrix& OperatorHandle::mass() const {
    if (!mass_) throw InvalidInput("standard operator has no mass matrix");
    return *mass_;
}

OperatorHandle unsigned_laplacian(const SparseMatrix& w, bool normalized_form) {
    const OperatorSpec spec{normalized_form ? OperatorKind::Lsym : OperatorKind::L};
    if (normalized_form) return OperatorHandle::standard(normalized(w, -1.0), spec);
    return OperatorHandle::standard(diagonal(row_sums(w)) - w, spec);
}

OperatorHandle signless_laplacian(const SparseMatrix& w, bool normalized_form) {
    const OperatorSpec spec{normalized_form ? OperatorKind::Qsym : OperatorKind::Q};
    if (normalized_form) return OperatorHandle::standard(normalized(w, +1.0), spec);
    return OperatorHandle::standard(diagonal(row_sums(w)) + w, spec);
}

SparseMatrix positive_normalized_laplacian(const SignedGraph& g) {
    return has_edges(g.positive()) ? normalized(g.positive(), -1.0) : zeros(g.size());
}

SparseMatrix negative_normalized_laplacian(const SignedGraph& g) {
    return has_edges(g.negative()) ? normalized(g.negative(), -1.0) : zeros(g.size());
}

SparseMatrix negative_normalized_signless(const SignedGraph& g) {
    return has_edges(g.negative()) ? normalized(g.negative(), +1.0) : zeros(g.size());
}

OperatorHandle signed_ratio(const SignedGraph& g, bool normalized_form) {
    const DegreeVectors d = degrees(g);
    const SparseMatrix w = g.signed_adjacency();
    if (normalized_form) {
        const Vector s = inverse_sqrt(d.absolute);
        return OperatorHandle::standard(identity(g.size()) - scaled(w, s),
                                        OperatorSpec{OperatorKind::SN});
    }
    return OperatorHandle::standard(diagonal(d.absolute) - w, OperatorSpec{OperatorKind::SR});
}

OperatorHandle balance_ratio(const SignedGraph& g, bool normalized_form) {
    const DegreeVectors d = degrees(g);
    SparseMatrix br = diagonal(d.positive) - g.positive() + g.negative();
    if (normalized_form) {
        return OperatorHandle::standard(scaled(br, inverse_sqrt(d.absolute)),
                                        OperatorSpec{OperatorKind::BN});
    }
    return OperatorHandle::standard(std::move(br), OperatorSpec{OperatorKind::BR});
}

OperatorHandle sponge(const SignedGraph& g) {
    const SparseMatrix id = identity(g.size());
    return OperatorHandle::generalized(positive_normalized_laplacian(g) + id,
                                       negative_normalized_laplacian(g) + id,
                                       OperatorSpec{OperatorKind::SPONGE});
}

OperatorHandle arithmetic_mean(const SignedGraph& g) {
    return OperatorHandle::standard(
        positive_normalized_laplacian(g) + negative_normalized_signless(g),
        OperatorSpec{OperatorKind::AM});
}

Matrix matrix_geometric_mean(const Matrix& a, const Matrix& b) {
    Eigen::SelfAdjointEigenSolver<Matrix> ea(a);
    if (ea.info() != Eigen::Success) throw Error("eigendecomposition failed in geometric mean");
    if (ea.eigenvalues().minCoeff() <= 0.0) {
        throw InvalidInput("geometric mean needs a positive definite first operand; increase the shift");
    }
    const Matrix& qa = ea.eigenvectors();
    const Vector root = ea.eigenvalues().cwiseSqrt();
    const Matrix a_half = qa * root.asDiagonal() * qa.transpose();
    const Matrix a_neg_half = qa * root.cwiseInverse().asDiagonal() * qa.transpose();

    Matrix inner = a_neg_half * b * a_neg_half;
    inner = 0.5 * (inner + inner.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<Matrix> ei(inner);
    if (ei.info() != Eigen::Success) throw Error("eigendecomposition failed in geometric mean");
    const Vector inner_root = ei.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    const Matrix inner_half = ei.eigenvectors() * inner_root.asDiagonal() * ei.eigenvectors().transpose();

    Matrix out = a_half * inner_half * a_half;
    return 0.5 * (out + out.transpose());
}

OperatorHandle geometric_mean(const SignedGraph& g, double shift) {
    if (g.size() > kDenseCap) {
        throw UnsupportedOperation("geometric mean Laplacian is limited to " +
                                   std::to_string(kDenseCap) + " nodes");
    }
    if (shift < 0.0) throw InvalidInput("geometric mean shift must be nonnegative");
    const Index n = g.size();
    const Matrix a = Matrix(positive_normalized_laplacian(g)) + shift * Matrix::Identity(n, n);
    const Matrix b = Matrix(negative_normalized_signless(g)) + shift * Matrix::Identity(n, n);
    const Matrix gm = matrix_geometric_mean(a, b);
    return OperatorHandle::standard(gm.sparseView(), OperatorSpec{OperatorKind::GM, shift});
}

OperatorHandle build_operator(const SignedGraph& g, const OperatorSpec& spec) {
    switch (spec.kind) {
        case OperatorKind::L: return unsigned_laplacian(g.absolute_adjacency(), false);
        case OperatorKind::Lsym: return unsigned_laplacian(g.absolute_adjacency(), true);
        case OperatorKind::Q: return signless_laplacian(g.absolute_adjacency(), false);
        case OperatorKind::Qsym: return signless_laplacian(g.absolute_adjacency(), true);
        case OperatorKind::L_plus_sym:
            return OperatorHandle::standard(positive_normalized_laplacian(g), spec);
        case OperatorKind::Q_minus_sym:
            return OperatorHandle::standard(negative_normalized_signless(g), spec);
        case OperatorKind::SR: return signed_ratio(g, false);
        case OperatorKind::SN: return signed_ratio(g, true);
        case OperatorKind::BR: return balance_ratio(g, false);
        case OperatorKind::BN: return balance_ratio(g, true);
        case OperatorKind::SPONGE: return sponge(g);
        case OperatorKind::AM: return arithmetic_mean(g);
        case OperatorKind::GM:
            return geometric_mean(g, spec.regularization > 0.0 ? spec.regularization
                                                               : kDefaultGeometricMeanShift);
    }
    throw InvalidInput("unknown operator kind");
}

}  // namespace signedgl
