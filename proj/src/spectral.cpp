#include <signedgl/spectral.hpp>

#include <signedgl/random.hpp>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/SparseCholesky>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>

namespace signedgl {
namespace {

void check_k(Index k, Index n) {
    if (k < 1 || k > n) {
        std::ostringstream os;
        os << "requested " << k << " eigenpairs of an operator of size " << n;
        throw InvalidInput(os.str());
    }
}

// y -> R (A - sigma B)^-1 R^T y, where B = R^T R (R = I for a standard
// operator). Its largest eigenvalues theta correspond to the eigenvalues
// lambda = sigma + 1/theta of the pencil closest to sigma from above.
class ShiftInvert {
public:
    explicit ShiftInvert(const OperatorHandle& op) : generalized_(op.is_generalized()) {
        const SparseMatrix& a = op.matrix();
        SparseMatrix b(a.rows(), a.cols());
        b.setIdentity();
        if (generalized_) {
            b = op.mass();
            Eigen::SimplicialLLT<SparseMatrix> llt(b);
            if (llt.info() != Eigen::Success) {
                throw InvalidInput("mass matrix of the generalized pair is not positive definite");
            }
            // B = P^T L L^T P, so R = L^T P.
            lower_ = llt.matrixL();
            upper_ = llt.matrixU();
            perm_ = llt.permutationP();
            perm_inv_ = llt.permutationPinv();
        }
        const double scale = std::max(a.diagonal().cwiseAbs().mean(), 1e-12) /
                             std::max(b.diagonal().mean(), 1e-12);
        // A PSD and B SPD make A - sigma B SPD for any sigma < 0.
        if (op.psd_guaranteed()) {
            sigma_ = -1e-2 * scale;
            if (factor(a, b)) return;
        }
        const double a_lower = gershgorin_lower(a);
        const double b_lower = gershgorin_lower(b);
        if (a_lower < 0.0 && b_lower <= 0.0) {
            throw UnsupportedOperation("cannot bound the spectrum of an indefinite generalized pair");
        }
        sigma_ = std::min(a_lower, 0.0) / std::max(b_lower, 1e-300) - 1e-2 * scale;
        if (a_lower >= 0.0) sigma_ = -1e-2 * scale;
        if (!factor(a, b)) throw Error("shift-invert factorization failed");
    }

    double sigma() const noexcept { return sigma_; }

    Vector apply(const Vector& y) const {
        if (!generalized_) return solver_.solve(y);
        // R (A - sigma B)^-1 R^T y
        const Vector rt_y = perm_inv_ * Vector(lower_ * y);
        const Vector z = solver_.solve(rt_y);
        return upper_ * Vector(perm_ * z);
    }

    // Maps an eigenvector of the transformed problem back to the pencil: R^-1 y.
    Vector to_pencil(const Vector& y) const {
        if (!generalized_) return y;
        const Vector z = upper_.triangularView<Eigen::Upper>().solve(y);
        return perm_inv_ * z;
    }

private:
    bool factor(const SparseMatrix& a, const SparseMatrix& b) {
        const SparseMatrix k = a - sigma_ * b;
        solver_.compute(k);
        return solver_.info() == Eigen::Success;
    }

    // Smallest Gershgorin disc edge.
    static double gershgorin_lower(const SparseMatrix& m) {
        double lower = std::numeric_limits<double>::infinity();
        for (Index j = 0; j < m.outerSize(); ++j) {
            double diag = 0.0;
            double off = 0.0;
            for (SparseMatrix::InnerIterator it(m, j); it; ++it) {
                if (it.row() == j) diag += it.value();
                else off += std::abs(it.value());
            }
            lower = std::min(lower, diag - off);
        }
        return lower;
    }

    bool generalized_;
    double sigma_ = 0.0;
    SparseMatrix lower_;
    SparseMatrix upper_;
    Eigen::PermutationMatrix<Eigen::Dynamic, Eigen::Dynamic, int> perm_;
    Eigen::PermutationMatrix<Eigen::Dynamic, Eigen::Dynamic, int> perm_inv_;
    Eigen::SimplicialLDLT<SparseMatrix> solver_;
};

Vector random_unit(Rng& rng, Index n) {
    Vector v(n);
    for (Index i = 0; i < n; ++i) v[i] = uniform01(rng) - 0.5;
    return v / v.norm();
}

struct RitzPairs {
    Vector theta;  // descending
    Matrix vectors;
};

// Thick-restart Lanczos with full reorthogonalization for the k largest
// eigenpairs of a symmetric positive operator given by `apply`.
template <class Apply>
RitzPairs thick_restart_lanczos(const Apply& apply, Index n, Index k, std::uint64_t seed,
                                const EigenOptions& options) {
    const Index m = std::min<Index>(n - 1, std::max<Index>(2 * k + 20, k + 40));
    Rng rng(seed);
    Matrix v(n, m + 1);
    Matrix h = Matrix::Zero(m, m);
    v.col(0) = random_unit(rng, n);

    Index start = 0;
    double best = std::numeric_limits<double>::infinity();
    for (int restart = 0; restart <= options.max_restarts; ++restart) {
        double beta = 0.0;
        for (Index j = start; j < m; ++j) {
            Vector w = apply(Vector(v.col(j)));
            Vector coeff = v.leftCols(j + 1).transpose() * w;
            w.noalias() -= v.leftCols(j + 1) * coeff;
            const Vector again = v.leftCols(j + 1).transpose() * w;
            w.noalias() -= v.leftCols(j + 1) * again;
            coeff += again;
            h.block(0, j, j + 1, 1) = coeff;
            h.block(j, 0, 1, j + 1) = coeff.transpose();
            beta = w.norm();
            if (beta <= 1e-12 * coeff.norm()) {
                // Invariant subspace: continue from a fresh direction.
                beta = 0.0;
                w = random_unit(rng, n);
                for (int pass = 0; pass < 2; ++pass) {
                    w.noalias() -= v.leftCols(j + 1) * (v.leftCols(j + 1).transpose() * w);
                }
                v.col(j + 1) = w / w.norm();
            } else {
                v.col(j + 1) = w / beta;
            }
        }

        Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (h + h.transpose()));
        std::vector<Index> order(static_cast<std::size_t>(m));
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(), [&](Index a, Index b) {
            return es.eigenvalues()[a] > es.eigenvalues()[b];
        });

        double worst = 0.0;
        for (Index i = 0; i < k; ++i) {
            const Index c = order[i];
            const double res = std::abs(beta * es.eigenvectors()(m - 1, c));
            worst = std::max(worst, res / std::max(std::abs(es.eigenvalues()[c]), 1e-300));
        }
        best = std::min(best, worst);

        const bool done = worst <= options.tolerance;
        const Index keep = done ? k : k + (m - k) / 2;
        Matrix y(m, keep);
        Vector theta(keep);
        for (Index i = 0; i < keep; ++i) {
            y.col(i) = es.eigenvectors().col(order[i]);
            theta[i] = es.eigenvalues()[order[i]];
        }
        Matrix ritz = v.leftCols(m) * y;
        if (done) return {theta, ritz};

        const Vector residual_dir = v.col(m);
        v.leftCols(keep) = ritz;
        v.col(keep) = residual_dir;
        h.setZero();
        h.topLeftCorner(keep, keep).diagonal() = theta;
        start = keep;
    }
    std::ostringstream os;
    os << "Lanczos did not converge after " << options.max_restarts
       << " restarts (best relative residual " << best << ")";
    throw ConvergenceError(os.str(), best);
}

Eigenbasis lanczos_eigs(const OperatorHandle& op, Index k, std::uint64_t seed,
                        const EigenOptions& options) {
    const Index n = op.size();
    ShiftInvert si(op);
    RitzPairs ritz = thick_restart_lanczos([&](const Vector& y) { return si.apply(y); }, n, k,
                                           seed, options);
    Eigenbasis out;
    out.source = op.spec();
    out.generalized = op.is_generalized();
    out.values.resize(k);
    out.vectors.resize(n, k);
    for (Index i = 0; i < k; ++i) {
        out.values[i] = si.sigma() + 1.0 / ritz.theta[i];
        Vector y = ritz.vectors.col(i);
        out.vectors.col(i) = si.to_pencil(y);
    }
    return out;
}

}  // namespace

Eigenbasis Eigenbasis::leading(Index k) const {
    check_k(k, size());
    Eigenbasis out;
    out.values = values.head(k);
    out.vectors = vectors.leftCols(k);
    out.source = source;
    out.generalized = generalized;
    return out;
}

void canonicalize_signs(Matrix& vectors) {
    for (Index c = 0; c < vectors.cols(); ++c) {
        Index arg = 0;
        double best = -1.0;
        for (Index r = 0; r < vectors.rows(); ++r) {
            const double a = std::abs(vectors(r, c));
            if (a > best) {
                best = a;
                arg = r;
            }
        }
        if (vectors.rows() > 0 && vectors(arg, c) < 0.0) vectors.col(c) *= -1.0;
    }
}

Eigenbasis full_dense_eigs(const OperatorHandle& op) {
    const Index n = op.size();
    if (n > kDenseCap) {
        throw UnsupportedOperation("dense eigendecomposition is limited to " +
                                   std::to_string(kDenseCap) + " nodes");
    }
    Eigenbasis out;
    out.source = op.spec();
    out.generalized = op.is_generalized();
    if (n == 0) return out;

    const Matrix a = Matrix(op.matrix());
    if (!op.is_generalized()) {
        Eigen::SelfAdjointEigenSolver<Matrix> es(a);
        if (es.info() != Eigen::Success) throw Error("dense eigendecomposition failed");
        out.values = es.eigenvalues();
        out.vectors = es.eigenvectors();
    } else {
        // B = L L^T; C = L^-1 A L^-T; v = L^-T y.
        Eigen::LLT<Matrix> llt(Matrix(op.mass()));
        if (llt.info() != Eigen::Success) {
            throw InvalidInput("mass matrix of the generalized pair is not positive definite");
        }
        const Matrix x = llt.matrixL().solve(a);
        Matrix c = llt.matrixL().solve(x.transpose()).transpose();
        c = 0.5 * (c + c.transpose()).eval();
        Eigen::SelfAdjointEigenSolver<Matrix> es(c);
        if (es.info() != Eigen::Success) throw Error("dense eigendecomposition failed");
        out.values = es.eigenvalues();
        out.vectors = llt.matrixU().solve(es.eigenvectors());
    }
    canonicalize_signs(out.vectors);
    return out;
}

Eigenbasis smallest_eigs(const OperatorHandle& op, Index k, std::uint64_t seed,
                         const EigenOptions& options) {
    const Index n = op.size();
    check_k(k, n);
    bool dense = options.method == EigenMethod::dense ||
                 (options.method == EigenMethod::automatic && n <= options.dense_cap);
    // The Krylov space needs room for k Ritz pairs plus a residual direction.
    if (!dense && k + 1 >= n) dense = true;
    if (dense) return full_dense_eigs(op).leading(k);

    Eigenbasis out = lanczos_eigs(op, k, seed, options);
    canonicalize_signs(out.vectors);
    return out;
}

double max_residual(const OperatorHandle& op, const Eigenbasis& basis) {
    double worst = 0.0;
    for (Index l = 0; l < basis.size(); ++l) {
        const Vector phi = basis.vectors.col(l);
        const Vector r = op.apply(phi) - basis.values[l] * op.apply_mass(phi);
        worst = std::max(worst, r.norm() / std::max(phi.norm(), 1e-300));
    }
    return worst;
}

// ---------------------------------------------------------------------------
// Cache file

namespace {

constexpr char kMagic[8] = {'S', 'G', 'L', 'E', 'I', 'G', 'E', 'N'};

template <class T>
void put(std::ostream& os, T value) {
    static_assert(std::is_trivially_copyable_v<T>);
    unsigned char bytes[sizeof(T)];
    std::memcpy(bytes, &value, sizeof(T));
    if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
    os.write(reinterpret_cast<const char*>(bytes), sizeof(T));
}

template <class T>
T get(std::istream& is) {
    unsigned char bytes[sizeof(T)];
    if (!is.read(reinterpret_cast<char*>(bytes), sizeof(T))) {
        throw InvalidInput("eigenbasis cache file is truncated");
    }
    if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
    T value;
    std::memcpy(&value, bytes, sizeof(T));
    return value;
}

}  // namespace

void write_eigenbasis(const std::filesystem::path& path, const CacheKey& key,
                      const Eigenbasis& basis) {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw Error("cannot open " + path.string() + " for writing");
    os.write(kMagic, sizeof(kMagic));
    put<std::uint32_t>(os, kCacheVersion);
    put<std::uint64_t>(os, key.dataset_hash);
    put<std::uint32_t>(os, static_cast<std::uint32_t>(key.kind));
    put<std::uint32_t>(os, basis.generalized ? 1u : 0u);
    put<std::uint64_t>(os, static_cast<std::uint64_t>(basis.dimension()));
    put<std::uint64_t>(os, static_cast<std::uint64_t>(basis.size()));
    for (Index i = 0; i < basis.size(); ++i) put<double>(os, basis.values[i]);
    for (Index c = 0; c < basis.vectors.cols(); ++c) {
        for (Index r = 0; r < basis.vectors.rows(); ++r) put<double>(os, basis.vectors(r, c));
    }
    if (!os) throw Error("failed writing " + path.string());
}

Eigenbasis read_eigenbasis(const std::filesystem::path& path, const CacheKey& key) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw InvalidInput("cannot open eigenbasis cache " + path.string());
    char magic[sizeof(kMagic)];
    if (!is.read(magic, sizeof(magic)) || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
        throw InvalidInput(path.string() + " is not an eigenbasis cache file");
    }
    const auto version = get<std::uint32_t>(is);
    if (version != kCacheVersion) {
        throw InvalidInput("unsupported eigenbasis cache version " + std::to_string(version));
    }
    const auto hash = get<std::uint64_t>(is);
    const auto kind = get<std::uint32_t>(is);
    const auto generalized = get<std::uint32_t>(is);
    const auto n = static_cast<Index>(get<std::uint64_t>(is));
    const auto k = static_cast<Index>(get<std::uint64_t>(is));
    if (hash != key.dataset_hash || kind != static_cast<std::uint32_t>(key.kind) || k != key.k) {
        throw InvalidInput("eigenbasis cache key mismatch in " + path.string());
    }
    Eigenbasis out;
    out.source = OperatorSpec{key.kind};
    out.generalized = generalized != 0;
    out.values.resize(k);
    out.vectors.resize(n, k);
    for (Index i = 0; i < k; ++i) out.values[i] = get<double>(is);
    for (Index c = 0; c < k; ++c) {
        for (Index r = 0; r < n; ++r) out.vectors(r, c) = get<double>(is);
    }
    return out;
}

std::uint64_t graph_hash(const SignedGraph& g) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    auto mix = [&h](const auto& value) {
        h = fnv1a(std::string_view(reinterpret_cast<const char*>(&value), sizeof(value)), h);
    };
    mix(static_cast<std::int64_t>(g.size()));
    for (const SparseMatrix* m : {&g.positive(), &g.negative()}) {
        mix(static_cast<std::int64_t>(m->nonZeros()));
        for (Index j = 0; j < m->outerSize(); ++j) {
            for (SparseMatrix::InnerIterator it(*m, j); it; ++it) {
                mix(static_cast<std::int64_t>(it.row()));
                mix(static_cast<std::int64_t>(j));
                mix(it.value());
            }
        }
    }
    return h;
}

}  // namespace signedgl
