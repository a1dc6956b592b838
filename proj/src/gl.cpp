#include <signedgl/gl.hpp>

#include <signedgl/random.hpp>

#include <Eigen/Cholesky>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace signedgl {
namespace {

void require_psd(OperatorKind kind) {
    if (!is_psd_guaranteed(kind)) {
        throw NotPsdError("the Ginzburg-Landau energy needs a positive semi-definite operator; " +
                          std::string(to_string(kind)) + " is not");
    }
}

// Coefficients of the orthogonal projection onto span(Phi). Standard bases
// are orthonormal, so this is Phi^T g; B-orthonormal generalized bases go
// through the Gram matrix.
class SpectralProjector {
public:
    SpectralProjector(const Eigenbasis& basis, Index k, Index n) {
        if (basis.dimension() != n) {
            std::ostringstream os;
            os << "eigenbasis has " << basis.dimension() << " rows but labels cover " << n << " nodes";
            throw InvalidInput(os.str());
        }
        if (k == 0) k = basis.size();
        if (k < 1 || k > basis.size()) {
            std::ostringstream os;
            os << "n_eigs = " << k << " but the eigenbasis holds " << basis.size() << " pairs";
            throw InvalidInput(os.str());
        }
        phi_ = basis.vectors.leftCols(k);
        lambda_ = basis.values.head(k);
        if (basis.generalized) {
            gram_.compute(phi_.transpose() * phi_);
            if (gram_.info() != Eigen::Success) throw InvalidInput("eigenbasis columns are dependent");
            orthonormal_ = false;
        }
    }

    const Matrix& phi() const noexcept { return phi_; }
    const Vector& lambda() const noexcept { return lambda_; }

    Matrix coefficients(const Matrix& g) const {
        Matrix c = phi_.transpose() * g;
        if (!orthonormal_) c = gram_.solve(c);
        return c;
    }

private:
    Matrix phi_;
    Vector lambda_;
    Eigen::LLT<Matrix> gram_;
    bool orthonormal_ = true;
};

double double_well(const Vector& u) {
    return (u.array().square() - 1.0).square().sum();
}

double fidelity(const Vector& omega, const Matrix& target, const Matrix& u) {
    return 0.5 * (omega.asDiagonal() * (target - u).rowwise().squaredNorm()).sum();
}

double binary_energy_from_quadratic(double quadratic, const Vector& u, const BinaryLabels& labels,
                                    const GLConfig& cfg) {
    const double eps = cfg.epsilon();
    return 0.5 * eps * quadratic + double_well(u) / (4.0 * eps) +
           fidelity(labels.fidelity_weights(cfg.omega0()), labels.values(), u);
}

void check_finite(const Matrix& u, int iteration) {
    if (!u.allFinite()) {
        std::ostringstream os;
        os << "Ginzburg-Landau iteration diverged at step " << iteration;
        throw DivergenceError(os.str(), iteration);
    }
}

double relative_change(const Matrix& next, const Matrix& prev) {
    return (next - prev).norm() / std::max(next.norm(), 1e-30);
}

}  // namespace

GLConfig::GLConfig(const GLParams& p)
    : epsilon_(p.epsilon), omega0_(p.omega0), c_(p.c.value_or(3.0 / p.epsilon + p.omega0)),
      tau_(p.tau), max_iter_(p.max_iter), tol_(p.tol), n_eigs_(p.n_eigs) {
    if (!(epsilon_ > 0.0)) throw InvalidInput("epsilon must be positive");
    if (!(omega0_ >= 0.0)) throw InvalidInput("omega0 must be nonnegative");
    if (!(tau_ > 0.0)) throw InvalidInput("tau must be positive");
    if (max_iter_ < 0) throw InvalidInput("max_iter must be nonnegative");
    if (!(tol_ >= 0.0)) throw InvalidInput("tol must be nonnegative");
    if (n_eigs_ < 0) throw InvalidInput("n_eigs must be nonnegative");
    if (!(c_ >= omega0_ + 1.0 / epsilon_)) {
        std::ostringstream os;
        os << "convexity constant c = " << c_ << " is below omega0 + 1/epsilon = "
           << omega0_ + 1.0 / epsilon_;
        throw InvalidInput(os.str());
    }
}

BinaryLabels::BinaryLabels(Vector f) : f_(std::move(f)) {
    for (Index i = 0; i < f_.size(); ++i) {
        if (f_[i] != 0.0 && f_[i] != 1.0 && f_[i] != -1.0) {
            std::ostringstream os;
            os << "binary label " << f_[i] << " at node " << i << " is not in {-1, 0, +1}";
            throw InvalidInput(os.str());
        }
    }
}

BinaryLabels BinaryLabels::from_signs(std::span<const int> signs) {
    Vector f(static_cast<Index>(signs.size()));
    for (std::size_t i = 0; i < signs.size(); ++i) f[static_cast<Index>(i)] = signs[i];
    return BinaryLabels(std::move(f));
}

Index BinaryLabels::labeled_count() const { return (f_.array() != 0.0).count(); }

Vector BinaryLabels::fidelity_weights(double omega0) const {
    return (f_.array() != 0.0).cast<double>() * omega0;
}

MulticlassLabels::MulticlassLabels(std::span<const int> classes, int num_classes)
    : targets_(Matrix::Zero(static_cast<Index>(classes.size()), num_classes)),
      classes_(classes.begin(), classes.end()), num_classes_(num_classes) {
    if (num_classes < 2) throw InvalidInput("multiclass labels need at least two classes");
    for (std::size_t i = 0; i < classes.size(); ++i) {
        const int c = classes[i];
        if (c < -1 || c >= num_classes) {
            std::ostringstream os;
            os << "class " << c << " at node " << i << " is outside [0, " << num_classes << ")";
            throw InvalidInput(os.str());
        }
        if (c >= 0) targets_(static_cast<Index>(i), c) = 1.0;
    }
}

Vector MulticlassLabels::fidelity_weights(double omega0) const {
    Vector w(size());
    for (Index i = 0; i < size(); ++i) w[i] = is_labeled(i) ? omega0 : 0.0;
    return w;
}

double energy(const OperatorHandle& op, const Vector& u, const BinaryLabels& labels,
              const GLConfig& cfg) {
    require_psd(op.spec().kind);
    if (u.size() != op.size() || labels.size() != op.size()) {
        throw InvalidInput("energy: size mismatch between operator, iterate and labels");
    }
    return binary_energy_from_quadratic(u.dot(op.apply(u)), u, labels, cfg);
}

double energy(const Eigenbasis& basis, const Vector& u, const BinaryLabels& labels,
              const GLConfig& cfg) {
    require_psd(basis.source.kind);
    const SpectralProjector proj(basis, cfg.n_eigs(), labels.size());
    if (u.size() != labels.size()) throw InvalidInput("energy: size mismatch");
    const Vector a = proj.coefficients(u);
    const double quadratic = (proj.lambda().array() * a.array().square()).sum();
    return binary_energy_from_quadratic(quadratic, u, labels, cfg);
}

Vector energy_gradient(const OperatorHandle& op, const Vector& u, const BinaryLabels& labels,
                       const GLConfig& cfg) {
    require_psd(op.spec().kind);
    const double eps = cfg.epsilon();
    const Vector omega = labels.fidelity_weights(cfg.omega0());
    return eps * op.apply(u) + ((u.array().cube() - u.array()) / eps).matrix() -
           omega.cwiseProduct(labels.values() - u);
}

BinaryResult gl_binary(const Eigenbasis& basis, const BinaryLabels& labels, const GLConfig& cfg,
                       std::uint64_t /*init_seed*/, const BinaryObserver& observer) {
    require_psd(basis.source.kind);
    const SpectralProjector proj(basis, cfg.n_eigs(), labels.size());
    const Matrix& phi = proj.phi();
    const double eps = cfg.epsilon();
    const double tau = cfg.tau();
    const double c = cfg.c();
    const Vector& f = labels.values();
    const Vector omega = labels.fidelity_weights(cfg.omega0());
    const Vector denom = (1.0 + c * tau + eps * tau * proj.lambda().array()).matrix();

    Vector a = proj.coefficients(f);
    Vector u = phi * a;

    GLDiagnostics diag;
    for (int it = 1; it <= cfg.max_iter(); ++it) {
        const Vector nonlinear = (u.array().cube() - u.array()) / eps;
        const Vector forcing = omega.cwiseProduct(f - u);
        const Vector rhs = (1.0 + c * tau) * a + tau * proj.coefficients(forcing - nonlinear);
        Vector a_next = rhs.cwiseQuotient(denom);
        Vector u_next = phi * a_next;
        check_finite(u_next, it);

        diag.final_change = relative_change(u_next, u);
        diag.iterations = it;
        a = std::move(a_next);
        u = std::move(u_next);
        if (observer) observer(it, u);
        if (diag.final_change < cfg.tol()) {
            diag.converged = true;
            break;
        }
    }
    const double quadratic = (proj.lambda().array() * a.array().square()).sum();
    diag.final_energy = binary_energy_from_quadratic(quadratic, u, labels, cfg);
    return BinaryResult{u, sign_labels(u), diag};
}

MulticlassResult gl_multiclass(const Eigenbasis& basis, const MulticlassLabels& labels,
                               const GLConfig& cfg, std::uint64_t init_seed,
                               const MulticlassObserver& observer) {
    Rng rng(init_seed);
    Matrix initial(labels.size(), labels.num_classes());
    // Row-major draw order so the initialization does not depend on storage order.
    for (Index i = 0; i < initial.rows(); ++i) {
        for (Index j = 0; j < initial.cols(); ++j) initial(i, j) = uniform01(rng);
    }
    return gl_multiclass(basis, labels, cfg, initial, observer);
}

MulticlassResult gl_multiclass(const Eigenbasis& basis, const MulticlassLabels& labels,
                               const GLConfig& cfg, const Matrix& initial,
                               const MulticlassObserver& observer) {
    require_psd(basis.source.kind);
    if (initial.rows() != labels.size() || initial.cols() != labels.num_classes()) {
        throw InvalidInput("initialization shape does not match the labels");
    }
    const SpectralProjector proj(basis, cfg.n_eigs(), labels.size());
    const Matrix& phi = proj.phi();
    const double eps = cfg.epsilon();
    const double tau = cfg.tau();
    const double c = cfg.c();
    const Matrix& target = labels.targets();
    const Vector omega = labels.fidelity_weights(cfg.omega0());
    const Vector inv_denom = (1.0 + c * tau + eps * tau * proj.lambda().array()).inverse().matrix();

    Matrix u = initial;
    simplex_project_rows(u);
    for (Index i = 0; i < u.rows(); ++i) {
        if (labels.is_labeled(i)) u.row(i) = target.row(i);
    }

    GLDiagnostics diag;
    for (int it = 1; it <= cfg.max_iter(); ++it) {
        const Matrix a = proj.coefficients(u);
        const Matrix drive = omega.asDiagonal() * (target - u) - potential_derivative(u) / (2.0 * eps);
        const Matrix rhs = (1.0 + c * tau) * a + tau * proj.coefficients(drive);
        Matrix u_next = phi * (inv_denom.asDiagonal() * rhs);
        check_finite(u_next, it);
        simplex_project_rows(u_next);

        diag.final_change = relative_change(u_next, u);
        diag.iterations = it;
        u = std::move(u_next);
        if (observer) observer(it, u);
        if (diag.final_change < cfg.tol()) {
            diag.converged = true;
            break;
        }
    }
    const Matrix a = proj.coefficients(u);
    const double quadratic = (proj.lambda().asDiagonal() * a.rowwise().squaredNorm()).sum();
    diag.final_energy = 0.5 * eps * quadratic + multiclass_potential(u) / (2.0 * eps) +
                        fidelity(omega, target, u);
    return MulticlassResult{u, argmax_labels(u), diag};
}

Matrix potential_derivative(const Matrix& u) {
    const Index n = u.rows();
    const Index k = u.cols();
    Matrix t = Matrix::Zero(n, k);
    Vector dist(k);
    for (Index i = 0; i < n; ++i) {
        // dist[l] = ||u_i - e_l||_1
        const double total = u.row(i).cwiseAbs().sum();
        for (Index l = 0; l < k; ++l) {
            dist[l] = total - std::abs(u(i, l)) + std::abs(u(i, l) - 1.0);
        }
        for (Index l = 0; l < k; ++l) {
            double others = 1.0;
            for (Index m = 0; m < k; ++m) {
                if (m != l) others *= 0.25 * dist[m] * dist[m];
            }
            const double term = 0.5 * dist[l] * others;
            for (Index col = 0; col < k; ++col) t(i, col) += col == l ? -term : term;
        }
    }
    return t;
}

double multiclass_potential(const Matrix& u) {
    double total = 0.0;
    for (Index i = 0; i < u.rows(); ++i) {
        double prod = 1.0;
        for (Index l = 0; l < u.cols(); ++l) {
            const double d = u.row(i).cwiseAbs().sum() - std::abs(u(i, l)) + std::abs(u(i, l) - 1.0);
            prod *= 0.25 * d * d;
        }
        total += prod;
    }
    return total;
}

Vector simplex_project(const Vector& v) {
    const Index n = v.size();
    if (n == 0) return v;
    Vector s = v;
    std::sort(s.data(), s.data() + n);
    double threshold = (s.sum() - 1.0) / static_cast<double>(n);
    double tail = 0.0;
    for (Index i = n - 2; i >= 0; --i) {
        tail += s[i + 1];
        const double t = (tail - 1.0) / static_cast<double>(n - 1 - i);
        if (t >= s[i]) {
            threshold = t;
            break;
        }
    }
    return (v.array() - threshold).cwiseMax(0.0).matrix();
}

void simplex_project_rows(Matrix& u) {
    for (Index i = 0; i < u.rows(); ++i) {
        const Vector row = u.row(i).transpose();
        u.row(i) = simplex_project(row).transpose();
    }
}

std::vector<int> sign_labels(const Vector& u) {
    std::vector<int> out(static_cast<std::size_t>(u.size()));
    for (Index i = 0; i < u.size(); ++i) out[static_cast<std::size_t>(i)] = u[i] >= 0.0 ? 1 : -1;
    return out;
}

std::vector<int> argmax_labels(const Matrix& u) {
    std::vector<int> out(static_cast<std::size_t>(u.rows()));
    for (Index i = 0; i < u.rows(); ++i) {
        Index best = 0;
        for (Index j = 1; j < u.cols(); ++j) {
            if (u(i, j) > u(i, best)) best = j;
        }
        out[static_cast<std::size_t>(i)] = static_cast<int>(best);
    }
    return out;
}

}  // namespace signedgl
