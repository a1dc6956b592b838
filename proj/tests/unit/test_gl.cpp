#include "support.hpp"

#include <doctest.h>

#include <Eigen/LU>

#include <cmath>
#include <limits>

using namespace testing;
using doctest::Approx;

namespace {

// Direct evaluation of the binary energy.
double energy_oracle(const Matrix& s, const Vector& u, const Vector& f, double eps, double omega0) {
    double quad = 0.0;
    for (Index i = 0; i < u.size(); ++i) {
        for (Index j = 0; j < u.size(); ++j) quad += u[i] * s(i, j) * u[j];
    }
    double well = 0.0;
    double fid = 0.0;
    for (Index i = 0; i < u.size(); ++i) {
        well += (u[i] * u[i] - 1.0) * (u[i] * u[i] - 1.0);
        if (f[i] != 0.0) fid += (f[i] - u[i]) * (f[i] - u[i]);
    }
    return eps / 2.0 * quad + well / (4.0 * eps) + omega0 / 2.0 * fid;
}

// Euclidean projection onto the simplex by enumerating active sets.
Vector simplex_oracle(const Vector& v) {
    const Index k = v.size();
    Vector best;
    double best_dist = std::numeric_limits<double>::infinity();
    for (unsigned mask = 1; mask < (1u << k); ++mask) {
        Index count = 0;
        double sum = 0.0;
        for (Index l = 0; l < k; ++l) {
            if (mask & (1u << l)) {
                ++count;
                sum += v[l];
            }
        }
        const double shift = (sum - 1.0) / static_cast<double>(count);
        Vector x = Vector::Zero(k);
        bool feasible = true;
        for (Index l = 0; l < k; ++l) {
            if (mask & (1u << l)) {
                x[l] = v[l] - shift;
                feasible = feasible && x[l] >= -1e-15;
            }
        }
        if (!feasible) continue;
        const double dist = (x - v).squaredNorm();
        if (dist < best_dist) {
            best_dist = dist;
            best = x;
        }
    }
    return best;
}

// Potential prod_l 1/4 ||u - e_l||_1^2 of a single row.
double row_potential(const Vector& u) {
    double p = 1.0;
    for (Index l = 0; l < u.size(); ++l) {
        double d = 0.0;
        for (Index m = 0; m < u.size(); ++m) d += std::abs(u[m] - (m == l ? 1.0 : 0.0));
        p *= 0.25 * d * d;
    }
    return p;
}

BinaryLabels two_clique_labels() {
    Vector f = Vector::Zero(10);
    f[0] = 1.0;
    f[5] = -1.0;
    return BinaryLabels(f);
}

Eigenbasis two_clique_basis() {
    return smallest_eigs(build_operator(cliques({5, 5}), {OperatorKind::SN}), 10, 0);
}

}  // namespace

TEST_CASE("GLConfig defaults and validation") {
    const GLConfig cfg;
    CHECK(cfg.epsilon() == 0.1);
    CHECK(cfg.omega0() == 1000.0);
    CHECK(cfg.c() == Approx(3.0 / 0.1 + 1000.0));
    CHECK(cfg.tau() == 0.1);
    CHECK(cfg.max_iter() == 2000);
    CHECK(cfg.tol() == 1e-6);

    GLParams p;
    p.c = 1000.0 + 1.0 / 0.1 - 1.0;
    CHECK_THROWS_AS(GLConfig{p}, InvalidInput);
    p.c = std::nullopt;
    p.epsilon = 0.0;
    CHECK_THROWS_AS(GLConfig{p}, InvalidInput);
    p.epsilon = 0.1;
    p.tau = -1.0;
    CHECK_THROWS_AS(GLConfig{p}, InvalidInput);
}

TEST_CASE("label containers validate input") {
    CHECK_THROWS_AS(BinaryLabels(Vector{{0.5, 1.0}}), InvalidInput);
    const BinaryLabels b(Vector{{1.0, 0.0, -1.0}});
    CHECK(b.labeled_count() == 2);
    CHECK(b.fidelity_weights(7.0) == Vector{{7.0, 0.0, 7.0}});
    const std::vector<int> bad = {0, 3};
    CHECK_THROWS_AS(MulticlassLabels(bad, 3), InvalidInput);
    const std::vector<int> cls = {2, -1};
    const MulticlassLabels m(cls, 3);
    CHECK(m.targets().row(0) == Eigen::RowVector3d(0, 0, 1));
    CHECK(m.targets().row(1).isZero());
}

TEST_CASE("energy examples") {
    const GLConfig cfg;
    const SignedGraph g = balanced_four();
    const auto sr = signed_ratio(g, false);
    const Vector u{{1.0, 1.0, -1.0, -1.0}};
    CHECK(energy(sr, u, BinaryLabels(u), cfg) == Approx(0.0));

    const Vector zero = Vector::Zero(4);
    CHECK(energy(sr, zero, BinaryLabels(zero), cfg) == Approx(4.0 / (4.0 * 0.1)));

    const SignedGraph r = random_signed_graph(10, 0.5, 0.4, 3);
    const auto op = build_operator(r, {OperatorKind::AM});
    Vector f = Vector::Zero(10);
    f[1] = 1.0;
    f[7] = -1.0;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const Vector v = random_vector(10, seed, -1.5, 1.5);
        const double oracle = energy_oracle(Matrix(op.matrix()), v, f, 0.1, 1000.0);
        CHECK(energy(op, v, BinaryLabels(f), cfg) == Approx(oracle).epsilon(1e-12));
        const Eigenbasis full = full_dense_eigs(op);
        CHECK(energy(full, v, BinaryLabels(f), cfg) == Approx(oracle).epsilon(1e-10));
    }
}

TEST_CASE("energy rejects indefinite operators") {
    const SignedGraph g = random_signed_graph(8, 0.6, 0.5, 1);
    const auto br = build_operator(g, {OperatorKind::BR});
    const Vector u = Vector::Zero(8);
    CHECK_THROWS_AS(energy(br, u, BinaryLabels(u), GLConfig{}), NotPsdError);
    const Eigenbasis b = full_dense_eigs(br);
    CHECK_THROWS_AS(gl_binary(b, BinaryLabels(u), GLConfig{}), NotPsdError);
}

TEST_CASE("energy gradient matches central differences") {
    const SignedGraph g = random_signed_graph(30, 0.2, 0.4, 11);
    const auto op = build_operator(g, {OperatorKind::SN});
    Vector f = Vector::Zero(30);
    for (Index i = 0; i < 30; i += 4) f[i] = i % 8 == 0 ? 1.0 : -1.0;
    const BinaryLabels labels(f);
    const GLConfig cfg;
    const double h = 1e-6;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const Vector u = random_vector(30, 1000 + seed, -1.2, 1.2);
        const Vector grad = energy_gradient(op, u, labels, cfg);
        Vector fd(30);
        for (Index i = 0; i < 30; ++i) {
            Vector up = u, dn = u;
            up[i] += h;
            dn[i] -= h;
            fd[i] = (energy(op, up, labels, cfg) - energy(op, dn, labels, cfg)) / (2.0 * h);
        }
        CHECK((grad - fd).norm() <= 1e-6 * grad.norm());
    }
}

TEST_CASE("two cliques: binary labels follow the clique and match brute force") {
    const Eigenbasis basis = two_clique_basis();
    const BinaryLabels labels = two_clique_labels();
    const GLConfig cfg;
    const BinaryResult r = gl_binary(basis, labels, cfg);
    CHECK(r.diagnostics.converged);
    for (Index i = 0; i < 10; ++i) CHECK(r.labels[i] == (i < 5 ? 1 : -1));

    const auto op = build_operator(cliques({5, 5}), {OperatorKind::SN});
    double best = std::numeric_limits<double>::infinity();
    Vector argmin;
    for (unsigned mask = 0; mask < 1024; ++mask) {
        Vector u(10);
        for (Index i = 0; i < 10; ++i) u[i] = (mask >> i) & 1u ? 1.0 : -1.0;
        const double e = energy(op, u, labels, cfg);
        if (e < best) {
            best = e;
            argmin = u;
        }
    }
    for (Index i = 0; i < 10; ++i) CHECK(r.labels[i] == static_cast<int>(argmin[i]));
}

TEST_CASE("fully labeled input is reproduced") {
    const SignedGraph g = random_signed_graph(25, 0.3, 0.4, 2);
    const Eigenbasis basis = full_dense_eigs(build_operator(g, {OperatorKind::SN}));
    Vector f(25);
    for (Index i = 0; i < 25; ++i) f[i] = (i * 7) % 3 == 0 ? 1.0 : -1.0;
    const BinaryResult r = gl_binary(basis, BinaryLabels(f), GLConfig{});
    for (Index i = 0; i < 25; ++i) CHECK(r.labels[i] == static_cast<int>(f[i]));

    std::vector<int> cls(25);
    for (Index i = 0; i < 25; ++i) cls[i] = static_cast<int>(i % 3);
    const MulticlassResult m = gl_multiclass(basis, MulticlassLabels(cls, 3), GLConfig{}, 5);
    CHECK(m.labels == cls);
    for (Index i = 0; i < 25; ++i) CHECK(m.u(i, cls[i]) > 0.95);
}

TEST_CASE("single isolated labeled node") {
    const SignedGraph g = SignedGraph::from_edges(1, std::vector<WeightedEdge>{});
    const Eigenbasis basis = full_dense_eigs(build_operator(g, {OperatorKind::L}));
    const BinaryResult r = gl_binary(basis, BinaryLabels(Vector::Ones(1)), GLConfig{});
    CHECK(r.u[0] > 0.0);
    CHECK(r.labels[0] == 1);
    CHECK(r.diagnostics.converged);
}

TEST_CASE("binary iterates match a node-space scheme with the full basis") {
    for (std::uint64_t seed = 0; seed < 3; ++seed) {
        const SignedGraph g = random_signed_graph(30, 0.2, 0.4, 20 + seed);
        const auto op = build_operator(g, {OperatorKind::AM});
        const Eigenbasis basis = full_dense_eigs(op);
        Vector f = Vector::Zero(30);
        for (Index i = 0; i < 30; i += 5) f[i] = (i / 5) % 2 == 0 ? 1.0 : -1.0;
        GLParams p;
        p.max_iter = 60;
        p.tol = 0.0;
        const GLConfig cfg(p);

        const Vector omega = BinaryLabels(f).fidelity_weights(cfg.omega0());
        const Matrix lhs = (1.0 + cfg.c() * cfg.tau()) * Matrix::Identity(30, 30) +
                           cfg.epsilon() * cfg.tau() * Matrix(op.matrix());
        const Eigen::PartialPivLU<Matrix> lu(lhs);
        Vector u = f;
        double worst = 0.0;
        gl_binary(basis, BinaryLabels(f), cfg, 0, [&](int, const Vector& it) {
            const Vector cubic = u.array().cube() - u.array();
            const Vector rhs = (1.0 + cfg.c() * cfg.tau()) * u +
                               cfg.tau() * (omega.cwiseProduct(f - u) - cubic / cfg.epsilon());
            u = lu.solve(rhs);
            worst = std::max(worst, (it - u).cwiseAbs().maxCoeff());
        });
        CHECK(worst <= 1e-8);
    }
}

TEST_CASE("binary energy decreases monotonically with the full basis") {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const SignedGraph g = random_signed_graph(60, 0.1, 0.4, 300 + seed);
        const Eigenbasis basis = full_dense_eigs(build_operator(g, {OperatorKind::SN}));
        Vector f = Vector::Zero(60);
        for (Index i = 0; i < 60; i += 6) f[i] = (i / 6) % 2 == 0 ? 1.0 : -1.0;
        const BinaryLabels labels(f);
        GLParams p;
        p.max_iter = 300;
        p.tol = 0.0;
        const GLConfig cfg(p);
        double prev = energy(basis, f, labels, cfg);
        double worst = -std::numeric_limits<double>::infinity();
        gl_binary(basis, labels, cfg, 0, [&](int, const Vector& u) {
            const double e = energy(basis, u, labels, cfg);
            worst = std::max(worst, e - prev);
            prev = e;
        });
        CHECK(worst <= 1e-12);
    }
}

TEST_CASE("label fidelity at convergence") {
    const SsbmGraph s = generate_ssbm({200, 2, 0.1, 0.1, 0.05, 9});
    const SignedGraph g = largest_connected_component(s.graph, Connectivity::signed_union).graph;
    const Eigenbasis basis = smallest_eigs(build_operator(g, {OperatorKind::SN}), 20, 0);
    Vector f = Vector::Zero(g.size());
    for (Index i = 0; i < g.size(); i += 10) f[i] = i < g.size() / 2 ? 1.0 : -1.0;
    const BinaryLabels labels(f);
    const BinaryResult r = gl_binary(basis, labels, GLConfig{});
    Index kept = 0;
    for (Index i = 0; i < g.size(); ++i) kept += labels.is_labeled(i) && r.labels[i] == f[i] ? 1 : 0;
    CHECK(static_cast<double>(kept) >= 0.99 * static_cast<double>(labels.labeled_count()));
}

TEST_CASE("non-finite iterates raise a divergence error") {
    Eigenbasis basis = two_clique_basis();
    basis.values[3] = std::numeric_limits<double>::quiet_NaN();
    try {
        gl_binary(basis, two_clique_labels(), GLConfig{});
        FAIL("expected divergence");
    } catch (const DivergenceError& e) {
        CHECK(e.iteration() >= 1);
    }
}

TEST_CASE("n_eigs truncates the basis") {
    const Eigenbasis basis = two_clique_basis();
    GLParams p;
    p.n_eigs = 2;
    const BinaryResult r = gl_binary(basis, two_clique_labels(), GLConfig(p));
    for (Index i = 0; i < 10; ++i) CHECK(r.labels[i] == (i < 5 ? 1 : -1));
    p.n_eigs = 11;
    CHECK_THROWS_AS(gl_binary(basis, two_clique_labels(), GLConfig(p)), InvalidInput);
}

TEST_CASE("potential derivative examples") {
    Matrix vertex(1, 2);
    vertex << 1.0, 0.0;
    CHECK(potential_derivative(vertex).isZero());

    Matrix center(1, 2);
    center << 0.5, 0.5;
    const Matrix t = potential_derivative(center);
    CHECK(t(0, 0) == Approx(t(0, 1)));
    // d_1 = d_2 = 1 at the barycenter, so the two summands cancel.
    CHECK(std::abs(t(0, 0)) < 1e-15);
    CHECK(multiclass_potential(center) == Approx(1.0 / 16.0));
}

TEST_CASE("potential derivative matches finite differences at interior points") {
    Rng rng(77);
    const double h = 1e-6;
    for (int trial = 0; trial < 20; ++trial) {
        const Index k = 2 + static_cast<Index>(trial % 4);
        Vector x(k);
        for (Index l = 0; l < k; ++l) x[l] = 0.1 + uniform01(rng);
        x /= x.sum();
        Matrix row = x.transpose();
        const Vector t = potential_derivative(row).row(0).transpose();
        Vector fd(k);
        for (Index l = 0; l < k; ++l) {
            Vector up = x, dn = x;
            up[l] += h;
            dn[l] -= h;
            fd[l] = (row_potential(up) - row_potential(dn)) / (2.0 * h);
        }
        CHECK((t - fd).norm() <= 1e-5 * std::max(t.norm(), 1e-12));
    }
}

TEST_CASE("simplex projection examples") {
    CHECK((simplex_project(Vector{{0.5, 0.5}}) - Vector{{0.5, 0.5}}).norm() < 1e-15);
    CHECK((simplex_project(Vector{{2.0, 0.0}}) - Vector{{1.0, 0.0}}).norm() < 1e-15);
    CHECK((simplex_project(Vector{{0.6, 0.6}}) - Vector{{0.5, 0.5}}).norm() < 1e-15);
}

TEST_CASE("simplex projection matches the active-set oracle") {
    Rng rng(5);
    for (int trial = 0; trial < 1000; ++trial) {
        const Index k = 1 + static_cast<Index>(uniform_index(rng, 6));
        Vector v(k);
        for (Index l = 0; l < k; ++l) v[l] = 4.0 * uniform01(rng) - 2.0;
        const Vector x = simplex_project(v);
        CHECK((x - simplex_oracle(v)).cwiseAbs().maxCoeff() <= 1e-8);
        CHECK(x.minCoeff() >= 0.0);
        CHECK(std::abs(x.sum() - 1.0) <= 1e-12);
    }
}

TEST_CASE("multiclass with K = 2 agrees with the binary scheme on the clique subspace") {
    const Eigenbasis basis = two_clique_basis();
    GLParams p;
    p.n_eigs = 2;
    const GLConfig cfg(p);
    const BinaryResult b = gl_binary(basis, two_clique_labels(), cfg);
    std::vector<int> cls(10, -1);
    cls[0] = 0;
    cls[5] = 1;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const MulticlassResult m = gl_multiclass(basis, MulticlassLabels(cls, 2), cfg, seed);
        for (Index i = 0; i < 10; ++i) CHECK(m.labels[i] == (b.labels[i] > 0 ? 0 : 1));
    }
}

TEST_CASE("three cliques with one label each") {
    const Eigenbasis basis = full_dense_eigs(build_operator(cliques({5, 6, 7}), {OperatorKind::SN}));
    std::vector<int> cls(18, -1);
    cls[0] = 0;
    cls[5] = 1;
    cls[11] = 2;
    GLParams p;
    p.n_eigs = 3;
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const MulticlassResult m = gl_multiclass(basis, MulticlassLabels(cls, 3), GLConfig(p), seed);
        for (Index i = 0; i < 18; ++i) CHECK(m.labels[i] == (i < 5 ? 0 : i < 11 ? 1 : 2));
    }
}

TEST_CASE("multiclass rows stay on the simplex") {
    const SsbmGraph s = generate_ssbm({90, 3, 0.2, 0.1, 0.05, 4});
    const SignedGraph g = largest_connected_component(s.graph, Connectivity::signed_union).graph;
    const Eigenbasis basis = smallest_eigs(build_operator(g, {OperatorKind::AM}), 15, 0);
    std::vector<int> cls(static_cast<std::size_t>(g.size()), -1);
    for (Index i = 0; i < g.size(); i += 6) cls[i] = static_cast<int>(i % 3);
    double worst_neg = 0.0;
    double worst_sum = 0.0;
    gl_multiclass(basis, MulticlassLabels(cls, 3), GLConfig{}, 8, [&](int, const Matrix& u) {
        worst_neg = std::min(worst_neg, u.minCoeff());
        worst_sum = std::max(worst_sum, (u.rowwise().sum().array() - 1.0).abs().maxCoeff());
    });
    CHECK(worst_neg >= -1e-12);
    CHECK(worst_sum <= 1e-12);
}

TEST_CASE("multiclass is equivariant under class permutation") {
    const SsbmGraph s = generate_ssbm({60, 3, 0.3, 0.2, 0.0, 6});
    const SignedGraph g = largest_connected_component(s.graph, Connectivity::signed_union).graph;
    const Eigenbasis basis = smallest_eigs(build_operator(g, {OperatorKind::SN}), 12, 0);
    const Index n = g.size();
    std::vector<int> cls(static_cast<std::size_t>(n), -1);
    for (Index i = 0; i < n; i += 5) cls[i] = s.blocks[i];
    Matrix init(n, 3);
    Rng rng(12);
    for (Index i = 0; i < n; ++i) {
        for (Index l = 0; l < 3; ++l) init(i, l) = uniform01(rng);
    }
    const std::array<int, 3> perm = {2, 0, 1};
    std::vector<int> pcls = cls;
    for (auto& c : pcls) {
        if (c >= 0) c = perm[c];
    }
    Matrix pinit(n, 3);
    for (int l = 0; l < 3; ++l) pinit.col(perm[l]) = init.col(l);

    const MulticlassResult a = gl_multiclass(basis, MulticlassLabels(cls, 3), GLConfig{}, init);
    const MulticlassResult b = gl_multiclass(basis, MulticlassLabels(pcls, 3), GLConfig{}, pinit);
    for (Index i = 0; i < n; ++i) CHECK(b.labels[i] == perm[a.labels[i]]);
}

TEST_CASE("multiclass is deterministic in its seed") {
    const Eigenbasis basis = two_clique_basis();
    std::vector<int> cls(10, -1);
    cls[2] = 1;
    cls[7] = 0;
    const MulticlassResult a = gl_multiclass(basis, MulticlassLabels(cls, 2), GLConfig{}, 99);
    const MulticlassResult b = gl_multiclass(basis, MulticlassLabels(cls, 2), GLConfig{}, 99);
    CHECK(a.u == b.u);
}

TEST_CASE("readouts") {
    CHECK(sign_labels(Vector{{0.0, -0.1, 2.0}}) == std::vector<int>{1, -1, 1});
    Matrix u(2, 3);
    u << 0.2, 0.4, 0.4, 0.5, 0.1, 0.4;
    CHECK(argmax_labels(u) == std::vector<int>{1, 0});
}
