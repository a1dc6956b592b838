#include "support.hpp"

#include <doctest.h>

#include <Eigen/SVD>

#include <complex>
#include <filesystem>
#include <fstream>

using namespace testing;
using doctest::Approx;

namespace {

OperatorHandle dense_standard(const Matrix& m, OperatorKind kind = OperatorKind::L) {
    return OperatorHandle::standard(sparse(m), {kind});
}

// Cosines of the principal angles between two column spaces, both orthonormal
// in the given inner product.
Vector principal_cosines(const Matrix& x, const Matrix& y, const Matrix& mass) {
    return Eigen::JacobiSVD<Matrix>(x.transpose() * mass * y).singularValues();
}

EigenOptions lanczos_only() {
    EigenOptions o;
    o.method = EigenMethod::lanczos;
    return o;
}

}  // namespace

TEST_CASE("identity and path examples") {
    const Eigenbasis id = smallest_eigs(dense_standard(Matrix::Identity(5, 5)), 3, 0);
    CHECK(id.values == Vector::Ones(3));
    CHECK((id.vectors.transpose() * id.vectors - Matrix::Identity(3, 3)).norm() < 1e-12);

    Matrix l(2, 2);
    l << 1, -1, -1, 1;
    const Eigenbasis p = smallest_eigs(dense_standard(l), 2, 0);
    CHECK(p.values[0] == Approx(0.0));
    CHECK(p.values[1] == Approx(2.0));
}

TEST_CASE("full dense eigs of a diagonal matrix") {
    const Matrix d = Vector{{3.0, 1.0, 2.0}}.asDiagonal();
    CHECK(full_dense_eigs(dense_standard(d)).values == Vector{{1.0, 2.0, 3.0}});
}

TEST_CASE("reconstruction of a random symmetric matrix") {
    const Matrix s = random_symmetric(50, 4);
    const Eigenbasis b = full_dense_eigs(dense_standard(s, OperatorKind::BR));
    const Matrix r = b.vectors * b.values.asDiagonal() * b.vectors.transpose();
    CHECK((r - s).norm() <= 1e-8 * s.norm());
    for (Index i = 1; i < b.size(); ++i) CHECK(b.values[i] >= b.values[i - 1]);
}

TEST_CASE("invalid k is rejected") {
    const auto op = dense_standard(Matrix::Identity(4, 4));
    CHECK_THROWS_AS(smallest_eigs(op, 0, 0), InvalidInput);
    CHECK_THROWS_AS(smallest_eigs(op, 5, 0), InvalidInput);
}

TEST_CASE("sign canonicalization") {
    Matrix v(3, 2);
    v << 0.1, -0.5, -0.9, 0.5, 0.2, 0.1;
    canonicalize_signs(v);
    CHECK(v(1, 0) == Approx(0.9));
    CHECK(v(0, 1) == Approx(0.5));
}

TEST_CASE("L_SN spectra lie in [0, 2]") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const SignedGraph g = random_signed_graph(60, 0.1, 0.5, seed);
        const Vector ev = full_dense_eigs(build_operator(g, {OperatorKind::SN})).values;
        CHECK(ev.minCoeff() >= -1e-10);
        CHECK(ev.maxCoeff() <= 2.0 + 1e-10);
    }
}

TEST_CASE("generalized pair with B = I matches the standard solve") {
    const Matrix a = random_spd(30, 3);
    const auto gen = OperatorHandle::generalized(sparse(a), sparse(Matrix::Identity(30, 30)), {OperatorKind::SPONGE});
    const auto std_op = dense_standard(a);
    CHECK((smallest_eigs(gen, 6, 0).values - smallest_eigs(std_op, 6, 0).values).norm() < 1e-8);
}

TEST_CASE("generalized eigenvalues match a nonsymmetric dense oracle") {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const SignedGraph g = random_signed_graph(40, 0.2, 0.4, 40 + seed);
        const auto op = sponge(g);
        const Eigenbasis b = full_dense_eigs(op);
        const Matrix a(op.matrix());
        const Matrix m(op.mass());
        Eigen::EigenSolver<Matrix> oracle(m.inverse() * a, false);
        Vector ref = oracle.eigenvalues().real();
        std::sort(ref.data(), ref.data() + ref.size());
        CHECK((b.values - ref).cwiseAbs().maxCoeff() < 1e-6);
        CHECK((b.vectors.transpose() * m * b.vectors - Matrix::Identity(40, 40)).cwiseAbs().maxCoeff() < 1e-8);
        CHECK(max_residual(op, b) < 1e-8);
    }
}

TEST_CASE("Lanczos agrees with the dense solver") {
    for (OperatorKind kind : {OperatorKind::SN, OperatorKind::AM, OperatorKind::L_plus_sym, OperatorKind::SPONGE,
                              OperatorKind::BR}) {
        for (std::uint64_t seed = 0; seed < 3; ++seed) {
            const SignedGraph raw = random_signed_graph(150, 0.06, 0.35, 70 + seed);
            const Connectivity mode =
                kind == OperatorKind::L_plus_sym ? Connectivity::positive : Connectivity::signed_union;
            const SignedGraph g = largest_connected_component(raw, mode).graph;
            const auto op = build_operator(g, {kind});
            const Index k = 12;
            const Eigenbasis dense = smallest_eigs(op, k, seed);
            const Eigenbasis lan = smallest_eigs(op, k, seed, lanczos_only());
            CHECK_MESSAGE((dense.values - lan.values).cwiseAbs().maxCoeff() < 1e-6, to_string(kind));
            CHECK(max_residual(op, lan) <= 1e-6);
            const Matrix mass = op.is_generalized() ? Matrix(op.mass()) : Matrix::Identity(g.size(), g.size());
            CHECK((lan.vectors.transpose() * mass * lan.vectors - Matrix::Identity(k, k)).cwiseAbs().maxCoeff() <
                  1e-8);
            // Compare invariant subspaces, leaving out the last pair in case it
            // splits a cluster.
            const Vector cosines = principal_cosines(dense.vectors.leftCols(k - 1), lan.vectors.leftCols(k - 1), mass);
            CHECK(cosines.minCoeff() > 1.0 - 1e-6);
        }
    }
}

TEST_CASE("Lanczos handles a repeated eigenvalue block") {
    // Disjoint equal cliques give eigenvalue 0 with multiplicity 3.
    const SignedGraph g = cliques({20, 20, 20, 7});
    const auto op = build_operator(g, {OperatorKind::Lsym});
    const Eigenbasis lan = smallest_eigs(op, 3, 1, lanczos_only());
    CHECK(lan.values.cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("eigensolver determinism") {
    const SignedGraph g = random_signed_graph(120, 0.08, 0.4, 5);
    const auto op = build_operator(g, {OperatorKind::SN});
    for (auto options : {EigenOptions{}, lanczos_only()}) {
        const Eigenbasis a = smallest_eigs(op, 8, 42, options);
        const Eigenbasis b = smallest_eigs(op, 8, 42, options);
        CHECK(a.values == b.values);
        CHECK(a.vectors == b.vectors);
        for (Index c = 0; c < a.vectors.cols(); ++c) {
            Index arg;
            a.vectors.col(c).cwiseAbs().maxCoeff(&arg);
            CHECK(a.vectors(arg, c) > 0.0);
        }
    }
}

TEST_CASE("leading pairs") {
    const Eigenbasis b = full_dense_eigs(build_operator(cliques({3, 4}), {OperatorKind::L}));
    const Eigenbasis l = b.leading(3);
    CHECK(l.size() == 3);
    CHECK(l.vectors == b.vectors.leftCols(3));
}

TEST_CASE("cache round trip and key checks") {
    const SignedGraph g = random_signed_graph(30, 0.2, 0.4, 8);
    const auto op = build_operator(g, {OperatorKind::AM});
    const Eigenbasis b = smallest_eigs(op, 5, 0);
    const auto path = std::filesystem::temp_directory_path() / "signedgl_cache_test.eig";
    const CacheKey key{graph_hash(g), OperatorKind::AM, 5};
    write_eigenbasis(path, key, b);
    const Eigenbasis r = read_eigenbasis(path, key);
    CHECK(r.values == b.values);
    CHECK(r.vectors == b.vectors);
    CHECK(r.source.kind == OperatorKind::AM);

    CHECK_THROWS_AS(read_eigenbasis(path, CacheKey{key.dataset_hash + 1, OperatorKind::AM, 5}), InvalidInput);
    CHECK_THROWS_AS(read_eigenbasis(path, CacheKey{key.dataset_hash, OperatorKind::SN, 5}), InvalidInput);
    {
        std::ofstream trunc(path, std::ios::binary | std::ios::trunc);
        trunc << "SGLEIGEN";
    }
    CHECK_THROWS_AS(read_eigenbasis(path, key), InvalidInput);
    std::filesystem::remove(path);
}

TEST_CASE("graph hash depends on weights and signs only") {
    const SignedGraph a = random_signed_graph(20, 0.3, 0.5, 1);
    const SignedGraph b(a.positive(), a.negative(), std::vector<std::string>(20, "x"));
    CHECK(graph_hash(a) == graph_hash(b));
    const SignedGraph flipped(a.negative(), a.positive());
    CHECK(graph_hash(a) != graph_hash(flipped));
}
