#include "rlasso/core.hpp"
#include "rlasso/norms.hpp"
#include "support.hpp"

#include <doctest.h>

using namespace rlasso;
using namespace testing_support;

namespace {

const NormKind kinds[] = {NormKind::L1, NormKind::L2, NormKind::LInf};

NormTag random_tag(std::mt19937_64& rng, NormKind k, bool weighted) {
    if (!weighted) return NormTag(k);
    return NormTag(k, uniform_vector(rng, 4, 0.2, 3.0));
}

}  // namespace

TEST_CASE("norm_eval on small vectors") {
    CHECK(norm_eval(Vector::Map(std::vector<double>{3, 4}.data(), 2), NormTag::l2()) == doctest::Approx(5.0));
    CHECK(norm_eval(Vector::Zero(3), NormTag::l1()) == 0.0);
    Vector v(3);
    v << 1, -2, 3;
    CHECK(norm_eval(v, NormTag::linf()) == 3.0);
    CHECK(norm_eval(v, NormTag::l1()) == 6.0);
}

TEST_CASE("weighted norm scales coordinates") {
    Vector v(2), w(2);
    v << 1, -2;
    w << 3, 0.5;
    CHECK(norm_eval(v, NormTag(NormKind::L1, w)) == doctest::Approx(4.0));
    CHECK(norm_eval(v, NormTag(NormKind::LInf, w)) == doctest::Approx(3.0));
    CHECK(norm_eval(v, NormTag(NormKind::L2, w)) == doctest::Approx(std::sqrt(10.0)));
}

TEST_CASE("dual norm pairing") {
    CHECK(dual_norm(NormTag::l1()) == NormTag::linf());
    CHECK(dual_norm(NormTag::l2()) == NormTag::l2());
    CHECK(dual_norm(NormTag::linf()) == NormTag::l1());
    CHECK(dual_norm(dual_norm(NormTag::linf())) == NormTag::linf());

    Vector w(3);
    w << 2, 4, 0.5;
    const NormTag t(NormKind::L1, w);
    const NormTag d = dual_norm(t);
    CHECK(d.kind() == NormKind::LInf);
    CHECK(d.weights()(1) == doctest::Approx(0.25));
    CHECK(dual_norm(d) == t);
}

TEST_CASE("dual of a zero-weight norm is rejected") {
    Vector w(2);
    w << 1, 0;
    CHECK_THROWS_WITH_AS(dual_norm(NormTag(NormKind::L2, w)), "dual undefined for zero weight", std::domain_error);
    CHECK_THROWS_AS(NormTag(NormKind::L2, -Vector::Ones(2)), std::invalid_argument);
}

TEST_CASE("parse_norm_kind") {
    CHECK(parse_norm_kind("l1") == NormKind::L1);
    CHECK(parse_norm_kind("L2") == NormKind::L2);
    CHECK(parse_norm_kind("LInf") == NormKind::LInf);
    CHECK_THROWS_AS(parse_norm_kind("l3"), std::invalid_argument);
    for (NormKind k : kinds) CHECK(parse_norm_kind(to_string(k)) == k);
}

TEST_CASE("ProblemInstance validation and accessors") {
    Matrix A(2, 3);
    A << 1, 2, 3, 4, 5, 6;
    Vector b(2);
    b << 7, 8;
    const ProblemInstance p(A, b);
    CHECK(p.samples() == 2);
    CHECK(p.features() == 3);
    for (Index i = 0; i < 2; ++i)
        for (Index j = 0; j < 3; ++j) {
            CHECK(p.row(i)(j) == A(i, j));
            CHECK(p.column(j)(i) == A(i, j));
        }
    Vector x(3);
    x << 1, 0, -1;
    CHECK(p.residual(x)(0) == doctest::Approx(9.0));

    CHECK_THROWS_AS(ProblemInstance(Matrix(0, 2), Vector(0)), std::invalid_argument);
    CHECK_THROWS_AS(ProblemInstance(A, Vector::Zero(3)), std::invalid_argument);
    Matrix bad = A;
    bad(0, 0) = std::nan("");
    CHECK_THROWS_AS(ProblemInstance(bad, b), std::invalid_argument);
}

TEST_CASE("property: norm axioms and Hoelder on random vectors") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 300; ++trial) {
        for (NormKind k : kinds) {
            const NormTag t = random_tag(rng, k, trial % 2 == 1);
            const Vector v = gaussian_vector(rng, 4);
            const Vector w = gaussian_vector(rng, 4);
            const double alpha = gaussian_vector(rng, 1)(0);
            CHECK(norm_eval(v + w, t) <= norm_eval(v, t) + norm_eval(w, t) + 1e-12);
            CHECK(norm_eval(alpha * v, t) == doctest::Approx(std::abs(alpha) * norm_eval(v, t)).epsilon(1e-12));
            CHECK(std::abs(v.dot(w)) <= norm_eval(v, t) * norm_eval(w, dual_norm(t)) + 1e-12);
        }
    }
}

TEST_CASE("property: unweighted norms agree with hand-written p-norms") {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 100; ++trial) {
        const Vector v = gaussian_vector(rng, 6);
        for (NormKind k : kinds) CHECK(norm_eval(v, NormTag(k)) == doctest::Approx(pnorm(v, p_of(k))).epsilon(1e-14));
    }
}

TEST_CASE("property: subgradient attains the norm with unit dual norm") {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 200; ++trial) {
        for (NormKind k : kinds) {
            const NormTag t = random_tag(rng, k, trial % 2 == 0);
            const Vector v = gaussian_vector(rng, 4);
            const Vector y = norm_subgradient(v, t);
            CHECK(norm_eval(y, dual_norm(t)) <= 1.0 + 1e-12);
            CHECK(y.dot(v) == doctest::Approx(norm_eval(v, t)).epsilon(1e-12));
        }
    }
}

TEST_CASE("property: projections land in the ball and satisfy the obtuse-angle condition") {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 200; ++trial) {
        for (NormKind k : kinds) {
            const NormTag t = random_tag(rng, k, trial % 3 == 0);
            const Vector v = 3.0 * gaussian_vector(rng, 4);
            const double radius = 0.7;
            const Vector p = project_ball(v, t, radius);
            CHECK(norm_eval(p, t) <= radius + 1e-10);
            // Any ball member u satisfies (v - p)^T (u - p) <= 0.
            for (int s = 0; s < 10; ++s) {
                Vector u = gaussian_vector(rng, 4);
                u *= radius / norm_eval(u, t);
                CHECK((v - p).dot(u - p) <= 1e-9);
            }
        }
    }
}

TEST_CASE("property: Moreau decomposition links prox and dual-ball projection") {
    std::mt19937_64 rng(9);
    for (int trial = 0; trial < 200; ++trial) {
        for (NormKind k : kinds) {
            const NormTag t = random_tag(rng, k, trial % 2 == 1);
            const Vector v = 2.0 * gaussian_vector(rng, 4);
            const double scale = 0.8;
            const Vector sum = prox_norm(v, t, scale) + project_dual_ball(v, t, scale);
            CHECK((sum - v).norm() <= 1e-10);
            CHECK(dual_norm_value(project_dual_ball(v, t, scale), t) <= scale + 1e-10);
        }
    }
}

TEST_CASE("prox of the l1 norm is soft thresholding") {
    Vector v(4);
    v << 3, -0.5, 0.2, -2;
    const Vector s = soft_threshold(v, Vector::Constant(4, 1.0));
    Vector expected(4);
    expected << 2, 0, 0, -1;
    CHECK((s - expected).norm() == 0.0);
    CHECK((prox_norm(v, NormTag::l1(), 1.0) - expected).norm() <= 1e-15);
}

TEST_CASE("dual_norm_value handles zero weights") {
    Vector w(2);
    w << 1, 0;
    const NormTag t(NormKind::L2, w);
    Vector u(2);
    u << 2, 0;
    CHECK(dual_norm_value(u, t) == doctest::Approx(2.0));
    u(1) = 1e-3;
    CHECK(std::isinf(dual_norm_value(u, t)));
}
