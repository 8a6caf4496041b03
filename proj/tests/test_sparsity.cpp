#include "rlasso/sparsity.hpp"
#include "support.hpp"

#include <doctest.h>

using namespace rlasso;
using namespace testing_support;

namespace {

/// Instance whose support features and target live in the first two
/// coordinates and whose other features live in the orthogonal complement,
/// each with norm `outside_norm`.
ProblemInstance incoherent_instance(std::mt19937_64& rng, Index n, Index k, Index m, double outside_norm) {
    Matrix A = Matrix::Zero(n, m);
    A.topLeftCorner(2, k) = gaussian_matrix(rng, 2, k);
    for (Index j = k; j < m; ++j) {
        Vector a = Vector::Zero(n);
        a.tail(n - 2) = gaussian_vector(rng, n - 2);
        A.col(j) = a * (outside_norm / a.norm());
    }
    Vector b = Vector::Zero(n);
    b.head(2) = gaussian_vector(rng, 2);
    return ProblemInstance(A, b);
}

}  // namespace

TEST_CASE("orthogonal and in-span features") {
    Matrix A(3, 3);
    A << 1, 0, 2,
         0, 0, 0,
         0, 1, 0;
    Vector b(3);
    b << 1, 0, 0;
    const ProblemInstance p(A, b);
    const SupportCertificate cert = incoherence_certificate(p, {0}, 0.1);
    REQUIRE(cert.outside.size() == 2);
    CHECK(cert.projection_norms(0) == doctest::Approx(0.0));   // e3 is orthogonal to span{e1}
    CHECK(cert.projection_norms(1) == doctest::Approx(2.0));   // 2 e1 lies in it
    CHECK_FALSE(cert.verdict);
    CHECK(incoherence_certificate(p, {0}, 2.0).verdict);
    CHECK(incoherence_certificate(p, {0}, 2.0 + 5e-10).verdict);
    CHECK_THROWS_AS(incoherence_certificate(p, {0, 0}, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(incoherence_certificate(p, {3}, 1.0), std::invalid_argument);
}

TEST_CASE("property: projection norms obey Pythagoras and bound sampled span directions") {
    std::mt19937_64 rng(1);
    for (int trial = 0; trial < 10; ++trial) {
        const ProblemInstance p(gaussian_matrix(rng, 6, 5), gaussian_vector(rng, 6));
        const std::vector<Index> I{0, 2};
        const SupportCertificate cert = incoherence_certificate(p, I, 1.0);
        CHECK(cert.basis.cols() == 3);
        CHECK((cert.basis.transpose() * cert.basis - Matrix::Identity(3, 3)).norm() <= 1e-12);
        for (std::size_t t = 0; t < cert.outside.size(); ++t) {
            const Vector a = p.column(cert.outside[t]);
            const double proj = cert.projection_norms(static_cast<Index>(t));
            const double orth = cert.orthogonal_norms(static_cast<Index>(t));
            CHECK(std::abs(proj * proj + orth * orth - a.squaredNorm()) <= 1e-10 * (1.0 + a.squaredNorm()));
        }
        // Unit vectors of span{a_0, a_2, b} built without the certificate's basis.
        Matrix span(6, 3);
        span << p.column(0), p.column(2), p.b();
        const Eigen::HouseholderQR<Matrix> qr(span);
        const Matrix Q = qr.householderQ() * Matrix::Identity(6, 3);
        Vector best = Vector::Zero(static_cast<Index>(cert.outside.size()));
        for (int s = 0; s < 100000; ++s) {
            Vector v = Q * gaussian_vector(rng, 3);
            v.normalize();
            for (std::size_t t = 0; t < cert.outside.size(); ++t) {
                best(static_cast<Index>(t)) = std::max(best(static_cast<Index>(t)), v.dot(p.column(cert.outside[t])));
            }
        }
        for (Index t = 0; t < best.size(); ++t) {
            CHECK(best(t) <= cert.projection_norms(t) + 1e-12);
            CHECK(best(t) >= cert.projection_norms(t) - 1e-3 * (1.0 + cert.projection_norms(t)));
        }
    }
}

TEST_CASE("certified instances have zero weights outside the support") {
    std::mt19937_64 rng(2);
    for (int trial = 0; trial < 10; ++trial) {
        const double c = 0.4;
        const ProblemInstance p = incoherent_instance(rng, 6, 2, 5, 0.9 * c);
        const SupportCertificate cert = incoherence_certificate(p, {0, 1}, c);
        REQUIRE(cert.verdict);
        const ZeroSupportCheck chk = verify_zero_support(p, {0, 1}, c);
        CHECK(chk.status == SupportStatus::Zero);
        CHECK(chk.solution.converged);
    }
}

TEST_CASE("a vacuous radius blocks the zero-support check") {
    std::mt19937_64 rng(3);
    const ProblemInstance p(gaussian_matrix(rng, 5, 4), gaussian_vector(rng, 5));
    CHECK_FALSE(incoherence_certificate(p, {0}, 0.0).verdict);
    CHECK_THROWS_AS(verify_zero_support(p, {0}, 0.0), std::invalid_argument);
}

TEST_CASE("violated hypothesis: an efficient outside feature enters the fit") {
    // a_1 = 0.3 e1 has projection norm 1.5 c with c = 0.2 and fits b = e1 more cheaply than a_0 = 0.1 e1.
    Matrix A(2, 2);
    A << 0.1, 0.3,
         0.0, 0.0;
    Vector b(2);
    b << 1.0, 0.0;
    const ProblemInstance p(A, b);
    const SupportCertificate cert = incoherence_certificate(p, {0}, 0.2);
    CHECK(cert.projection_norms(0) == doctest::Approx(0.3));
    CHECK_FALSE(cert.verdict);
    const RegressionSolution s = solve_weighted_l1(p, Vector::Constant(2, 0.2), NormTag::l2());
    CHECK(std::abs(s.x(1)) > 1.0);
}

TEST_CASE("support persistence") {
    std::mt19937_64 rng(4);
    const ProblemInstance p(gaussian_matrix(rng, 4, 6), gaussian_vector(rng, 4));
    const Vector radii = Vector::Constant(6, 0.5);

    const PersistenceReport same = support_persistence_experiment(p, {0, 1}, Perturbation{Matrix::Zero(4, 6)}, radii);
    CHECK(same.original.objective == doctest::Approx(same.perturbed.objective).epsilon(1e-7));
    CHECK(same.identity_gap <= 1e-12);
    CHECK(same.competitor_violations == 0);

    Matrix delta = 0.3 * gaussian_matrix(rng, 4, 6);
    delta.leftCols(2).setZero();
    const PersistenceReport rep = support_persistence_experiment(p, {0, 1}, Perturbation{delta}, radii);
    CHECK(rep.identity_gap <= 1e-9);
    CHECK(rep.competitors == 1000);
    CHECK(rep.competitor_violations == 0);
    for (Index j = 2; j < 6; ++j) CHECK(rep.inflated_radii(j) == doctest::Approx(0.5 + delta.col(j).norm()));
    CHECK(rep.inflated_radii(0) == 0.5);

    Matrix bad = Matrix::Zero(4, 6);
    bad(0, 0) = 0.1;
    CHECK_THROWS_AS(support_persistence_experiment(p, {0, 1}, Perturbation{bad}, radii), std::invalid_argument);
}

TEST_CASE("supported optimum stays optimal after perturbing the other columns") {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 5; ++trial) {
        const double c = 0.4;
        const ProblemInstance p = incoherent_instance(rng, 6, 2, 5, 0.8 * c);
        Matrix delta = 0.2 * gaussian_matrix(rng, 6, 5);
        delta.leftCols(2).setZero();
        const PersistenceReport rep =
            support_persistence_experiment(p, {0, 1}, Perturbation{delta}, Vector::Constant(5, c));
        CHECK(rep.original_supported_on_I);
        CHECK(rep.optimal_in_perturbed);
        CHECK(rep.identity_gap <= 1e-9);
        CHECK(rep.perturbed.objective == doctest::Approx(rep.original.objective).epsilon(1e-6));
    }
}
