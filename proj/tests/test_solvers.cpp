#include "rlasso/robust.hpp"
#include "rlasso/solvers.hpp"
#include "support.hpp"

#include <doctest.h>

using namespace rlasso;
using namespace testing_support;

namespace {

const NormKind kinds[] = {NormKind::L1, NormKind::L2, NormKind::LInf};

void check_contract(const ProblemInstance& p, const RegressionSolution& s, const Vector& c, const NormTag& loss,
                    const SolverOptions& opts = {}) {
    CHECK(s.converged);
    CHECK(s.certificate_gap <= opts.rel_tol * (1.0 + std::abs(s.objective)));
    const double recomputed = weighted_l1_objective(p, s.x, c, loss);
    CHECK(std::abs(recomputed - s.objective) <= 1e-10 * (1.0 + std::abs(recomputed)));
    CHECK(worst_case_residual(p, s.x, Uncoupled{c}, loss) == doctest::Approx(s.objective).epsilon(1e-12));
}

}  // namespace

TEST_CASE("options validation") {
    SolverOptions o;
    o.max_iters = 0;
    CHECK_THROWS_AS(o.validate(), std::invalid_argument);
    o = {};
    o.rel_tol = 0.0;
    CHECK_THROWS_AS(o.validate(), std::invalid_argument);
    o = {};
    CHECK_NOTHROW(o.validate());
    const ProblemInstance p(fixture_A(), fixture_b());
    CHECK_THROWS_AS(solve_weighted_l1(p, -Vector::Ones(1), NormTag::l2()), std::invalid_argument);
    CHECK_THROWS_AS(solve_weighted_l1(p, Vector::Ones(2), NormTag::l2()), std::invalid_argument);
}

TEST_CASE("huge radii force the zero solution") {
    std::mt19937_64 rng(1);
    const ProblemInstance p(gaussian_matrix(rng, 6, 4), gaussian_vector(rng, 6));
    for (NormKind k : kinds) {
        const Vector c = Vector::Constant(4, 1e3);
        const RegressionSolution s = solve_weighted_l1(p, c, NormTag(k));
        check_contract(p, s, c, NormTag(k));
        CHECK(s.x.lpNorm<Eigen::Infinity>() <= 1e-9);
        CHECK(s.objective == doctest::Approx(pnorm(p.b(), p_of(k))).epsilon(1e-8));
    }
}

TEST_CASE("zero radii on a square invertible instance interpolate") {
    std::mt19937_64 rng(2);
    Matrix A = gaussian_matrix(rng, 4, 4) + 4.0 * Matrix::Identity(4, 4);
    const Vector b = gaussian_vector(rng, 4);
    const ProblemInstance p(A, b);
    for (NormKind k : kinds) {
        const RegressionSolution s = solve_weighted_l1(p, Vector::Zero(4), NormTag(k));
        CHECK(s.converged);
        CHECK(s.objective <= 1e-6);
        CHECK((s.x - A.lu().solve(b)).norm() <= 1e-5);
    }
}

TEST_CASE("scalar fixture matches the grid oracle for every loss") {
    const ProblemInstance p(fixture_A(), fixture_b());
    for (NormKind k : kinds) {
        for (double c : {0.0, 0.05, 0.1, 0.5, 0.99, 2.0}) {
            const RegressionSolution s = solve_weighted_l1(p, Vector::Constant(1, c), NormTag(k));
            check_contract(p, s, Vector::Constant(1, c), NormTag(k));
            const GridMin g = scalar_lasso_oracle(p.A().col(0), p.b(), c, p_of(k));
            CHECK(s.objective == doctest::Approx(g.value).epsilon(1e-6));
            CHECK(s.objective <= g.value + 1e-9);
        }
    }
}

TEST_CASE("l2 fixture at c = 0.1 has the stationary point from calculus") {
    const ProblemInstance p(fixture_A(), fixture_b());
    const RegressionSolution s = solve_weighted_l1(p, Vector::Constant(1, 0.1), NormTag::l2());
    // (1 - x) / sqrt((1 - x)^2 + 1) = 0.1
    const double x = 1.0 - 0.1 / std::sqrt(0.99);
    CHECK(s.x(0) == doctest::Approx(x).epsilon(1e-6));
}

TEST_CASE("dual-norm regularizer with linf aggregator is the uniform lasso") {
    std::mt19937_64 rng(3);
    const ProblemInstance p(gaussian_matrix(rng, 7, 4), gaussian_vector(rng, 7));
    for (NormKind k : kinds) {
        const RegressionSolution a = solve_dual_norm_reg(p, NormTag(k), NormTag::linf(), 0.4);
        const RegressionSolution b = solve_weighted_l1(p, Vector::Constant(4, 0.4), NormTag(k));
        CHECK(a.converged);
        CHECK(std::abs(a.objective - b.objective) <= 1e-7 * (1.0 + std::abs(b.objective)));
    }
}

TEST_CASE("dual-norm regularizer with l = 0 is unregularized") {
    std::mt19937_64 rng(4);
    const ProblemInstance p(gaussian_matrix(rng, 6, 3), gaussian_vector(rng, 6));
    for (NormKind agg : kinds) {
        const RegressionSolution a = solve_dual_norm_reg(p, NormTag::l2(), NormTag(agg), 0.0);
        const RegressionSolution b = solve_weighted_l1(p, Vector::Zero(3), NormTag::l2());
        CHECK(a.objective == doctest::Approx(b.objective).epsilon(1e-7));
    }
}

TEST_CASE("l2-aggregated regularizer against grid oracles") {
    // Scalar instance: ||x||_2 = |x|.
    const ProblemInstance p1(fixture_A(), fixture_b());
    const RegressionSolution s1 = solve_dual_norm_reg(p1, NormTag::l2(), NormTag::l2(), 0.3);
    CHECK(s1.objective == doctest::Approx(scalar_lasso_oracle(p1.A().col(0), p1.b(), 0.3, 2).value).epsilon(1e-6));

    // Two features, regularizer l ||x||_2 and l ||x||_1 (aggregator linf) / ||x||_inf (aggregator l1).
    std::mt19937_64 rng(5);
    const Matrix A = gaussian_matrix(rng, 5, 2);
    const Vector b = gaussian_vector(rng, 5);
    const ProblemInstance p(A, b);
    const double l = 0.35;
    for (NormKind agg : kinds) {
        const int reg_p = agg == NormKind::L1 ? 0 : (agg == NormKind::L2 ? 2 : 1);
        const GridMin2 g = grid_minimize_2d([&](double u, double v) {
            Vector x(2);
            x << u, v;
            return pnorm(b - A * x, 2) + l * pnorm(x, reg_p);
        });
        const RegressionSolution s = solve_dual_norm_reg(p, NormTag::l2(), NormTag(agg), l);
        CHECK(s.converged);
        CHECK(s.objective <= g.value + 1e-9);
        CHECK(s.objective == doctest::Approx(g.value).epsilon(1e-6));
    }
}

TEST_CASE("regularization path") {
    const ProblemInstance p(fixture_A(), fixture_b());
    const auto single = regularization_path(p, {Vector::Zero(1)}, NormTag::l2());
    REQUIRE(single.size() == 1);
    CHECK(single[0].objective == doctest::Approx(1.0).epsilon(1e-8));
    CHECK_THROWS_AS(regularization_path(p, {}, NormTag::l2()), std::invalid_argument);

    std::vector<Vector> grid;
    for (double c : {0.01, 0.0316, 0.1, 0.316, 1.0}) grid.push_back(Vector::Constant(1, c));
    const auto path = regularization_path(p, grid, NormTag::l2());
    REQUIRE(path.size() == grid.size());
    for (std::size_t k = 0; k < grid.size(); ++k) {
        check_contract(p, path[k], grid[k], NormTag::l2());
        const GridMin g = scalar_lasso_oracle(p.A().col(0), p.b(), grid[k](0), 2);
        CHECK(path[k].objective == doctest::Approx(g.value).epsilon(1e-6));
        if (k > 0) CHECK(path[k].objective >= path[k - 1].objective - 1e-9);
    }
}

TEST_CASE("property: random instances satisfy the solver contract") {
    std::mt19937_64 rng(6);
    for (int trial = 0; trial < 12; ++trial) {
        const Index n = 3 + static_cast<Index>(rng() % 8);
        const Index m = 1 + static_cast<Index>(rng() % 6);
        const ProblemInstance p(gaussian_matrix(rng, n, m), gaussian_vector(rng, n));
        const Vector c = uniform_vector(rng, m, 0.0, 1.5);
        for (NormKind k : kinds) {
            const RegressionSolution s = solve_weighted_l1(p, c, NormTag(k));
            check_contract(p, s, c, NormTag(k));
            // Weak duality: every repaired dual vector bounds the optimum from below.
            for (int d = 0; d < 5; ++d) {
                CHECK(weighted_l1_dual_bound(p, c, NormTag(k), gaussian_vector(rng, n)) <= s.objective + 1e-9);
            }
            CHECK(weighted_l1_dual_bound(p, c, NormTag(k), s.dual) >= s.objective - s.certificate_gap - 1e-12);
        }
    }
}

TEST_CASE("property: permuting features permutes the solution") {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 5; ++trial) {
        const ProblemInstance p(gaussian_matrix(rng, 8, 4), gaussian_vector(rng, 8));
        const Vector c = uniform_vector(rng, 4, 0.1, 1.0);
        Eigen::PermutationMatrix<Eigen::Dynamic> perm(4);
        perm.indices() << 2, 0, 3, 1;
        const ProblemInstance q(p.A() * perm, p.b());
        const Vector cq = perm.transpose() * c;
        const RegressionSolution sp = solve_weighted_l1(p, c, NormTag::l2());
        const RegressionSolution sq = solve_weighted_l1(q, cq, NormTag::l2());
        CHECK(sq.objective == doctest::Approx(sp.objective).epsilon(1e-7));
        CHECK((perm * sq.x - sp.x).norm() <= 1e-3 * (1.0 + sp.x.norm()));
    }
}

TEST_CASE("property: a radius above the column norm zeroes that weight") {
    std::mt19937_64 rng(8);
    for (int trial = 0; trial < 20; ++trial) {
        const ProblemInstance p(gaussian_matrix(rng, 6, 4), gaussian_vector(rng, 6));
        Vector c = uniform_vector(rng, 4, 0.0, 0.3);
        const auto j = static_cast<Index>(rng() % 4);
        c(j) = p.column(j).norm() * 1.0001;
        const RegressionSolution s = solve_weighted_l1(p, c, NormTag::l2());
        CHECK(s.converged);
        CHECK(std::abs(s.x(j)) <= 1e-6 * (1.0 + s.x.lpNorm<Eigen::Infinity>()));
    }
}

TEST_CASE("iteration cap reports non-convergence") {
    std::mt19937_64 rng(9);
    const ProblemInstance p(gaussian_matrix(rng, 10, 5), gaussian_vector(rng, 10));
    SolverOptions o;
    o.max_iters = 2;
    o.check_every = 1;
    const RegressionSolution s = solve_weighted_l1(p, Vector::Constant(5, 0.1), NormTag::l1(), o);
    CHECK_FALSE(s.converged);
    CHECK(s.certificate_gap > o.rel_tol * (1.0 + s.objective));
    CHECK(weighted_l1_objective(p, s.x, Vector::Constant(5, 0.1), NormTag::l1()) == doctest::Approx(s.objective));
}

TEST_CASE("solves are deterministic") {
    std::mt19937_64 rng(10);
    const ProblemInstance p(gaussian_matrix(rng, 9, 5), gaussian_vector(rng, 9));
    const Vector c = Vector::Constant(5, 0.2);
    const RegressionSolution a = solve_weighted_l1(p, c, NormTag::linf());
    const RegressionSolution b = solve_weighted_l1(p, c, NormTag::linf());
    CHECK(a.x == b.x);
    CHECK(a.objective == b.objective);
    CHECK(a.iterations == b.iterations);
}
