#pragma once

#include "rlasso/core.hpp"
#include "rlasso/solvers.hpp"
#include "rlasso/uncertainty.hpp"

namespace rlasso {

/// Result of maximizing c -> (kappa + |x|)^T c - sum_j lambda_j f_j(c) over c >= 0.
struct InnerMaxResult {
    /// Objective at c0, or +inf when the ascent diverged.
    double value = 0.0;
    bool unbounded = false;
    /// Final ascent iterate (the divergent point when unbounded).
    Vector c0;
    /// Subgradient of v with respect to lambda, kappa and x at the query
    /// point. When unbounded these describe the recession direction d of the
    /// ascent instead: d^T(kappa + |x|) - sum_j lambda_j f_j'(d) > 0 is the
    /// violated inequality and the three blocks are its gradient.
    Vector d_lambda;
    Vector d_kappa;
    Vector d_x;
};

struct InnerMaxOptions {
    std::size_t steps = 2000;
    /// Iterates beyond this sup-norm are treated as divergence.
    double divergence = 1e6;
    /// Starting point; empty means the Slater witness.
    Vector start;
};

/// Projected supergradient ascent with step doubling on success and halving
/// on failure. Throws std::invalid_argument on negative lambda or kappa.
InnerMaxResult eval_v(const Vector& lambda, const Vector& kappa, const Vector& x,
                      const ConvexConstraintOracle& oracle, const InnerMaxOptions& opts = {});

/// Bracket on h(w) = max { w^T c : c in Z } for w >= 0.
struct SupportValue {
    double upper = 0.0;
    double lower = 0.0;
    /// Feasible point attaining `lower`.
    Vector c;
    /// Multipliers for the constraints certifying `upper`.
    Vector lambda;
    bool unbounded = false;
};

/// Cutting-plane evaluation of the support function of
/// Z = { c >= 0 : f_j(c) <= 0 }. Each round solves an LP over the current
/// linearizations; feasible points come from backing off towards the Slater
/// witness.
SupportValue support_function(const ConvexConstraintOracle& oracle, const Vector& w,
                              std::size_t max_cuts = 150, double rel_tol = 1e-10);

struct CoupledOptions {
    /// Joint subgradient iterations on (lambda, kappa, x).
    std::size_t subgradient_iters = 20000;
    double step0 = 1.0;
    InnerMaxOptions inner{200, 1e6, {}};
    /// Best-response rounds after the subgradient phase.
    std::size_t polish_rounds = 60;
    /// Cutting-plane rounds on the radii (polytope solver only).
    std::size_t bundle_rounds = 100;
    /// converged is set when certificate_gap <= certify_tol * (1 + |objective|).
    /// The outer problem is nonsmooth, so this is looser than solver.rel_tol.
    double certify_tol = 1e-6;
    /// Used for every weighted-l1 solve and for the final certificate.
    SolverOptions solver{};
};

struct CoupledSolution {
    RegressionSolution solution;
    Vector lambda;
    Vector kappa;
};

/// min over lambda >= 0, kappa >= 0, x of ||b - A x||_loss + v(lambda, kappa, x).
///
/// The reported objective is ||b - A x||_loss + h(|x|), with h the support
/// function of the radius set. certificate_gap bounds its distance to the
/// optimum from below by weighted-l1 dual certificates at feasible radii.
/// Throws std::runtime_error("uncertainty set appears unbounded") when no
/// finite value can be reached.
CoupledSolution solve_general_uncertainty(const ProblemInstance& p, const ConvexConstraintOracle& oracle,
                                          const NormTag& loss, const CoupledOptions& opts = {});

/// L(w) = min { s^T lambda : T^T lambda >= w, lambda >= 0 } and its optimal
/// dual c in { c >= 0 : T c <= s }. Throws std::invalid_argument
/// ("disturbance budget cannot cover requested weights") if infeasible.
struct PolytopeValue {
    double value = 0.0;
    Vector lambda;
    Vector c;
};
PolytopeValue polytope_penalty(const Matrix& T, const Vector& s, const Vector& w);

struct PolytopeSolution {
    RegressionSolution solution;
    Vector lambda;
};

/// min_x ||b - A x||_loss + L(|x|).
PolytopeSolution solve_polytope_uncertainty(const ProblemInstance& p, const Matrix& T, const Vector& s,
                                            const NormTag& loss, const CoupledOptions& opts = {});

}  // namespace rlasso
