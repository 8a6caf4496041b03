#pragma once

#include "rlasso/core.hpp"

#include <cstdint>
#include <vector>

namespace rlasso {

struct SolverOptions {
    std::size_t max_iters = 50000;
    /// Stop once the certified primal-dual gap is below rel_tol * (1 + |objective|).
    double rel_tol = 1e-8;
    /// Ratio tau / sigma of the primal and dual step sizes (tau * sigma * ||A||^2 < 1).
    double step_ratio = 1.0;
    int power_iters = 50;
    /// Iterations between duality-gap evaluations.
    std::size_t check_every = 10;
    std::uint64_t seed = 0;

    /// Throws std::invalid_argument on out-of-range fields.
    void validate() const;
};

struct RegressionSolution {
    Vector x;
    double objective = 0.0;
    std::size_t iterations = 0;
    bool converged = false;
    double certificate_gap = 0.0;
    /// Dual vector y with ||y||_{loss*} <= 1 used for the certificate.
    Vector dual;
};

/// ||b - A x||_loss + sum_i c_i |x_i|.
double weighted_l1_objective(const ProblemInstance& p, const Vector& x, const Vector& c,
                             const NormTag& loss);

/// Lower bound on min_x ||b - A x||_loss + sum_i c_i |x_i| from any dual
/// vector y. The vector is first repaired into the feasible set
/// { ||y||_{loss*} <= 1, |a_i^T y| <= c_i } and b^T y is returned.
double weighted_l1_dual_bound(const ProblemInstance& p, const Vector& c, const NormTag& loss,
                              const Vector& y);

/// min_x ||b - A x||_loss + sum_i c_i |x_i| by a primal-dual splitting
/// method, certified by the duality gap. Returns converged = false when the
/// gap target is not met within opts.max_iters.
RegressionSolution solve_weighted_l1(const ProblemInstance& p, const Vector& c, const NormTag& loss,
                                     const SolverOptions& opts = {});

/// min_x ||b - A x||_loss + l * ||x||_{aggregator*}. Throws std::domain_error
/// when the aggregator has a zero weight.
RegressionSolution solve_dual_norm_reg(const ProblemInstance& p, const NormTag& loss,
                                       const NormTag& aggregator, double l,
                                       const SolverOptions& opts = {});

/// solve_weighted_l1 at every grid point, each warm-started from the previous.
std::vector<RegressionSolution> regularization_path(const ProblemInstance& p,
                                                    const std::vector<Vector>& c_grid,
                                                    const NormTag& loss,
                                                    const SolverOptions& opts = {});

}  // namespace rlasso
