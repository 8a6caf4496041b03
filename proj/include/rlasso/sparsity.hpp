#pragma once

#include "rlasso/core.hpp"
#include "rlasso/robust.hpp"
#include "rlasso/solvers.hpp"

#include <cstdint>
#include <vector>

namespace rlasso {

/// Projection norms of the features outside I onto span({a_i : i in I} and b).
struct SupportCertificate {
    std::vector<Index> support;   ///< I, sorted
    std::vector<Index> outside;   ///< complement of I, sorted
    Vector projection_norms;      ///< ||a_j^=||_2 for j in `outside`
    Vector orthogonal_norms;      ///< ||a_j - a_j^=||_2 for j in `outside`
    Matrix basis;                 ///< orthonormal basis of the span, n x rank
    double c = 0.0;
    bool verdict = false;         ///< every projection norm <= c + 1e-9
};

/// Throws std::invalid_argument on out-of-range or repeated indices.
SupportCertificate incoherence_certificate(const ProblemInstance& p, const std::vector<Index>& I, double c);

enum class SupportStatus { Zero, Nonzero, Indeterminate };

struct ZeroSupportCheck {
    SupportStatus status = SupportStatus::Indeterminate;
    RegressionSolution solution;
};

/// Fits the uniform-radius l2-loss problem and reports whether every weight
/// outside I is at most 1e-6 (1 + ||x||_inf). A non-converged fit is
/// Indeterminate. Throws std::invalid_argument if the certificate fails.
ZeroSupportCheck verify_zero_support(const ProblemInstance& p, const std::vector<Index>& I, double c,
                                     const SolverOptions& opts = {});

struct PersistenceReport {
    RegressionSolution original;   ///< radii c on (A, b)
    RegressionSolution perturbed;  ///< radii c + l on (A + Delta, b)
    std::vector<Index> original_support;
    std::vector<Index> perturbed_support;
    Vector inflated_radii;
    /// Whether the original optimum vanishes outside I (up to 1e-6 (1 + ||x||_inf)).
    bool original_supported_on_I = false;
    /// |worst case at (A + Delta, c + l) - worst case at (A, c)| for the
    /// original optimum restricted to I.
    double identity_gap = 0.0;
    /// The restricted original optimum is optimal for the perturbed problem
    /// up to the perturbed solve's certificate plus 1e-6.
    bool optimal_in_perturbed = false;
    std::size_t competitors = 0;
    /// Sampled x' whose perturbed worst case falls below the original one by more than 1e-9.
    std::size_t competitor_violations = 0;
};

/// Throws std::invalid_argument if the perturbation touches a column in I.
PersistenceReport support_persistence_experiment(const ProblemInstance& p, const std::vector<Index>& I,
                                                 const Perturbation& perturbation, const Vector& radii,
                                                 const SolverOptions& opts = {}, std::size_t competitors = 1000,
                                                 std::uint64_t seed = 0);

}  // namespace rlasso
