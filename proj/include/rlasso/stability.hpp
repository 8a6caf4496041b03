#pragma once

#include "rlasso/core.hpp"
#include "rlasso/solvers.hpp"

#include <optional>
#include <vector>

namespace rlasso {

/// Training samples (z_i, b_i) stored as the rows of Z with targets b.
struct LabeledSet {
    Matrix Z;
    Vector b;

    ProblemInstance instance() const { return ProblemInstance(Z, b); }
};

/// Loss at a zero-labeled test point: |z^T x|.
double zero_label_loss(const Vector& x, const Vector& z);

struct TrivialBound {
    double value = 0.0;
    std::size_t set_index = 0;
    std::size_t point_index = 0;
    /// One flag per candidate set; true when its fit did not converge and it was skipped.
    std::vector<bool> skipped;
};

/// max over candidate sets S and points z of |z^T x_S|, with x_S the
/// uniform-radius Lasso fit on S. Throws std::invalid_argument if no
/// candidate set converges or the lists are empty.
TrivialBound trivial_bound(const std::vector<LabeledSet>& candidate_sets, const std::vector<Vector>& candidate_points,
                           double c, const SolverOptions& opts = {});

/// [[b*, A*, A*], [0, 0^T, z*^T]].
LabeledSet duplicate_feature_construction(const LabeledSet& base, const Vector& z_star);

struct StabilityReport {
    Vector x_star;                   ///< fit on the base set
    double base_objective = 0.0;
    double full_candidate = 0.0;     ///< objective of (x*, 0) on the constructed set
    double full_solver = 0.0;
    double loo_candidate = 0.0;      ///< objective of (0, x*) with the last sample removed
    double loo_solver = 0.0;
    double tie_gap = 0.0;            ///< |full_candidate - loo_candidate|
    double loss_full = 0.0;          ///< loss of (x*, 0) at the removed point
    double loss_loo = 0.0;           ///< loss of (0, x*) at the removed point
    double beta_witness = 0.0;
    double trivial_bound = 0.0;      ///< |z*^T x*|
};

/// Runs the duplicate-feature argument on (base, z*). Throws
/// std::runtime_error("construction assumptions violated") when a
/// candidate's objective exceeds the fitted one by more than 1e-6.
StabilityReport stability_gap(const LabeledSet& base, const Vector& z_star, double c, const SolverOptions& opts = {},
                              std::optional<Vector> x_star = std::nullopt);

}  // namespace rlasso
