#include "rlasso/stability.hpp"

#include <cmath>
#include <stdexcept>

namespace rlasso {

double zero_label_loss(const Vector& x, const Vector& z) {
    if (x.size() != z.size()) throw std::invalid_argument("test point does not match weight dimension");
    return std::abs(z.dot(x));
}

TrivialBound trivial_bound(const std::vector<LabeledSet>& candidate_sets, const std::vector<Vector>& candidate_points,
                           double c, const SolverOptions& opts) {
    if (candidate_sets.empty() || candidate_points.empty()) {
        throw std::invalid_argument("trivial bound needs candidate sets and points");
    }
    TrivialBound out;
    out.value = -1.0;
    out.skipped.assign(candidate_sets.size(), false);
    for (std::size_t s = 0; s < candidate_sets.size(); ++s) {
        const ProblemInstance p = candidate_sets[s].instance();
        const RegressionSolution sol = solve_weighted_l1(p, Vector::Constant(p.features(), c), NormTag::l2(), opts);
        if (!sol.converged) {
            out.skipped[s] = true;
            continue;
        }
        for (std::size_t k = 0; k < candidate_points.size(); ++k) {
            const double loss = zero_label_loss(sol.x, candidate_points[k]);
            if (loss > out.value) {
                out.value = loss;
                out.set_index = s;
                out.point_index = k;
            }
        }
    }
    if (out.value < 0.0) throw std::invalid_argument("no candidate set produced a converged fit");
    return out;
}

LabeledSet duplicate_feature_construction(const LabeledSet& base, const Vector& z_star) {
    const Index n = base.Z.rows();
    const Index m = base.Z.cols();
    if (base.b.size() != n || z_star.size() != m) {
        throw std::invalid_argument("duplicate construction: inconsistent dimensions");
    }
    LabeledSet out{Matrix::Zero(n + 1, 2 * m), Vector::Zero(n + 1)};
    out.Z.topLeftCorner(n, m) = base.Z;
    out.Z.topRightCorner(n, m) = base.Z;
    out.Z.bottomRightCorner(1, m) = z_star.transpose();
    out.b.head(n) = base.b;
    return out;
}

StabilityReport stability_gap(const LabeledSet& base, const Vector& z_star, double c, const SolverOptions& opts,
                              std::optional<Vector> x_star) {
    if (!(c >= 0.0) || !std::isfinite(c)) throw std::invalid_argument("radius c must be finite and nonnegative");
    const ProblemInstance p = base.instance();
    const Index m = p.features();
    const Index n = p.samples();

    StabilityReport rep;
    rep.x_star = x_star ? *x_star : solve_weighted_l1(p, Vector::Constant(m, c), NormTag::l2(), opts).x;
    if (rep.x_star.size() != m) throw std::invalid_argument("x* does not match the feature count");
    const Vector radii = Vector::Constant(m, c);
    rep.base_objective = weighted_l1_objective(p, rep.x_star, radii, NormTag::l2());

    const LabeledSet full_set = duplicate_feature_construction(base, z_star);
    const ProblemInstance full = full_set.instance();
    const ProblemInstance loo(full_set.Z.topRows(n), full_set.b.head(n));
    const Vector radii2 = Vector::Constant(2 * m, c);

    Vector first = Vector::Zero(2 * m);
    first.head(m) = rep.x_star;
    Vector second = Vector::Zero(2 * m);
    second.tail(m) = rep.x_star;

    rep.full_candidate = weighted_l1_objective(full, first, radii2, NormTag::l2());
    rep.loo_candidate = weighted_l1_objective(loo, second, radii2, NormTag::l2());
    rep.full_solver = solve_weighted_l1(full, radii2, NormTag::l2(), opts).objective;
    rep.loo_solver = solve_weighted_l1(loo, radii2, NormTag::l2(), opts).objective;
    if (rep.full_candidate > rep.full_solver + 1e-6 || rep.loo_candidate > rep.loo_solver + 1e-6) {
        throw std::runtime_error("construction assumptions violated");
    }
    rep.tie_gap = std::abs(rep.full_candidate - rep.loo_candidate);

    const Vector held_out = full_set.Z.row(n).transpose();
    rep.loss_full = zero_label_loss(first, held_out);
    rep.loss_loo = zero_label_loss(second, held_out);
    rep.beta_witness = std::abs(rep.loss_full - rep.loss_loo);
    rep.trivial_bound = zero_label_loss(rep.x_star, z_star);
    return rep;
}

}  // namespace rlasso
