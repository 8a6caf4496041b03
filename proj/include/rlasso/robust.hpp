#pragma once

#include "rlasso/core.hpp"
#include "rlasso/uncertainty.hpp"

#include <cstdint>

namespace rlasso {

/// Disturbance matrix Delta A stored by feature: column i is delta_i.
struct Perturbation {
    Matrix delta;
};

/// ||delta_i||_column_norm <= c_i (+ tol) for every feature i.
bool is_member(const Perturbation& p, const Uncoupled& u, const NormTag& column_norm,
               double tol = 1e-12);

/// max over Delta A in U of ||b - (A + Delta A) x||_loss, where every
/// delta_i is bounded in the loss norm. Evaluated in closed form as
/// ||b - A x||_loss + sum_i c_i |x_i|.
double worst_case_residual(const ProblemInstance& p, const Vector& x, const Uncoupled& u,
                           const NormTag& loss);

/// The disturbance delta_i = -c_i sgn(x_i) u with u = (b - A x) / ||b - A x||
/// (u = e_1 when the residual vanishes). It is feasible and attains
/// worst_case_residual. The default column norm is l2; any supported norm
/// works because u is normalised in that norm.
Perturbation adversarial_perturbation(const ProblemInstance& p, const Vector& x, const Uncoupled& u,
                                      const NormTag& loss = NormTag::l2());

/// Residual norm ||b - (A + Delta A) x||_loss under one fixed disturbance.
double perturbed_residual(const ProblemInstance& p, const Vector& x, const Perturbation& d,
                          const NormTag& loss);

/// Lower-bound oracle: the largest perturbed residual over `samples` random
/// members of U. Half of the draws put every delta_i uniformly in its
/// ball; the other half use a shared random extreme direction of the loss
/// ball with per-feature sign -sgn(x_i). For the l2 loss the first draw is
/// replaced by the adversarial perturbation.
double sampled_worst_case(const ProblemInstance& p, const Vector& x, const Uncoupled& u,
                          const NormTag& loss, std::size_t samples, std::uint64_t seed);

}  // namespace rlasso
