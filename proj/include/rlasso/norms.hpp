#pragma once

#include "rlasso/core.hpp"

namespace rlasso {

/// sup { u^T x : ||x||_t <= 1 }. Equals ||u||_{dual(t)} when t has positive
/// weights; with zero weights it is +inf unless u vanishes on those
/// coordinates.
double dual_norm_value(const Vector& u, const NormTag& t);

/// Euclidean projection onto { u : ||u||_t <= radius }.
Vector project_ball(const Vector& v, const NormTag& t, double radius);

/// Euclidean projection onto { u : sup_{||x||_t <= 1} u^T x <= radius },
/// the radius-scaled unit ball of the dual norm. Zero weights pin the
/// matching coordinate to 0.
Vector project_dual_ball(const Vector& v, const NormTag& t, double radius);

/// argmin_x 0.5 ||x - v||^2 + scale * ||x||_t.
Vector prox_norm(const Vector& v, const NormTag& t, double scale);

/// A vector y with ||y||_{dual(t)} <= 1 and y^T v = ||v||_t.
Vector norm_subgradient(const Vector& v, const NormTag& t);

/// Coordinate-wise soft thresholding sgn(v_i) max(|v_i| - thresholds_i, 0).
Vector soft_threshold(const Vector& v, const Vector& thresholds);

}  // namespace rlasso
