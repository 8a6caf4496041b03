#pragma once

#include "rlasso/core.hpp"

namespace rlasso {

enum class LpStatus { Optimal, Infeasible, Unbounded };

std::string to_string(LpStatus status);

struct LpResult {
    LpStatus status = LpStatus::Infeasible;
    Vector primal;     ///< y*, valid when status == Optimal
    Vector dual;       ///< w* >= 0 with G^T w* <= cost, valid when Optimal
    double objective = 0.0;
    std::size_t pivots = 0;
};

/// Dense two-phase simplex for
///
///     min cost^T y   s.t.  G y >= h,  y >= 0
///
/// using Bland's rule throughout, so it cannot cycle. The dual returned is
/// for  max h^T w  s.t.  G^T w <= cost,  w >= 0. Desk-scale only.
LpResult lp_solve(const Vector& cost, const Matrix& G, const Vector& h);

}  // namespace rlasso
