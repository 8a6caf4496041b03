#pragma once

#include "rlasso/core.hpp"

#include <cstdint>
#include <functional>
#include <variant>
#include <vector>

namespace rlasso {

/// Value and one subgradient of a convex function at a point.
struct ConstraintValue {
    double value = 0.0;
    Vector subgradient;
};

using ConstraintFunction = std::function<ConstraintValue(const Vector&)>;

/// Convex constraints f_j(c) <= 0 on the per-feature radii c >= 0, together
/// with a strictly feasible point z0 (f_j(z0) < 0, z0 >= 0).
///
/// Construction spot-checks midpoint convexity of every f_j on 100 random
/// segments and rejects the oracle (std::invalid_argument) on violation.
class ConvexConstraintOracle {
public:
    ConvexConstraintOracle(std::vector<ConstraintFunction> constraints, Vector slater_point,
                           std::uint64_t seed = 0);

    std::size_t constraints() const noexcept { return fs_.size(); }
    Index dimension() const noexcept { return z0_.size(); }
    const Vector& slater_point() const noexcept { return z0_; }

    ConstraintValue evaluate(std::size_t j, const Vector& c) const;
    /// max_j f_j(c); nonpositive exactly on the feasible set.
    double max_violation(const Vector& c) const;

private:
    std::vector<ConstraintFunction> fs_;
    Vector z0_;
};

/// f_j(c) = c_j - r_j for every j: the uncoupled box c <= r. Needs r > 0
/// for a strictly feasible witness.
ConvexConstraintOracle box_constraint_oracle(const Vector& radii);

/// f(c) = ||c||_t - l: the norm-coupled set of radii. Needs l > 0.
ConvexConstraintOracle norm_ball_oracle(const NormTag& aggregator, double l, Index dimension);

/// Per-feature radii with no joint constraint.
struct Uncoupled {
    Vector radii;
};

/// || (||delta_1||_loss, ..., ||delta_m||_loss) ||_aggregator <= radius.
struct NormCoupled {
    NormTag loss;
    NormTag aggregator;
    double radius = 0.0;
};

/// Radii c >= 0 with T c <= s.
struct Polytope {
    Matrix T;
    Vector s;
};

struct GeneralConvex {
    ConvexConstraintOracle oracle;
};

/// Tagged admissible-disturbance description. Factories validate the
/// invariants of each variant and throw std::invalid_argument.
class UncertaintyModel {
public:
    using Variant = std::variant<Uncoupled, NormCoupled, Polytope, GeneralConvex>;

    static UncertaintyModel uncoupled(Vector radii);
    static UncertaintyModel norm_coupled(NormTag loss, NormTag aggregator, double radius);
    /// Checks that {c >= 0 : T c <= s} is nonempty with a phase-1 LP.
    static UncertaintyModel polytope(Matrix T, Vector s);
    static UncertaintyModel general(ConvexConstraintOracle oracle);

    const Variant& get() const noexcept { return model_; }
    Index features() const;

    template <class T>
    const T* as() const noexcept {
        return std::get_if<T>(&model_);
    }

private:
    explicit UncertaintyModel(Variant v) : model_(std::move(v)) {}
    Variant model_;
};

}  // namespace rlasso
