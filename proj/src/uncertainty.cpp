#include "rlasso/uncertainty.hpp"

#include "rlasso/lp.hpp"
#include "rlasso/norms.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

namespace rlasso {

ConvexConstraintOracle::ConvexConstraintOracle(std::vector<ConstraintFunction> constraints,
                                               Vector slater_point, std::uint64_t seed)
    : fs_(std::move(constraints)), z0_(std::move(slater_point)) {
    if (fs_.empty()) throw std::invalid_argument("constraint oracle needs at least one constraint");
    if (z0_.size() < 1 || !z0_.allFinite() || (z0_.array() < 0.0).any()) {
        throw std::invalid_argument("Slater witness must be finite and nonnegative");
    }
    for (std::size_t j = 0; j < fs_.size(); ++j) {
        const ConstraintValue at_z0 = evaluate(j, z0_);
        if (!(at_z0.value < 0.0)) {
            throw std::invalid_argument("Slater witness is not strictly feasible for constraint " +
                                        std::to_string(j));
        }
    }

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const double spread = 1.0 + z0_.lpNorm<Eigen::Infinity>();
    const Index m = z0_.size();
    for (int trial = 0; trial < 100; ++trial) {
        Vector p(m);
        Vector q(m);
        for (Index i = 0; i < m; ++i) {
            p(i) = 2.0 * spread * unit(rng);
            q(i) = 2.0 * spread * unit(rng);
        }
        const Vector mid = 0.5 * (p + q);
        for (std::size_t j = 0; j < fs_.size(); ++j) {
            const double fp = evaluate(j, p).value;
            const double fq = evaluate(j, q).value;
            const double fm = evaluate(j, mid).value;
            const double avg = 0.5 * (fp + fq);
            if (fm > avg + 1e-9 * (1.0 + std::abs(avg))) {
                throw std::invalid_argument("constraint " + std::to_string(j) +
                                            " failed the midpoint convexity check");
            }
        }
    }
}

ConstraintValue ConvexConstraintOracle::evaluate(std::size_t j, const Vector& c) const {
    ConstraintValue out = fs_.at(j)(c);
    if (out.subgradient.size() != c.size()) {
        throw std::logic_error("constraint oracle returned a subgradient of the wrong length");
    }
    return out;
}

double ConvexConstraintOracle::max_violation(const Vector& c) const {
    double worst = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < fs_.size(); ++j) worst = std::max(worst, evaluate(j, c).value);
    return worst;
}

ConvexConstraintOracle box_constraint_oracle(const Vector& radii) {
    const Index m = radii.size();
    if (m < 1 || (radii.array() <= 0.0).any()) {
        throw std::invalid_argument("box constraint oracle needs positive radii");
    }
    std::vector<ConstraintFunction> fs;
    for (Index j = 0; j < m; ++j) {
        fs.push_back([j, radii](const Vector& c) {
            ConstraintValue out{c(j) - radii(j), Vector::Zero(c.size())};
            out.subgradient(j) = 1.0;
            return out;
        });
    }
    return ConvexConstraintOracle(std::move(fs), radii / 2.0);
}

ConvexConstraintOracle norm_ball_oracle(const NormTag& aggregator, double l, Index dimension) {
    if (!(l > 0.0) || dimension < 1) {
        throw std::invalid_argument("norm ball oracle needs a positive radius");
    }
    std::vector<ConstraintFunction> fs;
    fs.push_back([aggregator, l](const Vector& c) {
        return ConstraintValue{norm_eval(c, aggregator) - l, norm_subgradient(c, aggregator)};
    });
    Vector z0 = Vector::Ones(dimension);
    const double scale = norm_eval(z0, aggregator);
    if (!(scale > 0.0)) throw std::invalid_argument("aggregator norm vanishes on the all-ones vector");
    z0 *= 0.5 * l / scale;
    return ConvexConstraintOracle(std::move(fs), z0);
}

UncertaintyModel UncertaintyModel::uncoupled(Vector radii) {
    if (radii.size() < 1 || !radii.allFinite() || (radii.array() < 0.0).any()) {
        throw std::invalid_argument("uncoupled radii must be finite and nonnegative");
    }
    return UncertaintyModel(Uncoupled{std::move(radii)});
}

UncertaintyModel UncertaintyModel::norm_coupled(NormTag loss, NormTag aggregator, double radius) {
    if (!(radius >= 0.0) || !std::isfinite(radius)) {
        throw std::invalid_argument("norm-coupled radius must be finite and nonnegative");
    }
    return UncertaintyModel(NormCoupled{std::move(loss), std::move(aggregator), radius});
}

UncertaintyModel UncertaintyModel::polytope(Matrix T, Vector s) {
    if (T.rows() != s.size() || T.cols() < 1) {
        throw std::invalid_argument("polytope T and s have inconsistent dimensions");
    }
    if (!T.allFinite() || !s.allFinite()) throw std::invalid_argument("polytope data must be finite");
    // Feasibility of {c >= 0 : -T c >= -s}.
    const LpResult phase1 = lp_solve(Vector::Zero(T.cols()), -T, -s);
    if (phase1.status == LpStatus::Infeasible) {
        throw std::invalid_argument("polytope {c >= 0 : T c <= s} is empty");
    }
    return UncertaintyModel(Polytope{std::move(T), std::move(s)});
}

UncertaintyModel UncertaintyModel::general(ConvexConstraintOracle oracle) {
    return UncertaintyModel(GeneralConvex{std::move(oracle)});
}

Index UncertaintyModel::features() const {
    return std::visit(
        [](const auto& m) -> Index {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, Uncoupled>) return m.radii.size();
            else if constexpr (std::is_same_v<T, Polytope>) return m.T.cols();
            else if constexpr (std::is_same_v<T, GeneralConvex>) return m.oracle.dimension();
            else return -1;
        },
        model_);
}

}  // namespace rlasso
