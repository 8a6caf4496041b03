#include "rlasso/solvers.hpp"

#include "rlasso/norms.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

namespace rlasso {

void SolverOptions::validate() const {
    if (max_iters < 1) throw std::invalid_argument("max_iters must be at least 1");
    if (!(rel_tol > 0.0)) throw std::invalid_argument("rel_tol must be positive");
    if (!(step_ratio > 0.0) || !std::isfinite(step_ratio)) {
        throw std::invalid_argument("step_ratio must be positive and finite");
    }
    if (power_iters < 1) throw std::invalid_argument("power_iters must be at least 1");
    if (check_every < 1) throw std::invalid_argument("check_every must be at least 1");
}

namespace {

// scale * ||x||_norm
struct Regularizer {
    NormTag norm;
    double scale = 0.0;

    double value(const Vector& x) const { return scale == 0.0 ? 0.0 : scale * norm_eval(x, norm); }
};

void check_loss(const ProblemInstance& p, const NormTag& loss) {
    if (loss.weighted() && (loss.weights().size() != p.samples() || loss.has_zero_weight())) {
        throw std::invalid_argument("loss weights must be positive, one per sample");
    }
}

// Maps an arbitrary y into { ||y||_{loss*} <= 1, sup_{||x||_R <= 1} (A^T y)^T x <= scale }.
// Coordinates the regularizer does not charge need a_j^T y = 0 exactly,
// which a projection onto the orthogonal complement of those columns gives.
class DualRepair {
public:
    DualRepair(const ProblemInstance& p, NormTag loss, Regularizer reg)
        : p_(p), loss_(std::move(loss)), reg_(std::move(reg)), free_(p.features(), false) {
        std::vector<Index> cols;
        for (Index j = 0; j < p.features(); ++j) {
            if (reg_.scale == 0.0 || reg_.norm.weight(j) == 0.0) {
                free_[static_cast<std::size_t>(j)] = true;
                cols.push_back(j);
            }
        }
        if (!cols.empty()) {
            Matrix Az(p.samples(), static_cast<Index>(cols.size()));
            for (std::size_t k = 0; k < cols.size(); ++k) Az.col(static_cast<Index>(k)) = p.column(cols[k]);
            Eigen::ColPivHouseholderQR<Matrix> qr(Az);
            qr.setThreshold(1e-12);
            const Index rank = qr.rank();
            if (rank > 0) {
                const Matrix full = qr.householderQ();
                basis_ = full.leftCols(rank);
            }
        }
    }

    Vector repair(Vector y) const {
        if (basis_.cols() > 0) y -= basis_ * (basis_.transpose() * y);
        const double dn = dual_norm_value(y, loss_);
        if (dn > 1.0) y /= dn;
        if (reg_.scale > 0.0) {
            Vector g = p_.A().transpose() * y;
            for (Index j = 0; j < g.size(); ++j) {
                if (free_[static_cast<std::size_t>(j)]) g(j) = 0.0;
            }
            const double d = dual_norm_value(g, reg_.norm);
            if (d > reg_.scale) y *= reg_.scale / d;
        }
        return y;
    }

    double bound(const Vector& y) const { return p_.b().dot(y); }

private:
    const ProblemInstance& p_;
    NormTag loss_;
    Regularizer reg_;
    std::vector<bool> free_;
    Matrix basis_;
};

double spectral_norm_estimate(const Matrix& A, int iters, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    Vector v(A.cols());
    for (Index i = 0; i < v.size(); ++i) v(i) = gauss(rng);
    double estimate = 0.0;
    for (int k = 0; k < iters; ++k) {
        const double vn = v.norm();
        if (vn == 0.0) break;
        v /= vn;
        const Vector w = A.transpose() * (A * v);
        estimate = std::sqrt(w.norm());
        v = w;
    }
    // Frobenius norm bounds the spectral norm from above; stay below it.
    return std::min(estimate, A.norm());
}

struct WarmStart {
    Vector x;
    Vector y;
};

RegressionSolution solve_regularized(const ProblemInstance& p, const NormTag& loss, const Regularizer& reg,
                                     const SolverOptions& opts, const WarmStart* warm) {
    opts.validate();
    check_loss(p, loss);
    const Index n = p.samples();
    const Index m = p.features();
    const Matrix& A = p.A();
    const Vector& b = p.b();

    const double L = std::max(1.02 * spectral_norm_estimate(A, opts.power_iters, opts.seed), 1e-12);
    const double tau = 0.9 * opts.step_ratio / L;
    const double sigma = 0.9 / (opts.step_ratio * L);

    Vector x = warm ? warm->x : Vector::Zero(m);
    Vector y = warm ? warm->y : Vector::Zero(n);
    Vector x_bar = x;
    const DualRepair repair(p, loss, reg);
    auto primal = [&](const Vector& v) { return norm_eval(b - A * v, loss) + reg.value(v); };

    RegressionSolution best;
    best.x = x;
    best.objective = primal(x);
    best.dual = repair.repair(norm_subgradient(p.residual(x), loss));
    double best_dual = repair.bound(best.dual);

    auto consider = [&](const Vector& cx, const Vector& cy) {
        const double P = primal(cx);
        if (P < best.objective) {
            best.objective = P;
            best.x = cx;
        }
        for (const Vector& candidate : {cy, Vector(norm_subgradient(b - A * cx, loss))}) {
            const Vector yy = repair.repair(candidate);
            const double D = repair.bound(yy);
            if (D > best_dual) {
                best_dual = D;
                best.dual = yy;
            }
        }
    };
    auto gap = [&] { return std::max(best.objective - best_dual, 0.0); };
    auto done = [&] { return gap() <= opts.rel_tol * (1.0 + std::abs(best.objective)); };

    std::size_t it = 0;
    if (!done()) {
        consider(x, y);
        while (it < opts.max_iters && !done()) {
            ++it;
            y = project_dual_ball(y + sigma * (b - A * x_bar), loss, 1.0);
            const Vector x_new = prox_norm(x + tau * (A.transpose() * y), reg.norm, tau * reg.scale);
            x_bar = 2.0 * x_new - x;
            x = x_new;
            if (it % opts.check_every == 0 || it == opts.max_iters) consider(x, y);
        }
    }

    best.iterations = it;
    best.certificate_gap = gap();
    best.converged = done();
    best.objective = primal(best.x);
    return best;
}

Regularizer weighted_l1_regularizer(const ProblemInstance& p, const Vector& c) {
    if (c.size() != p.features()) throw std::invalid_argument("radius vector does not match feature count");
    if (!c.allFinite() || (c.array() < 0.0).any()) {
        throw std::invalid_argument("radii must be finite and nonnegative");
    }
    return Regularizer{NormTag(NormKind::L1, c), 1.0};
}

}  // namespace

double weighted_l1_objective(const ProblemInstance& p, const Vector& x, const Vector& c,
                             const NormTag& loss) {
    if (x.size() != p.features() || c.size() != p.features()) {
        throw std::invalid_argument("dimension mismatch between instance, weights and radii");
    }
    return norm_eval(p.residual(x), loss) + c.dot(x.cwiseAbs());
}

double weighted_l1_dual_bound(const ProblemInstance& p, const Vector& c, const NormTag& loss,
                              const Vector& y) {
    check_loss(p, loss);
    if (y.size() != p.samples()) throw std::invalid_argument("dual vector does not match sample count");
    const DualRepair repair(p, loss, weighted_l1_regularizer(p, c));
    return repair.bound(repair.repair(y));
}

RegressionSolution solve_weighted_l1(const ProblemInstance& p, const Vector& c, const NormTag& loss,
                                     const SolverOptions& opts) {
    return solve_regularized(p, loss, weighted_l1_regularizer(p, c), opts, nullptr);
}

RegressionSolution solve_dual_norm_reg(const ProblemInstance& p, const NormTag& loss,
                                       const NormTag& aggregator, double l, const SolverOptions& opts) {
    if (!(l >= 0.0) || !std::isfinite(l)) throw std::invalid_argument("l must be finite and nonnegative");
    if (aggregator.weighted() && aggregator.weights().size() != p.features()) {
        throw std::invalid_argument("aggregator weights do not match feature count");
    }
    return solve_regularized(p, loss, Regularizer{dual_norm(aggregator), l}, opts, nullptr);
}

std::vector<RegressionSolution> regularization_path(const ProblemInstance& p,
                                                    const std::vector<Vector>& c_grid,
                                                    const NormTag& loss, const SolverOptions& opts) {
    if (c_grid.empty()) throw std::invalid_argument("regularization grid is empty");
    std::vector<RegressionSolution> out;
    out.reserve(c_grid.size());
    WarmStart warm;
    for (const Vector& c : c_grid) {
        out.push_back(solve_regularized(p, loss, weighted_l1_regularizer(p, c), opts,
                                        out.empty() ? nullptr : &warm));
        warm.x = out.back().x;
        warm.y = out.back().dual;
    }
    return out;
}

}  // namespace rlasso
