#include "rlasso/coupled.hpp"

#include "rlasso/lp.hpp"
#include "rlasso/norms.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <vector>

namespace rlasso {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Vector sign_times(const Vector& x, const Vector& v) {
    Vector out(x.size());
    for (Index i = 0; i < x.size(); ++i) out(i) = sgn(x(i)) * v(i);
    return out;
}

}  // namespace

InnerMaxResult eval_v(const Vector& lambda, const Vector& kappa, const Vector& x,
                      const ConvexConstraintOracle& oracle, const InnerMaxOptions& opts) {
    const Index m = oracle.dimension();
    const auto k = static_cast<Index>(oracle.constraints());
    if (lambda.size() != k || kappa.size() != m || x.size() != m) {
        throw std::invalid_argument("eval_v: dimension mismatch with the constraint oracle");
    }
    if ((lambda.array() < 0.0).any()) throw std::invalid_argument("lambda must be nonnegative");
    if ((kappa.array() < 0.0).any()) throw std::invalid_argument("kappa must be nonnegative");

    const Vector g = kappa + x.cwiseAbs();
    Vector fvals(k);
    auto phi = [&](const Vector& c, Vector& grad) {
        grad = g;
        double value = g.dot(c);
        for (Index j = 0; j < k; ++j) {
            const ConstraintValue f = oracle.evaluate(static_cast<std::size_t>(j), c);
            fvals(j) = f.value;
            if (lambda(j) != 0.0) {
                value -= lambda(j) * f.value;
                grad -= lambda(j) * f.subgradient;
            }
        }
        return value;
    };

    const Vector& z0 = oracle.slater_point();
    Vector c = opts.start.size() == m ? Vector(opts.start.cwiseMax(0.0)) : z0;
    Vector grad;
    double value = phi(c, grad);
    Vector f_at_c = fvals;
    double alpha = 1.0 / std::max(grad.norm(), 1e-300);
    bool diverged = false;

    for (std::size_t s = 0; s < opts.steps; ++s) {
        const double gn = grad.norm();
        if (gn == 0.0) break;
        const Vector trial = (c + alpha * grad).cwiseMax(0.0);
        const double moved = (trial - c).norm();
        if (moved <= 1e-15 * (1.0 + c.norm())) break;
        Vector trial_grad;
        const double trial_value = phi(trial, trial_grad);
        if (trial_value >= value) {
            c = trial;
            value = trial_value;
            grad = trial_grad;
            f_at_c = fvals;
            alpha *= 2.0;
            if (c.lpNorm<Eigen::Infinity>() > opts.divergence) {
                diverged = true;
                break;
            }
        } else {
            alpha *= 0.5;
            if (alpha * gn <= 1e-15 * (1.0 + c.norm())) break;
        }
    }

    InnerMaxResult out;
    out.c0 = c;
    if (diverged) {
        const Vector step = c - z0;
        const double len = step.norm();
        out.value = kInf;
        out.unbounded = true;
        out.d_kappa = step / len;
        out.d_x = sign_times(x, out.d_kappa);
        out.d_lambda.resize(k);
        for (Index j = 0; j < k; ++j) {
            const double f0 = oracle.evaluate(static_cast<std::size_t>(j), z0).value;
            out.d_lambda(j) = -(f_at_c(j) - f0) / len;
        }
        return out;
    }
    out.value = value;
    out.d_lambda = -f_at_c;
    out.d_kappa = c;
    out.d_x = sign_times(x, c);
    return out;
}

SupportValue support_function(const ConvexConstraintOracle& oracle, const Vector& w,
                              std::size_t max_cuts, double rel_tol) {
    const Index m = oracle.dimension();
    if (w.size() != m) throw std::invalid_argument("support_function: dimension mismatch");
    if ((w.array() < 0.0).any()) throw std::invalid_argument("support_function needs w >= 0");

    constexpr double kBox = 1e6;
    const Vector& z0 = oracle.slater_point();
    const std::size_t k = oracle.constraints();

    // Cut rows  -g^T c >= f(p) - g^T p  with their constraint index; the box
    // rows  -c_i >= -kBox  keep every LP bounded.
    std::vector<Vector> cut_g;
    std::vector<double> cut_h;
    std::vector<std::size_t> cut_owner;
    auto add_cut = [&](std::size_t j, const Vector& at) {
        const ConstraintValue f = oracle.evaluate(j, at);
        cut_g.push_back(-f.subgradient);
        cut_h.push_back(f.value - f.subgradient.dot(at));
        cut_owner.push_back(j);
    };
    for (std::size_t j = 0; j < k; ++j) add_cut(j, z0);

    SupportValue out;
    out.c = z0;
    out.lower = w.dot(z0);
    out.upper = kInf;
    out.lambda = Vector::Zero(static_cast<Index>(k));

    for (std::size_t round = 0; round <= max_cuts; ++round) {
        const auto rows = static_cast<Index>(cut_g.size());
        Matrix G(rows + m, m);
        Vector h(rows + m);
        for (Index r = 0; r < rows; ++r) {
            G.row(r) = cut_g[static_cast<std::size_t>(r)].transpose();
            h(r) = cut_h[static_cast<std::size_t>(r)];
        }
        G.bottomRows(m) = -Matrix::Identity(m, m);
        h.tail(m).setConstant(-kBox);
        const LpResult lp = lp_solve(-w, G, h);
        if (lp.status != LpStatus::Optimal) {
            throw std::runtime_error("support_function: cutting-plane LP failed (" + to_string(lp.status) + ")");
        }
        const Vector& cl = lp.primal;
        out.upper = std::min(out.upper, w.dot(cl));
        out.lambda.setZero();
        for (Index r = 0; r < rows; ++r) out.lambda(static_cast<Index>(cut_owner[static_cast<std::size_t>(r)])) += lp.dual(r);

        bool at_box = false;
        for (Index i = 0; i < m; ++i) at_box = at_box || (w(i) > 0.0 && cl(i) > 0.5 * kBox);

        // Back off along the segment to the Slater point until feasible.
        double theta = 1.0;
        if (oracle.max_violation(cl) > 0.0) {
            double lo = 0.0;
            double hi = 1.0;
            for (int it = 0; it < 60; ++it) {
                const double mid = 0.5 * (lo + hi);
                (oracle.max_violation(z0 + mid * (cl - z0)) <= 0.0 ? lo : hi) = mid;
            }
            theta = lo;
        }
        const Vector feasible = z0 + theta * (cl - z0);
        if (w.dot(feasible) > out.lower) {
            out.lower = w.dot(feasible);
            out.c = feasible;
        }
        out.unbounded = at_box && theta > 0.25;
        if (out.unbounded) return out;
        if (out.upper - out.lower <= rel_tol * (1.0 + std::abs(out.upper))) break;
        if (theta == 1.0) break;  // LP optimum is feasible, hence optimal
        for (std::size_t j = 0; j < k; ++j) {
            if (oracle.evaluate(j, cl).value > 0.0) add_cut(j, cl);
        }
    }
    out.upper = std::max(out.upper, out.lower);
    return out;
}

PolytopeValue polytope_penalty(const Matrix& T, const Vector& s, const Vector& w) {
    if (T.rows() != s.size() || T.cols() != w.size()) {
        throw std::invalid_argument("polytope_penalty: dimension mismatch");
    }
    const LpResult lp = lp_solve(s, T.transpose(), w);
    if (lp.status == LpStatus::Infeasible) {
        throw std::invalid_argument("disturbance budget cannot cover requested weights");
    }
    if (lp.status == LpStatus::Unbounded) {
        throw std::invalid_argument("polytope {c >= 0 : T c <= s} is empty");
    }
    return PolytopeValue{lp.objective, lp.primal, lp.dual};
}

namespace {

using SupportOracle = std::function<SupportValue(const Vector&)>;

// Alternates worst-case radii at the current x with a certified weighted-l1
// solve at those radii, keeping only improving moves along the segment.
// Every solve at feasible radii lower-bounds the optimum.
struct PolishResult {
    Vector x;
    double upper = kInf;
    double lower = -kInf;
    SupportValue support;
};

PolishResult polish(const ProblemInstance& p, const NormTag& loss, const SupportOracle& support,
                    const Vector& start, const CoupledOptions& opts) {
    // A tiny tie-break keeps radii of inactive features at their largest
    // admissible value; it only loosens the upper bound by eps * ||c||_1.
    auto evaluate = [&](const Vector& x, SupportValue& sv) {
        const double eps = 1e-11 * (1.0 + x.lpNorm<Eigen::Infinity>());
        sv = support(x.cwiseAbs() + Vector::Constant(x.size(), eps));
        if (sv.unbounded) sv = support(x.cwiseAbs());
        if (sv.unbounded) return kInf;
        return norm_eval(p.residual(x), loss) + sv.upper;
    };

    PolishResult best;
    best.x = start;
    best.upper = evaluate(start, best.support);
    if (!std::isfinite(best.upper)) {
        best.x = Vector::Zero(p.features());
        best.upper = evaluate(best.x, best.support);
        if (!std::isfinite(best.upper)) throw std::runtime_error("uncertainty set appears unbounded");
    }

    const double tol = opts.solver.rel_tol;
    // Running mean of the radii used so far; feasible by convexity of Z.
    Vector c_mean = Vector::Zero(p.features());
    double used = 0.0;
    bool averaged = false;
    for (std::size_t round = 0; round < opts.polish_rounds; ++round) {
        const Vector radii = averaged ? c_mean : best.support.c;
        if (!averaged) {
            used += 1.0;
            c_mean += (radii - c_mean) / used;
        }
        const RegressionSolution sol = solve_weighted_l1(p, radii, loss, opts.solver);
        best.lower = std::max(best.lower, sol.objective - sol.certificate_gap);
        if (best.upper - best.lower <= tol * (1.0 + std::abs(best.upper))) break;

        bool improved = false;
        for (double gamma = 1.0; gamma >= 1.0 / 64.0 && !improved; gamma *= 0.5) {
            const Vector cand = best.x + gamma * (sol.x - best.x);
            SupportValue sv;
            const double value = evaluate(cand, sv);
            if (value < best.upper) {
                best.x = cand;
                best.upper = value;
                best.support = sv;
                improved = true;
            }
        }
        // A stalled best response gets one retry from the averaged radii.
        if (!improved && averaged) break;
        averaged = !improved;
    }
    return best;
}

}  // namespace

CoupledSolution solve_general_uncertainty(const ProblemInstance& p, const ConvexConstraintOracle& oracle,
                                          const NormTag& loss, const CoupledOptions& opts) {
    opts.solver.validate();
    const Index m = p.features();
    const auto k = static_cast<Index>(oracle.constraints());
    if (oracle.dimension() != m) throw std::invalid_argument("oracle dimension does not match feature count");
    if (loss.weighted() && (loss.weights().size() != p.samples() || loss.has_zero_weight())) {
        throw std::invalid_argument("loss weights must be positive, one per sample");
    }

    Vector lambda = Vector::Zero(k);
    Vector kappa = Vector::Zero(m);
    Vector x = Vector::Zero(m);
    Vector best_x = x;
    double best_f = kInf;
    InnerMaxOptions inner = opts.inner;
    std::size_t infinite_run = 0;

    for (std::size_t t = 1; t <= opts.subgradient_iters; ++t) {
        InnerMaxResult v = eval_v(lambda, kappa, x, oracle, inner);
        if (v.unbounded && ++infinite_run > 500) {
            // Escalate lambda at fixed (kappa, x) before giving up.
            for (int e = 0; e < 60 && v.unbounded; ++e) {
                lambda = 2.0 * lambda + Vector::Ones(k);
                v = eval_v(lambda, kappa, x, oracle, opts.inner);
            }
            if (v.unbounded) throw std::runtime_error("uncertainty set appears unbounded");
        }
        Vector gx = v.d_x;
        if (!v.unbounded) {
            infinite_run = 0;
            const Vector r = p.residual(x);
            const double f = norm_eval(r, loss) + v.value;
            if (f < best_f) {
                best_f = f;
                best_x = x;
            }
            gx -= p.A().transpose() * norm_subgradient(r, loss);
            inner.start = v.c0;
        } else {
            inner.start.resize(0);
        }
        const double gn = std::sqrt(v.d_lambda.squaredNorm() + v.d_kappa.squaredNorm() + gx.squaredNorm());
        if (gn == 0.0) break;
        const double eta = opts.step0 / std::sqrt(static_cast<double>(t)) / gn;
        lambda = (lambda - eta * v.d_lambda).cwiseMax(0.0);
        kappa = (kappa - eta * v.d_kappa).cwiseMax(0.0);
        x -= eta * gx;
    }

    const PolishResult pr =
        polish(p, loss, [&](const Vector& w) { return support_function(oracle, w); }, best_x, opts);

    CoupledSolution out;
    out.solution.x = pr.x;
    out.solution.objective = pr.upper;
    out.solution.iterations = opts.subgradient_iters;
    out.solution.certificate_gap = std::max(pr.upper - pr.lower, 0.0);
    out.solution.converged = out.solution.certificate_gap <= opts.certify_tol * (1.0 + std::abs(pr.upper));
    out.solution.dual = norm_subgradient(p.residual(pr.x), loss);
    out.lambda = pr.support.lambda;
    out.kappa = Vector::Zero(m);
    return out;
}

PolytopeSolution solve_polytope_uncertainty(const ProblemInstance& p, const Matrix& T, const Vector& s,
                                            const NormTag& loss, const CoupledOptions& opts) {
    opts.solver.validate();
    if (T.cols() != p.features()) throw std::invalid_argument("polytope T does not match feature count");
    if (loss.weighted() && (loss.weights().size() != p.samples() || loss.has_zero_weight())) {
        throw std::invalid_argument("loss weights must be positive, one per sample");
    }
    // Validates nonemptiness.
    (void)UncertaintyModel::polytope(T, s);

    auto objective = [&](const Vector& x, PolytopeValue& pv) {
        pv = polytope_penalty(T, s, x.cwiseAbs());
        return norm_eval(p.residual(x), loss) + pv.value;
    };

    Vector x = Vector::Zero(p.features());
    Vector best_x = x;
    PolytopeValue pv;
    double best_f = objective(x, pv);
    for (std::size_t t = 1; t <= opts.subgradient_iters; ++t) {
        const Vector g = sign_times(x, pv.c) - p.A().transpose() * norm_subgradient(p.residual(x), loss);
        const double gn = g.norm();
        if (gn == 0.0) break;
        x -= opts.step0 / std::sqrt(static_cast<double>(t)) / gn * g;
        const double f = objective(x, pv);
        if (f < best_f) {
            best_f = f;
            best_x = x;
        }
    }

    auto support = [&](const Vector& w) {
        const PolytopeValue exact = polytope_penalty(T, s, w);
        SupportValue sv;
        sv.upper = exact.value;
        sv.lower = exact.value;
        sv.c = exact.c;
        sv.lambda = exact.lambda;
        return sv;
    };
    const PolishResult pr = polish(p, loss, support, best_x, opts);

    // Cutting planes on the concave dual g(c) = min_x ||b - A x|| + c^T |x|
    // over the polytope. Plane k comes from iterate x_k; the LP duals weight a
    // convex combination of iterates whose objective is an upper bound.
    const Index m = p.features();
    PolytopeValue final_value;
    Vector x_best = pr.x;
    double upper = objective(pr.x, final_value);
    double lower = pr.lower;
    std::vector<Vector> planes{Vector::Zero(m), pr.x};
    auto consider = [&](const Vector& cand) {
        PolytopeValue v;
        const double f = objective(cand, v);
        if (f < upper) {
            upper = f;
            x_best = cand;
            final_value = v;
        }
    };
    for (std::size_t round = 0; round < opts.bundle_rounds; ++round) {
        if (upper - lower <= opts.certify_tol * (1.0 + std::abs(upper))) break;
        const auto K = static_cast<Index>(planes.size());
        Matrix G = Matrix::Zero(K + T.rows(), m + 1);
        Vector h(K + T.rows());
        for (Index k = 0; k < K; ++k) {
            const Vector& xk = planes[static_cast<std::size_t>(k)];
            G.row(k).head(m) = xk.cwiseAbs().transpose();
            G(k, m) = -1.0;
            h(k) = -norm_eval(p.residual(xk), loss);
        }
        G.bottomLeftCorner(T.rows(), m) = -T;
        h.tail(T.rows()) = -s;
        Vector cost = Vector::Zero(m + 1);
        cost(m) = -1.0;
        const LpResult lp = lp_solve(cost, G, h);
        if (lp.status != LpStatus::Optimal) break;

        const Vector theta = lp.dual.head(K);
        if (theta.sum() > 0.0) {
            Vector mix = Vector::Zero(m);
            for (Index k = 0; k < K; ++k) mix += theta(k) * planes[static_cast<std::size_t>(k)];
            consider(mix / theta.sum());
        }
        const RegressionSolution sol = solve_weighted_l1(p, lp.primal.head(m), loss, opts.solver);
        lower = std::max(lower, sol.objective - sol.certificate_gap);
        consider(sol.x);
        planes.push_back(sol.x);
    }

    PolytopeSolution out;
    out.solution.x = x_best;
    out.solution.objective = upper;
    out.solution.iterations = opts.subgradient_iters;
    out.solution.certificate_gap = std::max(upper - lower, 0.0);
    out.solution.converged = out.solution.certificate_gap <= opts.certify_tol * (1.0 + std::abs(upper));
    out.solution.dual = norm_subgradient(p.residual(x_best), loss);
    out.lambda = final_value.lambda;
    return out;
}

}  // namespace rlasso
