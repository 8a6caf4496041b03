#include "rlasso/distribution.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace rlasso {

DiscreteMeasure::DiscreteMeasure(std::vector<Vector> points, std::vector<double> weights)
    : points_(std::move(points)), weights_(std::move(weights)) {
    if (points_.empty() || points_.size() != weights_.size()) {
        throw std::invalid_argument("measure needs one weight per support point");
    }
    double total = 0.0;
    for (std::size_t i = 0; i < points_.size(); ++i) {
        if (!points_[i].allFinite() || points_[i].size() != points_.front().size()) {
            throw std::invalid_argument("support points must be finite and of equal length");
        }
        if (!(weights_[i] >= 0.0)) throw std::invalid_argument("measure weights must be nonnegative");
        total += weights_[i];
    }
    if (std::abs(total - 1.0) > 1e-12) throw std::invalid_argument("measure weights must sum to 1");
}

DiscreteMeasure DiscreteMeasure::uniform(std::vector<Vector> points) {
    const std::size_t n = points.size();
    return DiscreteMeasure(std::move(points), std::vector<double>(n, 1.0 / static_cast<double>(std::max<std::size_t>(n, 1))));
}

double DiscreteMeasure::integrate(const std::function<double(const Vector&)>& h) const {
    double acc = 0.0;
    for (std::size_t i = 0; i < points_.size(); ++i) acc += weights_[i] * h(points_[i]);
    return acc;
}

BoxSets::BoxSets(std::vector<Vector> centers, std::vector<Vector> half_widths)
    : centers_(std::move(centers)), half_(std::move(half_widths)) {
    if (centers_.empty() || centers_.size() != half_.size()) {
        throw std::invalid_argument("box sets need one half-width vector per center");
    }
    const Index d = centers_.front().size();
    for (std::size_t i = 0; i < centers_.size(); ++i) {
        if (centers_[i].size() != d || half_[i].size() != d) throw std::invalid_argument("box dimensions differ");
        if (!centers_[i].allFinite() || !half_[i].allFinite() || (half_[i].array() < 0.0).any()) {
            throw std::invalid_argument("box half-widths must be finite and nonnegative");
        }
    }
}

bool BoxSets::contains(std::size_t i, const Vector& point, double tol) const {
    const Vector& c = center(i);
    const Vector& h = half_width(i);
    if (point.size() != c.size()) return false;
    for (Index k = 0; k < c.size(); ++k) {
        if (std::abs(point(k) - c(k)) > h(k) + tol * (1.0 + std::abs(c(k)))) return false;
    }
    return true;
}

Vector corner_maximizer(const PointFunction& h, const BoxSets& Z, std::size_t i) {
    const Index d = Z.dimension();
    if (d > 13) throw std::invalid_argument("corner enumeration is limited to 13 dimensions");
    const Vector& c = Z.center(i);
    const Vector& half = Z.half_width(i);
    Vector best = c;
    double best_value = -std::numeric_limits<double>::infinity();
    for (unsigned long mask = 0; mask < (1UL << d); ++mask) {
        Vector corner = c;
        for (Index k = 0; k < d; ++k) corner(k) += ((mask >> k) & 1UL) ? half(k) : -half(k);
        const double v = h(corner);
        if (v > best_value) {
            best_value = v;
            best = corner;
        }
    }
    return best;
}

bool in_pn(const DiscreteMeasure& mu, const BoxSets& Z, std::uint64_t seed) {
    const std::size_t n = Z.size();
    // Mask of boxes containing each support point.
    std::vector<std::vector<bool>> inside(mu.points().size(), std::vector<bool>(n, false));
    for (std::size_t p = 0; p < mu.points().size(); ++p) {
        for (std::size_t i = 0; i < n; ++i) inside[p][i] = Z.contains(i, mu.points()[p]);
    }
    auto check = [&](const std::vector<bool>& S) {
        const auto size = static_cast<double>(std::count(S.begin(), S.end(), true));
        double mass = 0.0;
        for (std::size_t p = 0; p < inside.size(); ++p) {
            for (std::size_t i = 0; i < n; ++i) {
                if (S[i] && inside[p][i]) {
                    mass += mu.weights()[p];
                    break;
                }
            }
        }
        return mass >= size / static_cast<double>(n) - 1e-12;
    };

    std::vector<bool> S(n);
    if (n <= 12) {
        for (unsigned long mask = 1; mask < (1UL << n); ++mask) {
            for (std::size_t i = 0; i < n; ++i) S[i] = (mask >> i) & 1UL;
            if (!check(S)) return false;
        }
        return true;
    }
    std::mt19937_64 rng(seed);
    std::bernoulli_distribution coin(0.5);
    for (int t = 0; t < 1000; ++t) {
        for (std::size_t i = 0; i < n; ++i) S[i] = coin(rng);
        if (!check(S)) return false;
    }
    return true;
}

SupIdentity per_set_sup_identity(const PointFunction& h, const BoxSets& Z, const std::vector<Vector>& maximizers,
                                 std::uint64_t seed) {
    if (maximizers.size() != Z.size()) throw std::invalid_argument("need one maximizer per box");
    double total = 0.0;
    for (std::size_t i = 0; i < Z.size(); ++i) {
        if (!Z.contains(i, maximizers[i])) {
            throw std::invalid_argument("maximizer " + std::to_string(i) + " lies outside its box");
        }
        total += h(maximizers[i]);
    }
    DiscreteMeasure witness = DiscreteMeasure::uniform(maximizers);
    const bool ok = in_pn(witness, Z, seed);
    return SupIdentity{total / static_cast<double>(Z.size()), std::move(witness), ok};
}

bool allocation_feasible(const BoxAllocation& alloc, double budget, double tol) {
    if ((alloc.sigma.array() < 0.0).any() || (alloc.delta.array() < 0.0).any()) return false;
    const double cap = budget * (1.0 + tol) + tol;
    if (alloc.sigma.norm() > cap) return false;
    for (Index j = 0; j < alloc.delta.cols(); ++j) {
        if (alloc.delta.col(j).norm() > cap) return false;
    }
    return true;
}

namespace {

BoxSets allocation_boxes(const ProblemInstance& p, const BoxAllocation& alloc) {
    const Index n = p.samples();
    const Index m = p.features();
    if (alloc.sigma.size() != n || alloc.delta.rows() != n || alloc.delta.cols() != m) {
        throw std::invalid_argument("allocation shape does not match the instance");
    }
    std::vector<Vector> centers;
    std::vector<Vector> half;
    for (Index i = 0; i < n; ++i) {
        Vector c(m + 1);
        Vector h(m + 1);
        c(0) = p.b()(i);
        c.tail(m) = p.row(i).transpose();
        h(0) = alloc.sigma(i);
        h.tail(m) = alloc.delta.row(i).transpose();
        centers.push_back(c);
        half.push_back(h);
    }
    return BoxSets(std::move(centers), std::move(half));
}

}  // namespace

double attained_loss(const ProblemInstance& p, const Vector& x, const BoxAllocation& alloc) {
    if (x.size() != p.features()) throw std::invalid_argument("weight vector does not match feature count");
    const BoxSets Z = allocation_boxes(p, alloc);
    const Index m = p.features();
    const PointFunction loss = [&](const Vector& z) {
        const double e = z(0) - z.tail(m).dot(x);
        return e * e;
    };
    std::vector<Vector> maximizers;
    for (std::size_t i = 0; i < Z.size(); ++i) maximizers.push_back(corner_maximizer(loss, Z, i));
    const DiscreteMeasure mu = DiscreteMeasure::uniform(std::move(maximizers));
    return std::sqrt(static_cast<double>(p.samples()) * mu.integrate(loss));
}

DistributionalIdentity lasso_distributional_identity(const ProblemInstance& p, const Vector& x, double c_n) {
    if (!(c_n >= 0.0) || !std::isfinite(c_n)) throw std::invalid_argument("c_n must be finite and nonnegative");
    if (x.size() != p.features()) throw std::invalid_argument("weight vector does not match feature count");
    const Index n = p.samples();
    const Index m = p.features();
    const double budget = std::sqrt(static_cast<double>(n)) * c_n;

    DistributionalIdentity out;
    out.lhs = p.residual(x).norm() + budget * x.lpNorm<1>() + budget;

    // Every half-width vector points along |b - A x|, so the per-sample
    // worst-case errors |res_i| + sigma_i + sum_j delta_ij |x_j| all add
    // in the same direction.
    const Vector res = p.residual(x).cwiseAbs();
    const double rn = res.norm();
    const Vector dir = rn > 0.0 ? Vector(res / rn) : Vector(Vector::Constant(n, 1.0 / std::sqrt(static_cast<double>(n))));
    BoxAllocation alloc{budget * dir, Matrix(n, m)};
    for (Index j = 0; j < m; ++j) alloc.delta.col(j) = budget * dir;

    // Coordinate refinement on the budget spheres: shift weight between
    // samples of one half-width vector and keep strict improvements.
    double best = attained_loss(p, x, alloc);
    if (budget > 0.0) {
        for (double step = 0.25; step > 1e-3; step *= 0.5) {
            bool improved = true;
            for (int sweep = 0; sweep < 4 && improved; ++sweep) {
                improved = false;
                for (Index col = -1; col < m; ++col) {
                    for (Index i = 0; i < n; ++i) {
                        for (double sign : {1.0, -1.0}) {
                            BoxAllocation trial = alloc;
                            Eigen::Ref<Vector> vec = col < 0 ? Eigen::Ref<Vector>(trial.sigma)
                                                             : Eigen::Ref<Vector>(trial.delta.col(col));
                            vec(i) = std::max(vec(i) + sign * step * budget, 0.0);
                            const double norm = vec.norm();
                            if (norm == 0.0) continue;
                            vec *= budget / norm;
                            const double value = attained_loss(p, x, trial);
                            if (value > best * (1.0 + 1e-14)) {
                                alloc = trial;
                                best = value;
                                improved = true;
                            }
                        }
                    }
                }
            }
        }
    }
    out.allocation = alloc;
    out.attained = best;
    return out;
}

KdeEstimate::KdeEstimate(std::vector<Vector> samples, double bandwidth)
    : samples_(std::move(samples)), c_(bandwidth) {
    if (samples_.empty()) throw std::invalid_argument("kernel density estimate needs samples");
    if (!(c_ > 0.0) || !std::isfinite(c_)) throw std::invalid_argument("bandwidth must be positive");
    for (const Vector& s : samples_) {
        if (s.size() != samples_.front().size() || !s.allFinite()) {
            throw std::invalid_argument("samples must be finite and of equal length");
        }
    }
}

double kde_density(const KdeEstimate& est, const Vector& point) {
    if (point.size() != est.dimension()) throw std::invalid_argument("point dimension mismatch");
    const double c = est.bandwidth();
    std::size_t hits = 0;
    for (const Vector& s : est.samples()) {
        if ((point - s).lpNorm<Eigen::Infinity>() <= c) ++hits;
    }
    const double volume = std::pow(2.0 * c, static_cast<double>(est.dimension()));
    return static_cast<double>(hits) / (static_cast<double>(est.samples().size()) * volume);
}

double kde_mass(const KdeEstimate& est, const Vector& lo, const Vector& hi) {
    const Index d = est.dimension();
    if (lo.size() != d || hi.size() != d) throw std::invalid_argument("box dimension mismatch");
    const double c = est.bandwidth();
    double acc = 0.0;
    for (const Vector& s : est.samples()) {
        double frac = 1.0;
        for (Index k = 0; k < d && frac > 0.0; ++k) {
            const double overlap = std::min(hi(k), s(k) + c) - std::max(lo(k), s(k) - c);
            frac *= std::max(overlap, 0.0) / (2.0 * c);
        }
        acc += frac;
    }
    return acc / static_cast<double>(est.samples().size());
}

double kde_total_mass(const KdeEstimate& est) {
    const Index d = est.dimension();
    Vector lo = Vector::Constant(d, std::numeric_limits<double>::infinity());
    Vector hi = -lo;
    for (const Vector& s : est.samples()) {
        lo = lo.cwiseMin(s);
        hi = hi.cwiseMax(s);
    }
    const Vector pad = Vector::Constant(d, est.bandwidth());
    return kde_mass(est, lo - pad, hi + pad);
}

double default_bandwidth(std::size_t n, Index m) {
    if (n < 1 || m < 0) throw std::invalid_argument("default_bandwidth needs n >= 1");
    return std::pow(static_cast<double>(n), -1.0 / (2.0 * static_cast<double>(m + 1)));
}

Generator uniform_linear_generator(const Vector& x0, double feature_scale, double noise) {
    if (!(feature_scale > 0.0) || !(noise >= 0.0)) {
        throw std::invalid_argument("generator needs a positive feature scale and nonnegative noise");
    }
    const Index m = x0.size();
    const double var_r = feature_scale * feature_scale / 3.0;
    Generator g;
    g.features = m;
    g.Err = var_r * Matrix::Identity(m, m);
    g.Erb = var_r * x0;
    g.Ebb = var_r * x0.squaredNorm() + noise * noise / 3.0;
    g.sample = [x0, feature_scale, noise, m](std::mt19937_64& rng) {
        std::uniform_real_distribution<double> unit(-1.0, 1.0);
        Vector z(m + 1);
        for (Index j = 0; j < m; ++j) z(j + 1) = feature_scale * unit(rng);
        z(0) = z.tail(m).dot(x0) + noise * unit(rng);
        return z;
    };
    return g;
}

double prediction_error(const Generator& g, const Vector& x) {
    const double mse = g.Ebb - 2.0 * x.dot(g.Erb) + x.dot(g.Err * x);
    return std::sqrt(std::max(mse, 0.0));
}

Vector population_optimum(const Generator& g) { return g.Err.ldlt().solve(g.Erb); }

std::vector<ConsistencyRow> consistency_experiment(const Generator& g, const std::vector<std::size_t>& n_schedule,
                                                   const std::vector<double>& c_schedule, std::uint64_t seed,
                                                   const SolverOptions& opts) {
    if (n_schedule.size() != c_schedule.size() || n_schedule.empty()) {
        throw std::invalid_argument("n and c schedules must be nonempty and aligned");
    }
    const Index m = g.features;
    const Vector x_pop = population_optimum(g);
    const double oracle = prediction_error(g, x_pop);

    std::vector<ConsistencyRow> rows;
    for (std::size_t k = 0; k < n_schedule.size(); ++k) {
        const std::size_t n = n_schedule[k];
        if (n < 1) throw std::invalid_argument("sample sizes must be positive");
        std::mt19937_64 rng(seed + k);
        Matrix A(static_cast<Index>(n), m);
        Vector b(static_cast<Index>(n));
        for (std::size_t i = 0; i < n; ++i) {
            const Vector z = g.sample(rng);
            b(static_cast<Index>(i)) = z(0);
            A.row(static_cast<Index>(i)) = z.tail(m).transpose();
        }
        const double scale = 1.0 / std::sqrt(static_cast<double>(n));
        const ProblemInstance p(A * scale, b * scale);
        const RegressionSolution sol = solve_weighted_l1(p, Vector::Constant(m, c_schedule[k]), NormTag::l2(), opts);

        ConsistencyRow row;
        row.n = n;
        row.c_n = c_schedule[k];
        row.x = sol.x;
        row.prediction_error = prediction_error(g, sol.x);
        row.oracle_error = oracle;
        row.fitted_norm = sol.x.norm();
        row.converged = sol.converged;
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace rlasso
