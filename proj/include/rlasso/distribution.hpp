#pragma once

#include "rlasso/core.hpp"
#include "rlasso/solvers.hpp"

#include <cstdint>
#include <functional>
#include <random>
#include <vector>

namespace rlasso {

// Points of the joint (target, feature) space are stored as (b, r_1, ..., r_m).

/// Finitely supported probability measure.
class DiscreteMeasure {
public:
    /// Weights must be nonnegative and sum to 1 within 1e-12.
    DiscreteMeasure(std::vector<Vector> points, std::vector<double> weights);
    static DiscreteMeasure uniform(std::vector<Vector> points);

    const std::vector<Vector>& points() const noexcept { return points_; }
    const std::vector<double>& weights() const noexcept { return weights_; }
    double integrate(const std::function<double(const Vector&)>& h) const;

private:
    std::vector<Vector> points_;
    std::vector<double> weights_;
};

/// Closed boxes [center - half, center + half].
class BoxSets {
public:
    BoxSets(std::vector<Vector> centers, std::vector<Vector> half_widths);

    std::size_t size() const noexcept { return centers_.size(); }
    Index dimension() const noexcept { return centers_.front().size(); }
    const Vector& center(std::size_t i) const { return centers_.at(i); }
    const Vector& half_width(std::size_t i) const { return half_.at(i); }
    bool contains(std::size_t i, const Vector& point, double tol = 1e-12) const;

private:
    std::vector<Vector> centers_;
    std::vector<Vector> half_;
};

using PointFunction = std::function<double(const Vector&)>;

/// Maximizer of a convex h over box i by enumerating its 2^d corners (d <= 13).
Vector corner_maximizer(const PointFunction& h, const BoxSets& Z, std::size_t i);

/// Checks mu(union_{i in S} Z_i) >= |S| / n for every subset S (exhaustive
/// for n <= 12, otherwise 1000 random subsets drawn with `seed`).
bool in_pn(const DiscreteMeasure& mu, const BoxSets& Z, std::uint64_t seed = 0);

struct SupIdentity {
    double left = 0.0;
    DiscreteMeasure witness;
    bool witness_in_pn = false;
};

/// left = (1/n) sum_i h(maximizers[i]) and the uniform witness on the
/// maximizers. Throws std::invalid_argument if a maximizer lies outside its box.
SupIdentity per_set_sup_identity(const PointFunction& h, const BoxSets& Z,
                                 const std::vector<Vector>& maximizers, std::uint64_t seed = 0);

/// Half-widths sigma (targets) and delta_j (feature j), each a vector over samples.
struct BoxAllocation {
    Vector sigma;
    Matrix delta;  ///< n x m
};

/// Whether ||sigma||_2 <= budget and ||delta_j||_2 <= budget for every j.
bool allocation_feasible(const BoxAllocation& alloc, double budget, double tol = 1e-12);

/// sqrt(n * E_mu (b' - r'^T x)^2) for mu uniform on the per-box corner
/// maximizers of (b' - r'^T x)^2 around the samples.
double attained_loss(const ProblemInstance& p, const Vector& x, const BoxAllocation& alloc);

struct DistributionalIdentity {
    double lhs = 0.0;
    double attained = 0.0;
    BoxAllocation allocation;
};

/// lhs = ||b - A x||_2 + sqrt(n) c_n ||x||_1 + sqrt(n) c_n and the loss
/// attained by the worst-case measure over boxes with budget sqrt(n) c_n.
/// The allocation aligns every half-width vector with |b - A x| (uniform if
/// the residual vanishes), then runs a coordinate refinement.
DistributionalIdentity lasso_distributional_identity(const ProblemInstance& p, const Vector& x, double c_n);

/// Box-kernel density estimate with bandwidth c_n.
class KdeEstimate {
public:
    KdeEstimate(std::vector<Vector> samples, double bandwidth);

    const std::vector<Vector>& samples() const noexcept { return samples_; }
    double bandwidth() const noexcept { return c_; }
    Index dimension() const noexcept { return samples_.front().size(); }

private:
    std::vector<Vector> samples_;
    double c_;
};

/// (n c^d)^{-1} sum_i K((point - s_i) / c) with K the indicator of [-1, 1]^d
/// divided by 2^d. Box boundaries count as inside.
double kde_density(const KdeEstimate& est, const Vector& point);

/// Integral of the estimate over the box [lo, hi], summed kernel by kernel.
double kde_mass(const KdeEstimate& est, const Vector& lo, const Vector& hi);

/// Integral over the bounding box of all kernels.
double kde_total_mass(const KdeEstimate& est);

/// n^{-1 / (2 (m + 1))}.
double default_bandwidth(std::size_t n, Index m);

/// Sampler of (b, r) with bounded support and known second moments.
struct Generator {
    Index features = 0;
    std::function<Vector(std::mt19937_64&)> sample;  ///< returns (b, r)
    double Ebb = 0.0;
    Vector Erb;
    Matrix Err;
};

/// r ~ U[-scale, scale]^m, b = r^T x0 + U[-noise, noise].
Generator uniform_linear_generator(const Vector& x0, double feature_scale, double noise);

/// sqrt(E (b - r^T x)^2) from the generator moments.
double prediction_error(const Generator& g, const Vector& x);

/// Population least squares E[r r^T]^{-1} E[r b].
Vector population_optimum(const Generator& g);

struct ConsistencyRow {
    std::size_t n = 0;
    double c_n = 0.0;
    double prediction_error = 0.0;
    double oracle_error = 0.0;
    double fitted_norm = 0.0;
    bool converged = false;
    Vector x;
};

/// For each n, draws n samples, fits argmin sqrt(mean (b_i - r_i^T x)^2) + c_n ||x||_1
/// on the instance scaled by 1 / sqrt(n), and reports its population error
/// next to that of the population optimum. Row k uses seed + k.
std::vector<ConsistencyRow> consistency_experiment(const Generator& g, const std::vector<std::size_t>& n_schedule,
                                                   const std::vector<double>& c_schedule, std::uint64_t seed,
                                                   const SolverOptions& opts = {});

}  // namespace rlasso
