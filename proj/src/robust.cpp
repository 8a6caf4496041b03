#include "rlasso/robust.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace rlasso {
namespace {

void check_dimensions(const ProblemInstance& p, const Vector& x, const Uncoupled& u) {
    if (x.size() != p.features() || u.radii.size() != p.features()) {
        throw std::invalid_argument("dimension mismatch between instance, weights and radii");
    }
}

void check_loss(const ProblemInstance& p, const NormTag& loss) {
    if (loss.weighted() && (loss.weights().size() != p.samples() || loss.has_zero_weight())) {
        throw std::invalid_argument("loss weights must be positive, one per sample");
    }
}

// Unit vector of the given norm in the direction of v, or of e_1 if v = 0.
Vector unit_direction(const Vector& v, const NormTag& loss) {
    const double norm = norm_eval(v, loss);
    if (norm > 0.0) return v / norm;
    Vector e = Vector::Zero(v.size());
    e(0) = 1.0;
    return e / norm_eval(e, loss);
}

// Uniform draw from the unit ball of the (weighted) norm.
Vector uniform_in_ball(Index n, const NormTag& loss, std::mt19937_64& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    Vector v(n);
    switch (loss.kind()) {
    case NormKind::L2: {
        for (Index i = 0; i < n; ++i) v(i) = gauss(rng);
        const double radius = std::pow(unit(rng), 1.0 / static_cast<double>(n));
        v *= radius / v.norm();
        break;
    }
    case NormKind::LInf:
        for (Index i = 0; i < n; ++i) v(i) = 2.0 * unit(rng) - 1.0;
        break;
    case NormKind::L1: {
        // Exponential spacings: (e_1..e_n) / sum(e_1..e_{n+1}) is uniform on
        // the simplex interior; random signs fill the cross-polytope.
        std::exponential_distribution<double> expo(1.0);
        double total = 0.0;
        for (Index i = 0; i < n; ++i) {
            v(i) = expo(rng);
            total += v(i);
        }
        total += expo(rng);
        for (Index i = 0; i < n; ++i) v(i) *= (unit(rng) < 0.5 ? -1.0 : 1.0) / total;
        break;
    }
    }
    if (loss.weighted()) v.array() /= loss.weights().array();
    return v;
}

// Random extreme point of the unit ball of the (weighted) norm.
Vector extreme_direction(Index n, const NormTag& loss, std::mt19937_64& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_int_distribution<Index> pick(0, n - 1);
    std::bernoulli_distribution coin(0.5);
    Vector v = Vector::Zero(n);
    switch (loss.kind()) {
    case NormKind::L2:
        for (Index i = 0; i < n; ++i) v(i) = gauss(rng);
        break;
    case NormKind::LInf:
        for (Index i = 0; i < n; ++i) v(i) = coin(rng) ? 1.0 : -1.0;
        break;
    case NormKind::L1:
        v(pick(rng)) = coin(rng) ? 1.0 : -1.0;
        break;
    }
    if (loss.weighted()) v.array() /= loss.weights().array();
    return v / norm_eval(v, loss);
}

}  // namespace

bool is_member(const Perturbation& p, const Uncoupled& u, const NormTag& column_norm, double tol) {
    if (p.delta.cols() != u.radii.size()) return false;
    for (Index i = 0; i < p.delta.cols(); ++i) {
        if (norm_eval(p.delta.col(i), column_norm) > u.radii(i) + tol) return false;
    }
    return true;
}

double worst_case_residual(const ProblemInstance& p, const Vector& x, const Uncoupled& u,
                           const NormTag& loss) {
    check_dimensions(p, x, u);
    check_loss(p, loss);
    return norm_eval(p.residual(x), loss) + u.radii.dot(x.cwiseAbs());
}

Perturbation adversarial_perturbation(const ProblemInstance& p, const Vector& x, const Uncoupled& u,
                                      const NormTag& loss) {
    check_dimensions(p, x, u);
    check_loss(p, loss);
    const Vector dir = unit_direction(p.residual(x), loss);
    Perturbation out{Matrix(p.samples(), p.features())};
    for (Index i = 0; i < p.features(); ++i) out.delta.col(i) = -u.radii(i) * sgn(x(i)) * dir;
    return out;
}

double perturbed_residual(const ProblemInstance& p, const Vector& x, const Perturbation& d,
                          const NormTag& loss) {
    if (d.delta.rows() != p.samples() || d.delta.cols() != p.features()) {
        throw std::invalid_argument("perturbation shape does not match the instance");
    }
    return norm_eval(p.residual(x) - d.delta * x, loss);
}

double sampled_worst_case(const ProblemInstance& p, const Vector& x, const Uncoupled& u,
                          const NormTag& loss, std::size_t samples, std::uint64_t seed) {
    check_dimensions(p, x, u);
    check_loss(p, loss);
    if (samples < 1) throw std::invalid_argument("sampled_worst_case needs at least one sample");

    const Index n = p.samples();
    const Index m = p.features();
    const Vector residual = p.residual(x);
    std::mt19937_64 rng(seed);
    double best = 0.0;
    for (std::size_t s = 0; s < samples; ++s) {
        Vector shift = Vector::Zero(n);  // (Delta A) x
        if (s == 0 && loss.kind() == NormKind::L2) {
            shift = adversarial_perturbation(p, x, u, loss).delta * x;
        } else if (s % 2 == 0) {
            const Vector dir = extreme_direction(n, loss, rng);
            for (Index i = 0; i < m; ++i) shift -= u.radii(i) * sgn(x(i)) * x(i) * dir;
        } else {
            for (Index i = 0; i < m; ++i) shift += x(i) * u.radii(i) * uniform_in_ball(n, loss, rng);
        }
        best = std::max(best, norm_eval(residual - shift, loss));
    }
    return best;
}

}  // namespace rlasso
