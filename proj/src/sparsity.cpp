#include "rlasso/sparsity.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace rlasso {
namespace {

std::vector<Index> normalized_support(const std::vector<Index>& I, Index m) {
    std::vector<Index> out = I;
    std::sort(out.begin(), out.end());
    if (std::adjacent_find(out.begin(), out.end()) != out.end()) {
        throw std::invalid_argument("support index set has repeated entries");
    }
    for (Index i : out) {
        if (i < 0 || i >= m) throw std::invalid_argument("support index out of range");
    }
    return out;
}

std::vector<Index> complement(const std::vector<Index>& I, Index m) {
    std::vector<Index> out;
    for (Index j = 0; j < m; ++j) {
        if (!std::binary_search(I.begin(), I.end(), j)) out.push_back(j);
    }
    return out;
}

std::vector<Index> support_of(const Vector& x) {
    const double tol = 1e-6 * (1.0 + x.lpNorm<Eigen::Infinity>());
    std::vector<Index> out;
    for (Index j = 0; j < x.size(); ++j) {
        if (std::abs(x(j)) > tol) out.push_back(j);
    }
    return out;
}

}  // namespace

SupportCertificate incoherence_certificate(const ProblemInstance& p, const std::vector<Index>& I, double c) {
    if (!(c >= 0.0) || !std::isfinite(c)) throw std::invalid_argument("radius c must be finite and nonnegative");
    SupportCertificate cert;
    cert.support = normalized_support(I, p.features());
    cert.outside = complement(cert.support, p.features());
    cert.c = c;

    Matrix span(p.samples(), static_cast<Index>(cert.support.size()) + 1);
    for (std::size_t k = 0; k < cert.support.size(); ++k) span.col(static_cast<Index>(k)) = p.column(cert.support[k]);
    span.col(span.cols() - 1) = p.b();
    Eigen::ColPivHouseholderQR<Matrix> qr(span);
    qr.setThreshold(1e-10);
    const Index rank = qr.rank();
    const Matrix Q = qr.householderQ();
    cert.basis = Q.leftCols(rank);

    const auto k = static_cast<Index>(cert.outside.size());
    cert.projection_norms.resize(k);
    cert.orthogonal_norms.resize(k);
    cert.verdict = true;
    for (Index t = 0; t < k; ++t) {
        const Vector a = p.column(cert.outside[static_cast<std::size_t>(t)]);
        const Vector coef = cert.basis.transpose() * a;
        cert.projection_norms(t) = coef.norm();
        cert.orthogonal_norms(t) = (a - cert.basis * coef).norm();
        if (cert.projection_norms(t) > c + 1e-9) cert.verdict = false;
    }
    return cert;
}

ZeroSupportCheck verify_zero_support(const ProblemInstance& p, const std::vector<Index>& I, double c,
                                     const SolverOptions& opts) {
    const SupportCertificate cert = incoherence_certificate(p, I, c);
    if (!cert.verdict) {
        throw std::invalid_argument("incoherence certificate fails; the zero-support guarantee does not apply");
    }
    ZeroSupportCheck out;
    out.solution = solve_weighted_l1(p, Vector::Constant(p.features(), c), NormTag::l2(), opts);
    if (!out.solution.converged) {
        out.status = SupportStatus::Indeterminate;
        return out;
    }
    const double tol = 1e-6 * (1.0 + out.solution.x.lpNorm<Eigen::Infinity>());
    out.status = SupportStatus::Zero;
    for (Index j : cert.outside) {
        if (std::abs(out.solution.x(j)) > tol) out.status = SupportStatus::Nonzero;
    }
    return out;
}

PersistenceReport support_persistence_experiment(const ProblemInstance& p, const std::vector<Index>& I,
                                                 const Perturbation& perturbation, const Vector& radii,
                                                 const SolverOptions& opts, std::size_t competitors,
                                                 std::uint64_t seed) {
    const Index m = p.features();
    const std::vector<Index> support = normalized_support(I, m);
    if (perturbation.delta.rows() != p.samples() || perturbation.delta.cols() != m || radii.size() != m) {
        throw std::invalid_argument("perturbation or radii do not match the instance");
    }
    for (Index i : support) {
        if (perturbation.delta.col(i).cwiseAbs().maxCoeff() > 0.0) {
            throw std::invalid_argument("perturbation touches a column inside the support set");
        }
    }

    PersistenceReport rep;
    rep.inflated_radii = radii;
    for (Index j = 0; j < m; ++j) rep.inflated_radii(j) += perturbation.delta.col(j).norm();
    const ProblemInstance tilde(p.A() + perturbation.delta, p.b());
    const Uncoupled original_set{radii};
    const Uncoupled inflated_set{rep.inflated_radii};

    rep.original = solve_weighted_l1(p, radii, NormTag::l2(), opts);
    rep.perturbed = solve_weighted_l1(tilde, rep.inflated_radii, NormTag::l2(), opts);
    rep.original_support = support_of(rep.original.x);
    rep.perturbed_support = support_of(rep.perturbed.x);
    rep.original_supported_on_I = std::includes(support.begin(), support.end(), rep.original_support.begin(),
                                                rep.original_support.end());

    Vector restricted = Vector::Zero(m);
    for (Index i : support) restricted(i) = rep.original.x(i);
    const double before = worst_case_residual(p, restricted, original_set, NormTag::l2());
    const double after = worst_case_residual(tilde, restricted, inflated_set, NormTag::l2());
    rep.identity_gap = std::abs(after - before);
    rep.optimal_in_perturbed =
        after <= rep.perturbed.objective + rep.perturbed.certificate_gap + 1e-6 * (1.0 + rep.perturbed.objective);

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    const double spread = 1.0 + rep.original.x.norm();
    rep.competitors = competitors;
    for (std::size_t s = 0; s < competitors; ++s) {
        Vector xp(m);
        for (Index j = 0; j < m; ++j) xp(j) = spread * gauss(rng);
        const double lhs = worst_case_residual(tilde, xp, inflated_set, NormTag::l2());
        const double rhs = worst_case_residual(p, xp, original_set, NormTag::l2());
        if (lhs < rhs - 1e-9 * (1.0 + std::abs(rhs))) ++rep.competitor_violations;
    }
    return rep;
}

}  // namespace rlasso
