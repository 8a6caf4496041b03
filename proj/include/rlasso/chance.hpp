#pragma once

#include "rlasso/core.hpp"

#include <cstdint>
#include <functional>
#include <random>

namespace rlasso {

/// First and second moments of a random vector v: a = E[v], Sigma = E[v v^T].
class MomentInfo {
public:
    /// Throws std::invalid_argument unless Sigma is symmetric, Sigma >= 0 and
    /// Sigma - a a^T >= 0 (eigenvalue slack 1e-10).
    MomentInfo(Vector mean, Matrix second_moment);

    const Vector& mean() const noexcept { return a_; }
    const Matrix& second_moment() const noexcept { return sigma_; }
    Index dimension() const noexcept { return a_.size(); }

private:
    Vector a_;
    Matrix sigma_;
};

/// Quadratic f(v) = v^T P v + 2 q^T v + r with f >= 0 everywhere and
/// f >= 1 on ||v||_2 >= c, so E f(v) = Tr(Sigma P) + 2 q^T a + r bounds
/// Pr(||v||_2 >= c).
struct BoundCertificate {
    Matrix P;
    Vector q;
    double r = 0.0;
    /// Multiplier of the S-procedure; +inf stands for the limit where f >= 1 everywhere.
    double lambda = 0.0;
    /// Raw bound value, possibly above 1.
    double value = 0.0;
    /// min(value, 1).
    double probability = 0.0;
    /// True when the closed-form Chebyshev point won.
    bool chebyshev = false;
};

/// Smallest eigenvalues of the two certificate matrices
/// [[P, q], [q^T, r]] and lambda [[P, q], [q^T, r - 1]] - diag(I, -c^2).
struct CertificateCheck {
    double nonnegativity = 0.0;
    double s_procedure = 0.0;
};
CertificateCheck check_certificate(const BoundCertificate& cert, double c);

/// Tr(Sigma P) + 2 q^T a + r.
double certificate_value(const BoundCertificate& cert, const MomentInfo& m);

/// Best moment bound on Pr(||v||_2 >= c) over quadratic certificates. The
/// semidefinite program is solved by a barrier method in (P, q, r, 1/lambda),
/// in which it is jointly convex; the Chebyshev certificate I / c^2 is also
/// evaluated and the smaller value returned.
BoundCertificate markov_bound(const MomentInfo& m, double c);

/// Smallest c (bisection tolerance 1e-4 c) with markov_bound(m, c).value <= eta.
/// Throws std::runtime_error("confidence unreachable from moments") if 60
/// doublings of the upper bracket do not suffice.
double radius_for_confidence(const MomentInfo& m, double eta);

using VectorSampler = std::function<Vector(std::mt19937_64&)>;

/// Fraction of N draws with ||v||_2 >= c.
double sampled_exceedance(const VectorSampler& sampler, double c, std::size_t N, std::uint64_t seed);

}  // namespace rlasso
