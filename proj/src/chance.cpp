#include "rlasso/chance.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace rlasso {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double min_eigenvalue(const Matrix& S) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(S, Eigen::EigenvaluesOnly);
    return es.eigenvalues()(0);
}

// One linear matrix inequality F(z) = F0 + sum_a z_a F_a > 0.
struct Lmi {
    Matrix F0;
    std::vector<Matrix> Fa;

    Matrix at(const Vector& z) const {
        Matrix F = F0;
        for (std::size_t a = 0; a < Fa.size(); ++a) {
            if (z(static_cast<Index>(a)) != 0.0) F += z(static_cast<Index>(a)) * Fa[a];
        }
        return F;
    }
};

// Barrier method for
//     min  w^T z   s.t.  F_i(z) > 0,  z_last > 0
// started from a strictly feasible z. Numerical breakdown stops the path
// early and keeps the last (strictly feasible) iterate. Returns false only
// if the start is infeasible.
bool barrier_solve(const std::vector<Lmi>& lmis, const Vector& w, Vector& z, double gap_tol) {
    const Index N = z.size();
    double nu = 1.0;
    for (const Lmi& l : lmis) nu += static_cast<double>(l.F0.rows());

    auto barrier = [&](const Vector& v, double& out) {
        if (!(v(N - 1) > 0.0)) return false;
        double acc = -std::log(v(N - 1));
        for (const Lmi& l : lmis) {
            Eigen::LLT<Matrix> llt(l.at(v));
            if (llt.info() != Eigen::Success) return false;
            const Matrix& L = llt.matrixL();
            for (Index i = 0; i < L.rows(); ++i) {
                if (!(L(i, i) > 0.0)) return false;
                acc -= 2.0 * std::log(L(i, i));
            }
        }
        out = acc;
        return std::isfinite(acc);
    };

    double phi0 = 0.0;
    if (!barrier(z, phi0)) return false;
    double t = nu / std::max(std::abs(w.dot(z)), 1e-6);

    for (int outer = 0; outer < 80; ++outer) {
        for (int newton = 0; newton < 100; ++newton) {
            Vector g = t * w;
            Matrix H = Matrix::Zero(N, N);
            g(N - 1) -= 1.0 / z(N - 1);
            H(N - 1, N - 1) += 1.0 / (z(N - 1) * z(N - 1));
            for (const Lmi& l : lmis) {
                const Matrix Finv = l.at(z).inverse();
                std::vector<Matrix> K(static_cast<std::size_t>(N));
                for (Index a = 0; a < N; ++a) {
                    K[static_cast<std::size_t>(a)] = Finv * l.Fa[static_cast<std::size_t>(a)];
                    g(a) -= K[static_cast<std::size_t>(a)].trace();
                }
                for (Index a = 0; a < N; ++a) {
                    for (Index b = a; b < N; ++b) {
                        const double h = (K[static_cast<std::size_t>(a)].array() *
                                          K[static_cast<std::size_t>(b)].transpose().array()).sum();
                        H(a, b) += h;
                        if (b != a) H(b, a) += h;
                    }
                }
            }
            const Vector dz = -H.ldlt().solve(g);
            if (!dz.allFinite()) return true;
            const double decrement = -g.dot(dz);
            if (decrement / 2.0 <= 1e-12) break;

            double f_cur = 0.0;
            barrier(z, f_cur);
            f_cur += t * w.dot(z);
            double step = 1.0;
            bool moved = false;
            for (int ls = 0; ls < 60; ++ls, step *= 0.5) {
                const Vector trial = z + step * dz;
                double f_trial = 0.0;
                if (!barrier(trial, f_trial)) continue;
                f_trial += t * w.dot(trial);
                if (f_trial <= f_cur - 0.25 * step * decrement) {
                    z = trial;
                    moved = true;
                    break;
                }
            }
            if (!moved) break;
        }
        if (nu / t <= gap_tol) return true;
        t *= 8.0;
    }
    return true;
}

}  // namespace

MomentInfo::MomentInfo(Vector mean, Matrix second_moment) : a_(std::move(mean)), sigma_(std::move(second_moment)) {
    const Index n = a_.size();
    if (n < 1 || sigma_.rows() != n || sigma_.cols() != n) {
        throw std::invalid_argument("moment dimensions are inconsistent");
    }
    if (!a_.allFinite() || !sigma_.allFinite()) throw std::invalid_argument("moments must be finite");
    if ((sigma_ - sigma_.transpose()).cwiseAbs().maxCoeff() > 1e-12 * (1.0 + sigma_.cwiseAbs().maxCoeff())) {
        throw std::invalid_argument("second-moment matrix must be symmetric");
    }
    if (min_eigenvalue(sigma_) < -1e-10) {
        throw std::invalid_argument("second-moment matrix must be positive semidefinite");
    }
    if (min_eigenvalue(sigma_ - a_ * a_.transpose()) < -1e-10) {
        throw std::invalid_argument("moments imply a negative covariance");
    }
}

double certificate_value(const BoundCertificate& cert, const MomentInfo& m) {
    return (m.second_moment() * cert.P).trace() + 2.0 * cert.q.dot(m.mean()) + cert.r;
}

CertificateCheck check_certificate(const BoundCertificate& cert, double c) {
    const Index n = cert.P.rows();
    Matrix M(n + 1, n + 1);
    M.topLeftCorner(n, n) = cert.P;
    M.topRightCorner(n, 1) = cert.q;
    M.bottomLeftCorner(1, n) = cert.q.transpose();
    M(n, n) = cert.r;

    CertificateCheck out;
    out.nonnegativity = min_eigenvalue(M);
    Matrix shifted = M;
    shifted(n, n) -= 1.0;
    if (std::isinf(cert.lambda)) {
        out.s_procedure = min_eigenvalue(shifted);
    } else {
        Matrix D = Matrix::Identity(n + 1, n + 1);
        D(n, n) = -c * c;
        out.s_procedure = min_eigenvalue(cert.lambda * shifted - D);
    }
    return out;
}

BoundCertificate markov_bound(const MomentInfo& m, double c) {
    if (!(c > 0.0) || !std::isfinite(c)) throw std::invalid_argument("radius c must be positive");
    const Index n = m.dimension();
    const Index d = n + 1;

    // Closed-form candidates: Chebyshev (P = I / c^2, lambda = c^2) and f = 1.
    BoundCertificate best;
    best.P = Matrix::Identity(n, n) / (c * c);
    best.q = Vector::Zero(n);
    best.r = 0.0;
    best.lambda = c * c;
    best.value = certificate_value(best, m);
    best.chebyshev = true;
    if (best.value > 1.0) {
        best.P.setZero();
        best.r = 1.0;
        best.lambda = kInf;
        best.value = 1.0;
        best.chebyshev = false;
    }

    // z = (upper triangle of M, mu) with mu = 1 / lambda.
    std::vector<std::pair<Index, Index>> entries;
    for (Index j = 0; j < d; ++j) {
        for (Index i = 0; i <= j; ++i) entries.emplace_back(i, j);
    }
    const auto NM = static_cast<Index>(entries.size());
    const Index N = NM + 1;

    Matrix W(d, d);
    W.topLeftCorner(n, n) = m.second_moment();
    W.topRightCorner(n, 1) = m.mean();
    W.bottomLeftCorner(1, n) = m.mean().transpose();
    W(n, n) = 1.0;
    Matrix D = Matrix::Identity(d, d);
    D(n, n) = -c * c;

    Lmi psd{Matrix::Zero(d, d), {}};
    Lmi sproc{Matrix::Zero(d, d), {}};
    sproc.F0(n, n) = -1.0;
    Vector w = Vector::Zero(N);
    for (Index a = 0; a < NM; ++a) {
        const auto [i, j] = entries[static_cast<std::size_t>(a)];
        Matrix E = Matrix::Zero(d, d);
        E(i, j) = 1.0;
        E(j, i) = 1.0;
        psd.Fa.push_back(E);
        sproc.Fa.push_back(E);
        w(a) = (W.array() * E.array()).sum();
    }
    psd.Fa.push_back(Matrix::Zero(d, d));
    sproc.Fa.push_back(-D);

    // Strictly feasible start: M = diag((2 mu + 1) I, 2), mu = 1 / (2 c^2).
    const double mu0 = 0.5 / (c * c);
    Vector z = Vector::Zero(N);
    for (Index a = 0; a < NM; ++a) {
        const auto [i, j] = entries[static_cast<std::size_t>(a)];
        if (i == j) z(a) = i < n ? 2.0 * mu0 + 1.0 : 2.0;
    }
    z(N - 1) = mu0;

    if (barrier_solve({psd, sproc}, w, z, 1e-11)) {
        BoundCertificate cert;
        Matrix M = psd.at(z);
        M = 0.5 * (M + M.transpose());
        cert.P = M.topLeftCorner(n, n);
        cert.q = M.topRightCorner(n, 1);
        cert.r = M(n, n);
        cert.lambda = 1.0 / z(N - 1);
        cert.value = certificate_value(cert, m);
        const CertificateCheck chk = check_certificate(cert, c);
        const double slack = -1e-8 * (1.0 + std::abs(cert.lambda));
        if (std::isfinite(cert.value) && chk.nonnegativity >= -1e-8 && chk.s_procedure >= slack &&
            cert.value < best.value) {
            best = cert;
        }
    }
    best.probability = std::clamp(best.value, 0.0, 1.0);
    return best;
}

double radius_for_confidence(const MomentInfo& m, double eta) {
    if (!(eta > 0.0) || eta > 1.0) throw std::invalid_argument("confidence level eta must lie in (0, 1]");
    auto ok = [&](double c) { return markov_bound(m, c).value <= eta; };

    double lo = 1e-6;
    if (ok(lo)) return lo;
    double hi = 1.0;
    int doublings = 0;
    while (!ok(hi)) {
        if (++doublings > 60) throw std::runtime_error("confidence unreachable from moments");
        lo = std::max(lo, hi);
        hi *= 2.0;
    }
    while (hi - lo > 1e-4 * hi) {
        const double mid = 0.5 * (lo + hi);
        (ok(mid) ? hi : lo) = mid;
    }
    return hi;
}

double sampled_exceedance(const VectorSampler& sampler, double c, std::size_t N, std::uint64_t seed) {
    if (N < 1) throw std::invalid_argument("sampled_exceedance needs N >= 1");
    std::mt19937_64 rng(seed);
    std::size_t hits = 0;
    for (std::size_t i = 0; i < N; ++i) {
        if (sampler(rng).norm() >= c) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(N);
}

}  // namespace rlasso
