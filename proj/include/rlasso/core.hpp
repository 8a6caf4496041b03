#pragma once

#include <Eigen/Dense>

#include <string>
#include <string_view>

namespace rlasso {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;

/// Regression data: rows of A are samples r_i^T, columns are features a_j.
class ProblemInstance {
public:
    /// Throws std::invalid_argument on empty or non-finite data, or when
    /// b does not have one entry per row of A.
    ProblemInstance(Matrix A, Vector b);

    const Matrix& A() const noexcept { return A_; }
    const Vector& b() const noexcept { return b_; }

    Index samples() const noexcept { return A_.rows(); }
    Index features() const noexcept { return A_.cols(); }

    /// Sample i as a row vector r_i^T.
    auto row(Index i) const { return A_.row(i); }
    /// Feature j as a column vector a_j.
    auto column(Index j) const { return A_.col(j); }

    Vector residual(const Vector& x) const;

private:
    Matrix A_;
    Vector b_;
};

enum class NormKind { L1, L2, LInf };

/// One of the l1 / l2 / l-infinity norms, optionally weighted.
///
/// A weighted norm with weights w is evaluated as ||diag(w) v||_p, so the
/// dual of a weighted norm is the dual kind with weights 1/w. Weights must
/// be nonnegative; a zero weight gives a seminorm that has no dual.
class NormTag {
public:
    NormTag(NormKind kind = NormKind::L2) : kind_(kind) {}
    NormTag(NormKind kind, Vector weights);

    static NormTag l1() { return NormTag(NormKind::L1); }
    static NormTag l2() { return NormTag(NormKind::L2); }
    static NormTag linf() { return NormTag(NormKind::LInf); }

    NormKind kind() const noexcept { return kind_; }
    bool weighted() const noexcept { return weights_.size() > 0; }
    const Vector& weights() const noexcept { return weights_; }
    double weight(Index i) const { return weighted() ? weights_(i) : 1.0; }
    bool has_zero_weight() const;

    bool operator==(const NormTag& other) const;

private:
    NormKind kind_;
    Vector weights_;
};

double norm_eval(const Vector& v, const NormTag& t);

/// L1 <-> LInf, L2 <-> L2, weights w -> 1/w.
/// Throws std::domain_error("dual undefined for zero weight").
NormTag dual_norm(const NormTag& t);

std::string to_string(NormKind kind);
/// Accepts "l1", "l2", "linf" (case-insensitive). Throws std::invalid_argument.
NormKind parse_norm_kind(std::string_view text);

/// sgn with sgn(0) = 0.
inline double sgn(double v) noexcept { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

}  // namespace rlasso
