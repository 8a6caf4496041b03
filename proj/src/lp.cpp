#include "rlasso/lp.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace rlasso {

std::string to_string(LpStatus status) {
    switch (status) {
    case LpStatus::Optimal: return "optimal";
    case LpStatus::Infeasible: return "infeasible";
    case LpStatus::Unbounded: return "unbounded";
    }
    return "?";
}

namespace {

constexpr double kPivotTol = 1e-10;

// Full tableau over the equality system M z = rhs, z >= 0, with rhs >= 0.
// Columns: structural y, surplus s, artificial a (one per row).
class Tableau {
public:
    Tableau(const Matrix& M, const Vector& rhs, Index first_artificial)
        : rows_(M.rows()), cols_(M.cols()), first_artificial_(first_artificial),
          t_(M.rows() + 1, M.cols() + 1), basis_(M.rows()) {
        t_.topLeftCorner(rows_, cols_) = M;
        t_.col(cols_).head(rows_) = rhs;
        t_.row(rows_).setZero();
        for (Index r = 0; r < rows_; ++r) basis_[r] = first_artificial_ + r;
    }

    // Loads objective `cost` (length cols_) and prices out the basis.
    void set_objective(const Vector& cost) {
        t_.row(rows_).head(cols_) = cost.transpose();
        t_(rows_, cols_) = 0.0;
        for (Index r = 0; r < rows_; ++r) {
            const double cb = cost(basis_[r]);
            if (cb != 0.0) t_.row(rows_) -= cb * t_.row(r);
        }
    }

    // Bland's rule iterations. Returns false if the objective is unbounded.
    bool optimize(bool allow_artificial, std::size_t& pivots) {
        const std::size_t limit = 50000;
        for (std::size_t it = 0; it < limit; ++it) {
            Index enter = -1;
            for (Index j = 0; j < cols_; ++j) {
                if (!allow_artificial && j >= first_artificial_) break;
                if (t_(rows_, j) < -kPivotTol) {
                    enter = j;
                    break;
                }
            }
            if (enter < 0) return true;

            Index leave = -1;
            double best_ratio = std::numeric_limits<double>::infinity();
            for (Index r = 0; r < rows_; ++r) {
                const double coef = t_(r, enter);
                if (coef <= kPivotTol) continue;
                const double ratio = t_(r, cols_) / coef;
                if (ratio < best_ratio - 1e-12 ||
                    (std::abs(ratio - best_ratio) <= 1e-12 && leave >= 0 &&
                     basis_[r] < basis_[leave])) {
                    best_ratio = ratio;
                    leave = r;
                }
            }
            if (leave < 0) return false;
            pivot(leave, enter);
            ++pivots;
        }
        throw std::runtime_error("simplex iteration limit reached");
    }

    void pivot(Index r, Index c) {
        t_.row(r) /= t_(r, c);
        for (Index i = 0; i <= rows_; ++i) {
            if (i == r) continue;
            const double f = t_(i, c);
            if (f != 0.0) t_.row(i) -= f * t_.row(r);
        }
        basis_[r] = c;
    }

    // Pivots basic artificials (at zero level) out where a structural or
    // surplus column can replace them. Rows that stay artificial are redundant.
    void expel_artificials() {
        for (Index r = 0; r < rows_; ++r) {
            if (basis_[r] < first_artificial_) continue;
            for (Index j = 0; j < first_artificial_; ++j) {
                if (std::abs(t_(r, j)) > 1e-9) {
                    pivot(r, j);
                    break;
                }
            }
        }
    }

    double objective_value() const { return -t_(rows_, cols_); }
    const std::vector<Index>& basis() const { return basis_; }

private:
    Index rows_;
    Index cols_;
    Index first_artificial_;
    Matrix t_;
    std::vector<Index> basis_;
};

}  // namespace

LpResult lp_solve(const Vector& cost, const Matrix& G, const Vector& h) {
    const Index n = cost.size();
    const Index k = G.rows();
    if (G.cols() != n || h.size() != k) {
        throw std::invalid_argument("lp_solve: inconsistent dimensions");
    }
    if (!cost.allFinite() || !G.allFinite() || !h.allFinite()) {
        throw std::invalid_argument("lp_solve: non-finite data");
    }

    LpResult result;
    if (k == 0) {
        // Only y >= 0: optimal at 0 unless some cost is negative.
        if ((cost.array() < 0.0).any()) {
            result.status = LpStatus::Unbounded;
            return result;
        }
        result.status = LpStatus::Optimal;
        result.primal = Vector::Zero(n);
        result.dual = Vector::Zero(0);
        return result;
    }

    // G y - s = h, rows flipped so that the right-hand side is nonnegative.
    const Index cols = n + 2 * k;
    Matrix M = Matrix::Zero(k, cols);
    Vector rhs(k);
    Vector row_sign(k);
    for (Index i = 0; i < k; ++i) {
        row_sign(i) = h(i) < 0.0 ? -1.0 : 1.0;
        M.row(i).head(n) = row_sign(i) * G.row(i);
        M(i, n + i) = -row_sign(i);
        M(i, n + k + i) = 1.0;
        rhs(i) = row_sign(i) * h(i);
    }

    Tableau tab(M, rhs, n + k);
    Vector phase1 = Vector::Zero(cols);
    phase1.tail(k).setOnes();
    tab.set_objective(phase1);
    tab.optimize(true, result.pivots);
    if (tab.objective_value() > 1e-9 * (1.0 + rhs.lpNorm<Eigen::Infinity>())) {
        result.status = LpStatus::Infeasible;
        return result;
    }
    tab.expel_artificials();

    Vector phase2 = Vector::Zero(cols);
    phase2.head(n) = cost;
    tab.set_objective(phase2);
    if (!tab.optimize(false, result.pivots)) {
        result.status = LpStatus::Unbounded;
        return result;
    }

    // Recover primal and dual values from the final basis by direct solves,
    // which is more accurate than reading the accumulated tableau.
    const auto& basis = tab.basis();
    Matrix B(k, k);
    Vector cb(k);
    for (Index r = 0; r < k; ++r) {
        B.col(r) = M.col(basis[r]);
        cb(r) = phase2(basis[r]);
    }
    Eigen::FullPivLU<Matrix> lu(B);
    const Vector zb = lu.solve(rhs);
    const Vector pi = Eigen::FullPivLU<Matrix>(B.transpose()).solve(cb);

    result.status = LpStatus::Optimal;
    result.primal = Vector::Zero(n);
    for (Index r = 0; r < k; ++r) {
        if (basis[r] < n) result.primal(basis[r]) = std::max(zb(r), 0.0);
    }
    result.dual = Vector(k);
    for (Index i = 0; i < k; ++i) result.dual(i) = std::max(row_sign(i) * pi(i), 0.0);
    result.objective = cost.dot(result.primal);
    return result;
}

}  // namespace rlasso
