#pragma once

// Shared fixtures and brute-force oracles for the test binaries. The oracles
// deliberately avoid the library's solvers: they scan grids or enumerate.

#include "rlasso/core.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <random>

namespace testing_support {

using rlasso::Index;
using rlasso::Matrix;
using rlasso::Vector;

inline Matrix gaussian_matrix(std::mt19937_64& rng, Index rows, Index cols) {
    std::normal_distribution<double> g(0.0, 1.0);
    Matrix M(rows, cols);
    for (Index i = 0; i < rows; ++i)
        for (Index j = 0; j < cols; ++j) M(i, j) = g(rng);
    return M;
}

inline Vector gaussian_vector(std::mt19937_64& rng, Index n) { return gaussian_matrix(rng, n, 1).col(0); }

inline Vector uniform_vector(std::mt19937_64& rng, Index n, double lo, double hi) {
    std::uniform_real_distribution<double> u(lo, hi);
    Vector v(n);
    for (Index i = 0; i < n; ++i) v(i) = u(rng);
    return v;
}

/// Plain p-norm written out by hand, independent of norm_eval.
inline double pnorm(const Vector& v, int p) {
    double s = 0.0;
    for (Index i = 0; i < v.size(); ++i) {
        const double a = std::abs(v(i));
        if (p == 1) s += a;
        else if (p == 2) s += a * a;
        else s = std::max(s, a);
    }
    return p == 2 ? std::sqrt(s) : s;
}

inline int p_of(rlasso::NormKind k) {
    return k == rlasso::NormKind::L1 ? 1 : (k == rlasso::NormKind::L2 ? 2 : 0);
}

struct GridMin {
    double x = 0.0;
    double value = std::numeric_limits<double>::infinity();
};

/// Minimizes a scalar function on [lo, hi] by scanning with the given step.
inline GridMin grid_minimize(const std::function<double(double)>& f, double lo, double hi, double step) {
    GridMin best;
    const auto count = static_cast<long>(std::floor((hi - lo) / step + 0.5));
    for (long k = 0; k <= count; ++k) {
        const double x = lo + static_cast<double>(k) * step;
        const double v = f(x);
        if (v < best.value) {
            best.value = v;
            best.x = x;
        }
    }
    return best;
}

/// min over scalar x of ||b - a x||_p + c |x| on [-3, 3] with step 1e-5.
inline GridMin scalar_lasso_oracle(const Vector& a, const Vector& b, double c, int p, double step = 1e-5) {
    return grid_minimize([&](double x) { return pnorm(b - a * x, p) + c * std::abs(x); }, -3.0, 3.0, step);
}

struct GridMin2 {
    double x = 0.0;
    double y = 0.0;
    double value = std::numeric_limits<double>::infinity();
};

/// Coarse-to-fine scan of a convex function of two variables over [-3, 3]^2,
/// ending with step 2e-6 around the best point found so far.
inline GridMin2 grid_minimize_2d(const std::function<double(double, double)>& f) {
    GridMin2 best;
    double cx = 0.0, cy = 0.0, half = 3.0, step = 0.02;
    for (int level = 0; level < 5; ++level) {
        const auto count = static_cast<long>(std::floor(2.0 * half / step + 0.5));
        const double x0 = cx - half, y0 = cy - half;
        for (long i = 0; i <= count; ++i) {
            for (long j = 0; j <= count; ++j) {
                const double x = x0 + static_cast<double>(i) * step;
                const double y = y0 + static_cast<double>(j) * step;
                const double v = f(x, y);
                if (v < best.value) best = {x, y, v};
            }
        }
        cx = best.x;
        cy = best.y;
        half = 2.0 * step;
        step /= 10.0;
    }
    return best;
}

struct VertexOptimum {
    bool feasible = false;
    double value = std::numeric_limits<double>::infinity();
    Vector y;
};

/// min cost^T y over { G y >= h, y >= 0 } by enumerating every basic solution:
/// choose d of the rows of [G; I], solve them as equalities and keep the
/// feasible ones. Exact for bounded problems; the feasible set is pointed, so
/// it is nonempty iff some vertex is feasible.
inline VertexOptimum vertex_enumeration(const Vector& cost, const Matrix& G, const Vector& h, double tol = 1e-9) {
    const Index d = G.cols();
    const Index rows = G.rows() + d;
    Matrix all(rows, d);
    all << G, Matrix::Identity(d, d);
    Vector rhs(rows);
    rhs << h, Vector::Zero(d);

    VertexOptimum best;
    std::vector<int> pick(static_cast<std::size_t>(rows), 0);
    std::fill(pick.end() - d, pick.end(), 1);
    do {
        Matrix S(d, d);
        Vector t(d);
        Index k = 0;
        for (Index r = 0; r < rows; ++r) {
            if (pick[static_cast<std::size_t>(r)]) {
                S.row(k) = all.row(r);
                t(k) = rhs(r);
                ++k;
            }
        }
        Eigen::FullPivLU<Matrix> lu(S);
        if (lu.rank() < d) continue;
        const Vector y = lu.solve(t);
        if (((all * y - rhs).array() < -tol).any()) continue;
        best.feasible = true;
        const double v = cost.dot(y);
        if (v < best.value) {
            best.value = v;
            best.y = y;
        }
    } while (std::next_permutation(pick.begin(), pick.end()));
    return best;
}

/// The m = 1 fixture used across modules: A = [[1],[0]], b = [1, 1].
inline Matrix fixture_A() {
    Matrix A(2, 1);
    A << 1.0, 0.0;
    return A;
}
inline Vector fixture_b() { return Vector::Ones(2); }

}  // namespace testing_support
