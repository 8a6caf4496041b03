#include "rlasso/norms.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace rlasso {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Coordinate scales for the constraint ||diag(a) u||_p <= r. A scale of 0
// leaves the coordinate free, a scale of +inf pins it to zero.
Vector primal_scales(const NormTag& t, Index n) {
    if (!t.weighted()) return Vector::Ones(n);
    if (t.weights().size() != n) throw std::invalid_argument("norm weights do not match vector length");
    return t.weights();
}

Vector dual_scales(const NormTag& t, Index n) {
    if (!t.weighted()) return Vector::Ones(n);
    if (t.weights().size() != n) throw std::invalid_argument("norm weights do not match vector length");
    Vector a(n);
    for (Index i = 0; i < n; ++i) a(i) = t.weights()(i) > 0.0 ? 1.0 / t.weights()(i) : kInf;
    return a;
}

Vector project_linf(const Vector& v, const Vector& a, double r) {
    Vector u = v;
    for (Index i = 0; i < v.size(); ++i) {
        if (a(i) == 0.0) continue;
        const double cap = std::isinf(a(i)) ? 0.0 : r / a(i);
        u(i) = std::clamp(v(i), -cap, cap);
    }
    return u;
}

Vector project_l1(const Vector& v, const Vector& a, double r) {
    Vector u = v;
    std::vector<Index> active;
    double total = 0.0;
    for (Index i = 0; i < v.size(); ++i) {
        if (std::isinf(a(i))) {
            u(i) = 0.0;
        } else if (a(i) > 0.0) {
            total += a(i) * std::abs(v(i));
            if (v(i) != 0.0) active.push_back(i);
        }
    }
    if (total <= r) return u;

    // Threshold theta solves sum_i a_i max(|v_i| - theta a_i, 0) = r; the
    // breakpoints are |v_i| / a_i, visited in decreasing order.
    std::sort(active.begin(), active.end(), [&](Index x, Index y) {
        return std::abs(v(x)) / a(x) > std::abs(v(y)) / a(y);
    });
    double s1 = 0.0;
    double s2 = 0.0;
    double theta = 0.0;
    for (std::size_t k = 0; k < active.size(); ++k) {
        const Index i = active[k];
        s1 += a(i) * std::abs(v(i));
        s2 += a(i) * a(i);
        theta = (s1 - r) / s2;
        const double next = k + 1 < active.size()
                                ? std::abs(v(active[k + 1])) / a(active[k + 1])
                                : 0.0;
        if (theta >= next) break;
    }
    for (Index i = 0; i < v.size(); ++i) {
        if (a(i) > 0.0 && !std::isinf(a(i))) {
            u(i) = sgn(v(i)) * std::max(std::abs(v(i)) - theta * a(i), 0.0);
        }
    }
    return u;
}

Vector project_l2(const Vector& v, const Vector& a, double r) {
    const Index n = v.size();
    bool uniform = true;
    for (Index i = 0; i < n; ++i) uniform = uniform && a(i) == 1.0;
    if (uniform) {
        const double norm = v.norm();
        return norm <= r ? v : Vector(v * (r / norm));
    }

    Vector u = v;
    auto shrunk_norm_sq = [&](double mu) {
        double acc = 0.0;
        for (Index i = 0; i < n; ++i) {
            if (a(i) == 0.0 || std::isinf(a(i))) continue;
            const double t = a(i) * v(i) / (1.0 + mu * a(i) * a(i));
            acc += t * t;
        }
        return acc;
    };
    for (Index i = 0; i < n; ++i) {
        if (std::isinf(a(i))) u(i) = 0.0;
    }
    if (shrunk_norm_sq(0.0) <= r * r) return u;

    // u_i = v_i / (1 + mu a_i^2) with mu chosen so that the constraint is tight.
    double lo = 0.0;
    double hi = 1.0;
    while (shrunk_norm_sq(hi) > r * r && hi < 1e300) hi *= 2.0;
    for (int it = 0; it < 200 && hi - lo > 1e-16 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        (shrunk_norm_sq(mid) > r * r ? lo : hi) = mid;
    }
    for (Index i = 0; i < n; ++i) {
        if (a(i) == 0.0 || std::isinf(a(i))) continue;
        u(i) = v(i) / (1.0 + hi * a(i) * a(i));
    }
    return u;
}

Vector project_kind(NormKind kind, const Vector& v, const Vector& a, double r) {
    if (r < 0.0) throw std::invalid_argument("ball radius must be nonnegative");
    switch (kind) {
    case NormKind::L1: return project_l1(v, a, r);
    case NormKind::L2: return project_l2(v, a, r);
    case NormKind::LInf: return project_linf(v, a, r);
    }
    return v;
}

NormKind dual_kind(NormKind kind) {
    switch (kind) {
    case NormKind::L1: return NormKind::LInf;
    case NormKind::L2: return NormKind::L2;
    case NormKind::LInf: return NormKind::L1;
    }
    return kind;
}

}  // namespace

double dual_norm_value(const Vector& u, const NormTag& t) {
    const Vector a = dual_scales(t, u.size());
    double acc = 0.0;
    for (Index i = 0; i < u.size(); ++i) {
        if (u(i) == 0.0) continue;
        if (std::isinf(a(i))) return kInf;
        const double s = a(i) * std::abs(u(i));
        switch (t.kind()) {
        case NormKind::L1: acc = std::max(acc, s); break;
        case NormKind::L2: acc += s * s; break;
        case NormKind::LInf: acc += s; break;
        }
    }
    return t.kind() == NormKind::L2 ? std::sqrt(acc) : acc;
}

Vector project_ball(const Vector& v, const NormTag& t, double radius) {
    return project_kind(t.kind(), v, primal_scales(t, v.size()), radius);
}

Vector project_dual_ball(const Vector& v, const NormTag& t, double radius) {
    return project_kind(dual_kind(t.kind()), v, dual_scales(t, v.size()), radius);
}

Vector prox_norm(const Vector& v, const NormTag& t, double scale) {
    return v - project_dual_ball(v, t, scale);
}

Vector norm_subgradient(const Vector& v, const NormTag& t) {
    const Index n = v.size();
    Vector y = Vector::Zero(n);
    switch (t.kind()) {
    case NormKind::L1:
        for (Index i = 0; i < n; ++i) y(i) = t.weight(i) * sgn(v(i));
        break;
    case NormKind::L2: {
        const double norm = norm_eval(v, t);
        if (norm > 0.0) {
            for (Index i = 0; i < n; ++i) y(i) = t.weight(i) * t.weight(i) * v(i) / norm;
        }
        break;
    }
    case NormKind::LInf: {
        Index best = -1;
        double best_value = 0.0;
        for (Index i = 0; i < n; ++i) {
            const double s = t.weight(i) * std::abs(v(i));
            if (s > best_value) {
                best_value = s;
                best = i;
            }
        }
        if (best >= 0) y(best) = t.weight(best) * sgn(v(best));
        break;
    }
    }
    return y;
}

Vector soft_threshold(const Vector& v, const Vector& thresholds) {
    if (thresholds.size() != v.size()) throw std::invalid_argument("threshold length mismatch");
    Vector out(v.size());
    for (Index i = 0; i < v.size(); ++i) {
        out(i) = sgn(v(i)) * std::max(std::abs(v(i)) - thresholds(i), 0.0);
    }
    return out;
}

}  // namespace rlasso
