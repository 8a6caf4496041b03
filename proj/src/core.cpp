#include "rlasso/core.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <stdexcept>

namespace rlasso {

ProblemInstance::ProblemInstance(Matrix A, Vector b) : A_(std::move(A)), b_(std::move(b)) {
    if (A_.rows() < 1 || A_.cols() < 1) {
        throw std::invalid_argument("problem instance needs at least one sample and one feature");
    }
    if (b_.size() != A_.rows()) {
        throw std::invalid_argument("target length " + std::to_string(b_.size()) +
                                    " does not match sample count " + std::to_string(A_.rows()));
    }
    if (!A_.allFinite() || !b_.allFinite()) {
        throw std::invalid_argument("problem instance contains non-finite entries");
    }
}

Vector ProblemInstance::residual(const Vector& x) const {
    if (x.size() != features()) {
        throw std::invalid_argument("weight vector length does not match feature count");
    }
    return b_ - A_ * x;
}

NormTag::NormTag(NormKind kind, Vector weights) : kind_(kind), weights_(std::move(weights)) {
    if (weights_.size() == 0) {
        throw std::invalid_argument("weighted norm needs at least one weight");
    }
    for (Index i = 0; i < weights_.size(); ++i) {
        if (!std::isfinite(weights_(i)) || weights_(i) < 0.0) {
            throw std::invalid_argument("norm weights must be finite and nonnegative");
        }
    }
}

bool NormTag::has_zero_weight() const {
    return weighted() && (weights_.array() == 0.0).any();
}

bool NormTag::operator==(const NormTag& other) const {
    if (kind_ != other.kind_ || weighted() != other.weighted()) return false;
    return !weighted() || weights_ == other.weights_;
}

double norm_eval(const Vector& v, const NormTag& t) {
    if (t.weighted() && t.weights().size() != v.size()) {
        throw std::invalid_argument("norm weights do not match vector length");
    }
    const Eigen::ArrayXd scaled = t.weighted() ? (v.array() * t.weights().array()).eval()
                                               : v.array().eval();
    switch (t.kind()) {
    case NormKind::L1: return scaled.abs().sum();
    case NormKind::L2: return scaled.matrix().norm();
    case NormKind::LInf: return scaled.size() == 0 ? 0.0 : scaled.abs().maxCoeff();
    }
    return 0.0;
}

NormTag dual_norm(const NormTag& t) {
    NormKind kind = NormKind::L2;
    switch (t.kind()) {
    case NormKind::L1: kind = NormKind::LInf; break;
    case NormKind::L2: kind = NormKind::L2; break;
    case NormKind::LInf: kind = NormKind::L1; break;
    }
    if (!t.weighted()) return NormTag(kind);
    if (t.has_zero_weight()) throw std::domain_error("dual undefined for zero weight");
    return NormTag(kind, t.weights().cwiseInverse());
}

std::string to_string(NormKind kind) {
    switch (kind) {
    case NormKind::L1: return "l1";
    case NormKind::L2: return "l2";
    case NormKind::LInf: return "linf";
    }
    return "?";
}

NormKind parse_norm_kind(std::string_view text) {
    std::string lower(text);
    std::transform(lower.begin(), lower.end(), lower.begin(),
                   [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
    if (lower == "l1") return NormKind::L1;
    if (lower == "l2") return NormKind::L2;
    if (lower == "linf" || lower == "inf") return NormKind::LInf;
    throw std::invalid_argument("unknown norm '" + std::string(text) + "' (expected l1, l2 or linf)");
}

}  // namespace rlasso
