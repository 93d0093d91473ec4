#include "unlearn_audit/embedding.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "unlearn_audit/errors.hpp"
#include "unlearn_audit/kernels.hpp"

namespace unlearn_audit {

double EmbeddingVector::norm() const {
    return std::sqrt(kernels::squared_norm(values));
}

bool EmbeddingVector::is_unit(double tolerance) const {
    return !values.empty() && std::abs(norm() - 1.0) <= tolerance;
}

EmbeddingVector EmbeddingVector::unit(std::vector<double> values) {
    const double n2 = kernels::squared_norm(values);
    if (!(n2 > 0.0) || !std::isfinite(n2)) {
        throw DegenerateVector("cannot normalize a zero or non-finite vector");
    }
    kernels::scale(values, 1.0 / std::sqrt(n2));
    return EmbeddingVector{std::move(values), true};
}

double cosine(const std::vector<double>& u, const std::vector<double>& v) {
    if (u.size() != v.size()) {
        throw InvalidInput("cosine: dimension mismatch (" + std::to_string(u.size()) + " vs " +
                           std::to_string(v.size()) + ")");
    }
    if (u.empty()) {
        throw InvalidInput("cosine: empty vectors");
    }
    const double uu = kernels::squared_norm(u);
    const double vv = kernels::squared_norm(v);
    if (!(uu > 0.0) || !(vv > 0.0)) {
        throw DegenerateVector("cosine: zero-norm input");
    }
    const double c = kernels::dot(u, v) / (std::sqrt(uu) * std::sqrt(vv));
    return std::clamp(c, -1.0, 1.0);
}

double cosine(const EmbeddingVector& u, const EmbeddingVector& v) {
    return cosine(u.values, v.values);
}

}  // namespace unlearn_audit
