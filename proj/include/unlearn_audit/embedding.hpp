#pragma once

#include <cstddef>
#include <vector>

namespace unlearn_audit {

inline constexpr double kUnitNormTolerance = 1e-5;
inline constexpr double kSimilarityTolerance = 1e-6;

// A real vector produced by a text or image encoder. `normalized` is the
// producer's claim; is_unit() checks it.
struct EmbeddingVector {
    std::vector<double> values;
    bool normalized = false;

    std::size_t dimension() const { return values.size(); }
    double norm() const;
    bool is_unit(double tolerance = kUnitNormTolerance) const;

    // Throws DegenerateVector for a zero (or non-finite) norm.
    static EmbeddingVector unit(std::vector<double> values);

    bool operator==(const EmbeddingVector&) const = default;
};

// dot(u, v) / (|u| |v|), clamped to [-1, 1].
// Throws InvalidInput on dimension mismatch or empty input, DegenerateVector
// on a zero-norm argument.
double cosine(const EmbeddingVector& u, const EmbeddingVector& v);
double cosine(const std::vector<double>& u, const std::vector<double>& v);

}  // namespace unlearn_audit
