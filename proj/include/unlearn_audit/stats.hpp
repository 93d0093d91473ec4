#pragma once

#include <cstddef>
#include <span>

namespace unlearn_audit {

// Summary over concepts of one metric (e.g. the per-concept similarity
// change of one prompt variant).
struct Stats {
    double mean = 0.0;
    double median = 0.0;
    // Fraction of strictly negative entries. For similarity changes this is
    // the fraction of concepts whose concept evidence was reduced.
    double fraction_negative = 0.0;
    std::size_t count = 0;

    bool operator==(const Stats&) const = default;
};

// Throws EmptySample on empty input. Even counts use the mean of the two
// middle order statistics.
Stats summarize(std::span<const double> values);

}  // namespace unlearn_audit
