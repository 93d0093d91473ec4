#include "unlearn_audit/stats.hpp"

#include <algorithm>
#include <vector>

#include "unlearn_audit/errors.hpp"

namespace unlearn_audit {

Stats summarize(std::span<const double> values) {
    if (values.empty()) {
        throw EmptySample("summarize: no values");
    }
    Stats s;
    s.count = values.size();

    // Plain left-to-right sum so that a report reader recomputing the mean
    // from stored records gets the same bits.
    double total = 0.0;
    std::size_t negatives = 0;
    for (double v : values) {
        total += v;
        if (v < 0.0) {
            ++negatives;
        }
    }
    s.mean = total / static_cast<double>(s.count);
    s.fraction_negative = static_cast<double>(negatives) / static_cast<double>(s.count);

    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    const std::size_t mid = s.count / 2;
    s.median = (s.count % 2 == 1) ? sorted[mid] : (sorted[mid - 1] + sorted[mid]) / 2.0;
    return s;
}

}  // namespace unlearn_audit
