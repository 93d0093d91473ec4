#include "unlearn_audit/attention.hpp"

#include <algorithm>
#include <cmath>

#include "unlearn_audit/errors.hpp"
#include "unlearn_audit/kernels.hpp"

namespace unlearn_audit {

namespace {

void check_span(const std::vector<std::uint32_t>& span, std::size_t token_count, const char* label) {
    for (std::size_t i = 0; i < span.size(); ++i) {
        if (span[i] >= token_count) {
            throw MalformedTrace(std::string(label) + " index " + std::to_string(span[i]) + " out of range");
        }
        if (i > 0 && span[i] <= span[i - 1]) {
            throw MalformedTrace(std::string(label) + " must be strictly increasing");
        }
    }
}

void check_token_set(std::span<const std::uint32_t> token_set, std::size_t token_count) {
    std::vector<std::uint32_t> sorted(token_set.begin(), token_set.end());
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        if (sorted[i] >= token_count) {
            throw InvalidInput("token index " + std::to_string(sorted[i]) + " out of range for " +
                               std::to_string(token_count) + " tokens");
        }
        if (i > 0 && sorted[i] == sorted[i - 1]) {
            throw InvalidInput("token index " + std::to_string(sorted[i]) + " repeated");
        }
    }
}

void check_row(std::span<const double> row, double tolerance, std::size_t step) {
    const double total = kernels::sum(row);
    if (!(std::abs(total - 1.0) <= tolerance)) {
        throw MalformedTrace("row " + std::to_string(step) + " sums to " + std::to_string(total) +
                             ", outside tolerance " + std::to_string(tolerance));
    }
    if (!(kernels::min(row) >= 0.0)) {
        throw MalformedTrace("row " + std::to_string(step) + " has a negative entry");
    }
}

}  // namespace

void AttentionTrace::validate(double row_tolerance) const {
    if (tokens.empty()) {
        throw MalformedTrace("trace has no tokens");
    }
    if (steps == 0) {
        throw MalformedTrace("trace has no steps");
    }
    if (dist.size() != steps * tokens.size()) {
        throw MalformedTrace("trace has " + std::to_string(dist.size()) + " values, expected " +
                             std::to_string(steps) + " x " + std::to_string(tokens.size()));
    }
    check_span(concept_span, tokens.size(), "concept_span");
    check_span(instruction_span, tokens.size(), "instruction_span");
    for (std::uint32_t i : concept_span) {
        if (std::binary_search(instruction_span.begin(), instruction_span.end(), i)) {
            throw MalformedTrace("token " + std::to_string(i) + " is in both spans");
        }
    }
    for (std::size_t s = 0; s < steps; ++s) {
        check_row(row(s), row_tolerance, s + 1);
    }
}

double attention_mass(std::span<const double> row, std::span<const std::uint32_t> token_set, double row_tolerance) {
    check_token_set(token_set, row.size());
    check_row(row, row_tolerance, 0);
    return kernels::gather_sum(row, token_set);
}

std::vector<double> mass_curve(const AttentionTrace& trace, std::span<const std::uint32_t> token_set) {
    check_token_set(token_set, trace.token_count());
    std::vector<double> curve(trace.steps);
    for (std::size_t s = 0; s < trace.steps; ++s) {
        const auto r = trace.row(s);
        check_row(r, kTraceRowTolerance, s + 1);
        curve[s] = kernels::gather_sum(r, token_set);
    }
    return curve;
}

double auc(std::span<const double> curve) {
    if (curve.empty()) {
        throw EmptySample("auc: empty curve");
    }
    return kernels::sum(curve) / static_cast<double>(curve.size());
}

double delta_auc(const AttentionTrace& kind_trace, const AttentionTrace& base_trace) {
    if (kind_trace.concept_name != base_trace.concept_name) {
        throw InvalidInput("delta_auc: concept mismatch ('" + kind_trace.concept_name + "' vs '" +
                           base_trace.concept_name + "')");
    }
    return auc(mass_curve(kind_trace, kind_trace.concept_span)) -
           auc(mass_curve(base_trace, base_trace.concept_span));
}

std::vector<double> mean_rows(std::span<const double> rows, std::size_t tokens) {
    if (tokens == 0 || rows.empty() || rows.size() % tokens != 0) {
        throw InvalidInput("mean_rows: data is not a whole number of rows");
    }
    const std::size_t n = rows.size() / tokens;
    std::vector<double> acc(tokens, 0.0);
    for (std::size_t q = 0; q < n; ++q) {
        kernels::accumulate(acc, rows.subspan(q * tokens, tokens));
    }
    kernels::scale(acc, 1.0 / static_cast<double>(n));
    return acc;
}

std::vector<double> aggregate_step(std::span<const LayerAttention> layers) {
    if (layers.empty()) {
        throw InvalidInput("aggregate_step: no layers");
    }
    const std::size_t tokens = layers.front().tokens;
    std::vector<double> acc(tokens, 0.0);
    for (const LayerAttention& layer : layers) {
        if (layer.tokens != tokens || layer.probs.size() != layer.heads * layer.queries * layer.tokens) {
            throw InvalidInput("aggregate_step: inconsistent layer shape");
        }
        kernels::accumulate(acc, mean_rows(layer.probs, tokens));
    }
    kernels::scale(acc, 1.0 / static_cast<double>(layers.size()));
    return acc;
}

}  // namespace unlearn_audit
