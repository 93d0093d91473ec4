#pragma once

// Cross-attention mass on token sets, per-step curves and trajectory AUC.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "unlearn_audit/prompt_suite.hpp"

namespace unlearn_audit {

inline constexpr double kTraceRowTolerance = 1e-4;

// Per-step token distributions, already averaged over layers, heads and
// spatial queries by the adapter. Row s is the mean over queries of the
// per-query softmax rows at denoising step s + 1.
struct AttentionTrace {
    std::string concept_name;
    VariantKind kind = VariantKind::Baseline;
    std::vector<std::string> tokens;
    std::vector<std::uint32_t> concept_span;
    std::vector<std::uint32_t> instruction_span;
    std::size_t steps = 0;
    // steps x tokens, row-major.
    std::vector<double> dist;
    std::string aggregation;

    std::size_t token_count() const { return tokens.size(); }
    std::span<const double> row(std::size_t step) const {
        return std::span<const double>(dist).subspan(step * tokens.size(), tokens.size());
    }

    // Throws MalformedTrace on shape errors, rows off by more than
    // `row_tolerance` from 1, negative entries, or spans that are unsorted,
    // out of range or overlapping.
    void validate(double row_tolerance = kTraceRowTolerance) const;

    bool operator==(const AttentionTrace&) const = default;
};

// Sum of `row` over `token_set`. Throws InvalidInput for out-of-range or
// repeated indices, MalformedTrace if the row is not a distribution.
double attention_mass(std::span<const double> row, std::span<const std::uint32_t> token_set,
                      double row_tolerance = kTraceRowTolerance);

// attention_mass of every row of the trace.
std::vector<double> mass_curve(const AttentionTrace& trace, std::span<const std::uint32_t> token_set);

// Mean of the curve. Throws EmptySample on an empty curve.
double auc(std::span<const double> curve);

// Concept-token AUC of `kind_trace` minus that of `base_trace`, each using its
// own concept span. Throws InvalidInput if the concepts differ.
double delta_auc(const AttentionTrace& kind_trace, const AttentionTrace& base_trace);

// --- aggregation helpers for adapters -------------------------------------

// Raw cross-attention probabilities of one layer at one step:
// heads x queries x tokens, each (head, query) row a softmax distribution.
struct LayerAttention {
    std::size_t heads = 1;
    std::size_t queries = 0;
    std::size_t tokens = 0;
    std::vector<double> probs;
};

// Unweighted mean of `rows` rows of length `tokens` stored contiguously.
std::vector<double> mean_rows(std::span<const double> rows, std::size_t tokens);

// Mean over heads and queries inside each layer, then mean across layers, so
// every layer counts equally whatever its spatial resolution.
std::vector<double> aggregate_step(std::span<const LayerAttention> layers);

inline constexpr const char* kAggregationDescription =
    "per-layer unweighted mean over heads and spatial queries of conditional-branch softmax rows, "
    "then unweighted mean across cross-attention layers";

}  // namespace unlearn_audit
