#pragma once

#include <optional>
#include <string>
#include <vector>

#include "unlearn_audit/adapter.hpp"
#include "unlearn_audit/probe_settings.hpp"
#include "unlearn_audit/stats.hpp"

namespace unlearn_audit {

struct AucRecord {
    std::string concept_name;
    VariantKind kind = VariantKind::Baseline;
    double auc_concept = 0.0;
    double auc_instruction = 0.0;
    // auc_concept - auc_concept(Baseline); absent for Baseline.
    std::optional<double> delta_auc_vs_baseline;
};

struct MassCurves {
    std::string concept_name;
    VariantKind kind = VariantKind::Baseline;
    std::vector<std::string> tokens;
    std::vector<std::uint32_t> concept_span;
    std::vector<std::uint32_t> instruction_span;
    std::vector<double> concept_mass;
    std::vector<double> instruction_mass;
};

struct AttentionProbeResult {
    std::size_t steps = 0;
    std::uint64_t seed = 0;
    std::string aggregation;
    std::vector<AucRecord> records;
    std::vector<MassCurves> curves;
    std::vector<std::pair<VariantKind, Stats>> auc_concept_stats;
    std::vector<std::pair<VariantKind, Stats>> auc_instruction_stats;
    std::vector<std::pair<VariantKind, Stats>> delta_auc_stats;
};

// Summaries of one trace.
AucRecord summarize_trace(const AttentionTrace& trace, MassCurves* curves = nullptr);

// One trace per (concept, variant) at base_seed with `steps` steps. Aborts
// with ProbeAbort identifying the offending trace.
AttentionProbeResult run_attention_probe(const std::vector<Concept>& concepts, DiffusionAdapter& adapter,
                                         const ProbeSettings& settings);

}  // namespace unlearn_audit
