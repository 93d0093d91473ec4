#pragma once

// Text-encoder probe: similarity of each prompt variant to the concept anchor,
// changes versus baseline, and token-ablation effects.

#include <optional>
#include <string>
#include <vector>

#include "unlearn_audit/adapter.hpp"
#include "unlearn_audit/probe_settings.hpp"
#include "unlearn_audit/stats.hpp"

namespace unlearn_audit {

struct SimilarityRecord {
    std::string concept_name;
    VariantKind kind = VariantKind::Baseline;
    std::string prompt;
    double similarity = 0.0;
    // similarity - baseline similarity; absent for Baseline itself.
    std::optional<double> delta_vs_baseline;
};

struct AblationRecord {
    std::string concept_name;
    VariantKind kind = VariantKind::Unlearn;
    AblationTarget target = AblationTarget::ConceptTokens;
    std::string ablated_prompt;
    double similarity_original = 0.0;
    double similarity_ablated = 0.0;
    // similarity_original - similarity_ablated; positive means a drop.
    double effect = 0.0;
};

struct AblationStats {
    VariantKind kind;
    AblationTarget target;
    Stats stats;
};

struct TextProbeResult {
    std::string anchor_embedding = "pooled";
    std::vector<SimilarityRecord> records;
    std::vector<AblationRecord> ablations;
    std::vector<std::pair<VariantKind, Stats>> similarity_stats;
    std::vector<std::pair<VariantKind, Stats>> delta_stats;
    std::vector<AblationStats> ablation_stats;
};

// True when the unlearn prompt is strictly less similar to the anchor than
// the baseline prompt.
bool unlearning_criterion(double sim_unlearn, double sim_baseline);

double ablation_effect(double sim_original, double sim_ablated);

// Aborts with ProbeAbort naming the concept, variant and prompt that failed.
TextProbeResult run_text_probe(const std::vector<Concept>& concepts, DiffusionAdapter& encoder,
                               const ProbeSettings& settings);

}  // namespace unlearn_audit
