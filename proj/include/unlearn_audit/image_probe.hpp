#pragma once

// Generated-image probe: image/anchor similarity averaged over K seeded
// samples per (concept, variant) cell.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "unlearn_audit/adapter.hpp"
#include "unlearn_audit/probe_settings.hpp"
#include "unlearn_audit/stats.hpp"

namespace unlearn_audit {

struct ImageSampleSet {
    std::string concept_name;
    VariantKind kind = VariantKind::Baseline;
    std::vector<std::uint64_t> seeds;
    std::vector<EmbeddingVector> image_embeddings;

    // Throws EmptySample for K = 0, InvalidInput for repeated seeds, a
    // seed/embedding count mismatch or mixed dimensions.
    void validate() const;
};

// Mean over samples of cosine(image, anchor).
double image_concept_similarity(const ImageSampleSet& samples, const EmbeddingVector& anchor);

double per_concept_change(double kind_similarity, double baseline_similarity);

struct ImageRecord {
    std::string concept_name;
    VariantKind kind = VariantKind::Baseline;
    std::string prompt;
    std::vector<std::uint64_t> seeds;
    std::vector<double> sample_similarities;
    std::vector<std::vector<double>> embeddings;
    double similarity = 0.0;
    // Absent for Baseline.
    std::optional<double> change_vs_baseline;
};

struct ImageProbeResult {
    std::size_t samples = 0;
    std::uint64_t base_seed = 0;
    std::vector<ImageRecord> records;
    std::vector<std::pair<VariantKind, Stats>> similarity_stats;
    // fraction_negative reads as the fraction of concepts with reduced
    // similarity.
    std::vector<std::pair<VariantKind, Stats>> change_stats;
};

// Seeds base_seed .. base_seed + K - 1 are shared by every variant of a
// concept. Aborts with ProbeAbort naming (concept, variant, seed).
ImageProbeResult run_image_probe(const std::vector<Concept>& concepts, DiffusionAdapter& adapter,
                                 const ProbeSettings& settings);

}  // namespace unlearn_audit
