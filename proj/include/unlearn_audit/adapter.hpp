#pragma once

// Capability contract between the probes and a text-to-image pipeline.

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "unlearn_audit/attention.hpp"
#include "unlearn_audit/embedding.hpp"
#include "unlearn_audit/prompt_suite.hpp"

namespace unlearn_audit {

// Output of one generation. Backends with real rasters fill `rgb`
// (width x height x 3, row-major); `payload` is opaque backend data that
// encode_image may rely on.
struct GeneratedImage {
    std::string id;
    std::vector<double> payload;
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> rgb;
};

struct Generation {
    GeneratedImage image;
    AttentionTrace trace;
};

class DiffusionAdapter {
public:
    virtual ~DiffusionAdapter() = default;

    // Pooled text embedding, unit-normalized.
    virtual EmbeddingVector encode_text(const PromptRecord& prompt) = 0;

    // Image embedding in the same space as encode_text, unit-normalized.
    virtual EmbeddingVector encode_image(const GeneratedImage& image) = 0;

    // Must be deterministic in (prompt text, seed, steps). The trace carries
    // the conditional branch only, aggregated as described by
    // kAggregationDescription, with spans relative to its own token list.
    virtual Generation generate(const PromptRecord& prompt, std::uint64_t seed, std::size_t steps) = 0;

    virtual std::vector<TokenPiece> tokenize(std::string_view text) = 0;

    // True when concurrent calls are safe; otherwise probes serialize.
    virtual bool reentrant() const = 0;

    // Model name, sampler, guidance scale and similar run settings.
    virtual nlohmann::ordered_json metadata() const = 0;
};

struct ValidationCheck {
    std::string name;
    bool passed = false;
    std::string detail;
};

struct ValidationReport {
    std::vector<ValidationCheck> checks;

    bool passed() const;
    nlohmann::ordered_json to_json() const;
};

struct ValidationOptions {
    std::size_t steps = 4;
    std::uint64_t seed = 0;
    double unit_tolerance = kUnitNormTolerance;
    double row_tolerance = kTraceRowTolerance;
};

// Exercises the contract on the given probe prompts (determinism on repeated
// calls, unit norms, fixed dimensions, trace row sums and span consistency).
// Failures are recorded in the report, never thrown.
ValidationReport validate_capabilities(DiffusionAdapter& adapter, const std::vector<PromptRecord>& probe_prompts,
                                       const ValidationOptions& options = {});

}  // namespace unlearn_audit
