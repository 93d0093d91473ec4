#pragma once

// Adapter backed by files produced by out-of-process pipeline
// instrumentation.
//
// Embedding file: newline-delimited JSON, one record per line,
//     {"prompt_hash": "<16 hex>", "vector": [...]}               text embedding
//     {"prompt_hash": "<16 hex>", "seed": N, "vector": [...]}    image embedding
// where prompt_hash is prompt_hash() of the exact prompt text. Extra keys
// (e.g. "text") are ignored.
//
// Trace directory: one trace file per generation, named
//     <prompt_hash>-<seed>.jsonl
// in the format of trace_io.hpp.

#include <filesystem>
#include <map>
#include <optional>
#include <utility>

#include "unlearn_audit/adapter.hpp"

namespace unlearn_audit {

struct ExternalSources {
    std::filesystem::path embeddings;
    std::filesystem::path traces_dir;
    nlohmann::ordered_json metadata = nlohmann::ordered_json::object();
};

std::string trace_file_name(std::string_view prompt_text, std::uint64_t seed);

class ExternalTraceAdapter final : public DiffusionAdapter {
public:
    // Loads the embedding file eagerly. Throws IoError / AdapterError.
    explicit ExternalTraceAdapter(ExternalSources sources);

    EmbeddingVector encode_text(const PromptRecord& prompt) override;
    EmbeddingVector encode_image(const GeneratedImage& image) override;
    // Throws AdapterError when neither an image embedding nor a trace file
    // exists for (prompt, seed). A missing half is left empty (trace.steps == 0).
    Generation generate(const PromptRecord& prompt, std::uint64_t seed, std::size_t steps) override;
    std::vector<TokenPiece> tokenize(std::string_view text) override;
    bool reentrant() const override { return true; }
    nlohmann::ordered_json metadata() const override;

private:
    ExternalSources sources_;
    std::map<std::string, std::vector<double>> text_;
    std::map<std::pair<std::string, std::uint64_t>, std::vector<double>> images_;
};

}  // namespace unlearn_audit
