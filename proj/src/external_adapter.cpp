#include "unlearn_audit/external_adapter.hpp"

#include <fstream>

#include "unlearn_audit/errors.hpp"
#include "unlearn_audit/hashing.hpp"
#include "unlearn_audit/trace_io.hpp"

namespace unlearn_audit {

std::string trace_file_name(std::string_view prompt_text, std::uint64_t seed) {
    return prompt_hash(prompt_text) + "-" + std::to_string(seed) + ".jsonl";
}

ExternalTraceAdapter::ExternalTraceAdapter(ExternalSources sources) : sources_(std::move(sources)) {
    if (sources_.embeddings.empty()) {
        return;
    }
    std::ifstream in(sources_.embeddings, std::ios::binary);
    if (!in) {
        throw IoError("cannot open embedding file " + sources_.embeddings.string());
    }
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) {
            continue;
        }
        try {
            const auto rec = nlohmann::json::parse(line);
            auto hash = rec.at("prompt_hash").get<std::string>();
            auto vec = rec.at("vector").get<std::vector<double>>();
            if (rec.contains("seed")) {
                images_[{std::move(hash), rec.at("seed").get<std::uint64_t>()}] = std::move(vec);
            } else {
                text_[std::move(hash)] = std::move(vec);
            }
        } catch (const nlohmann::json::exception& e) {
            throw AdapterError(sources_.embeddings.string() + " line " + std::to_string(line_no) + ": " + e.what());
        }
    }
}

EmbeddingVector ExternalTraceAdapter::encode_text(const PromptRecord& prompt) {
    auto it = text_.find(prompt_hash(prompt.text));
    if (it == text_.end()) {
        throw AdapterError("no text embedding for prompt '" + prompt.text + "' (hash " + prompt_hash(prompt.text) + ")");
    }
    return EmbeddingVector{it->second, true};
}

EmbeddingVector ExternalTraceAdapter::encode_image(const GeneratedImage& image) {
    if (image.payload.empty()) {
        throw AdapterError("no image embedding for " + image.id);
    }
    return EmbeddingVector{image.payload, true};
}

Generation ExternalTraceAdapter::generate(const PromptRecord& prompt, std::uint64_t seed, std::size_t /*steps*/) {
    Generation g;
    const std::string hash = prompt_hash(prompt.text);
    g.image.id = "external:" + hash + ":" + std::to_string(seed);
    bool found = false;
    if (auto it = images_.find({hash, seed}); it != images_.end()) {
        g.image.payload = it->second;
        found = true;
    }
    if (!sources_.traces_dir.empty()) {
        const auto path = sources_.traces_dir / trace_file_name(prompt.text, seed);
        if (std::filesystem::exists(path)) {
            g.trace = read_trace_file(path);
            found = true;
        }
    }
    if (!found) {
        throw AdapterError("no image embedding or trace for prompt '" + prompt.text + "' seed " +
                           std::to_string(seed));
    }
    return g;
}

std::vector<TokenPiece> ExternalTraceAdapter::tokenize(std::string_view text) {
    return simple_tokenize(text);
}

nlohmann::ordered_json ExternalTraceAdapter::metadata() const {
    nlohmann::ordered_json j;
    j["name"] = "external-trace";
    j["embeddings"] = sources_.embeddings.string();
    j["traces_dir"] = sources_.traces_dir.string();
    j["pipeline"] = sources_.metadata;
    return j;
}

}  // namespace unlearn_audit
