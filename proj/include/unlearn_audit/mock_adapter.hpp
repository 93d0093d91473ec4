#pragma once

// Deterministic stand-in for a diffusion pipeline whose outputs are closed-form
// functions of its configuration.
//
// Text embedding of a prompt of kind k for concept c:
//
//     normalize( [c present] * lambda_k * a_c + (1 - lambda_k) * u_c + eps * n(text) )
//
// where a_c is the concept's anchor direction, u_c its instruction direction
// (Gram-Schmidt orthogonal to a_c) and n a text-keyed unit noise vector. When
// the mixture vanishes (lambda = 1 with the concept ablated) a residual
// direction orthogonal to both is used instead. The anchor prompt uses
// lambda = 1. With eps = 0 the similarity to the anchor is therefore
// lambda / sqrt(lambda^2 + (1 - lambda)^2), or 0 once the concept is ablated.
//
// Images use the same mixture with the image dominance of their kind and a
// (text, seed)-keyed noise vector. Traces realize the configured concept-mass
// schedule exactly, split evenly over the concept tokens; the instruction mass
// goes to instruction tokens and the remainder is spread evenly over the other
// tokens, including the start/end markers.

#include <map>
#include <string>
#include <vector>

#include "unlearn_audit/adapter.hpp"

namespace unlearn_audit {

struct MassSchedule {
    double start = 0.3;
    double end = 0.3;

    static MassSchedule constant(double v) { return {v, v}; }
    static MassSchedule linear(double from, double to) { return {from, to}; }

    bool is_constant() const { return start == end; }

    // Mass at 0-based step `s` of `steps`; linear interpolation between the
    // first and last step.
    double at(std::size_t s, std::size_t steps) const;

    // Closed-form mean over `steps` steps.
    double mean() const { return (start + end) / 2.0; }

    bool operator==(const MassSchedule&) const = default;
};

struct MockConfig {
    std::size_t dimension = 64;
    // Text concept dominance per kind; kinds not listed use 1.
    std::map<VariantKind, double> dominance;
    // Image concept dominance per kind; kinds not listed fall back to the
    // text dominance.
    std::map<VariantKind, double> image_dominance;
    double noise = 0.0;
    // Kinds not listed use a constant 0.3.
    std::map<VariantKind, MassSchedule> concept_mass;
    // Applied only to prompts with instruction tokens.
    double instruction_mass = 0.1;
    std::vector<std::string> instruction_words = default_instruction_words();

    double text_lambda(VariantKind kind) const;
    double image_lambda(VariantKind kind) const;
    MassSchedule schedule(VariantKind kind) const;

    // Throws ConfigError naming the offending key.
    void validate() const;

    nlohmann::ordered_json to_json() const;
};

// Text dominance of the unlearn prompt is set so that its closed-form
// similarity change is about -0.045, images use one dominance for every kind,
// and the unlearn concept-mass schedule sits 0.004 AUC below the baseline.
MockConfig reference_preset();

// lambda / sqrt(lambda^2 + (1 - lambda)^2)
double mock_mixture_similarity(double lambda);

class MockAdapter final : public DiffusionAdapter {
public:
    // Throws ConfigError if the config is invalid.
    explicit MockAdapter(MockConfig config);

    EmbeddingVector encode_text(const PromptRecord& prompt) override;
    EmbeddingVector encode_image(const GeneratedImage& image) override;
    Generation generate(const PromptRecord& prompt, std::uint64_t seed, std::size_t steps) override;
    std::vector<TokenPiece> tokenize(std::string_view text) override;
    bool reentrant() const override { return true; }
    nlohmann::ordered_json metadata() const override;

    const MockConfig& config() const { return config_; }

    std::vector<double> anchor_direction(const Concept& c) const;
    std::vector<double> instruction_direction(const Concept& c) const;

    static constexpr const char* kStartToken = "<|startoftext|>";
    static constexpr const char* kEndToken = "<|endoftext|>";

private:
    std::vector<double> mixture(const PromptRecord& prompt, double lambda) const;

    MockConfig config_;
};

}  // namespace unlearn_audit
