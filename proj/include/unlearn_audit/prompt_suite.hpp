#pragma once

// Prompt variants, token-span annotation and word-level ablation.

#include <array>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace unlearn_audit {

inline constexpr std::string_view kConceptPlaceholder = "{concept}";

enum class VariantKind { Baseline, Unlearn, Negation, RepeatControl, Implicit };

inline constexpr std::array<VariantKind, 5> kAllVariants{
    VariantKind::Baseline, VariantKind::Unlearn, VariantKind::Negation,
    VariantKind::RepeatControl, VariantKind::Implicit,
};

// "baseline", "unlearn", "negation", "repeat_control", "implicit"
std::string_view to_string(VariantKind kind);

// Throws InvalidInput on unknown names.
VariantKind parse_variant(std::string_view name);

enum class AblationTarget { ConceptTokens, InstructionTokens };

std::string_view to_string(AblationTarget target);

class Concept {
public:
    // Throws InvalidInput if the name is empty, has placeholder braces, or is
    // not single-space separated; or if the anchor template does not contain
    // exactly one placeholder.
    explicit Concept(std::string name, std::string anchor_template = "a photo of {concept}");

    const std::string& name() const { return name_; }
    const std::string& anchor_template() const { return anchor_template_; }
    const std::vector<std::string>& words() const { return words_; }

    // Anchor prompt text, e.g. "a photo of panda".
    std::string anchor_text() const;

    bool operator==(const Concept&) const = default;

private:
    std::string name_;
    std::string anchor_template_;
    std::vector<std::string> words_;
};

// Instruction words annotated as I_u and removed by instruction ablation.
std::vector<std::string> default_instruction_words();

struct PromptVariant {
    VariantKind kind;
    std::string template_text;
};

// Template set with invariant checks on overrides.
class PromptTemplates {
public:
    PromptTemplates();

    // Throws InvalidInput when the template has no concept placeholder, or
    // breaks the instruction-word rules for its kind (Unlearn must contain an
    // instruction word, Baseline and RepeatControl must contain none).
    void set(VariantKind kind, std::string template_text,
             const std::vector<std::string>& instruction_words = default_instruction_words());

    const std::string& get(VariantKind kind) const;

    // Returns true when `kind` still uses the built-in default wording.
    bool is_default(VariantKind kind) const;

    static std::string default_template(VariantKind kind);

private:
    std::map<VariantKind, std::string> templates_;
};

// A token piece as reported by a tokenizer: id plus the [begin, end) byte
// range of the prompt text it came from.
struct TokenPiece {
    std::uint32_t id = 0;
    std::size_t begin = 0;
    std::size_t end = 0;

    bool operator==(const TokenPiece&) const = default;
};

struct PromptRecord {
    Concept concept_info;
    // Empty for the concept anchor prompt, which is not a variant.
    std::optional<VariantKind> kind;
    std::string text;
    std::vector<std::uint32_t> token_ids;
    // Sorted ascending, disjoint.
    std::vector<std::uint32_t> concept_span;
    std::vector<std::uint32_t> instruction_span;

    bool annotated() const { return !token_ids.empty(); }
};

std::string fill_template(std::string_view template_text, std::string_view concept_name);

PromptRecord build_prompt(const Concept& concept_info, VariantKind kind,
                          const PromptTemplates& templates = PromptTemplates());

PromptRecord build_anchor(const Concept& concept_info);

// Byte ranges [begin, end) of every case-insensitive whole-word occurrence of
// any of `words` in `text`. Word boundaries are ASCII non-alphanumerics.
std::vector<std::pair<std::size_t, std::size_t>> find_word_occurrences(
    std::string_view text, const std::vector<std::string>& words);

bool contains_any_word(std::string_view text, const std::vector<std::string>& words);

// Fills token_ids and both spans from a tokenization of record.text.
// Throws MalformedTokenization when ranges are unordered, overlapping, out of
// bounds, empty, or leave a non-whitespace byte uncovered.
PromptRecord annotate_spans(const PromptRecord& record, const std::vector<TokenPiece>& tokenization,
                            const std::vector<std::string>& instruction_words = default_instruction_words());

// Removes every occurrence of the targeted words from the text and collapses
// whitespace. Text with no occurrence is returned unchanged. The result is
// unannotated.
PromptRecord ablate_tokens(const PromptRecord& record, AblationTarget target,
                           const std::vector<std::string>& instruction_words = default_instruction_words());

// Word-list form used by ablate_tokens.
std::string remove_words(std::string_view text, const std::vector<std::string>& words);

// Simple word/punctuation tokenizer: maximal runs of ASCII alphanumerics and
// apostrophes are one token, every other non-space byte is its own token.
// Ids are the low 32 bits of FNV-1a over the lower-cased piece.
std::vector<TokenPiece> simple_tokenize(std::string_view text);

}  // namespace unlearn_audit
