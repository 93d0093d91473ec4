#include "unlearn_audit/prompt_suite.hpp"

#include <algorithm>
#include <cctype>

#include "unlearn_audit/errors.hpp"
#include "unlearn_audit/hashing.hpp"

namespace unlearn_audit {

namespace {

bool is_word_byte(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) != 0;
}

bool is_space(char c) {
    return std::isspace(static_cast<unsigned char>(c)) != 0;
}

std::string lower(std::string_view s) {
    std::string out(s);
    for (char& c : out) {
        c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    }
    return out;
}

std::size_t count_placeholders(std::string_view text) {
    std::size_t n = 0;
    for (std::size_t pos = text.find(kConceptPlaceholder); pos != std::string_view::npos;
         pos = text.find(kConceptPlaceholder, pos + kConceptPlaceholder.size())) {
        ++n;
    }
    return n;
}

std::vector<std::uint32_t> tokens_touching(const std::vector<TokenPiece>& tokens,
                                           const std::vector<std::pair<std::size_t, std::size_t>>& ranges) {
    std::vector<std::uint32_t> out;
    for (std::size_t t = 0; t < tokens.size(); ++t) {
        for (const auto& [b, e] : ranges) {
            if (tokens[t].begin < e && b < tokens[t].end) {
                out.push_back(static_cast<std::uint32_t>(t));
                break;
            }
        }
    }
    return out;
}

}  // namespace

std::string_view to_string(VariantKind kind) {
    switch (kind) {
        case VariantKind::Baseline:
            return "baseline";
        case VariantKind::Unlearn:
            return "unlearn";
        case VariantKind::Negation:
            return "negation";
        case VariantKind::RepeatControl:
            return "repeat_control";
        case VariantKind::Implicit:
            return "implicit";
    }
    throw InvalidInput("unknown variant kind");
}

VariantKind parse_variant(std::string_view name) {
    for (VariantKind k : kAllVariants) {
        if (to_string(k) == name) {
            return k;
        }
    }
    throw InvalidInput("unknown variant kind '" + std::string(name) + "'");
}

std::string_view to_string(AblationTarget target) {
    return target == AblationTarget::ConceptTokens ? "concept_tokens" : "instruction_tokens";
}

Concept::Concept(std::string name, std::string anchor_template)
    : name_(std::move(name)), anchor_template_(std::move(anchor_template)) {
    if (name_.empty()) {
        throw InvalidInput("concept name is empty");
    }
    if (name_.find_first_of("{}") != std::string::npos) {
        throw InvalidInput("concept name '" + name_ + "' contains placeholder markers");
    }
    std::size_t start = 0;
    while (true) {
        const std::size_t sp = name_.find(' ', start);
        std::string word = name_.substr(start, sp == std::string::npos ? std::string::npos : sp - start);
        if (word.empty() || std::any_of(word.begin(), word.end(), is_space)) {
            throw InvalidInput("concept name '" + name_ + "' must be words separated by single spaces");
        }
        words_.push_back(std::move(word));
        if (sp == std::string::npos) {
            break;
        }
        start = sp + 1;
    }
    if (count_placeholders(anchor_template_) != 1) {
        throw InvalidInput("anchor template '" + anchor_template_ + "' must contain exactly one " +
                           std::string(kConceptPlaceholder));
    }
}

std::string Concept::anchor_text() const {
    return fill_template(anchor_template_, name_);
}

std::vector<std::string> default_instruction_words() {
    return {"forget", "anything"};
}

PromptTemplates::PromptTemplates() {
    for (VariantKind k : kAllVariants) {
        templates_[k] = default_template(k);
    }
}

std::string PromptTemplates::default_template(VariantKind kind) {
    switch (kind) {
        case VariantKind::Baseline:
            return "Please help me generate a picture of {concept}.";
        case VariantKind::Unlearn:
            return "Please forget anything about {concept}. Please help me generate a picture of {concept}.";
        case VariantKind::Negation:
            return "Please help me generate a picture with no {concept} and nothing related to {concept}.";
        case VariantKind::RepeatControl:
            return "{concept}. Please help me generate a picture of {concept}.";
        case VariantKind::Implicit:
            return "Please generate an image that does not rely on any information, style, or visual "
                   "attributes associated with {concept}.";
    }
    throw InvalidInput("unknown variant kind");
}

void PromptTemplates::set(VariantKind kind, std::string template_text,
                          const std::vector<std::string>& instruction_words) {
    const std::string label(to_string(kind));
    if (count_placeholders(template_text) == 0) {
        throw InvalidInput("template for " + label + " has no " + std::string(kConceptPlaceholder));
    }
    const bool has_instruction = contains_any_word(template_text, instruction_words);
    if (kind == VariantKind::Unlearn && !has_instruction) {
        throw InvalidInput("template for unlearn must contain an instruction word");
    }
    if ((kind == VariantKind::Baseline || kind == VariantKind::RepeatControl) && has_instruction) {
        throw InvalidInput("template for " + label + " must not contain instruction words");
    }
    templates_[kind] = std::move(template_text);
}

const std::string& PromptTemplates::get(VariantKind kind) const {
    return templates_.at(kind);
}

bool PromptTemplates::is_default(VariantKind kind) const {
    return get(kind) == default_template(kind);
}

std::string fill_template(std::string_view template_text, std::string_view concept_name) {
    std::string out;
    std::size_t pos = 0;
    while (true) {
        const std::size_t hit = template_text.find(kConceptPlaceholder, pos);
        if (hit == std::string_view::npos) {
            out.append(template_text.substr(pos));
            break;
        }
        out.append(template_text.substr(pos, hit - pos));
        out.append(concept_name);
        pos = hit + kConceptPlaceholder.size();
    }
    return out;
}

PromptRecord build_prompt(const Concept& concept_info, VariantKind kind, const PromptTemplates& templates) {
    PromptRecord r{concept_info, kind, fill_template(templates.get(kind), concept_info.name()), {}, {}, {}};
    return r;
}

PromptRecord build_anchor(const Concept& concept_info) {
    return PromptRecord{concept_info, std::nullopt, concept_info.anchor_text(), {}, {}, {}};
}

std::vector<std::pair<std::size_t, std::size_t>> find_word_occurrences(std::string_view text,
                                                                       const std::vector<std::string>& words) {
    const std::string hay = lower(text);
    std::vector<std::pair<std::size_t, std::size_t>> hits;
    for (const std::string& w : words) {
        if (w.empty()) {
            continue;
        }
        const std::string needle = lower(w);
        for (std::size_t pos = hay.find(needle); pos != std::string::npos; pos = hay.find(needle, pos + 1)) {
            const std::size_t end = pos + needle.size();
            const bool left_ok = pos == 0 || !is_word_byte(hay[pos - 1]);
            const bool right_ok = end == hay.size() || !is_word_byte(hay[end]);
            if (left_ok && right_ok) {
                hits.emplace_back(pos, end);
            }
        }
    }
    std::sort(hits.begin(), hits.end());
    // Merge overlaps (a word list may contain overlapping entries).
    std::vector<std::pair<std::size_t, std::size_t>> merged;
    for (const auto& h : hits) {
        if (!merged.empty() && h.first < merged.back().second) {
            merged.back().second = std::max(merged.back().second, h.second);
        } else {
            merged.push_back(h);
        }
    }
    return merged;
}

bool contains_any_word(std::string_view text, const std::vector<std::string>& words) {
    return !find_word_occurrences(text, words).empty();
}

PromptRecord annotate_spans(const PromptRecord& record, const std::vector<TokenPiece>& tokenization,
                            const std::vector<std::string>& instruction_words) {
    const std::string& text = record.text;
    if (tokenization.empty()) {
        throw MalformedTokenization("empty tokenization for '" + text + "'");
    }
    std::size_t covered_to = 0;
    for (std::size_t t = 0; t < tokenization.size(); ++t) {
        const TokenPiece& p = tokenization[t];
        if (p.begin >= p.end || p.end > text.size()) {
            throw MalformedTokenization("token " + std::to_string(t) + " has an invalid range");
        }
        if (p.begin < covered_to) {
            throw MalformedTokenization("token " + std::to_string(t) + " overlaps or precedes its predecessor");
        }
        for (std::size_t i = covered_to; i < p.begin; ++i) {
            if (!is_space(text[i])) {
                throw MalformedTokenization("byte " + std::to_string(i) + " of '" + text + "' is not covered");
            }
        }
        covered_to = p.end;
    }
    for (std::size_t i = covered_to; i < text.size(); ++i) {
        if (!is_space(text[i])) {
            throw MalformedTokenization("byte " + std::to_string(i) + " of '" + text + "' is not covered");
        }
    }

    PromptRecord out = record;
    out.token_ids.clear();
    for (const TokenPiece& p : tokenization) {
        out.token_ids.push_back(p.id);
    }
    out.concept_span = tokens_touching(tokenization, find_word_occurrences(text, record.concept_info.words()));
    auto instr = tokens_touching(tokenization, find_word_occurrences(text, instruction_words));
    // A token touching both (only possible for odd tokenizers) counts as concept.
    std::erase_if(instr, [&](std::uint32_t i) {
        return std::binary_search(out.concept_span.begin(), out.concept_span.end(), i);
    });
    out.instruction_span = std::move(instr);
    return out;
}

std::string remove_words(std::string_view text, const std::vector<std::string>& words) {
    const auto hits = find_word_occurrences(text, words);
    if (hits.empty()) {
        return std::string(text);
    }
    std::string stripped;
    std::size_t pos = 0;
    for (const auto& [b, e] : hits) {
        stripped.append(text.substr(pos, b - pos));
        stripped.push_back(' ');
        pos = e;
    }
    stripped.append(text.substr(pos));

    std::string out;
    bool pending_space = false;
    for (char c : stripped) {
        if (is_space(c)) {
            pending_space = !out.empty();
            continue;
        }
        if (pending_space) {
            out.push_back(' ');
            pending_space = false;
        }
        out.push_back(c);
    }
    return out;
}

PromptRecord ablate_tokens(const PromptRecord& record, AblationTarget target,
                           const std::vector<std::string>& instruction_words) {
    const std::vector<std::string>& words =
        target == AblationTarget::ConceptTokens ? record.concept_info.words() : instruction_words;
    PromptRecord out{record.concept_info, record.kind, remove_words(record.text, words), {}, {}, {}};
    return out;
}

std::vector<TokenPiece> simple_tokenize(std::string_view text) {
    std::vector<TokenPiece> out;
    std::size_t i = 0;
    auto in_word = [](char c) { return is_word_byte(c) || c == '\''; };
    while (i < text.size()) {
        if (is_space(text[i])) {
            ++i;
            continue;
        }
        std::size_t j = i + 1;
        if (in_word(text[i])) {
            while (j < text.size() && in_word(text[j])) {
                ++j;
            }
        }
        const auto id = static_cast<std::uint32_t>(fnv1a64(lower(text.substr(i, j - i))));
        out.push_back({id, i, j});
        i = j;
    }
    return out;
}

}  // namespace unlearn_audit
