#include <random>
#include <set>

#include "doctest.h"
#include "unlearn_audit/errors.hpp"
#include "unlearn_audit/prompt_suite.hpp"

using namespace unlearn_audit;

namespace {

// Splits every whitespace-free run into random-length pieces, like a
// subword tokenizer would.
std::vector<TokenPiece> random_subword_tokenization(const std::string& text, std::mt19937_64& rng) {
    std::vector<TokenPiece> out;
    std::uniform_int_distribution<int> len(1, 4);
    std::size_t i = 0;
    std::uint32_t id = 0;
    while (i < text.size()) {
        if (text[i] == ' ') {
            ++i;
            continue;
        }
        std::size_t end = i;
        while (end < text.size() && text[end] != ' ') {
            ++end;
        }
        while (i < end) {
            const std::size_t j = std::min(end, i + static_cast<std::size_t>(len(rng)));
            out.push_back({id++, i, j});
            i = j;
        }
    }
    return out;
}

const std::vector<std::string> kNames = {"panda", "Vincent van Gogh", "Eiffel Tower", "cat", "Claude Monet",
                                         "golden retriever", "Pablo Picasso", "a b c"};

}  // namespace

TEST_CASE("build_prompt reproduces the quoted prompt forms") {
    const Concept gogh("Vincent van Gogh");
    CHECK(build_prompt(gogh, VariantKind::Unlearn).text ==
          "Please forget anything about Vincent van Gogh. Please help me generate a picture of Vincent van Gogh.");
    CHECK(build_prompt(gogh, VariantKind::Implicit).text ==
          "Please generate an image that does not rely on any information, style, or visual attributes associated "
          "with Vincent van Gogh.");
    CHECK(build_prompt(Concept("panda"), VariantKind::Baseline).text == "Please help me generate a picture of panda.");
}

TEST_CASE("build_prompt leaves spans unannotated") {
    const auto r = build_prompt(Concept("panda"), VariantKind::Unlearn);
    CHECK_FALSE(r.annotated());
    CHECK(r.concept_span.empty());
    CHECK(r.kind == VariantKind::Unlearn);
}

TEST_CASE("variant names round-trip and unknown names are rejected") {
    for (VariantKind k : kAllVariants) {
        CHECK(parse_variant(to_string(k)) == k);
    }
    CHECK_THROWS_AS(parse_variant("erase"), InvalidInput);
}

TEST_CASE("Concept invariants") {
    CHECK_THROWS_AS(Concept(""), InvalidInput);
    CHECK_THROWS_AS(Concept("{concept}"), InvalidInput);
    CHECK_THROWS_AS(Concept("van  Gogh"), InvalidInput);
    CHECK_THROWS_AS(Concept(" panda"), InvalidInput);
    CHECK_THROWS_AS(Concept("panda "), InvalidInput);
    CHECK_THROWS_AS(Concept("pan\tda"), InvalidInput);
    CHECK_THROWS_AS(Concept("panda", "a photo"), InvalidInput);
    CHECK_THROWS_AS(Concept("panda", "{concept} and {concept}"), InvalidInput);

    const Concept c("Vincent van Gogh");
    CHECK(c.words() == std::vector<std::string>{"Vincent", "van", "Gogh"});
    CHECK(c.anchor_text() == "a photo of Vincent van Gogh");
    CHECK(Concept("panda", "a painting of {concept}").anchor_text() == "a painting of panda");
}

TEST_CASE("template overrides are checked against the instruction-word rules") {
    PromptTemplates t;
    CHECK_THROWS_AS(t.set(VariantKind::Unlearn, "Please draw {concept}."), InvalidInput);
    CHECK_THROWS_AS(t.set(VariantKind::Baseline, "Forget {concept}."), InvalidInput);
    CHECK_THROWS_AS(t.set(VariantKind::RepeatControl, "{concept}, anything goes"), InvalidInput);
    CHECK_THROWS_AS(t.set(VariantKind::Negation, "no concept here"), InvalidInput);
    t.set(VariantKind::Unlearn, "Forget {concept}. Draw {concept}.");
    CHECK(build_prompt(Concept("cat"), VariantKind::Unlearn, t).text == "Forget cat. Draw cat.");
    CHECK_FALSE(t.is_default(VariantKind::Unlearn));
    CHECK(t.is_default(VariantKind::Baseline));
}

TEST_CASE("default templates satisfy the variant invariants") {
    const PromptTemplates t;
    const auto words = default_instruction_words();
    CHECK(contains_any_word(t.get(VariantKind::Unlearn), words));
    CHECK_FALSE(contains_any_word(t.get(VariantKind::Baseline), words));
    CHECK_FALSE(contains_any_word(t.get(VariantKind::RepeatControl), words));
    for (VariantKind k : kAllVariants) {
        CHECK(t.get(k).find("{concept}") != std::string::npos);
    }
}

TEST_CASE("annotate_spans on a single-token concept") {
    PromptRecord r{Concept("panda"), VariantKind::Baseline, "a photo of panda", {}, {}, {}};
    const std::vector<TokenPiece> toks{{10, 0, 1}, {11, 2, 7}, {12, 8, 10}, {13, 11, 16}};
    const auto a = annotate_spans(r, toks);
    CHECK(a.token_ids == std::vector<std::uint32_t>{10, 11, 12, 13});
    CHECK(a.concept_span == std::vector<std::uint32_t>{3});
    CHECK(a.instruction_span.empty());
}

TEST_CASE("annotate_spans marks every occurrence") {
    PromptRecord r{Concept("panda"), VariantKind::Unlearn, "forget panda panda", {}, {}, {}};
    const std::vector<TokenPiece> toks{{1, 0, 6}, {2, 7, 12}, {2, 13, 18}};
    const auto a = annotate_spans(r, toks);
    CHECK(a.concept_span == std::vector<std::uint32_t>{1, 2});
    CHECK(a.instruction_span == std::vector<std::uint32_t>{0});
}

TEST_CASE("annotate_spans with subword pieces of the concept") {
    // Ranges worked out by hand:
    // Please[0,6) forget[7,13) anything[14,22) about[23,28) Van[29,32) Go[33,35) gh[35,37)
    PromptRecord r{Concept("Van Gogh"), VariantKind::Unlearn, "Please forget anything about Van Gogh", {}, {}, {}};
    const std::vector<TokenPiece> toks{{0, 0, 6},   {1, 7, 13},  {2, 14, 22}, {3, 23, 28},
                                       {4, 29, 32}, {5, 33, 35}, {6, 35, 37}};
    const auto a = annotate_spans(r, toks);
    CHECK(a.concept_span == std::vector<std::uint32_t>{4, 5, 6});
    CHECK(a.instruction_span == std::vector<std::uint32_t>{1, 2});
}

TEST_CASE("annotate_spans matches case-insensitively on word boundaries") {
    PromptRecord r{Concept("Panda"), VariantKind::Unlearn, "FORGET pandas, panda.", {}, {}, {}};
    const auto a = annotate_spans(r, simple_tokenize(r.text));
    // tokens: FORGET pandas , panda .
    CHECK(a.concept_span == std::vector<std::uint32_t>{3});
    CHECK(a.instruction_span == std::vector<std::uint32_t>{0});
}

TEST_CASE("annotate_spans rejects malformed tokenizations") {
    PromptRecord r{Concept("panda"), VariantKind::Baseline, "a photo of panda", {}, {}, {}};
    CHECK_THROWS_AS(annotate_spans(r, {}), MalformedTokenization);
    // "panda" left uncovered
    CHECK_THROWS_AS(annotate_spans(r, {{0, 0, 1}, {1, 2, 7}, {2, 8, 10}}), MalformedTokenization);
    // overlapping
    CHECK_THROWS_AS(annotate_spans(r, {{0, 0, 1}, {1, 0, 7}, {2, 8, 10}, {3, 11, 16}}), MalformedTokenization);
    // out of order
    CHECK_THROWS_AS(annotate_spans(r, {{3, 11, 16}, {0, 0, 1}, {1, 2, 7}, {2, 8, 10}}), MalformedTokenization);
    // past the end
    CHECK_THROWS_AS(annotate_spans(r, {{0, 0, 1}, {1, 2, 7}, {2, 8, 10}, {3, 11, 17}}), MalformedTokenization);
    // empty range
    CHECK_THROWS_AS(annotate_spans(r, {{0, 0, 0}, {0, 0, 1}, {1, 2, 7}, {2, 8, 10}, {3, 11, 16}}),
                    MalformedTokenization);
}

TEST_CASE("ablate_tokens examples") {
    const Concept panda("panda");
    const auto base = build_prompt(panda, VariantKind::Baseline);
    CHECK(ablate_tokens(base, AblationTarget::InstructionTokens).text == base.text);

    PromptRecord unl{panda, VariantKind::Unlearn,
                     "Please forget anything about panda. Please help me generate a picture of panda.", {}, {}, {}};
    const auto ablated = ablate_tokens(unl, AblationTarget::InstructionTokens);
    CHECK(ablated.text == "Please about panda. Please help me generate a picture of panda.");
    CHECK(unl.text == "Please forget anything about panda. Please help me generate a picture of panda.");

    PromptRecord anchor{panda, std::nullopt, "a photo of panda", {}, {}, {}};
    CHECK(ablate_tokens(anchor, AblationTarget::ConceptTokens).text == "a photo of");
}

TEST_CASE("ablate_tokens removes every word of a multi-word concept") {
    const auto p = build_prompt(Concept("Vincent van Gogh"), VariantKind::Baseline);
    CHECK(ablate_tokens(p, AblationTarget::ConceptTokens).text == "Please help me generate a picture of .");
}

TEST_CASE("ablate_tokens drops stale annotations") {
    auto p = build_prompt(Concept("panda"), VariantKind::Unlearn);
    p = annotate_spans(p, simple_tokenize(p.text));
    REQUIRE(p.annotated());
    const auto a = ablate_tokens(p, AblationTarget::ConceptTokens);
    CHECK_FALSE(a.annotated());
    CHECK(a.concept_span.empty());
}

TEST_CASE("remove_words with an empty list is the identity, even on irregular spacing") {
    CHECK(remove_words("  a   photo of  panda ", {}) == "  a   photo of  panda ");
    CHECK(remove_words("a photo", {"zebra"}) == "a photo");
}

TEST_CASE("simple_tokenize splits words and punctuation") {
    const std::string text = "Please forget Van Gogh's art, ok.";
    const auto toks = simple_tokenize(text);
    std::vector<std::string> pieces;
    for (const auto& t : toks) {
        pieces.push_back(text.substr(t.begin, t.end - t.begin));
    }
    CHECK(pieces == std::vector<std::string>{"Please", "forget", "Van", "Gogh's", "art", ",", "ok", "."});
    CHECK(simple_tokenize("Panda")[0].id == simple_tokenize("panda")[0].id);
}

TEST_CASE("prompt-suite properties over random concepts, kinds and tokenizations") {
    std::mt19937_64 rng(42);
    const auto words = default_instruction_words();
    for (int iter = 0; iter < 400; ++iter) {
        const Concept c(kNames[rng() % kNames.size()]);
        const VariantKind k = kAllVariants[rng() % kAllVariants.size()];
        CAPTURE(c.name());
        CAPTURE(to_string(k));

        const auto p1 = build_prompt(c, k);
        const auto p2 = build_prompt(c, k);
        CHECK(p1.text == p2.text);
        CHECK(p1.text.find(c.name()) != std::string::npos);

        const auto toks = (iter % 2 == 0) ? simple_tokenize(p1.text) : random_subword_tokenization(p1.text, rng);
        const auto a = annotate_spans(p1, toks);
        CHECK_FALSE(a.concept_span.empty());
        std::set<std::uint32_t> both(a.concept_span.begin(), a.concept_span.end());
        for (auto i : a.instruction_span) {
            CHECK(both.insert(i).second);
        }
        CHECK(both.size() <= a.token_ids.size());
        for (auto i : both) {
            CHECK(i < a.token_ids.size());
        }
        if (k == VariantKind::Baseline || k == VariantKind::RepeatControl) {
            CHECK(a.instruction_span.empty());
        }
        if (k == VariantKind::Unlearn) {
            CHECK_FALSE(a.instruction_span.empty());
        }

        for (AblationTarget t : {AblationTarget::ConceptTokens, AblationTarget::InstructionTokens}) {
            const auto once = ablate_tokens(p1, t, words);
            const auto twice = ablate_tokens(once, t, words);
            CHECK(once.text == twice.text);
        }
        CHECK(remove_words(p1.text, {}) == p1.text);
    }
}
