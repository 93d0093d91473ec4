#include "unlearn_audit/embedding_probe.hpp"

#include <algorithm>

#include "unlearn_audit/errors.hpp"

namespace unlearn_audit {

bool unlearning_criterion(double sim_unlearn, double sim_baseline) {
    return sim_unlearn < sim_baseline;
}

double ablation_effect(double sim_original, double sim_ablated) {
    return sim_original - sim_ablated;
}

namespace {

struct ConceptResult {
    std::vector<SimilarityRecord> records;
    std::vector<AblationRecord> ablations;
};

EmbeddingVector encode_or_abort(DiffusionAdapter& encoder, const PromptRecord& prompt) {
    const std::string variant = prompt.kind ? std::string(to_string(*prompt.kind)) : "anchor";
    try {
        return encoder.encode_text(prompt);
    } catch (const std::exception& e) {
        throw ProbeAbort("text", prompt.concept_info.name(), variant, "",
                         "encoding prompt '" + prompt.text + "' failed: " + e.what());
    }
}

double similarity_or_abort(const EmbeddingVector& v, const EmbeddingVector& anchor, const PromptRecord& prompt) {
    try {
        return cosine(v, anchor);
    } catch (const std::exception& e) {
        const std::string variant = prompt.kind ? std::string(to_string(*prompt.kind)) : "anchor";
        throw ProbeAbort("text", prompt.concept_info.name(), variant, "",
                         "prompt '" + prompt.text + "': " + e.what());
    }
}

ConceptResult probe_concept(const Concept& concept_info, DiffusionAdapter& encoder, const ProbeSettings& settings) {
    ConceptResult out;
    const EmbeddingVector anchor = encode_or_abort(encoder, build_anchor(concept_info));

    std::vector<PromptRecord> prompts;
    for (VariantKind k : settings.variants) {
        PromptRecord p = build_prompt(concept_info, k, settings.templates);
        const double sim = similarity_or_abort(encode_or_abort(encoder, p), anchor, p);
        out.records.push_back({concept_info.name(), k, p.text, sim, std::nullopt});
        prompts.push_back(std::move(p));
    }
    const auto base = std::find_if(out.records.begin(), out.records.end(),
                                   [](const SimilarityRecord& r) { return r.kind == VariantKind::Baseline; });
    for (auto& r : out.records) {
        if (r.kind != VariantKind::Baseline) {
            r.delta_vs_baseline = r.similarity - base->similarity;
        }
    }

    for (std::size_t i = 0; i < prompts.size(); ++i) {
        const VariantKind k = settings.variants[i];
        if (std::find(settings.ablation_variants.begin(), settings.ablation_variants.end(), k) ==
            settings.ablation_variants.end()) {
            continue;
        }
        for (AblationTarget target : {AblationTarget::ConceptTokens, AblationTarget::InstructionTokens}) {
            const PromptRecord ablated = ablate_tokens(prompts[i], target, settings.instruction_words);
            AblationRecord a;
            a.concept_name = concept_info.name();
            a.kind = k;
            a.target = target;
            a.ablated_prompt = ablated.text;
            a.similarity_original = out.records[i].similarity;
            a.similarity_ablated = similarity_or_abort(encode_or_abort(encoder, ablated), anchor, ablated);
            a.effect = ablation_effect(a.similarity_original, a.similarity_ablated);
            out.ablations.push_back(std::move(a));
        }
    }
    return out;
}

}  // namespace

TextProbeResult run_text_probe(const std::vector<Concept>& concepts, DiffusionAdapter& encoder,
                               const ProbeSettings& settings) {
    settings.validate();
    if (concepts.empty()) {
        throw EmptySample("text probe: no concepts");
    }
    std::vector<ConceptResult> per_concept(concepts.size());
    const std::size_t workers = encoder.reentrant() ? settings.workers : 1;
    detail::parallel_for(concepts.size(), workers,
                         [&](std::size_t i) { per_concept[i] = probe_concept(concepts[i], encoder, settings); });

    TextProbeResult result;
    for (auto& c : per_concept) {
        std::move(c.records.begin(), c.records.end(), std::back_inserter(result.records));
        std::move(c.ablations.begin(), c.ablations.end(), std::back_inserter(result.ablations));
    }

    for (VariantKind k : settings.variants) {
        std::vector<double> sims, deltas;
        for (const auto& r : result.records) {
            if (r.kind == k) {
                sims.push_back(r.similarity);
                if (r.delta_vs_baseline) {
                    deltas.push_back(*r.delta_vs_baseline);
                }
            }
        }
        result.similarity_stats.emplace_back(k, summarize(sims));
        if (k != VariantKind::Baseline) {
            result.delta_stats.emplace_back(k, summarize(deltas));
        }
    }
    for (VariantKind k : settings.variants) {
        for (AblationTarget target : {AblationTarget::ConceptTokens, AblationTarget::InstructionTokens}) {
            std::vector<double> effects;
            for (const auto& a : result.ablations) {
                if (a.kind == k && a.target == target) {
                    effects.push_back(a.effect);
                }
            }
            if (!effects.empty()) {
                result.ablation_stats.push_back({k, target, summarize(effects)});
            }
        }
    }
    return result;
}

}  // namespace unlearn_audit
