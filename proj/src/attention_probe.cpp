#include "unlearn_audit/attention_probe.hpp"

#include <algorithm>

#include "unlearn_audit/errors.hpp"

namespace unlearn_audit {

AucRecord summarize_trace(const AttentionTrace& trace, MassCurves* curves) {
    trace.validate();
    AucRecord r;
    r.concept_name = trace.concept_name;
    r.kind = trace.kind;
    auto concept_curve = mass_curve(trace, trace.concept_span);
    auto instruction_curve = mass_curve(trace, trace.instruction_span);
    r.auc_concept = auc(concept_curve);
    r.auc_instruction = auc(instruction_curve);
    if (curves != nullptr) {
        *curves = MassCurves{trace.concept_name,  trace.kind,
                             trace.tokens,        trace.concept_span,
                             trace.instruction_span, std::move(concept_curve),
                             std::move(instruction_curve)};
    }
    return r;
}

namespace {

struct ConceptResult {
    std::vector<AucRecord> records;
    std::vector<MassCurves> curves;
    std::string aggregation;
};

ConceptResult probe_concept(const Concept& concept_info, DiffusionAdapter& adapter, const ProbeSettings& settings) {
    ConceptResult out;
    const std::string seed = std::to_string(settings.base_seed);
    for (VariantKind k : settings.variants) {
        const PromptRecord prompt = build_prompt(concept_info, k, settings.templates);
        const std::string variant(to_string(k));
        AttentionTrace trace;
        try {
            trace = adapter.generate(prompt, settings.base_seed, settings.steps).trace;
        } catch (const std::exception& e) {
            throw ProbeAbort("attention", concept_info.name(), variant, seed,
                             "prompt '" + prompt.text + "': " + e.what());
        }
        try {
            if (trace.steps == 0) {
                throw MalformedTrace("adapter returned no trace");
            }
            if (trace.concept_name != concept_info.name() || trace.kind != k) {
                throw MalformedTrace("trace is labelled ('" + trace.concept_name + "', " +
                                     std::string(to_string(trace.kind)) + ")");
            }
            if (trace.steps != settings.steps) {
                throw MalformedTrace("trace has " + std::to_string(trace.steps) + " steps, expected " +
                                     std::to_string(settings.steps));
            }
            if (trace.concept_span.empty()) {
                throw MalformedTrace("trace has an empty concept span");
            }
            MassCurves curves;
            out.records.push_back(summarize_trace(trace, &curves));
            out.curves.push_back(std::move(curves));
            if (out.aggregation.empty()) {
                out.aggregation = trace.aggregation;
            }
        } catch (const std::exception& e) {
            throw ProbeAbort("attention", concept_info.name(), variant, seed, e.what());
        }
    }
    const auto base = std::find_if(out.records.begin(), out.records.end(),
                                   [](const AucRecord& r) { return r.kind == VariantKind::Baseline; });
    for (auto& r : out.records) {
        if (r.kind != VariantKind::Baseline) {
            r.delta_auc_vs_baseline = r.auc_concept - base->auc_concept;
        }
    }
    return out;
}

}  // namespace

AttentionProbeResult run_attention_probe(const std::vector<Concept>& concepts, DiffusionAdapter& adapter,
                                         const ProbeSettings& settings) {
    settings.validate();
    if (concepts.empty()) {
        throw EmptySample("attention probe: no concepts");
    }
    std::vector<ConceptResult> per_concept(concepts.size());
    const std::size_t workers = adapter.reentrant() ? settings.workers : 1;
    detail::parallel_for(concepts.size(), workers,
                         [&](std::size_t i) { per_concept[i] = probe_concept(concepts[i], adapter, settings); });

    AttentionProbeResult result;
    result.steps = settings.steps;
    result.seed = settings.base_seed;
    result.aggregation = per_concept.front().aggregation;
    for (auto& c : per_concept) {
        std::move(c.records.begin(), c.records.end(), std::back_inserter(result.records));
        std::move(c.curves.begin(), c.curves.end(), std::back_inserter(result.curves));
    }
    for (VariantKind k : settings.variants) {
        std::vector<double> concept_auc, instruction_auc, deltas;
        for (const auto& r : result.records) {
            if (r.kind == k) {
                concept_auc.push_back(r.auc_concept);
                instruction_auc.push_back(r.auc_instruction);
                if (r.delta_auc_vs_baseline) {
                    deltas.push_back(*r.delta_auc_vs_baseline);
                }
            }
        }
        result.auc_concept_stats.emplace_back(k, summarize(concept_auc));
        result.auc_instruction_stats.emplace_back(k, summarize(instruction_auc));
        if (k != VariantKind::Baseline) {
            result.delta_auc_stats.emplace_back(k, summarize(deltas));
        }
    }
    return result;
}

}  // namespace unlearn_audit
