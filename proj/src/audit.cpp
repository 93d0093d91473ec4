#include "unlearn_audit/audit.hpp"

#include <algorithm>

#include "unlearn_audit/errors.hpp"
#include "unlearn_audit/hashing.hpp"

namespace unlearn_audit {

namespace {

bool stand_in_wording(VariantKind k) {
    return k == VariantKind::Negation || k == VariantKind::RepeatControl;
}

nlohmann::ordered_json build_metadata(const AuditConfig& config, DiffusionAdapter& adapter) {
    nlohmann::ordered_json m;
    m["tool"] = "unlearn-audit";
    m["tool_version"] = kToolVersion;
    m["config"] = config_to_json(config);
    m["adapter"] = adapter.metadata();
    m["adapter_reentrant"] = adapter.reentrant();

    nlohmann::ordered_json templates;
    for (VariantKind k : kAllVariants) {
        const bool is_default = config.settings.templates.is_default(k);
        templates[std::string(to_string(k))] = {
            {"template", config.settings.templates.get(k)},
            {"default", is_default},
            {"stand_in", is_default && stand_in_wording(k)},
        };
    }
    m["templates"] = templates;

    nlohmann::ordered_json prompts = nlohmann::ordered_json::array();
    for (const auto& c : config.concepts) {
        nlohmann::ordered_json variants;
        for (VariantKind k : config.settings.variants) {
            variants[std::string(to_string(k))] = build_prompt(c, k, config.settings.templates).text;
        }
        prompts.push_back({{"concept", c.name()}, {"anchor", c.anchor_text()}, {"variants", variants}});
    }
    m["prompts"] = prompts;

    const auto defaults = default_concept_names();
    bool default_list = config.concepts.size() == defaults.size();
    for (std::size_t i = 0; default_list && i < defaults.size(); ++i) {
        default_list = config.concepts[i].name() == defaults[i];
    }
    m["protocol"] = {
        {"text_embedding", "single pooled encoder vector per prompt, unit-normalized"},
        {"ablation", "word-level removal from the prompt string, whitespace collapsed, then re-encoded"},
        {"median", "mean of the two middle order statistics for even counts"},
        {"seed_schedule", "base_seed + sample index, shared by every variant of a concept"},
        {"attention_aggregation", kAggregationDescription},
        {"attention_branch", "conditional (prompted) branch only"},
        {"special_tokens", "kept in the distribution, excluded from concept and instruction spans"},
        {"concept_list", default_list ? "default stand-in list" : "configured"},
    };
    return m;
}

}  // namespace

AuditReport run_audit(const AuditConfig& config) {
    auto adapter = make_adapter(config);
    return run_audit(config, *adapter);
}

AuditReport run_audit(const AuditConfig& config, DiffusionAdapter& adapter) {
    ProbeSettings settings = config.settings;
    if (config.save_images) {
        settings.image_dump_dir = config.output_dir / "images";
    }

    AuditReport report;
    report.metadata = build_metadata(config, adapter);
    if (config.runs(Probe::Text)) {
        report.text = run_text_probe(config.concepts, adapter, settings);
        report.criterion = criterion_table(*report.text);
    }
    if (config.runs(Probe::Image)) {
        report.image = run_image_probe(config.concepts, adapter, settings);
    }
    if (config.runs(Probe::Attention)) {
        report.attention = run_attention_probe(config.concepts, adapter, settings);
    }

    const auto issues = check_consistency(report);
    if (!issues.empty()) {
        std::string msg = "report failed its self-consistency check:";
        for (const auto& i : issues) {
            msg += "\n  " + i;
        }
        throw AuditError(msg);
    }
    return report;
}

nlohmann::ordered_json plan_prompts(const AuditConfig& config) {
    const auto& s = config.settings;
    nlohmann::ordered_json out = nlohmann::ordered_json::array();
    auto entry = [&](const Concept& c, const std::string& role, const std::string& text,
                     std::vector<std::uint64_t> seeds) {
        out.push_back({{"concept", c.name()},
                       {"role", role},
                       {"text", text},
                       {"prompt_hash", prompt_hash(text)},
                       {"image_seeds", std::move(seeds)}});
    };
    std::vector<std::uint64_t> image_seeds;
    if (config.runs(Probe::Image)) {
        for (std::size_t k = 0; k < s.samples; ++k) {
            image_seeds.push_back(s.base_seed + k);
        }
    } else if (config.runs(Probe::Attention)) {
        image_seeds.push_back(s.base_seed);
    }
    for (const auto& c : config.concepts) {
        entry(c, "anchor", c.anchor_text(), {});
        for (VariantKind k : s.variants) {
            const PromptRecord p = build_prompt(c, k, s.templates);
            entry(c, std::string(to_string(k)), p.text, image_seeds);
            if (config.runs(Probe::Text) &&
                std::find(s.ablation_variants.begin(), s.ablation_variants.end(), k) != s.ablation_variants.end()) {
                for (AblationTarget t : {AblationTarget::ConceptTokens, AblationTarget::InstructionTokens}) {
                    entry(c, std::string(to_string(k)) + "/ablate_" + std::string(to_string(t)),
                          ablate_tokens(p, t, s.instruction_words).text, {});
                }
            }
        }
    }
    return out;
}

std::vector<PromptRecord> validation_prompts(const AuditConfig& config) {
    if (config.concepts.empty()) {
        return {};
    }
    const Concept& c = config.concepts.front();
    std::vector<PromptRecord> out;
    for (VariantKind k : {VariantKind::Baseline, VariantKind::Unlearn}) {
        out.push_back(build_prompt(c, k, config.settings.templates));
    }
    return out;
}

}  // namespace unlearn_audit
