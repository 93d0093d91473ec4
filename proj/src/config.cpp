#include "unlearn_audit/config.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <mutex>
#include <set>

#include "unlearn_audit/errors.hpp"

namespace unlearn_audit {

using nlohmann::json;

std::string_view to_string(Probe probe) {
    switch (probe) {
        case Probe::Text:
            return "text";
        case Probe::Image:
            return "image";
        case Probe::Attention:
            return "attn";
    }
    return "?";
}

Probe parse_probe(std::string_view name) {
    for (Probe p : {Probe::Text, Probe::Image, Probe::Attention}) {
        if (to_string(p) == name) {
            return p;
        }
    }
    throw InvalidInput("unknown probe '" + std::string(name) + "' (expected text, image or attn)");
}

bool AuditConfig::runs(Probe p) const {
    return std::find(probes.begin(), probes.end(), p) != probes.end();
}

std::vector<std::string> default_concept_names() {
    return {
        "Vincent van Gogh", "panda",       "Pablo Picasso", "Claude Monet", "Albert Einstein",
        "Eiffel Tower",     "golden retriever", "sports car", "Mickey Mouse", "cherry blossom",
    };
}

namespace {

void reject_unknown(const json& obj, const std::string& prefix, std::initializer_list<const char*> allowed) {
    if (!obj.is_object()) {
        throw ConfigError(prefix.empty() ? "<root>" : prefix, "must be an object");
    }
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return it.key() == a; })) {
            throw ConfigError(prefix.empty() ? it.key() : prefix + "." + it.key(), "unknown key");
        }
    }
}

template <class T>
T get_as(const json& v, const std::string& key) {
    try {
        return v.get<T>();
    } catch (const json::exception& e) {
        throw ConfigError(key, std::string("wrong type: ") + e.what());
    }
}

double get_number(const json& v, const std::string& key) {
    if (!v.is_number()) {
        throw ConfigError(key, "must be a number");
    }
    return v.get<double>();
}

std::size_t get_count(const json& v, const std::string& key) {
    if (!v.is_number_integer()) {
        throw ConfigError(key, "must be an integer");
    }
    if (v.get<long long>() < 1) {
        throw ConfigError(key, "must be at least 1");
    }
    return v.get<std::size_t>();
}

VariantKind variant_key(const std::string& name, const std::string& key) {
    try {
        return parse_variant(name);
    } catch (const InvalidInput& e) {
        throw ConfigError(key, e.what());
    }
}

std::map<VariantKind, double> per_variant_numbers(const json& obj, const std::string& key) {
    if (!obj.is_object()) {
        throw ConfigError(key, "must map variant names to numbers");
    }
    std::map<VariantKind, double> out;
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        const std::string k = key + "." + it.key();
        out[variant_key(it.key(), k)] = get_number(it.value(), k);
    }
    return out;
}

MockConfig parse_mock(const json& obj, std::string& preset, const std::vector<std::string>& instruction_words) {
    reject_unknown(obj, "mock",
                   {"preset", "dimension", "dominance", "image_dominance", "noise", "concept_mass",
                    "instruction_mass", "instruction_words"});
    MockConfig m;
    if (obj.contains("preset")) {
        preset = get_as<std::string>(obj["preset"], "mock.preset");
        if (preset == "reference") {
            m = reference_preset();
        } else {
            throw ConfigError("mock.preset", "unknown preset '" + preset + "' (known: reference)");
        }
    }
    if (obj.contains("dimension")) {
        m.dimension = get_count(obj["dimension"], "mock.dimension");
    }
    if (obj.contains("dominance")) {
        for (auto [k, v] : per_variant_numbers(obj["dominance"], "mock.dominance")) {
            m.dominance[k] = v;
        }
    }
    if (obj.contains("image_dominance")) {
        for (auto [k, v] : per_variant_numbers(obj["image_dominance"], "mock.image_dominance")) {
            m.image_dominance[k] = v;
        }
    }
    if (obj.contains("noise")) {
        m.noise = get_number(obj["noise"], "mock.noise");
    }
    if (obj.contains("instruction_mass")) {
        m.instruction_mass = get_number(obj["instruction_mass"], "mock.instruction_mass");
    }
    if (obj.contains("concept_mass")) {
        const json& cm = obj["concept_mass"];
        if (!cm.is_object()) {
            throw ConfigError("mock.concept_mass", "must map variant names to schedules");
        }
        for (auto it = cm.begin(); it != cm.end(); ++it) {
            const std::string key = "mock.concept_mass." + it.key();
            const VariantKind k = variant_key(it.key(), key);
            if (it.value().is_number()) {
                m.concept_mass[k] = MassSchedule::constant(it.value().get<double>());
            } else {
                reject_unknown(it.value(), key, {"start", "end"});
                if (!it.value().contains("start") || !it.value().contains("end")) {
                    throw ConfigError(key, "linear schedule needs 'start' and 'end'");
                }
                m.concept_mass[k] = MassSchedule::linear(get_number(it.value()["start"], key + ".start"),
                                                         get_number(it.value()["end"], key + ".end"));
            }
        }
    }
    // Echoed configs carry the words here too; they must agree with the top level.
    if (obj.contains("instruction_words") &&
        get_as<std::vector<std::string>>(obj["instruction_words"], "mock.instruction_words") != instruction_words) {
        throw ConfigError("mock.instruction_words", "must match the top-level instruction_words");
    }
    m.instruction_words = instruction_words;
    m.validate();
    return m;
}

}  // namespace

AuditConfig parse_config(const json& doc, const std::filesystem::path& base_dir) {
    reject_unknown(doc, "",
                   {"concepts", "variants", "templates", "instruction_words", "ablation_variants", "K", "S",
                    "base_seed", "adapter", "adapter_options", "output_dir", "probes", "workers", "save_images",
                    "mock", "external"});
    AuditConfig c;
    ProbeSettings& s = c.settings;

    if (doc.contains("instruction_words")) {
        s.instruction_words = get_as<std::vector<std::string>>(doc["instruction_words"], "instruction_words");
        if (s.instruction_words.empty()) {
            throw ConfigError("instruction_words", "must not be empty");
        }
    }

    const json concepts = doc.contains("concepts") ? doc["concepts"] : json(default_concept_names());
    if (!concepts.is_array() || concepts.empty()) {
        throw ConfigError("concepts", "must be a non-empty list");
    }
    std::set<std::string> seen;
    for (std::size_t i = 0; i < concepts.size(); ++i) {
        const std::string key = "concepts[" + std::to_string(i) + "]";
        const json& e = concepts[i];
        try {
            if (e.is_string()) {
                c.concepts.emplace_back(e.get<std::string>());
            } else {
                reject_unknown(e, key, {"name", "anchor_template"});
                if (!e.contains("name")) {
                    throw ConfigError(key + ".name", "missing");
                }
                c.concepts.emplace_back(get_as<std::string>(e["name"], key + ".name"),
                                        e.contains("anchor_template")
                                            ? get_as<std::string>(e["anchor_template"], key + ".anchor_template")
                                            : std::string("a photo of {concept}"));
            }
        } catch (const InvalidInput& err) {
            throw ConfigError(key, err.what());
        }
        if (!seen.insert(c.concepts.back().name()).second) {
            throw ConfigError(key, "duplicate concept '" + c.concepts.back().name() + "'");
        }
        if (contains_any_word(c.concepts.back().name(), s.instruction_words)) {
            throw ConfigError(key, "concept name overlaps the instruction words");
        }
    }

    if (doc.contains("variants")) {
        s.variants.clear();
        const auto names = get_as<std::vector<std::string>>(doc["variants"], "variants");
        for (const auto& n : names) {
            const VariantKind k = variant_key(n, "variants");
            if (std::find(s.variants.begin(), s.variants.end(), k) != s.variants.end()) {
                throw ConfigError("variants", "'" + n + "' listed twice");
            }
            s.variants.push_back(k);
        }
        if (std::find(s.variants.begin(), s.variants.end(), VariantKind::Baseline) == s.variants.end()) {
            throw ConfigError("variants", "must include baseline");
        }
    }
    if (doc.contains("ablation_variants")) {
        s.ablation_variants.clear();
        for (const auto& n : get_as<std::vector<std::string>>(doc["ablation_variants"], "ablation_variants")) {
            s.ablation_variants.push_back(variant_key(n, "ablation_variants"));
        }
    }
    if (doc.contains("templates")) {
        const json& t = doc["templates"];
        if (!t.is_object()) {
            throw ConfigError("templates", "must map variant names to templates");
        }
        for (auto it = t.begin(); it != t.end(); ++it) {
            const std::string key = "templates." + it.key();
            try {
                s.templates.set(variant_key(it.key(), key), get_as<std::string>(it.value(), key), s.instruction_words);
            } catch (const InvalidInput& err) {
                throw ConfigError(key, err.what());
            }
        }
    } else {
        // Defaults must still satisfy the rules under custom instruction words.
        for (VariantKind k : kAllVariants) {
            try {
                s.templates.set(k, PromptTemplates::default_template(k), s.instruction_words);
            } catch (const InvalidInput& err) {
                throw ConfigError("instruction_words", err.what());
            }
        }
    }

    if (doc.contains("K")) {
        s.samples = get_count(doc["K"], "K");
    }
    if (doc.contains("S")) {
        s.steps = get_count(doc["S"], "S");
    }
    if (doc.contains("base_seed")) {
        if (!doc["base_seed"].is_number_unsigned()) {
            throw ConfigError("base_seed", "must be a non-negative integer");
        }
        s.base_seed = doc["base_seed"].get<std::uint64_t>();
    }
    if (doc.contains("workers")) {
        s.workers = get_count(doc["workers"], "workers");
    }
    if (doc.contains("probes")) {
        c.probes.clear();
        for (const auto& n : get_as<std::vector<std::string>>(doc["probes"], "probes")) {
            try {
                c.probes.push_back(parse_probe(n));
            } catch (const InvalidInput& err) {
                throw ConfigError("probes", err.what());
            }
        }
        if (c.probes.empty()) {
            throw ConfigError("probes", "must name at least one probe");
        }
    }
    if (doc.contains("output_dir")) {
        c.output_dir = get_as<std::string>(doc["output_dir"], "output_dir");
    }
    if (doc.contains("save_images")) {
        c.save_images = get_as<bool>(doc["save_images"], "save_images");
    }

    if (doc.contains("adapter")) {
        c.adapter = get_as<std::string>(doc["adapter"], "adapter");
        if (c.adapter.empty()) {
            throw ConfigError("adapter", "must not be empty");
        }
    }
    if (doc.contains("adapter_options")) {
        if (!doc["adapter_options"].is_object()) {
            throw ConfigError("adapter_options", "must be an object");
        }
        c.adapter_options = nlohmann::ordered_json::parse(doc["adapter_options"].dump());
    }

    c.mock = parse_mock(doc.contains("mock") ? doc["mock"] : json::object(), c.mock_preset, s.instruction_words);
    if (doc.contains("mock") && c.adapter != "mock") {
        throw ConfigError("mock", "only valid with adapter = mock");
    }

    if (doc.contains("external")) {
        const json& e = doc["external"];
        reject_unknown(e, "external", {"embeddings", "traces_dir", "metadata"});
        auto resolve = [&](const std::string& key) -> std::filesystem::path {
            if (!e.contains(key)) {
                return {};
            }
            std::filesystem::path p = get_as<std::string>(e[key], "external." + key);
            return p.is_relative() && !base_dir.empty() ? base_dir / p : p;
        };
        c.external.embeddings = resolve("embeddings");
        c.external.traces_dir = resolve("traces_dir");
        if (e.contains("metadata")) {
            c.external.metadata = nlohmann::ordered_json::parse(e["metadata"].dump());
        }
    }
    if (c.adapter == "external-trace" && c.external.embeddings.empty() && c.external.traces_dir.empty()) {
        throw ConfigError("external", "adapter external-trace needs 'embeddings' and/or 'traces_dir'");
    }
    return c;
}

AuditConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ConfigError("", "cannot open config file " + path.string());
    }
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("", path.string() + ": parse error: " + e.what());
    }
    return parse_config(doc, path.parent_path());
}

nlohmann::ordered_json config_to_json(const AuditConfig& c) {
    nlohmann::ordered_json j;
    j["concepts"] = nlohmann::ordered_json::array();
    for (const auto& concept_info : c.concepts) {
        j["concepts"].push_back({{"name", concept_info.name()}, {"anchor_template", concept_info.anchor_template()}});
    }
    j["variants"] = nlohmann::ordered_json::array();
    for (VariantKind k : c.settings.variants) {
        j["variants"].push_back(std::string(to_string(k)));
    }
    nlohmann::ordered_json templates;
    for (VariantKind k : kAllVariants) {
        templates[std::string(to_string(k))] = c.settings.templates.get(k);
    }
    j["templates"] = templates;
    j["instruction_words"] = c.settings.instruction_words;
    j["ablation_variants"] = nlohmann::ordered_json::array();
    for (VariantKind k : c.settings.ablation_variants) {
        j["ablation_variants"].push_back(std::string(to_string(k)));
    }
    j["K"] = c.settings.samples;
    j["S"] = c.settings.steps;
    j["base_seed"] = c.settings.base_seed;
    j["probes"] = nlohmann::ordered_json::array();
    for (Probe p : c.probes) {
        j["probes"].push_back(std::string(to_string(p)));
    }
    j["workers"] = c.settings.workers;
    j["adapter"] = c.adapter;
    j["adapter_options"] = c.adapter_options;
    j["output_dir"] = c.output_dir.generic_string();
    j["save_images"] = c.save_images;
    if (c.adapter == "mock") {
        j["mock"] = c.mock.to_json();
        if (!c.mock_preset.empty()) {
            j["mock"]["preset"] = c.mock_preset;
        }
    }
    if (c.adapter == "external-trace") {
        j["external"] = {{"embeddings", c.external.embeddings.generic_string()},
                         {"traces_dir", c.external.traces_dir.generic_string()},
                         {"metadata", c.external.metadata}};
    }
    return j;
}

namespace {

std::mutex& registry_mutex() {
    static std::mutex mu;
    return mu;
}

std::map<std::string, AdapterFactory>& registry() {
    static std::map<std::string, AdapterFactory> r;
    return r;
}

}  // namespace

void register_adapter(const std::string& name, AdapterFactory factory) {
    std::lock_guard<std::mutex> lock(registry_mutex());
    registry()[name] = std::move(factory);
}

std::unique_ptr<DiffusionAdapter> make_adapter(const AuditConfig& config) {
    try {
        if (config.adapter == "mock") {
            return std::make_unique<MockAdapter>(config.mock);
        }
        if (config.adapter == "external-trace") {
            return std::make_unique<ExternalTraceAdapter>(config.external);
        }
    } catch (const AdapterError&) {
        throw;
    } catch (const std::exception& e) {
        throw AdapterError("adapter '" + config.adapter + "' failed to start: " + e.what());
    }
    AdapterFactory factory;
    {
        std::lock_guard<std::mutex> lock(registry_mutex());
        auto it = registry().find(config.adapter);
        if (it == registry().end()) {
            throw AdapterError("adapter '" + config.adapter + "' is not available in this build");
        }
        factory = it->second;
    }
    try {
        auto adapter = factory(config);
        if (!adapter) {
            throw AdapterError("adapter '" + config.adapter + "' factory returned nothing");
        }
        return adapter;
    } catch (const AdapterError&) {
        throw;
    } catch (const std::exception& e) {
        throw AdapterError("adapter '" + config.adapter + "' failed to start: " + e.what());
    }
}

}  // namespace unlearn_audit
