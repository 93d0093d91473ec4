#pragma once

// Audit configuration (JSON) and adapter construction.

#include <filesystem>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "json.hpp"
#include "unlearn_audit/adapter.hpp"
#include "unlearn_audit/external_adapter.hpp"
#include "unlearn_audit/mock_adapter.hpp"
#include "unlearn_audit/probe_settings.hpp"

namespace unlearn_audit {

enum class Probe { Text, Image, Attention };

std::string_view to_string(Probe probe);
// "text", "image", "attn"
Probe parse_probe(std::string_view name);

struct AuditConfig {
    std::vector<Concept> concepts;
    ProbeSettings settings;
    std::vector<Probe> probes{Probe::Text, Probe::Image, Probe::Attention};
    // "mock", "external-trace", or a name registered with register_adapter.
    std::string adapter = "mock";
    nlohmann::ordered_json adapter_options = nlohmann::ordered_json::object();
    std::filesystem::path output_dir = "audit-out";
    bool save_images = false;
    std::string mock_preset;
    MockConfig mock;
    ExternalSources external;

    bool runs(Probe p) const;
};

// Ten default concepts mixing artists, people, landmarks, animals and objects.
std::vector<std::string> default_concept_names();

// Parses and validates; relative external paths resolve against `base_dir`.
// Throws ConfigError naming the offending key.
AuditConfig parse_config(const nlohmann::json& doc, const std::filesystem::path& base_dir = {});

// Throws ConfigError for a missing file or a parse error.
AuditConfig load_config(const std::filesystem::path& path);

// Fully resolved config, defaults included.
nlohmann::ordered_json config_to_json(const AuditConfig& config);

using AdapterFactory = std::function<std::unique_ptr<DiffusionAdapter>(const AuditConfig&)>;

// Makes a real-pipeline backend available under `name`.
void register_adapter(const std::string& name, AdapterFactory factory);

// Throws AdapterError for an unknown backend or one that fails to start.
std::unique_ptr<DiffusionAdapter> make_adapter(const AuditConfig& config);

}  // namespace unlearn_audit
