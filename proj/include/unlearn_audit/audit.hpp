#pragma once

#include "unlearn_audit/config.hpp"
#include "unlearn_audit/report.hpp"

namespace unlearn_audit {

inline constexpr const char* kToolVersion = "0.1.0";

// Builds the adapter from the config and runs the configured probes.
AuditReport run_audit(const AuditConfig& config);

// Runs against a caller-owned adapter. The assembled report is checked with
// check_consistency before it is returned; a mismatch throws AuditError.
AuditReport run_audit(const AuditConfig& config, DiffusionAdapter& adapter);

// Every prompt an offline pipeline has to cover for this config: anchors,
// variants and ablated texts with their hashes, plus the seeds of each
// generation. One JSON object per entry.
nlohmann::ordered_json plan_prompts(const AuditConfig& config);

// Prompts used by validate-adapter: baseline and unlearn of the first concept.
std::vector<PromptRecord> validation_prompts(const AuditConfig& config);

}  // namespace unlearn_audit
