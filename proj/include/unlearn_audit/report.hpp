#pragma once

// Audit report: in-memory form, JSON schema, self-consistency checks and the
// structured / tabular / plot-data emitters.

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "unlearn_audit/attention_probe.hpp"
#include "unlearn_audit/embedding_probe.hpp"
#include "unlearn_audit/image_probe.hpp"

namespace unlearn_audit {

inline constexpr const char* kReportSchema = "unlearn-audit-report";
inline constexpr int kReportSchemaVersion = 1;

// Suppression criterion for one (concept, non-baseline variant) pair.
struct CriterionRow {
    std::string concept_name;
    VariantKind kind = VariantKind::Unlearn;
    double similarity = 0.0;
    double baseline_similarity = 0.0;
    bool suppressed = false;
};

struct AuditReport {
    nlohmann::ordered_json metadata = nlohmann::ordered_json::object();
    std::optional<TextProbeResult> text;
    std::optional<ImageProbeResult> image;
    std::optional<AttentionProbeResult> attention;
    std::vector<CriterionRow> criterion;
};

std::vector<CriterionRow> criterion_table(const TextProbeResult& text);

nlohmann::ordered_json to_json(const AuditReport& report);

// Throws InvalidInput when the document does not follow the schema.
AuditReport report_from_json(const nlohmann::ordered_json& doc);

AuditReport read_report_file(const std::filesystem::path& path);

// Recomputes every derived value (deltas, criterion booleans, Stats blocks,
// image means, AUCs) from the per-concept records and returns a description
// of each mismatch. Empty means consistent.
std::vector<std::string> check_consistency(const AuditReport& report);

enum class ReportFormat { Structured, Tabular, PlotData };

std::string_view to_string(ReportFormat format);
ReportFormat parse_format(std::string_view name);

// Writes below `dir`:
//   structured -> report.json
//   tabular    -> tables/<section>.csv
//   plotdata   -> plotdata/<series>.csv
// Returns the files written. Throws IoError if `dir` is unwritable.
std::vector<std::filesystem::path> emit_report(const AuditReport& report, ReportFormat format,
                                               const std::filesystem::path& dir);

// Exact text of report.json.
std::string structured_text(const AuditReport& report);

}  // namespace unlearn_audit
