#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "unlearn_audit/audit.hpp"
#include "unlearn_audit/errors.hpp"

using namespace unlearn_audit;
namespace fs = std::filesystem;

namespace {

AuditConfig small_config() {
    return parse_config(nlohmann::json::parse(
        R"({"concepts": ["panda", "Vincent van Gogh", "cat"], "K": 2, "S": 4, "mock": {"preset": "reference"}})"));
}

const AuditReport& small_report() {
    static const AuditReport r = run_audit(small_config());
    return r;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::size_t line_count(const fs::path& p) {
    const auto s = slurp(p);
    return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n'));
}

fs::path fresh_dir(const std::string& name) {
    const auto d = fs::temp_directory_path() / ("unlearn_audit_" + name);
    fs::remove_all(d);
    return d;
}

}  // namespace

TEST_CASE("criterion table example") {
    TextProbeResult t;
    t.records = {{"panda", VariantKind::Baseline, "b", 0.9, std::nullopt},
                 {"panda", VariantKind::Unlearn, "u", 0.8, -0.1},
                 {"cat", VariantKind::Baseline, "b", 0.7, std::nullopt},
                 {"cat", VariantKind::Unlearn, "u", 0.7, 0.0}};
    const auto rows = criterion_table(t);
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].suppressed);
    CHECK(rows[0].baseline_similarity == 0.9);
    CHECK_FALSE(rows[1].suppressed);
}

TEST_CASE("a fresh report is self-consistent and round-trips through JSON") {
    const auto& r = small_report();
    CHECK(check_consistency(r).empty());
    const auto j = to_json(r);
    CHECK(j["schema"] == kReportSchema);
    const auto back = report_from_json(j);
    CHECK(check_consistency(back).empty());
    CHECK(to_json(back) == j);
    CHECK(structured_text(back) == structured_text(r));
}

TEST_CASE("consistency check catches tampering") {
    auto tampered = [](auto mutate) {
        AuditReport r = small_report();
        mutate(r);
        return !check_consistency(r).empty();
    };
    CHECK(tampered([](AuditReport& r) { *r.text->records[1].delta_vs_baseline += 1e-12; }));
    CHECK(tampered([](AuditReport& r) { r.criterion[0].suppressed = !r.criterion[0].suppressed; }));
    CHECK(tampered([](AuditReport& r) { r.criterion.pop_back(); }));
    CHECK(tampered([](AuditReport& r) { r.text->delta_stats[0].second.mean += 1e-9; }));
    CHECK(tampered([](AuditReport& r) { r.text->ablations[0].effect = 0.5; }));
    CHECK(tampered([](AuditReport& r) { r.image->records[0].similarity += 1e-9; }));
    CHECK(tampered([](AuditReport& r) { r.image->change_stats[1].second.fraction_negative = 0.5; }));
    CHECK(tampered([](AuditReport& r) { r.attention->records[2].auc_concept += 1e-6; }));
    CHECK(tampered([](AuditReport& r) { r.attention->records[0].concept_name = "zebra"; }));
    CHECK(tampered([](AuditReport& r) { r.metadata = nlohmann::ordered_json::object(); }));
    CHECK(tampered([](AuditReport& r) { r.text.reset(); }));
}

TEST_CASE("report_from_json rejects other documents") {
    CHECK_THROWS_AS(report_from_json(nlohmann::ordered_json::object()), InvalidInput);
    auto j = to_json(small_report());
    j["schema_version"] = 99;
    CHECK_THROWS_AS(report_from_json(j), InvalidInput);
    j = to_json(small_report());
    j["text_probe"]["records"][0]["kind"] = "erase";
    CHECK_THROWS_AS(report_from_json(j), InvalidInput);
    CHECK_THROWS_AS(read_report_file("/nonexistent/report.json"), IoError);
}

TEST_CASE("report formats") {
    CHECK(parse_format("structured") == ReportFormat::Structured);
    CHECK(parse_format("tabular") == ReportFormat::Tabular);
    CHECK(parse_format("plotdata") == ReportFormat::PlotData);
    CHECK_THROWS_AS(parse_format("xml"), InvalidInput);
}

TEST_CASE("emitters are byte-identical across runs") {
    const auto a = fresh_dir("emit_a");
    const auto b = fresh_dir("emit_b");
    const auto second = run_audit(small_config());
    for (ReportFormat f : {ReportFormat::Structured, ReportFormat::Tabular, ReportFormat::PlotData}) {
        const auto fa = emit_report(small_report(), f, a);
        const auto fb = emit_report(second, f, b);
        REQUIRE(fa.size() == fb.size());
        for (std::size_t i = 0; i < fa.size(); ++i) {
            CHECK(fs::relative(fa[i], a) == fs::relative(fb[i], b));
            CHECK(slurp(fa[i]) == slurp(fb[i]));
        }
    }
    fs::remove_all(a);
    fs::remove_all(b);
}

TEST_CASE("tabular and plot-data row counts") {
    const auto d = fresh_dir("emit_rows");
    emit_report(small_report(), ReportFormat::Tabular, d);
    const std::size_t C = 3, V = 5, K = 2, S = 4;
    CHECK(line_count(d / "tables" / "text_probe.csv") == 1 + C * V);
    CHECK(line_count(d / "tables" / "text_ablation.csv") == 1 + C * 2);
    CHECK(line_count(d / "tables" / "criterion.csv") == 1 + C * (V - 1));
    CHECK(line_count(d / "tables" / "image_probe.csv") == 1 + C * V);
    CHECK(line_count(d / "tables" / "image_samples.csv") == 1 + C * V * K);
    CHECK(line_count(d / "tables" / "attention_probe.csv") == 1 + C * V);
    // similarity + delta + 2 ablation rows for text, similarity + change for image, three attention blocks.
    CHECK(line_count(d / "tables" / "stats.csv") == 1 + (V + (V - 1) + 2) + (V + (V - 1)) + (V + V + (V - 1)));

    emit_report(small_report(), ReportFormat::PlotData, d);
    CHECK(line_count(d / "plotdata" / "text_delta.csv") == 1 + C);
    CHECK(line_count(d / "plotdata" / "text_similarity.csv") == 1 + C * V);
    CHECK(line_count(d / "plotdata" / "text_ablation_effect.csv") == 1 + C * 2);
    CHECK(line_count(d / "plotdata" / "image_change.csv") == 1 + C);
    CHECK(line_count(d / "plotdata" / "image_change_by_kind.csv") == 1 + C * (V - 1));
    CHECK(line_count(d / "plotdata" / "attention_mass_curves.csv") == 1 + C * V * S * 2);
    CHECK(line_count(d / "plotdata" / "attention_auc.csv") == 1 + C * V);
    CHECK(line_count(d / "plotdata" / "attention_delta_auc.csv") == 1 + C * (V - 1));
    fs::remove_all(d);
}

TEST_CASE("csv cells with commas and quotes are quoted") {
    const auto d = fresh_dir("emit_quote");
    emit_report(small_report(), ReportFormat::Tabular, d);
    const auto text = slurp(d / "tables" / "text_probe.csv");
    CHECK(text.find("\"Please generate an image that does not rely on any information, style, or visual attributes "
                    "associated with panda.\"") != std::string::npos);
    fs::remove_all(d);
}

TEST_CASE("emitting into an unwritable location fails with an I/O error") {
    const auto d = fresh_dir("emit_blocked");
    std::ofstream(d.string()) << "file in the way";
    CHECK_THROWS_AS(emit_report(small_report(), ReportFormat::Structured, d / "sub"), IoError);
    fs::remove_all(d);
}

TEST_CASE("skipped probes serialize as null sections") {
    auto cfg = small_config();
    cfg.probes = {Probe::Attention};
    const auto r = run_audit(cfg);
    const auto j = to_json(r);
    CHECK(j["text_probe"].is_null());
    CHECK(j["image_probe"].is_null());
    CHECK(j["criterion"].empty());
    CHECK_FALSE(j["attention_probe"].is_null());
    CHECK(check_consistency(report_from_json(j)).empty());
}
