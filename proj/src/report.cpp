#include "unlearn_audit/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "unlearn_audit/errors.hpp"

namespace unlearn_audit {

using nlohmann::ordered_json;

std::vector<CriterionRow> criterion_table(const TextProbeResult& text) {
    std::vector<CriterionRow> rows;
    std::map<std::string, double> baseline;
    for (const auto& r : text.records) {
        if (r.kind == VariantKind::Baseline) {
            baseline[r.concept_name] = r.similarity;
        }
    }
    for (const auto& r : text.records) {
        if (r.kind == VariantKind::Baseline) {
            continue;
        }
        const double base = baseline.at(r.concept_name);
        rows.push_back({r.concept_name, r.kind, r.similarity, base, unlearning_criterion(r.similarity, base)});
    }
    return rows;
}

// ---------------------------------------------------------------- to JSON

namespace {

ordered_json stats_json(const Stats& s) {
    return {{"mean", s.mean}, {"median", s.median}, {"fraction_negative", s.fraction_negative}, {"count", s.count}};
}

ordered_json stats_map(const std::vector<std::pair<VariantKind, Stats>>& stats) {
    ordered_json j = ordered_json::object();
    for (const auto& [k, s] : stats) {
        j[std::string(to_string(k))] = stats_json(s);
    }
    return j;
}

ordered_json optional_number(const std::optional<double>& v) {
    return v ? ordered_json(*v) : ordered_json(nullptr);
}

std::string kind_name(VariantKind k) {
    return std::string(to_string(k));
}

}  // namespace

ordered_json to_json(const AuditReport& report) {
    ordered_json j;
    j["schema"] = kReportSchema;
    j["schema_version"] = kReportSchemaVersion;
    j["metadata"] = report.metadata;

    if (report.text) {
        const auto& t = *report.text;
        ordered_json s;
        s["anchor_embedding"] = t.anchor_embedding;
        s["records"] = ordered_json::array();
        for (const auto& r : t.records) {
            s["records"].push_back({{"concept", r.concept_name},
                                    {"kind", kind_name(r.kind)},
                                    {"prompt", r.prompt},
                                    {"similarity", r.similarity},
                                    {"delta_vs_baseline", optional_number(r.delta_vs_baseline)}});
        }
        s["ablations"] = ordered_json::array();
        for (const auto& a : t.ablations) {
            s["ablations"].push_back({{"concept", a.concept_name},
                                      {"kind", kind_name(a.kind)},
                                      {"target", std::string(to_string(a.target))},
                                      {"ablated_prompt", a.ablated_prompt},
                                      {"similarity_original", a.similarity_original},
                                      {"similarity_ablated", a.similarity_ablated},
                                      {"effect", a.effect}});
        }
        ordered_json st;
        st["similarity"] = stats_map(t.similarity_stats);
        st["delta"] = stats_map(t.delta_stats);
        st["ablation"] = ordered_json::array();
        for (const auto& a : t.ablation_stats) {
            st["ablation"].push_back(
                {{"kind", kind_name(a.kind)}, {"target", std::string(to_string(a.target))}, {"stats", stats_json(a.stats)}});
        }
        s["stats"] = st;
        j["text_probe"] = s;
    } else {
        j["text_probe"] = nullptr;
    }

    if (report.image) {
        const auto& im = *report.image;
        ordered_json s;
        s["samples"] = im.samples;
        s["base_seed"] = im.base_seed;
        s["records"] = ordered_json::array();
        for (const auto& r : im.records) {
            s["records"].push_back({{"concept", r.concept_name},
                                    {"kind", kind_name(r.kind)},
                                    {"prompt", r.prompt},
                                    {"seeds", r.seeds},
                                    {"sample_similarities", r.sample_similarities},
                                    {"similarity", r.similarity},
                                    {"change_vs_baseline", optional_number(r.change_vs_baseline)},
                                    {"embeddings", r.embeddings}});
        }
        s["stats"] = {{"similarity", stats_map(im.similarity_stats)}, {"change", stats_map(im.change_stats)}};
        j["image_probe"] = s;
    } else {
        j["image_probe"] = nullptr;
    }

    if (report.attention) {
        const auto& at = *report.attention;
        ordered_json s;
        s["steps"] = at.steps;
        s["seed"] = at.seed;
        s["aggregation"] = at.aggregation;
        s["records"] = ordered_json::array();
        for (const auto& r : at.records) {
            s["records"].push_back({{"concept", r.concept_name},
                                    {"kind", kind_name(r.kind)},
                                    {"auc_concept", r.auc_concept},
                                    {"auc_instruction", r.auc_instruction},
                                    {"delta_auc_vs_baseline", optional_number(r.delta_auc_vs_baseline)}});
        }
        s["curves"] = ordered_json::array();
        for (const auto& c : at.curves) {
            s["curves"].push_back({{"concept", c.concept_name},
                                   {"kind", kind_name(c.kind)},
                                   {"tokens", c.tokens},
                                   {"concept_span", c.concept_span},
                                   {"instruction_span", c.instruction_span},
                                   {"concept_mass", c.concept_mass},
                                   {"instruction_mass", c.instruction_mass}});
        }
        s["stats"] = {{"auc_concept", stats_map(at.auc_concept_stats)},
                      {"auc_instruction", stats_map(at.auc_instruction_stats)},
                      {"delta_auc", stats_map(at.delta_auc_stats)}};
        j["attention_probe"] = s;
    } else {
        j["attention_probe"] = nullptr;
    }

    j["criterion"] = ordered_json::array();
    for (const auto& c : report.criterion) {
        j["criterion"].push_back({{"concept", c.concept_name},
                                  {"kind", kind_name(c.kind)},
                                  {"similarity", c.similarity},
                                  {"baseline_similarity", c.baseline_similarity},
                                  {"suppressed", c.suppressed}});
    }
    return j;
}

std::string structured_text(const AuditReport& report) {
    return to_json(report).dump(2) + "\n";
}

// -------------------------------------------------------------- from JSON

namespace {

Stats stats_from(const ordered_json& j) {
    return Stats{j.at("mean").get<double>(), j.at("median").get<double>(), j.at("fraction_negative").get<double>(),
                 j.at("count").get<std::size_t>()};
}

std::vector<std::pair<VariantKind, Stats>> stats_map_from(const ordered_json& j) {
    std::vector<std::pair<VariantKind, Stats>> out;
    for (auto it = j.begin(); it != j.end(); ++it) {
        out.emplace_back(parse_variant(it.key()), stats_from(it.value()));
    }
    return out;
}

std::optional<double> optional_from(const ordered_json& j) {
    if (j.is_null()) {
        return std::nullopt;
    }
    return j.get<double>();
}

AblationTarget target_from(const std::string& s) {
    if (s == to_string(AblationTarget::ConceptTokens)) {
        return AblationTarget::ConceptTokens;
    }
    if (s == to_string(AblationTarget::InstructionTokens)) {
        return AblationTarget::InstructionTokens;
    }
    throw InvalidInput("unknown ablation target '" + s + "'");
}

}  // namespace

AuditReport report_from_json(const ordered_json& doc) {
    AuditReport report;
    try {
        if (doc.at("schema").get<std::string>() != kReportSchema) {
            throw InvalidInput("not an audit report");
        }
        if (doc.at("schema_version").get<int>() != kReportSchemaVersion) {
            throw InvalidInput("unsupported report schema version");
        }
        report.metadata = doc.at("metadata");

        if (const auto& s = doc.at("text_probe"); !s.is_null()) {
            TextProbeResult t;
            t.anchor_embedding = s.at("anchor_embedding").get<std::string>();
            for (const auto& r : s.at("records")) {
                t.records.push_back({r.at("concept").get<std::string>(), parse_variant(r.at("kind").get<std::string>()),
                                     r.at("prompt").get<std::string>(), r.at("similarity").get<double>(),
                                     optional_from(r.at("delta_vs_baseline"))});
            }
            for (const auto& a : s.at("ablations")) {
                t.ablations.push_back({a.at("concept").get<std::string>(),
                                       parse_variant(a.at("kind").get<std::string>()),
                                       target_from(a.at("target").get<std::string>()),
                                       a.at("ablated_prompt").get<std::string>(),
                                       a.at("similarity_original").get<double>(),
                                       a.at("similarity_ablated").get<double>(), a.at("effect").get<double>()});
            }
            const auto& st = s.at("stats");
            t.similarity_stats = stats_map_from(st.at("similarity"));
            t.delta_stats = stats_map_from(st.at("delta"));
            for (const auto& a : st.at("ablation")) {
                t.ablation_stats.push_back({parse_variant(a.at("kind").get<std::string>()),
                                            target_from(a.at("target").get<std::string>()),
                                            stats_from(a.at("stats"))});
            }
            report.text = std::move(t);
        }

        if (const auto& s = doc.at("image_probe"); !s.is_null()) {
            ImageProbeResult im;
            im.samples = s.at("samples").get<std::size_t>();
            im.base_seed = s.at("base_seed").get<std::uint64_t>();
            for (const auto& r : s.at("records")) {
                ImageRecord rec;
                rec.concept_name = r.at("concept").get<std::string>();
                rec.kind = parse_variant(r.at("kind").get<std::string>());
                rec.prompt = r.at("prompt").get<std::string>();
                rec.seeds = r.at("seeds").get<std::vector<std::uint64_t>>();
                rec.sample_similarities = r.at("sample_similarities").get<std::vector<double>>();
                rec.similarity = r.at("similarity").get<double>();
                rec.change_vs_baseline = optional_from(r.at("change_vs_baseline"));
                rec.embeddings = r.at("embeddings").get<std::vector<std::vector<double>>>();
                im.records.push_back(std::move(rec));
            }
            im.similarity_stats = stats_map_from(s.at("stats").at("similarity"));
            im.change_stats = stats_map_from(s.at("stats").at("change"));
            report.image = std::move(im);
        }

        if (const auto& s = doc.at("attention_probe"); !s.is_null()) {
            AttentionProbeResult at;
            at.steps = s.at("steps").get<std::size_t>();
            at.seed = s.at("seed").get<std::uint64_t>();
            at.aggregation = s.at("aggregation").get<std::string>();
            for (const auto& r : s.at("records")) {
                at.records.push_back({r.at("concept").get<std::string>(),
                                      parse_variant(r.at("kind").get<std::string>()), r.at("auc_concept").get<double>(),
                                      r.at("auc_instruction").get<double>(),
                                      optional_from(r.at("delta_auc_vs_baseline"))});
            }
            for (const auto& c : s.at("curves")) {
                at.curves.push_back({c.at("concept").get<std::string>(), parse_variant(c.at("kind").get<std::string>()),
                                     c.at("tokens").get<std::vector<std::string>>(),
                                     c.at("concept_span").get<std::vector<std::uint32_t>>(),
                                     c.at("instruction_span").get<std::vector<std::uint32_t>>(),
                                     c.at("concept_mass").get<std::vector<double>>(),
                                     c.at("instruction_mass").get<std::vector<double>>()});
            }
            const auto& st = s.at("stats");
            at.auc_concept_stats = stats_map_from(st.at("auc_concept"));
            at.auc_instruction_stats = stats_map_from(st.at("auc_instruction"));
            at.delta_auc_stats = stats_map_from(st.at("delta_auc"));
            report.attention = std::move(at);
        }

        for (const auto& c : doc.at("criterion")) {
            report.criterion.push_back({c.at("concept").get<std::string>(),
                                        parse_variant(c.at("kind").get<std::string>()),
                                        c.at("similarity").get<double>(), c.at("baseline_similarity").get<double>(),
                                        c.at("suppressed").get<bool>()});
        }
    } catch (const nlohmann::json::exception& e) {
        throw InvalidInput(std::string("malformed report: ") + e.what());
    }
    return report;
}

AuditReport read_report_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open report " + path.string());
    }
    ordered_json doc;
    try {
        doc = ordered_json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw InvalidInput(path.string() + ": " + e.what());
    }
    return report_from_json(doc);
}

// ------------------------------------------------------------ consistency

namespace {

class Issues {
public:
    void add(std::string msg) { list_.push_back(std::move(msg)); }

    template <class... Parts>
    void require(bool ok, const Parts&... parts) {
        if (!ok) {
            std::ostringstream os;
            (os << ... << parts);
            list_.push_back(os.str());
        }
    }

    std::vector<std::string> take() { return std::move(list_); }

private:
    std::vector<std::string> list_;
};

template <class Record, class Value, class Filter>
std::optional<Stats> recompute(const std::vector<Record>& records, Value value, Filter keep) {
    std::vector<double> v;
    for (const auto& r : records) {
        if (keep(r)) {
            v.push_back(value(r));
        }
    }
    if (v.empty()) {
        return std::nullopt;
    }
    return summarize(v);
}

void check_stats_block(Issues& issues, const char* where, const std::vector<std::pair<VariantKind, Stats>>& stored,
                       const std::function<std::optional<Stats>(VariantKind)>& fresh) {
    for (const auto& [k, s] : stored) {
        const auto f = fresh(k);
        issues.require(f.has_value() && *f == s, where, " stats for ", to_string(k),
                       " do not match the records they summarize");
    }
}

}  // namespace

std::vector<std::string> check_consistency(const AuditReport& report) {
    Issues issues;

    std::set<std::string> known;
    if (report.metadata.contains("config") && report.metadata["config"].contains("concepts")) {
        for (const auto& c : report.metadata["config"]["concepts"]) {
            known.insert(c.at("name").get<std::string>());
        }
    } else {
        issues.add("metadata does not echo the configured concepts");
    }
    auto check_concept = [&](const std::string& name, const char* where) {
        issues.require(known.count(name) == 1, where, " references unknown concept '", name, "'");
    };

    if (report.text) {
        const auto& t = *report.text;
        std::map<std::string, double> base;
        for (const auto& r : t.records) {
            check_concept(r.concept_name, "text_probe");
            issues.require(r.similarity >= -1.0 - kSimilarityTolerance && r.similarity <= 1.0 + kSimilarityTolerance,
                           "text similarity out of range for '", r.concept_name, "'");
            if (r.kind == VariantKind::Baseline) {
                base[r.concept_name] = r.similarity;
                issues.require(!r.delta_vs_baseline, "baseline record of '", r.concept_name, "' carries a delta");
            }
        }
        for (const auto& r : t.records) {
            if (r.kind == VariantKind::Baseline) {
                continue;
            }
            auto b = base.find(r.concept_name);
            if (b == base.end()) {
                issues.add("no baseline text record for '" + r.concept_name + "'");
                continue;
            }
            issues.require(r.delta_vs_baseline && *r.delta_vs_baseline == r.similarity - b->second,
                           "text delta for ('", r.concept_name, "', ", to_string(r.kind), ") is not similarity - baseline");
        }
        for (const auto& a : t.ablations) {
            check_concept(a.concept_name, "text_probe.ablations");
            issues.require(a.effect == ablation_effect(a.similarity_original, a.similarity_ablated),
                           "ablation effect for '", a.concept_name, "' is not original - ablated");
            const auto orig = std::find_if(t.records.begin(), t.records.end(), [&](const SimilarityRecord& r) {
                return r.concept_name == a.concept_name && r.kind == a.kind;
            });
            issues.require(orig != t.records.end() && orig->similarity == a.similarity_original,
                           "ablation original similarity for '", a.concept_name, "' does not match its record");
        }
        check_stats_block(issues, "text similarity", t.similarity_stats, [&](VariantKind k) {
            return recompute(t.records, [](const auto& r) { return r.similarity; },
                             [&](const auto& r) { return r.kind == k; });
        });
        check_stats_block(issues, "text delta", t.delta_stats, [&](VariantKind k) {
            return recompute(t.records, [](const auto& r) { return *r.delta_vs_baseline; },
                             [&](const auto& r) { return r.kind == k && r.delta_vs_baseline.has_value(); });
        });
        for (const auto& a : t.ablation_stats) {
            const auto f = recompute(t.ablations, [](const auto& r) { return r.effect; },
                                     [&](const auto& r) { return r.kind == a.kind && r.target == a.target; });
            issues.require(f && *f == a.stats, "ablation stats for ", to_string(a.kind), "/", to_string(a.target),
                           " do not match the records");
        }

        const auto fresh = criterion_table(t);
        issues.require(fresh.size() == report.criterion.size(), "criterion table has ", report.criterion.size(),
                       " rows, expected ", fresh.size());
        for (std::size_t i = 0; i < std::min(fresh.size(), report.criterion.size()); ++i) {
            const auto& a = fresh[i];
            const auto& b = report.criterion[i];
            issues.require(a.concept_name == b.concept_name && a.kind == b.kind && a.similarity == b.similarity &&
                               a.baseline_similarity == b.baseline_similarity && a.suppressed == b.suppressed,
                           "criterion row ", i, " ('", b.concept_name, "', ", to_string(b.kind),
                           ") disagrees with the stored similarities");
            issues.require(b.suppressed == unlearning_criterion(b.similarity, b.baseline_similarity),
                           "criterion row ", i, " boolean does not follow from its similarities");
        }
    } else {
        issues.require(report.criterion.empty(), "criterion table present without a text probe section");
    }

    if (report.image) {
        const auto& im = *report.image;
        std::map<std::string, double> base;
        for (const auto& r : im.records) {
            check_concept(r.concept_name, "image_probe");
            issues.require(r.seeds.size() == im.samples && r.sample_similarities.size() == im.samples,
                           "image cell ('", r.concept_name, "', ", to_string(r.kind), ") does not hold K samples");
            double total = 0.0;
            for (double s : r.sample_similarities) {
                total += s;
            }
            issues.require(!r.sample_similarities.empty() &&
                               total / static_cast<double>(r.sample_similarities.size()) == r.similarity,
                           "image similarity for ('", r.concept_name, "', ", to_string(r.kind),
                           ") is not the sample mean");
            if (r.kind == VariantKind::Baseline) {
                base[r.concept_name] = r.similarity;
            }
        }
        for (const auto& r : im.records) {
            if (r.kind == VariantKind::Baseline) {
                issues.require(!r.change_vs_baseline, "baseline image record carries a change");
                continue;
            }
            auto b = base.find(r.concept_name);
            issues.require(b != base.end() && r.change_vs_baseline &&
                               *r.change_vs_baseline == per_concept_change(r.similarity, b->second),
                           "image change for ('", r.concept_name, "', ", to_string(r.kind), ") is inconsistent");
        }
        check_stats_block(issues, "image similarity", im.similarity_stats, [&](VariantKind k) {
            return recompute(im.records, [](const auto& r) { return r.similarity; },
                             [&](const auto& r) { return r.kind == k; });
        });
        check_stats_block(issues, "image change", im.change_stats, [&](VariantKind k) {
            return recompute(im.records, [](const auto& r) { return *r.change_vs_baseline; },
                             [&](const auto& r) { return r.kind == k && r.change_vs_baseline.has_value(); });
        });
    }

    if (report.attention) {
        const auto& at = *report.attention;
        std::map<std::string, double> base;
        issues.require(at.records.size() == at.curves.size(), "attention records and curves differ in count");
        for (std::size_t i = 0; i < at.records.size(); ++i) {
            const auto& r = at.records[i];
            check_concept(r.concept_name, "attention_probe");
            issues.require(r.auc_concept >= -kSimilarityTolerance && r.auc_concept <= 1.0 + kSimilarityTolerance &&
                               r.auc_instruction >= -kSimilarityTolerance &&
                               r.auc_instruction <= 1.0 + kSimilarityTolerance,
                           "AUC out of [0, 1] for ('", r.concept_name, "', ", to_string(r.kind), ")");
            if (i < at.curves.size()) {
                const auto& c = at.curves[i];
                issues.require(c.concept_name == r.concept_name && c.kind == r.kind && c.concept_mass.size() == at.steps &&
                                   c.instruction_mass.size() == at.steps,
                               "attention curve ", i, " does not match its record");
                if (!c.concept_mass.empty() && !c.instruction_mass.empty()) {
                    issues.require(std::abs(auc(c.concept_mass) - r.auc_concept) <= 1e-12 &&
                                       std::abs(auc(c.instruction_mass) - r.auc_instruction) <= 1e-12,
                                   "AUC for ('", r.concept_name, "', ", to_string(r.kind), ") is not the curve mean");
                }
            }
            if (r.kind == VariantKind::Baseline) {
                base[r.concept_name] = r.auc_concept;
            }
        }
        for (const auto& r : at.records) {
            if (r.kind == VariantKind::Baseline) {
                issues.require(!r.delta_auc_vs_baseline, "baseline AUC record carries a delta");
                continue;
            }
            auto b = base.find(r.concept_name);
            issues.require(b != base.end() && r.delta_auc_vs_baseline &&
                               *r.delta_auc_vs_baseline == r.auc_concept - b->second,
                           "delta AUC for ('", r.concept_name, "', ", to_string(r.kind), ") is inconsistent");
        }
        check_stats_block(issues, "concept AUC", at.auc_concept_stats, [&](VariantKind k) {
            return recompute(at.records, [](const auto& r) { return r.auc_concept; },
                             [&](const auto& r) { return r.kind == k; });
        });
        check_stats_block(issues, "instruction AUC", at.auc_instruction_stats, [&](VariantKind k) {
            return recompute(at.records, [](const auto& r) { return r.auc_instruction; },
                             [&](const auto& r) { return r.kind == k; });
        });
        check_stats_block(issues, "delta AUC", at.delta_auc_stats, [&](VariantKind k) {
            return recompute(at.records, [](const auto& r) { return *r.delta_auc_vs_baseline; },
                             [&](const auto& r) { return r.kind == k && r.delta_auc_vs_baseline.has_value(); });
        });
    }
    return issues.take();
}

// ----------------------------------------------------------------- emit

std::string_view to_string(ReportFormat format) {
    switch (format) {
        case ReportFormat::Structured:
            return "structured";
        case ReportFormat::Tabular:
            return "tabular";
        case ReportFormat::PlotData:
            return "plotdata";
    }
    return "?";
}

ReportFormat parse_format(std::string_view name) {
    for (ReportFormat f : {ReportFormat::Structured, ReportFormat::Tabular, ReportFormat::PlotData}) {
        if (to_string(f) == name) {
            return f;
        }
    }
    throw InvalidInput("unknown report format '" + std::string(name) + "'");
}

namespace {

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string num(const std::optional<double>& v) {
    return v ? num(*v) : std::string();
}

std::string cell(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) {
        return s;
    }
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') {
            out += "\"\"";
        } else {
            out += c;
        }
    }
    return out + "\"";
}

class Csv {
public:
    explicit Csv(std::initializer_list<std::string> header) { row(std::vector<std::string>(header)); }

    void row(const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i > 0) {
                text_ += ',';
            }
            text_ += cell(cells[i]);
        }
        text_ += '\n';
    }

    const std::string& text() const { return text_; }

private:
    std::string text_;
};

void write_file(const std::filesystem::path& path, const std::string& text, std::vector<std::filesystem::path>& written) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
    if (ec) {
        throw IoError("cannot create directory " + path.parent_path().string() + ": " + ec.message());
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw IoError("cannot write " + path.string());
    }
    out << text;
    out.close();
    if (!out) {
        throw IoError("failed writing " + path.string());
    }
    written.push_back(path);
}

void add_stats_rows(Csv& csv, const std::string& probe, const std::string& metric,
                    const std::vector<std::pair<VariantKind, Stats>>& stats) {
    for (const auto& [k, s] : stats) {
        csv.row({probe, metric, kind_name(k), "", num(s.mean), num(s.median), num(s.fraction_negative),
                 std::to_string(s.count)});
    }
}

void emit_tabular(const AuditReport& report, const std::filesystem::path& dir, std::vector<std::filesystem::path>& out) {
    const auto tables = dir / "tables";
    Csv stats({"probe", "metric", "kind", "target", "mean", "median", "fraction_negative", "count"});

    Csv text({"concept", "kind", "prompt", "similarity", "delta_vs_baseline"});
    Csv ablation({"concept", "kind", "target", "ablated_prompt", "similarity_original", "similarity_ablated", "effect"});
    Csv criterion({"concept", "kind", "similarity", "baseline_similarity", "suppressed"});
    if (report.text) {
        const auto& t = *report.text;
        for (const auto& r : t.records) {
            text.row({r.concept_name, kind_name(r.kind), r.prompt, num(r.similarity), num(r.delta_vs_baseline)});
        }
        for (const auto& a : t.ablations) {
            ablation.row({a.concept_name, kind_name(a.kind), std::string(to_string(a.target)), a.ablated_prompt,
                          num(a.similarity_original), num(a.similarity_ablated), num(a.effect)});
        }
        add_stats_rows(stats, "text", "similarity", t.similarity_stats);
        add_stats_rows(stats, "text", "delta", t.delta_stats);
        for (const auto& a : t.ablation_stats) {
            stats.row({"text", "ablation_effect", kind_name(a.kind), std::string(to_string(a.target)),
                       num(a.stats.mean), num(a.stats.median), num(a.stats.fraction_negative),
                       std::to_string(a.stats.count)});
        }
    }
    for (const auto& c : report.criterion) {
        criterion.row({c.concept_name, kind_name(c.kind), num(c.similarity), num(c.baseline_similarity),
                       c.suppressed ? "true" : "false"});
    }

    Csv image({"concept", "kind", "prompt", "similarity", "change_vs_baseline"});
    Csv samples({"concept", "kind", "seed", "similarity"});
    if (report.image) {
        for (const auto& r : report.image->records) {
            image.row({r.concept_name, kind_name(r.kind), r.prompt, num(r.similarity), num(r.change_vs_baseline)});
            for (std::size_t i = 0; i < r.seeds.size() && i < r.sample_similarities.size(); ++i) {
                samples.row({r.concept_name, kind_name(r.kind), std::to_string(r.seeds[i]), num(r.sample_similarities[i])});
            }
        }
        add_stats_rows(stats, "image", "similarity", report.image->similarity_stats);
        add_stats_rows(stats, "image", "change", report.image->change_stats);
    }

    Csv attention({"concept", "kind", "auc_concept", "auc_instruction", "delta_auc_vs_baseline"});
    if (report.attention) {
        for (const auto& r : report.attention->records) {
            attention.row({r.concept_name, kind_name(r.kind), num(r.auc_concept), num(r.auc_instruction),
                           num(r.delta_auc_vs_baseline)});
        }
        add_stats_rows(stats, "attention", "auc_concept", report.attention->auc_concept_stats);
        add_stats_rows(stats, "attention", "auc_instruction", report.attention->auc_instruction_stats);
        add_stats_rows(stats, "attention", "delta_auc", report.attention->delta_auc_stats);
    }

    write_file(tables / "text_probe.csv", text.text(), out);
    write_file(tables / "text_ablation.csv", ablation.text(), out);
    write_file(tables / "criterion.csv", criterion.text(), out);
    write_file(tables / "image_probe.csv", image.text(), out);
    write_file(tables / "image_samples.csv", samples.text(), out);
    write_file(tables / "attention_probe.csv", attention.text(), out);
    write_file(tables / "stats.csv", stats.text(), out);
}

void emit_plotdata(const AuditReport& report, const std::filesystem::path& dir, std::vector<std::filesystem::path>& out) {
    const auto plots = dir / "plotdata";

    // Text encoder: change distribution, similarity by prompt type, ablation.
    Csv text_delta({"concept", "kind", "delta"});
    Csv text_sim({"concept", "kind", "similarity"});
    Csv text_effect({"concept", "kind", "target", "effect"});
    if (report.text) {
        for (const auto& r : report.text->records) {
            if (r.kind == VariantKind::Unlearn && r.delta_vs_baseline) {
                text_delta.row({r.concept_name, kind_name(r.kind), num(*r.delta_vs_baseline)});
            }
            text_sim.row({r.concept_name, kind_name(r.kind), num(r.similarity)});
        }
        for (const auto& a : report.text->ablations) {
            text_effect.row({a.concept_name, kind_name(a.kind), std::string(to_string(a.target)), num(a.effect)});
        }
    }

    // Generated images: change distribution, similarity by type, per-concept change.
    Csv image_delta({"concept", "kind", "change"});
    Csv image_sim({"concept", "kind", "similarity"});
    Csv image_by_kind({"concept", "kind", "change"});
    if (report.image) {
        for (const auto& r : report.image->records) {
            if (r.kind == VariantKind::Unlearn && r.change_vs_baseline) {
                image_delta.row({r.concept_name, kind_name(r.kind), num(*r.change_vs_baseline)});
            }
            image_sim.row({r.concept_name, kind_name(r.kind), num(r.similarity)});
            if (r.change_vs_baseline) {
                image_by_kind.row({r.concept_name, kind_name(r.kind), num(*r.change_vs_baseline)});
            }
        }
    }

    // Cross-attention: mass per step, concept AUC by type, per-concept delta AUC.
    Csv mass_curves({"concept", "kind", "series", "step", "mass"});
    Csv auc_by_kind({"concept", "kind", "auc_concept"});
    Csv delta_auc_rows({"concept", "kind", "delta_auc"});
    if (report.attention) {
        for (const auto& c : report.attention->curves) {
            for (std::size_t s = 0; s < c.concept_mass.size(); ++s) {
                mass_curves.row({c.concept_name, kind_name(c.kind), "concept", std::to_string(s + 1), num(c.concept_mass[s])});
            }
            for (std::size_t s = 0; s < c.instruction_mass.size(); ++s) {
                mass_curves.row({c.concept_name, kind_name(c.kind), "instruction", std::to_string(s + 1),
                         num(c.instruction_mass[s])});
            }
        }
        for (const auto& r : report.attention->records) {
            auc_by_kind.row({r.concept_name, kind_name(r.kind), num(r.auc_concept)});
            if (r.delta_auc_vs_baseline) {
                delta_auc_rows.row({r.concept_name, kind_name(r.kind), num(*r.delta_auc_vs_baseline)});
            }
        }
    }

    write_file(plots / "text_delta.csv", text_delta.text(), out);
    write_file(plots / "text_similarity.csv", text_sim.text(), out);
    write_file(plots / "text_ablation_effect.csv", text_effect.text(), out);
    write_file(plots / "image_change.csv", image_delta.text(), out);
    write_file(plots / "image_similarity.csv", image_sim.text(), out);
    write_file(plots / "image_change_by_kind.csv", image_by_kind.text(), out);
    write_file(plots / "attention_mass_curves.csv", mass_curves.text(), out);
    write_file(plots / "attention_auc.csv", auc_by_kind.text(), out);
    write_file(plots / "attention_delta_auc.csv", delta_auc_rows.text(), out);
}

}  // namespace

std::vector<std::filesystem::path> emit_report(const AuditReport& report, ReportFormat format,
                                               const std::filesystem::path& dir) {
    std::vector<std::filesystem::path> written;
    switch (format) {
        case ReportFormat::Structured:
            write_file(dir / "report.json", structured_text(report), written);
            break;
        case ReportFormat::Tabular:
            emit_tabular(report, dir, written);
            break;
        case ReportFormat::PlotData:
            emit_plotdata(report, dir, written);
            break;
    }
    return written;
}

}  // namespace unlearn_audit
