// audit: command-line front end.
//
//   audit run --config PATH [--only text|image|attn] [--out DIR]
//             [--format structured|tabular|plotdata] [--seed N]
//   audit validate-adapter --config PATH
//   audit emit --report PATH --format F [--out DIR]
//   audit prompts --config PATH
//
// Exit codes: 0 success, 1 other failure, 2 configuration error,
// 3 adapter/contract failure, 4 probe abort.

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "unlearn_audit/audit.hpp"
#include "unlearn_audit/errors.hpp"
#include "unlearn_audit/kernels.hpp"

namespace ua = unlearn_audit;

namespace {

enum ExitCode { kOk = 0, kFailure = 1, kConfig = 2, kAdapter = 3, kProbe = 4 };

void print_stats_line(const char* label, const std::vector<std::pair<ua::VariantKind, ua::Stats>>& stats) {
    for (const auto& [k, s] : stats) {
        std::printf("  %-26s %-15s mean %+.6g  median %+.6g  negative %.2f  (n=%zu)\n", label,
                    std::string(ua::to_string(k)).c_str(), s.mean, s.median, s.fraction_negative, s.count);
    }
}

void print_summary(const ua::AuditReport& report) {
    if (report.text) {
        print_stats_line("text delta", report.text->delta_stats);
        for (const auto& a : report.text->ablation_stats) {
            std::printf("  %-26s %-15s mean %+.6g  median %+.6g  (n=%zu)\n",
                        ("ablate " + std::string(ua::to_string(a.target))).c_str(),
                        std::string(ua::to_string(a.kind)).c_str(), a.stats.mean, a.stats.median, a.stats.count);
        }
        std::size_t suppressed = 0;
        for (const auto& c : report.criterion) {
            suppressed += c.suppressed ? 1 : 0;
        }
        std::printf("  criterion: %zu of %zu (concept, variant) pairs less similar than baseline\n", suppressed,
                    report.criterion.size());
    }
    if (report.image) {
        print_stats_line("image change", report.image->change_stats);
    }
    if (report.attention) {
        print_stats_line("delta AUC (concept)", report.attention->delta_auc_stats);
    }
}

int run_command(const std::string& config_path, const std::optional<std::string>& only,
                const std::optional<std::string>& out_dir, const std::string& format,
                const std::optional<std::uint64_t>& seed) {
    ua::AuditConfig config = ua::load_config(config_path);
    if (only) {
        try {
            config.probes = {ua::parse_probe(*only)};
        } catch (const ua::InvalidInput& e) {
            throw ua::ConfigError("--only", e.what());
        }
    }
    if (out_dir) {
        config.output_dir = *out_dir;
    }
    if (seed) {
        config.settings.base_seed = *seed;
    }
    ua::ReportFormat fmt;
    try {
        fmt = ua::parse_format(format);
    } catch (const ua::InvalidInput& e) {
        throw ua::ConfigError("--format", e.what());
    }

    auto adapter = ua::make_adapter(config);
    const ua::AuditReport report = ua::run_audit(config, *adapter);

    auto written = ua::emit_report(report, ua::ReportFormat::Structured, config.output_dir);
    if (fmt != ua::ReportFormat::Structured) {
        auto more = ua::emit_report(report, fmt, config.output_dir);
        written.insert(written.end(), more.begin(), more.end());
    }
    std::printf("audit complete (%s adapter, kernels: %s)\n", config.adapter.c_str(), ua::kernels::active().name);
    print_summary(report);
    for (const auto& p : written) {
        std::printf("wrote %s\n", p.string().c_str());
    }
    return kOk;
}

int validate_command(const std::string& config_path) {
    const ua::AuditConfig config = ua::load_config(config_path);
    auto adapter = ua::make_adapter(config);
    ua::ValidationOptions opts;
    opts.steps = config.settings.steps;
    opts.seed = config.settings.base_seed;
    const auto report = ua::validate_capabilities(*adapter, ua::validation_prompts(config), opts);
    nlohmann::ordered_json out = report.to_json();
    out["adapter"] = adapter->metadata();
    std::cout << out.dump(2) << '\n';
    return report.passed() ? kOk : kAdapter;
}

int emit_command(const std::string& report_path, const std::string& format, const std::optional<std::string>& out_dir) {
    ua::ReportFormat fmt;
    try {
        fmt = ua::parse_format(format);
    } catch (const ua::InvalidInput& e) {
        throw ua::ConfigError("--format", e.what());
    }
    const ua::AuditReport report = ua::read_report_file(report_path);
    for (const auto& issue : ua::check_consistency(report)) {
        std::fprintf(stderr, "warning: %s\n", issue.c_str());
    }
    const std::filesystem::path dir =
        out_dir ? std::filesystem::path(*out_dir) : std::filesystem::path(report_path).parent_path();
    for (const auto& p : ua::emit_report(report, fmt, dir.empty() ? "." : dir)) {
        std::printf("wrote %s\n", p.string().c_str());
    }
    return kOk;
}

int prompts_command(const std::string& config_path) {
    const ua::AuditConfig config = ua::load_config(config_path);
    for (const auto& entry : ua::plan_prompts(config)) {
        std::cout << entry.dump() << '\n';
    }
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Audit instruction-based concept unlearning in text-to-image diffusion pipelines"};
    app.require_subcommand(1);

    std::string config_path, report_path, format = "structured";
    std::optional<std::string> only, out_dir;
    std::optional<std::uint64_t> seed;

    auto* run = app.add_subcommand("run", "Run the configured probes and write the report");
    run->add_option("--config", config_path, "Audit configuration (JSON)")->required();
    run->add_option("--only", only, "Run a single probe")->check(CLI::IsMember({"text", "image", "attn"}));
    run->add_option("--out", out_dir, "Output directory (overrides output_dir)");
    run->add_option("--format", format, "Additional output format")
        ->check(CLI::IsMember({"structured", "tabular", "plotdata"}));
    run->add_option("--seed", seed, "Base seed (overrides base_seed)");

    auto* validate = app.add_subcommand("validate-adapter", "Check an adapter against the capability contract");
    validate->add_option("--config", config_path, "Audit configuration (JSON)")->required();

    auto* emit = app.add_subcommand("emit", "Re-emit a stored report in another format");
    emit->add_option("--report", report_path, "report.json written by 'run'")->required();
    emit->add_option("--format", format, "Output format")
        ->required()
        ->check(CLI::IsMember({"structured", "tabular", "plotdata"}));
    emit->add_option("--out", out_dir, "Output directory (default: next to the report)");

    auto* prompts = app.add_subcommand("prompts", "List every prompt and seed an offline pipeline must cover");
    prompts->add_option("--config", config_path, "Audit configuration (JSON)")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kConfig;
    }

    try {
        if (*run) {
            return run_command(config_path, only, out_dir, format, seed);
        }
        if (*validate) {
            return validate_command(config_path);
        }
        if (*emit) {
            return emit_command(report_path, format, out_dir);
        }
        if (*prompts) {
            return prompts_command(config_path);
        }
    } catch (const ua::ConfigError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kConfig;
    } catch (const ua::AdapterError& e) {
        std::fprintf(stderr, "adapter error: %s\n", e.what());
        return kAdapter;
    } catch (const ua::ProbeAbort& e) {
        std::fprintf(stderr, "%s\n", e.what());
        return kProbe;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kFailure;
    }
    return kFailure;
}
