#include "unlearn_audit/adapter.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <sstream>

#include "unlearn_audit/kernels.hpp"

namespace unlearn_audit {

bool ValidationReport::passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const ValidationCheck& c) { return c.passed; });
}

nlohmann::ordered_json ValidationReport::to_json() const {
    nlohmann::ordered_json out;
    out["passed"] = passed();
    out["checks"] = nlohmann::ordered_json::array();
    for (const auto& c : checks) {
        out["checks"].push_back({{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
    }
    return out;
}

namespace {

class CheckList {
public:
    explicit CheckList(ValidationReport& report) : report_(report) {}

    // Runs `body`; an exception counts as a failure with its message.
    void run(const std::string& name, const std::function<std::optional<std::string>()>& body) {
        ValidationCheck c{name, true, "ok"};
        try {
            if (auto problem = body()) {
                c.passed = false;
                c.detail = *problem;
            }
        } catch (const std::exception& e) {
            c.passed = false;
            c.detail = std::string("threw: ") + e.what();
        }
        report_.checks.push_back(std::move(c));
    }

private:
    ValidationReport& report_;
};

std::optional<std::string> unit_problem(const EmbeddingVector& v, double tol, const std::string& what) {
    if (v.values.empty()) {
        return what + " is empty";
    }
    const double n = v.norm();
    if (!(std::abs(n - 1.0) <= tol)) {
        std::ostringstream os;
        os << what << " has norm " << n << " (tolerance " << tol << ")";
        return os.str();
    }
    return std::nullopt;
}

}  // namespace

ValidationReport validate_capabilities(DiffusionAdapter& adapter, const std::vector<PromptRecord>& probe_prompts,
                                       const ValidationOptions& options) {
    ValidationReport report;
    CheckList checks(report);

    checks.run("probe_prompts", [&]() -> std::optional<std::string> {
        if (probe_prompts.empty()) {
            return "no probe prompts supplied";
        }
        return std::nullopt;
    });
    if (probe_prompts.empty()) {
        return report;
    }

    std::vector<EmbeddingVector> text;
    checks.run("text_determinism", [&]() -> std::optional<std::string> {
        for (const auto& p : probe_prompts) {
            auto a = adapter.encode_text(p);
            auto b = adapter.encode_text(p);
            if (a.values != b.values) {
                return "encode_text differs on repeated call for '" + p.text + "'";
            }
            text.push_back(std::move(a));
        }
        return std::nullopt;
    });
    checks.run("text_unit_norm", [&]() -> std::optional<std::string> {
        for (std::size_t i = 0; i < text.size(); ++i) {
            if (auto p = unit_problem(text[i], options.unit_tolerance, "text embedding of '" + probe_prompts[i].text + "'")) {
                return p;
            }
        }
        return std::nullopt;
    });
    checks.run("text_dimension", [&]() -> std::optional<std::string> {
        for (const auto& v : text) {
            if (v.dimension() != text.front().dimension()) {
                return "text embeddings have differing dimensions";
            }
        }
        return std::nullopt;
    });

    std::vector<Generation> gens;
    checks.run("generate_determinism", [&]() -> std::optional<std::string> {
        for (const auto& p : probe_prompts) {
            auto a = adapter.generate(p, options.seed, options.steps);
            auto b = adapter.generate(p, options.seed, options.steps);
            if (a.image.payload != b.image.payload || a.image.rgb != b.image.rgb || !(a.trace == b.trace)) {
                return "generate differs on repeated call for '" + p.text + "'";
            }
            gens.push_back(std::move(a));
        }
        return std::nullopt;
    });

    std::vector<EmbeddingVector> images;
    checks.run("image_determinism", [&]() -> std::optional<std::string> {
        for (const auto& g : gens) {
            auto a = adapter.encode_image(g.image);
            auto b = adapter.encode_image(g.image);
            if (a.values != b.values) {
                return "encode_image differs on repeated call for image " + g.image.id;
            }
            images.push_back(std::move(a));
        }
        return std::nullopt;
    });
    checks.run("image_unit_norm", [&]() -> std::optional<std::string> {
        for (const auto& v : images) {
            if (auto p = unit_problem(v, options.unit_tolerance, "image embedding")) {
                return p;
            }
        }
        return std::nullopt;
    });
    checks.run("image_text_dimension", [&]() -> std::optional<std::string> {
        if (!images.empty() && !text.empty() && images.front().dimension() != text.front().dimension()) {
            return "image and text embeddings live in different dimensions";
        }
        for (const auto& v : images) {
            if (v.dimension() != images.front().dimension()) {
                return "image embeddings have differing dimensions";
            }
        }
        return std::nullopt;
    });

    checks.run("trace_rows", [&]() -> std::optional<std::string> {
        for (const auto& g : gens) {
            if (g.trace.steps != options.steps) {
                return "trace has " + std::to_string(g.trace.steps) + " steps, requested " +
                       std::to_string(options.steps);
            }
            g.trace.validate(options.row_tolerance);
        }
        return std::nullopt;
    });
    checks.run("trace_spans", [&]() -> std::optional<std::string> {
        for (std::size_t i = 0; i < gens.size(); ++i) {
            const auto& t = gens[i].trace;
            const auto& p = probe_prompts[i];
            if (t.concept_span.empty()) {
                return "trace for '" + p.text + "' has an empty concept span";
            }
            if (p.kind && t.kind != *p.kind) {
                return "trace kind does not match the prompt";
            }
            if (t.concept_name != p.concept_info.name()) {
                return "trace concept '" + t.concept_name + "' does not match the prompt";
            }
            const bool expects_no_instruction =
                p.kind == VariantKind::Baseline || p.kind == VariantKind::RepeatControl;
            if (expects_no_instruction && !t.instruction_span.empty()) {
                return "trace for a " + std::string(to_string(*p.kind)) + " prompt has instruction tokens";
            }
        }
        return std::nullopt;
    });
    return report;
}

}  // namespace unlearn_audit
