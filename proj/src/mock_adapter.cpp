#include "unlearn_audit/mock_adapter.hpp"

#include <cmath>

#include "unlearn_audit/errors.hpp"
#include "unlearn_audit/hashing.hpp"
#include "unlearn_audit/kernels.hpp"

namespace unlearn_audit {

namespace {

std::string lower(std::string s) {
    for (char& c : s) {
        c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    }
    return s;
}

// Removes the components along each (unit) basis vector, then normalizes.
// Re-draws with a salted key in the unlikely case nothing is left.
std::vector<double> orthogonal_unit(const std::string& key, std::size_t dim,
                                    const std::vector<const std::vector<double>*>& basis) {
    for (int salt = 0;; ++salt) {
        std::vector<double> v = hashed_unit_vector(salt == 0 ? key : key + "#" + std::to_string(salt), dim);
        for (const auto* b : basis) {
            const double proj = kernels::dot(v, *b);
            for (std::size_t i = 0; i < dim; ++i) {
                v[i] -= proj * (*b)[i];
            }
        }
        const double n2 = kernels::squared_norm(v);
        if (n2 > 1e-12) {
            kernels::scale(v, 1.0 / std::sqrt(n2));
            return v;
        }
    }
}

void check_unit_interval(double v, const std::string& key) {
    if (!(v >= 0.0 && v <= 1.0)) {
        throw ConfigError(key, "must lie in [0, 1], got " + std::to_string(v));
    }
}

}  // namespace

double MassSchedule::at(std::size_t s, std::size_t steps) const {
    if (steps <= 1 || is_constant()) {
        return start;
    }
    const double t = static_cast<double>(s) / static_cast<double>(steps - 1);
    return start + (end - start) * t;
}

double MockConfig::text_lambda(VariantKind kind) const {
    auto it = dominance.find(kind);
    return it == dominance.end() ? 1.0 : it->second;
}

double MockConfig::image_lambda(VariantKind kind) const {
    auto it = image_dominance.find(kind);
    return it == image_dominance.end() ? text_lambda(kind) : it->second;
}

MassSchedule MockConfig::schedule(VariantKind kind) const {
    auto it = concept_mass.find(kind);
    return it == concept_mass.end() ? MassSchedule::constant(0.3) : it->second;
}

void MockConfig::validate() const {
    if (dimension < 3) {
        throw ConfigError("mock.dimension", "must be at least 3");
    }
    for (const auto& [k, v] : dominance) {
        check_unit_interval(v, "mock.dominance." + std::string(to_string(k)));
    }
    for (const auto& [k, v] : image_dominance) {
        check_unit_interval(v, "mock.image_dominance." + std::string(to_string(k)));
    }
    if (!(noise >= 0.0) || !std::isfinite(noise)) {
        throw ConfigError("mock.noise", "must be a finite value >= 0");
    }
    check_unit_interval(instruction_mass, "mock.instruction_mass");
    for (VariantKind k : kAllVariants) {
        const MassSchedule m = schedule(k);
        const std::string key = "mock.concept_mass." + std::string(to_string(k));
        check_unit_interval(m.start, key);
        check_unit_interval(m.end, key);
        // Linear schedules peak at an endpoint.
        if (std::max(m.start, m.end) + instruction_mass > 1.0) {
            throw ConfigError(key, "concept mass plus instruction_mass exceeds 1");
        }
    }
}

nlohmann::ordered_json MockConfig::to_json() const {
    nlohmann::ordered_json j;
    j["dimension"] = dimension;
    j["noise"] = noise;
    j["instruction_mass"] = instruction_mass;
    nlohmann::ordered_json dom, img, mass;
    for (VariantKind k : kAllVariants) {
        const std::string name(to_string(k));
        dom[name] = text_lambda(k);
        img[name] = image_lambda(k);
        const MassSchedule m = schedule(k);
        mass[name] = {{"start", m.start}, {"end", m.end}};
    }
    j["dominance"] = dom;
    j["image_dominance"] = img;
    j["concept_mass"] = mass;
    j["instruction_words"] = instruction_words;
    return j;
}

MockConfig reference_preset() {
    MockConfig c;
    c.dimension = 64;
    c.noise = 1e-3;
    c.dominance = {
        {VariantKind::Baseline, 1.0},
        {VariantKind::Unlearn, 0.763},
        {VariantKind::Negation, 0.78},
        {VariantKind::RepeatControl, 0.80},
        {VariantKind::Implicit, 0.75},
    };
    for (VariantKind k : kAllVariants) {
        c.image_dominance[k] = 0.9;
    }
    c.concept_mass = {
        {VariantKind::Baseline, MassSchedule::linear(0.40, 0.20)},
        {VariantKind::Unlearn, MassSchedule::linear(0.396, 0.196)},
        {VariantKind::Negation, MassSchedule::linear(0.397, 0.197)},
        {VariantKind::RepeatControl, MassSchedule::linear(0.40, 0.20)},
        {VariantKind::Implicit, MassSchedule::linear(0.395, 0.195)},
    };
    c.instruction_mass = 0.08;
    return c;
}

double mock_mixture_similarity(double lambda) {
    return lambda / std::sqrt(lambda * lambda + (1.0 - lambda) * (1.0 - lambda));
}

MockAdapter::MockAdapter(MockConfig config) : config_(std::move(config)) {
    config_.validate();
}

std::vector<double> MockAdapter::anchor_direction(const Concept& c) const {
    return hashed_unit_vector("anchor|" + lower(c.name()), config_.dimension);
}

std::vector<double> MockAdapter::instruction_direction(const Concept& c) const {
    std::string key = "instruction|" + lower(c.name());
    for (const auto& w : config_.instruction_words) {
        key += "|" + lower(w);
    }
    const auto a = anchor_direction(c);
    return orthogonal_unit(key, config_.dimension, {&a});
}

std::vector<double> MockAdapter::mixture(const PromptRecord& prompt, double lambda) const {
    const std::size_t d = config_.dimension;
    const auto a = anchor_direction(prompt.concept_info);
    const auto u = instruction_direction(prompt.concept_info);
    const double wa = contains_any_word(prompt.text, prompt.concept_info.words()) ? lambda : 0.0;
    const double wu = 1.0 - lambda;
    std::vector<double> v(d);
    for (std::size_t i = 0; i < d; ++i) {
        v[i] = wa * a[i] + wu * u[i];
    }
    if (wa == 0.0 && wu == 0.0) {
        v = orthogonal_unit("residual|" + prompt.text, d, {&a, &u});
    }
    return v;
}

EmbeddingVector MockAdapter::encode_text(const PromptRecord& prompt) {
    const double lambda = prompt.kind ? config_.text_lambda(*prompt.kind) : 1.0;
    std::vector<double> v = mixture(prompt, lambda);
    if (config_.noise > 0.0) {
        const auto n = hashed_unit_vector("text-noise|" + prompt.text, config_.dimension);
        for (std::size_t i = 0; i < v.size(); ++i) {
            v[i] += config_.noise * n[i];
        }
    }
    return EmbeddingVector::unit(std::move(v));
}

EmbeddingVector MockAdapter::encode_image(const GeneratedImage& image) {
    if (image.payload.size() != config_.dimension) {
        throw AdapterError("mock encode_image: image '" + image.id + "' was not produced by this adapter");
    }
    return EmbeddingVector::unit(image.payload);
}

std::vector<TokenPiece> MockAdapter::tokenize(std::string_view text) {
    return simple_tokenize(text);
}

Generation MockAdapter::generate(const PromptRecord& prompt, std::uint64_t seed, std::size_t steps) {
    if (steps == 0) {
        throw InvalidInput("mock generate: steps must be positive");
    }
    Generation g;

    const double lambda = prompt.kind ? config_.image_lambda(*prompt.kind) : 1.0;
    std::vector<double> v = mixture(prompt, lambda);
    if (config_.noise > 0.0) {
        const auto n = hashed_unit_vector("image-noise|" + prompt.text + "|" + std::to_string(seed), config_.dimension);
        for (std::size_t i = 0; i < v.size(); ++i) {
            v[i] += config_.noise * n[i];
        }
    }
    g.image.id = "mock:" + prompt_hash(prompt.text) + ":" + std::to_string(seed);
    g.image.payload = std::move(v);

    const auto pieces = tokenize(prompt.text);
    const PromptRecord annotated = annotate_spans(prompt, pieces, config_.instruction_words);

    AttentionTrace& t = g.trace;
    t.concept_name = prompt.concept_info.name();
    t.kind = prompt.kind.value_or(VariantKind::Baseline);
    t.tokens.push_back(kStartToken);
    for (const auto& p : pieces) {
        t.tokens.push_back(prompt.text.substr(p.begin, p.end - p.begin));
    }
    t.tokens.push_back(kEndToken);
    for (auto i : annotated.concept_span) {
        t.concept_span.push_back(i + 1);
    }
    for (auto i : annotated.instruction_span) {
        t.instruction_span.push_back(i + 1);
    }
    t.steps = steps;
    t.aggregation = std::string("mock: exact schedule; ") + kAggregationDescription;

    const std::size_t T = t.tokens.size();
    const MassSchedule schedule = config_.schedule(t.kind);
    const double instr_mass = t.instruction_span.empty() ? 0.0 : config_.instruction_mass;
    const std::size_t rest = T - t.concept_span.size() - t.instruction_span.size();

    t.dist.assign(steps * T, 0.0);
    for (std::size_t s = 0; s < steps; ++s) {
        const double concept_mass = t.concept_span.empty() ? 0.0 : schedule.at(s, steps);
        const double residual = 1.0 - concept_mass - instr_mass;
        double* row = t.dist.data() + s * T;
        for (std::size_t i = 0; i < T; ++i) {
            row[i] = residual / static_cast<double>(rest);
        }
        for (auto i : t.concept_span) {
            row[i] = concept_mass / static_cast<double>(t.concept_span.size());
        }
        for (auto i : t.instruction_span) {
            row[i] = instr_mass / static_cast<double>(t.instruction_span.size());
        }
    }
    return g;
}

nlohmann::ordered_json MockAdapter::metadata() const {
    nlohmann::ordered_json j;
    j["name"] = "mock";
    j["description"] = "deterministic closed-form mock pipeline";
    j["embedding"] = "pooled, unit-normalized";
    j["config"] = config_.to_json();
    return j;
}

}  // namespace unlearn_audit
