#include "unlearn_audit/image_probe.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <set>

#include "unlearn_audit/errors.hpp"

namespace unlearn_audit {

void ImageSampleSet::validate() const {
    if (image_embeddings.empty()) {
        throw EmptySample("image sample set for '" + concept_name + "' is empty");
    }
    if (seeds.size() != image_embeddings.size()) {
        throw InvalidInput("image sample set has " + std::to_string(seeds.size()) + " seeds for " +
                           std::to_string(image_embeddings.size()) + " embeddings");
    }
    if (std::set<std::uint64_t>(seeds.begin(), seeds.end()).size() != seeds.size()) {
        throw InvalidInput("image sample set seeds are not distinct");
    }
    for (const auto& e : image_embeddings) {
        if (e.dimension() != image_embeddings.front().dimension()) {
            throw InvalidInput("image sample set mixes embedding dimensions");
        }
    }
}

double image_concept_similarity(const ImageSampleSet& samples, const EmbeddingVector& anchor) {
    if (samples.image_embeddings.empty()) {
        throw EmptySample("image_concept_similarity: no samples");
    }
    double total = 0.0;
    for (const auto& e : samples.image_embeddings) {
        total += cosine(e, anchor);
    }
    return total / static_cast<double>(samples.image_embeddings.size());
}

double per_concept_change(double kind_similarity, double baseline_similarity) {
    return kind_similarity - baseline_similarity;
}

namespace {

std::string safe_component(std::string s) {
    for (char& c : s) {
        if (c == '/' || c == '\\' || c == ':' || c == ' ') {
            c = '_';
        }
    }
    return s;
}

void dump_image(const std::filesystem::path& root, const Concept& c, VariantKind k, std::uint64_t seed,
                const GeneratedImage& image) {
    const auto dir = root / safe_component(c.name()) / std::string(to_string(k));
    std::filesystem::create_directories(dir);
    if (!image.rgb.empty() && image.width > 0 && image.height > 0) {
        std::ofstream out(dir / (std::to_string(seed) + ".ppm"), std::ios::binary);
        out << "P6\n" << image.width << ' ' << image.height << "\n255\n";
        out.write(reinterpret_cast<const char*>(image.rgb.data()), static_cast<std::streamsize>(image.rgb.size()));
        if (!out) {
            throw IoError("failed writing image dump in " + dir.string());
        }
    } else {
        // Opaque images (e.g. the mock) only get their identifier.
        std::ofstream out(dir / (std::to_string(seed) + ".txt"), std::ios::binary);
        out << image.id << '\n';
        if (!out) {
            throw IoError("failed writing image dump in " + dir.string());
        }
    }
}

std::vector<ImageRecord> probe_concept(const Concept& concept_info, DiffusionAdapter& adapter,
                                       const ProbeSettings& settings) {
    const PromptRecord anchor_prompt = build_anchor(concept_info);
    EmbeddingVector anchor;
    try {
        anchor = adapter.encode_text(anchor_prompt);
    } catch (const std::exception& e) {
        throw ProbeAbort("image", concept_info.name(), "anchor", "",
                         "encoding anchor '" + anchor_prompt.text + "' failed: " + e.what());
    }

    std::vector<ImageRecord> out;
    for (VariantKind k : settings.variants) {
        const PromptRecord prompt = build_prompt(concept_info, k, settings.templates);
        ImageSampleSet set{concept_info.name(), k, {}, {}};
        for (std::size_t s = 0; s < settings.samples; ++s) {
            const std::uint64_t seed = settings.base_seed + s;
            try {
                Generation g = adapter.generate(prompt, seed, settings.steps);
                if (settings.image_dump_dir) {
                    dump_image(*settings.image_dump_dir, concept_info, k, seed, g.image);
                }
                set.image_embeddings.push_back(adapter.encode_image(g.image));
            } catch (const ProbeAbort&) {
                throw;
            } catch (const std::exception& e) {
                throw ProbeAbort("image", concept_info.name(), std::string(to_string(k)), std::to_string(seed),
                                 "prompt '" + prompt.text + "': " + e.what());
            }
            set.seeds.push_back(seed);
        }

        ImageRecord r;
        r.concept_name = concept_info.name();
        r.kind = k;
        r.prompt = prompt.text;
        r.seeds = set.seeds;
        try {
            set.validate();
            r.similarity = image_concept_similarity(set, anchor);
            for (const auto& e : set.image_embeddings) {
                r.sample_similarities.push_back(cosine(e, anchor));
                r.embeddings.push_back(e.values);
            }
        } catch (const std::exception& e) {
            throw ProbeAbort("image", concept_info.name(), std::string(to_string(k)), "", e.what());
        }
        out.push_back(std::move(r));
    }
    const auto base = std::find_if(out.begin(), out.end(), [](const ImageRecord& r) {
        return r.kind == VariantKind::Baseline;
    });
    for (auto& r : out) {
        if (r.kind != VariantKind::Baseline) {
            r.change_vs_baseline = per_concept_change(r.similarity, base->similarity);
        }
    }
    return out;
}

}  // namespace

ImageProbeResult run_image_probe(const std::vector<Concept>& concepts, DiffusionAdapter& adapter,
                                 const ProbeSettings& settings) {
    settings.validate();
    if (concepts.empty()) {
        throw EmptySample("image probe: no concepts");
    }
    std::vector<std::vector<ImageRecord>> per_concept(concepts.size());
    const std::size_t workers = adapter.reentrant() ? settings.workers : 1;
    detail::parallel_for(concepts.size(), workers,
                         [&](std::size_t i) { per_concept[i] = probe_concept(concepts[i], adapter, settings); });

    ImageProbeResult result;
    result.samples = settings.samples;
    result.base_seed = settings.base_seed;
    for (auto& c : per_concept) {
        std::move(c.begin(), c.end(), std::back_inserter(result.records));
    }
    for (VariantKind k : settings.variants) {
        std::vector<double> sims, changes;
        for (const auto& r : result.records) {
            if (r.kind == k) {
                sims.push_back(r.similarity);
                if (r.change_vs_baseline) {
                    changes.push_back(*r.change_vs_baseline);
                }
            }
        }
        result.similarity_stats.emplace_back(k, summarize(sims));
        if (k != VariantKind::Baseline) {
            result.change_stats.emplace_back(k, summarize(changes));
        }
    }
    return result;
}

}  // namespace unlearn_audit
