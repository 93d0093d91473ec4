#pragma once

#include <cstdint>
#include <exception>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "unlearn_audit/prompt_suite.hpp"

namespace unlearn_audit {

// Protocol parameters shared by the three probes.
struct ProbeSettings {
    std::vector<VariantKind> variants{kAllVariants.begin(), kAllVariants.end()};
    PromptTemplates templates;
    std::vector<std::string> instruction_words = default_instruction_words();
    // Variants whose prompts are ablated by the text probe.
    std::vector<VariantKind> ablation_variants{VariantKind::Unlearn};
    std::size_t samples = 8;
    std::size_t steps = 50;
    std::uint64_t base_seed = 0;
    // Concurrent workers per probe; capped to 1 for non-reentrant adapters.
    std::size_t workers = 1;
    // When set, the image probe writes every generated image below it.
    std::optional<std::filesystem::path> image_dump_dir;

    // Throws InvalidInput when Baseline is missing, a variant repeats, or
    // samples / steps are zero.
    void validate() const;
};

namespace detail {

// Runs body(i) for i in [0, n) on up to `workers` threads. The first
// exception (lowest index) is rethrown after all workers stop.
template <class Body>
void parallel_for(std::size_t n, std::size_t workers, Body&& body);

}  // namespace detail

}  // namespace unlearn_audit

#include <atomic>
#include <mutex>
#include <thread>

namespace unlearn_audit::detail {

template <class Body>
void parallel_for(std::size_t n, std::size_t workers, Body&& body) {
    if (workers <= 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) {
            body(i);
        }
        return;
    }
    std::atomic<std::size_t> next{0};
    std::mutex mu;
    std::size_t failed_at = n;
    std::exception_ptr failure;
    auto worker = [&]() {
        for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) {
            try {
                body(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(mu);
                if (i < failed_at) {
                    failed_at = i;
                    failure = std::current_exception();
                }
            }
        }
    };
    std::vector<std::thread> pool;
    const std::size_t count = std::min(workers, n);
    pool.reserve(count);
    for (std::size_t w = 0; w < count; ++w) {
        pool.emplace_back(worker);
    }
    for (auto& t : pool) {
        t.join();
    }
    if (failure) {
        std::rethrow_exception(failure);
    }
}

}  // namespace unlearn_audit::detail
