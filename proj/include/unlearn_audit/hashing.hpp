#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace unlearn_audit {

// 64-bit FNV-1a over the raw bytes.
std::uint64_t fnv1a64(std::string_view bytes);

// Lower-case hex, 16 characters. Used as the key of external embedding files.
std::string prompt_hash(std::string_view prompt_text);

// Platform-independent deterministic generator (splitmix64). std::
// distributions are avoided on purpose: their output differs between
// standard library implementations.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next();

    // Uniform in [-1, 1).
    double next_signed_unit();

private:
    std::uint64_t state_;
};

// Unit vector of dimension `dim` seeded from the hash of `key`.
std::vector<double> hashed_unit_vector(std::string_view key, std::size_t dim);

}  // namespace unlearn_audit
