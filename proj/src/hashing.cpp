#include "unlearn_audit/hashing.hpp"

#include <cmath>
#include <cstdio>

#include "unlearn_audit/errors.hpp"
#include "unlearn_audit/kernels.hpp"

namespace unlearn_audit {

std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string prompt_hash(std::string_view prompt_text) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(fnv1a64(prompt_text)));
    return buf;
}

std::uint64_t SplitMix64::next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

double SplitMix64::next_signed_unit() {
    // 53 random mantissa bits -> [0, 1), then affine map.
    const double u = static_cast<double>(next() >> 11) * 0x1.0p-53;
    return 2.0 * u - 1.0;
}

std::vector<double> hashed_unit_vector(std::string_view key, std::size_t dim) {
    if (dim == 0) {
        throw InvalidInput("hashed_unit_vector: dimension must be positive");
    }
    SplitMix64 rng(fnv1a64(key));
    std::vector<double> v(dim);
    double n2 = 0.0;
    // Redraw on the (practically impossible) all-zero draw.
    while (n2 == 0.0) {
        for (double& x : v) {
            x = rng.next_signed_unit();
        }
        n2 = kernels::squared_norm(v);
    }
    kernels::scale(v, 1.0 / std::sqrt(n2));
    return v;
}

}  // namespace unlearn_audit
