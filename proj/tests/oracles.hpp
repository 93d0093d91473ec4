#pragma once

// Test-only reference computations. Nothing here calls into the library's
// metric code, so the tests compare two independent routes.

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace oracle {

// Per-query attention of one step: queries x tokens, each row a softmax.
struct QueryAttention {
    std::size_t queries = 0;
    std::size_t tokens = 0;
    std::vector<double> probs;

    double at(std::size_t q, std::size_t t) const { return probs[q * tokens + t]; }
};

inline QueryAttention random_query_attention(std::mt19937_64& rng, std::size_t queries, std::size_t tokens) {
    std::normal_distribution<double> logit(0.0, 2.0);
    QueryAttention a{queries, tokens, std::vector<double>(queries * tokens)};
    for (std::size_t q = 0; q < queries; ++q) {
        long double z = 0.0L;
        for (std::size_t t = 0; t < tokens; ++t) {
            a.probs[q * tokens + t] = std::exp(logit(rng));
            z += a.probs[q * tokens + t];
        }
        for (std::size_t t = 0; t < tokens; ++t) {
            a.probs[q * tokens + t] = static_cast<double>(a.probs[q * tokens + t] / z);
        }
    }
    return a;
}

// (1/|Q|) sum_q sum_{i in I} A(q, i), accumulated in long double.
inline double brute_force_mass(const QueryAttention& a, const std::vector<std::uint32_t>& token_set) {
    long double total = 0.0L;
    for (std::size_t q = 0; q < a.queries; ++q) {
        for (std::uint32_t i : token_set) {
            total += a.at(q, i);
        }
    }
    return static_cast<double>(total / static_cast<long double>(a.queries));
}

// (1/S) sum_s m_I(s)
inline double brute_force_auc(const std::vector<QueryAttention>& steps, const std::vector<std::uint32_t>& token_set) {
    long double total = 0.0L;
    for (const auto& s : steps) {
        total += brute_force_mass(s, token_set);
    }
    return static_cast<double>(total / static_cast<long double>(steps.size()));
}

inline double naive_cosine(const std::vector<double>& u, const std::vector<double>& v) {
    long double uv = 0.0L, uu = 0.0L, vv = 0.0L;
    for (std::size_t i = 0; i < u.size(); ++i) {
        uv += static_cast<long double>(u[i]) * v[i];
        uu += static_cast<long double>(u[i]) * u[i];
        vv += static_cast<long double>(v[i]) * v[i];
    }
    return static_cast<double>(uv / (std::sqrt(uu) * std::sqrt(vv)));
}

// Similarity to the anchor of normalize(lambda * a + (1 - lambda) * u) for
// orthonormal a, u.
inline double mixture_similarity(double lambda) {
    return lambda / std::hypot(lambda, 1.0 - lambda);
}

inline std::vector<double> random_vector(std::mt19937_64& rng, std::size_t dim) {
    std::normal_distribution<double> g(0.0, 1.0);
    std::vector<double> v(dim);
    for (auto& x : v) {
        x = g(rng);
    }
    return v;
}

}  // namespace oracle
