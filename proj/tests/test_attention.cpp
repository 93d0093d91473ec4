#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "unlearn_audit/attention.hpp"
#include "unlearn_audit/attention_probe.hpp"
#include "unlearn_audit/errors.hpp"
#include "fakes.hpp"

using namespace unlearn_audit;

namespace {

AttentionTrace make_trace(std::vector<std::vector<double>> rows, std::vector<std::uint32_t> concept_span,
                          std::vector<std::uint32_t> instruction_span = {}, std::string concept_name = "panda") {
    AttentionTrace t;
    t.concept_name = std::move(concept_name);
    t.steps = rows.size();
    for (std::size_t i = 0; i < rows.front().size(); ++i) {
        t.tokens.push_back("t" + std::to_string(i));
    }
    for (const auto& r : rows) {
        t.dist.insert(t.dist.end(), r.begin(), r.end());
    }
    t.concept_span = std::move(concept_span);
    t.instruction_span = std::move(instruction_span);
    return t;
}

std::vector<double> query_mean(const oracle::QueryAttention& a) {
    return mean_rows(a.probs, a.tokens);
}

}  // namespace

TEST_CASE("attention_mass examples") {
    const std::vector<double> row{0.3, 0.45, 0.25};
    CHECK(attention_mass(row, std::vector<std::uint32_t>{1}) == doctest::Approx(0.45));
    CHECK(attention_mass(row, std::vector<std::uint32_t>{0, 2}) == doctest::Approx(0.55));
    CHECK(attention_mass(row, std::vector<std::uint32_t>{}) == 0.0);
    CHECK(attention_mass(row, std::vector<std::uint32_t>{0, 1, 2}) == doctest::Approx(1.0));
}

TEST_CASE("attention_mass error paths") {
    const std::vector<double> row{0.3, 0.45, 0.25};
    CHECK_THROWS_AS(attention_mass(row, std::vector<std::uint32_t>{3}), InvalidInput);
    CHECK_THROWS_AS(attention_mass(row, std::vector<std::uint32_t>{1, 1}), InvalidInput);
    CHECK_THROWS_AS(attention_mass(std::vector<double>{0.3, 0.45, 0.2}, std::vector<std::uint32_t>{1}),
                    MalformedTrace);
    CHECK_THROWS_AS(attention_mass(std::vector<double>{1.2, -0.2}, std::vector<std::uint32_t>{0}), MalformedTrace);
}

TEST_CASE("AUC of a linear schedule") {
    const auto t = make_trace({{0.4, 0.6}, {0.3, 0.7}, {0.2, 0.8}}, {0});
    const auto curve = mass_curve(t, t.concept_span);
    REQUIRE(curve.size() == 3);
    CHECK(curve[0] == doctest::Approx(0.4));
    CHECK(curve[2] == doctest::Approx(0.2));
    CHECK(auc(curve) == doctest::Approx(0.3));
    CHECK_THROWS_AS(auc(std::vector<double>{}), EmptySample);
}

TEST_CASE("delta_auc subtracts the baseline AUC using each trace's own span") {
    const auto base = make_trace({{0.4, 0.6}, {0.2, 0.8}}, {0});
    auto kind = make_trace({{0.1, 0.2, 0.7}, {0.1, 0.1, 0.8}}, {1}, {0});
    kind.kind = VariantKind::Unlearn;
    CHECK(delta_auc(kind, base) == doctest::Approx(0.15 - 0.3));
    const auto other = make_trace({{0.4, 0.6}, {0.2, 0.8}}, {0}, {}, "cat");
    CHECK_THROWS_AS(delta_auc(other, base), InvalidInput);
}

TEST_CASE("trace validation") {
    auto ok = make_trace({{0.5, 0.5}}, {0});
    ok.validate();

    auto near = make_trace({{0.5, 0.49995}}, {0});
    near.validate();
    auto off = make_trace({{0.5, 0.4989}}, {0});
    CHECK_THROWS_AS(off.validate(), MalformedTrace);

    auto neg = make_trace({{1.1, -0.1}}, {0});
    CHECK_THROWS_AS(neg.validate(), MalformedTrace);

    auto both = make_trace({{0.5, 0.5}}, {0}, {0});
    CHECK_THROWS_AS(both.validate(), MalformedTrace);
    auto unsorted = make_trace({{0.2, 0.3, 0.5}}, {2, 1});
    CHECK_THROWS_AS(unsorted.validate(), MalformedTrace);
    auto range = make_trace({{0.5, 0.5}}, {2});
    CHECK_THROWS_AS(range.validate(), MalformedTrace);

    auto shape = make_trace({{0.5, 0.5}}, {0});
    shape.dist.push_back(0.0);
    CHECK_THROWS_AS(shape.validate(), MalformedTrace);
    auto nosteps = make_trace({{0.5, 0.5}}, {0});
    nosteps.steps = 0;
    nosteps.dist.clear();
    CHECK_THROWS_AS(nosteps.validate(), MalformedTrace);
}

TEST_CASE("mass from aggregated rows matches the brute-force oracle") {
    std::mt19937_64 rng(11);
    for (int iter = 0; iter < 200; ++iter) {
        const std::size_t Q = 1 + rng() % 16, T = 1 + rng() % 8, S = 1 + rng() % 10;
        std::vector<std::uint32_t> set;
        for (std::uint32_t t = 0; t < T; ++t) {
            if (rng() % 2) {
                set.push_back(t);
            }
        }
        std::vector<oracle::QueryAttention> steps;
        AttentionTrace trace;
        trace.steps = S;
        trace.tokens.assign(T, "x");
        for (std::size_t s = 0; s < S; ++s) {
            steps.push_back(oracle::random_query_attention(rng, Q, T));
            const auto r = query_mean(steps.back());
            trace.dist.insert(trace.dist.end(), r.begin(), r.end());
            CHECK(std::abs(attention_mass(r, set) - oracle::brute_force_mass(steps.back(), set)) <= 1e-9);
        }
        CHECK(std::abs(auc(mass_curve(trace, set)) - oracle::brute_force_auc(steps, set)) <= 1e-9);
    }
}

TEST_CASE("mass is additive, monotone and bounded") {
    std::mt19937_64 rng(12);
    for (int iter = 0; iter < 300; ++iter) {
        const std::size_t T = 2 + rng() % 10;
        const auto r = query_mean(oracle::random_query_attention(rng, 1 + rng() % 8, T));
        std::vector<std::uint32_t> a, b, ab;
        for (std::uint32_t t = 0; t < T; ++t) {
            switch (rng() % 3) {
                case 0: a.push_back(t); ab.push_back(t); break;
                case 1: b.push_back(t); ab.push_back(t); break;
                default: break;
            }
        }
        const double ma = attention_mass(r, a), mb = attention_mass(r, b), mab = attention_mass(r, ab);
        CHECK(std::abs(mab - (ma + mb)) <= 1e-12);
        CHECK(mab >= ma - 1e-12);
        CHECK(mab >= mb - 1e-12);
        CHECK(ma >= 0.0);
        CHECK(mab <= 1.0 + 1e-12);
    }
}

TEST_CASE("aggregate_step weighs layers equally whatever their query count") {
    std::mt19937_64 rng(5);
    const std::size_t T = 4;
    const auto small = oracle::random_query_attention(rng, 2 * 4, T);   // 2 heads x 4 queries
    const auto large = oracle::random_query_attention(rng, 2 * 64, T);  // 2 heads x 64 queries
    std::vector<LayerAttention> layers{{2, 4, T, small.probs}, {2, 64, T, large.probs}};
    const auto agg = aggregate_step(layers);
    for (std::uint32_t t = 0; t < T; ++t) {
        const double expect = 0.5 * (oracle::brute_force_mass(small, {t}) + oracle::brute_force_mass(large, {t}));
        CHECK(std::abs(agg[t] - expect) <= 1e-12);
    }
    double total = 0.0;
    for (double x : agg) {
        total += x;
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
    CHECK_THROWS_AS(aggregate_step(std::vector<LayerAttention>{}), InvalidInput);
    layers[1].tokens = 3;
    CHECK_THROWS_AS(aggregate_step(layers), InvalidInput);
    CHECK_THROWS_AS(mean_rows(std::vector<double>{0.5, 0.5, 1.0}, 2), InvalidInput);
}

TEST_CASE("attention probe on the mock reproduces the configured schedule") {
    MockConfig cfg;
    cfg.concept_mass[VariantKind::Baseline] = MassSchedule::linear(0.4, 0.2);
    cfg.concept_mass[VariantKind::Unlearn] = MassSchedule::linear(0.396, 0.196);
    cfg.instruction_mass = 0.08;
    MockAdapter mock(cfg);
    ProbeSettings settings;
    settings.steps = 3;
    settings.base_seed = 9;
    const auto r = run_attention_probe({Concept("Vincent van Gogh"), Concept("panda")}, mock, settings);
    CHECK(r.steps == 3);
    CHECK(r.seed == 9);
    REQUIRE(r.records.size() == 10);
    REQUIRE(r.curves.size() == 10);
    for (std::size_t i = 0; i < r.records.size(); ++i) {
        const auto& rec = r.records[i];
        const auto& c = r.curves[i];
        const MassSchedule m = cfg.schedule(rec.kind);
        CHECK(rec.auc_concept == doctest::Approx(m.mean()).epsilon(1e-12));
        CHECK(c.concept_mass[1] == doctest::Approx((m.start + m.end) / 2).epsilon(1e-12));
        if (rec.kind == VariantKind::Unlearn) {
            CHECK(rec.auc_instruction == doctest::Approx(0.08).epsilon(1e-12));
            CHECK(*rec.delta_auc_vs_baseline == doctest::Approx(-0.004).epsilon(1e-9));
            CHECK(c.instruction_span.size() == 2);
        }
        if (rec.kind == VariantKind::Baseline) {
            CHECK(rec.auc_instruction == 0.0);
            CHECK(c.tokens.front() == MockAdapter::kStartToken);
            CHECK(c.tokens.back() == MockAdapter::kEndToken);
        }
    }
}

TEST_CASE("attention probe aborts on a broken trace") {
    fakes::HookedAdapter adapter;
    adapter.on_generate = [](const PromptRecord& p, std::uint64_t, Generation& g) {
        if (p.kind == VariantKind::Negation) {
            g.trace.dist[0] += 0.01;
        }
    };
    ProbeSettings settings;
    settings.steps = 2;
    try {
        run_attention_probe({Concept("panda")}, adapter, settings);
        FAIL("expected ProbeAbort");
    } catch (const ProbeAbort& e) {
        CHECK(e.variant() == "negation");
        CHECK(e.seed() == "0");
    }

    fakes::HookedAdapter missing;
    missing.on_generate = [](const PromptRecord&, std::uint64_t, Generation& g) { g.trace = AttentionTrace{}; };
    CHECK_THROWS_AS(run_attention_probe({Concept("panda")}, missing, settings), ProbeAbort);

    fakes::HookedAdapter steps;
    steps.on_generate = [](const PromptRecord&, std::uint64_t, Generation& g) {
        g.trace.steps = 1;
        g.trace.dist.resize(g.trace.tokens.size());
    };
    CHECK_THROWS_AS(run_attention_probe({Concept("panda")}, steps, settings), ProbeAbort);
}
