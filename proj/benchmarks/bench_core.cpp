#include <benchmark/benchmark.h>

#include <random>
#include <string>
#include <vector>

#include "cotaudit/analytics.hpp"
#include "cotaudit/audit.hpp"
#include "cotaudit/scoring.hpp"
#include "cotaudit/trace.hpp"

using namespace cotaudit;

namespace {

std::string words(std::mt19937_64& rng, int n) {
    static const std::vector<std::string> vocab = {"the", "capital", "of", "France", "is", "Paris", "energy",
                                                   "mass", "sum", "prime", "because", "therefore", "42"};
    std::string s;
    for (int i = 0; i < n; ++i) s += (i ? " " : "") + vocab[rng() % vocab.size()];
    return s;
}

std::vector<AuditRecord> records(std::size_t n) {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const TaskCategory cats[] = {TaskCategory::general_knowledge(), TaskCategory::scientific_reasoning(),
                                 TaskCategory::mathematical_logic()};
    std::vector<AuditRecord> out;
    for (std::size_t i = 0; i < n; ++i) {
        AuditRecord r;
        r.audit_id = "audit_" + std::to_string(i);
        r.query = Query{"q" + std::to_string(i), "q", cats[i % 3]};
        ReasoningTrace t{r.query.id, {}, {"a"}};
        for (std::size_t k = 0; k < 1 + i % 7; ++k) t.steps.push_back({k, "s"});
        r.original_trace = t;
        InterventionOutcome o;
        o.strength = unit(rng);
        r.intervention = o;
        SimilarityResult sim;
        sim.score = unit(rng);
        r.similarity = sim;
        r.phi = 1.0 - sim.score;
        r.violation = detect_violation(sim.score, o.strength, r.thresholds);
        out.push_back(std::move(r));
    }
    return out;
}

}  // namespace

static void BM_TokenSetF1(benchmark::State& state) {
    std::mt19937_64 rng(1);
    const auto a = words(rng, static_cast<int>(state.range(0)));
    const auto b = words(rng, static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(token_set_f1(a, b));
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_TokenSetF1)->Range(8, 1024)->Complexity();

static void BM_SegmentTrace(benchmark::State& state) {
    std::mt19937_64 rng(2);
    std::vector<ReasoningStep> steps;
    for (int i = 0; i < state.range(0); ++i) steps.push_back({static_cast<std::size_t>(i), words(rng, 12)});
    const auto text = render_trace(steps, {words(rng, 6)});
    for (auto _ : state) benchmark::DoNotOptimize(segment_trace(text));
    state.SetBytesProcessed(static_cast<int64_t>(state.iterations() * text.size()));
}
BENCHMARK(BM_SegmentTrace)->Arg(3)->Arg(12)->Arg(64);

static void BM_CategoryReport(benchmark::State& state) {
    const auto rs = records(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(category_report(rs));
    state.SetItemsProcessed(static_cast<int64_t>(state.iterations() * rs.size()));
}
BENCHMARK(BM_CategoryReport)->Arg(75)->Arg(10000);

static void BM_RecordJsonRoundTrip(benchmark::State& state) {
    const auto rs = records(1);
    for (auto _ : state) benchmark::DoNotOptimize(record_from_json(to_json(rs[0])).phi);
}
BENCHMARK(BM_RecordJsonRoundTrip);
BENCHMARK_MAIN();
